//! Acceptance run: one line per criterion, then a single assertion so every
//! line is printed even when an early criterion fails.
//!
//! Run with `cargo test -p heisenphase-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;

use heisenphase::fsb::gaussian_vacuum;
use heisenphase::grid::io;
use heisenphase::{Field, GridSpec, Params, C64};
use heisenphase_cli::{run_verify, Report, ScenarioConfig, Suite, SuiteStatus};

const BIN: &str = env!("CARGO_BIN_EXE_heisenphase");

/// Identity anchors a check name must start with, per suite.
fn anchors(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Groups => &["homomorphism", "left-right commutation"],
        Suite::Sesqui => &["sesqui-unitarity"],
        Suite::Reconstruction => &["reconstruction"],
        Suite::Fourier => &["symplectic-fourier", "fourier-intertwining"],
        Suite::Projection => &["fsb-projection"],
        Suite::Ladders => &["ladder commutator", "vacuum annihilation", "mixed-gaussian annihilation", "lattice orthonormality"],
        Suite::Twisted => &["twisted-convolution"],
        Suite::Guillemin => &["guillemin-equivalence"],
        Suite::Moyal => &["moyal"],
        Suite::Twosided => &["two-sided", "Ξ̃-reduction", "schwartz round-trip", "trace consistency"],
        Suite::CrossToeplitz => &["cross-toeplitz"],
        Suite::Uncertainty => &["heisenberg-kennard"],
    }
}

fn title(suite: Suite) -> &'static str {
    match suite {
        Suite::Groups => "group and representation laws",
        Suite::Sesqui => "orthogonality relation",
        Suite::Reconstruction => "reconstruction",
        Suite::Fourier => "symplectic Fourier transform",
        Suite::Projection => "FSB projection",
        Suite::Ladders => "ladder calculus",
        Suite::Twisted => "twisted convolution",
        Suite::Guillemin => "Guillemin equivalence",
        Suite::Moyal => "Moyal series",
        Suite::Twosided => "two-sided machinery",
        Suite::CrossToeplitz => "cross-Toeplitz operators",
        Suite::Uncertainty => "uncertainty",
    }
}

fn suite_line(report: &Report, suite: Suite) -> (bool, String) {
    let Some(outcome) = report.suites.iter().find(|s| s.suite == suite) else {
        return (false, "suite missing from report".into());
    };
    match &outcome.status {
        SuiteStatus::Skipped { reason } => return (false, format!("skipped: {reason}")),
        SuiteStatus::Error { message } => return (false, format!("error: {message}")),
        SuiteStatus::Ran => {}
    }
    let failed: Vec<String> = outcome
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({:.3e} > {:.0e})", c.check, c.residual, c.tolerance))
        .collect();
    let worst = outcome
        .checks
        .iter()
        .filter(|c| c.tolerance < 1.0)
        .map(|c| c.residual / c.tolerance)
        .fold(0.0, f64::max);
    if failed.is_empty() && !outcome.checks.is_empty() {
        (true, format!("{} checks, worst residual/tolerance {worst:.2e}", outcome.checks.len()))
    } else {
        (false, format!("failed: {}", failed.join("; ")))
    }
}

fn run_bin(args: &[&str], dir: &Path) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    matches!((std::fs::read(a), std::fs::read(b)), (Ok(x), Ok(y)) if x == y)
}

/// The CLI contract: deterministic reports, exit codes, anchored names.
fn cli_contract(report: &Report) -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut problems = Vec::new();

    let cheap = "groups,reconstruction,uncertainty";
    let (c1, _, _) = run_bin(&["verify", "--suites", cheap, "--out", "a"], d);
    let (c2, _, _) = run_bin(&["verify", "--suites", cheap, "--out", "b"], d);
    if (c1, c2) != (0, 0) {
        problems.push(format!("passing verify exited {c1}/{c2}"));
    }
    for f in ["report.json", "report.txt"] {
        if !same_bytes(&d.join("a").join(f), &d.join("b").join(f)) {
            problems.push(format!("{f} differs between reruns"));
        }
    }

    let (code, _, _) = run_bin(&["verify", "--suites", ""], d);
    if code != 0 {
        problems.push(format!("empty suite list exited {code}"));
    }
    let (code, out, _) = run_bin(&["verify", "--suites", "moyal", "--tol", "strict"], d);
    if code != 1 || !out.contains("failed:") {
        problems.push(format!("strict tier exited {code} without listing failures"));
    }

    std::fs::write(d.join("bad.csv"), "coord_1,re,im\n0.0,1.0\n").unwrap();
    let (code, _, err) = run_bin(&["fsb", "--input", "bad.csv", "--out", "f"], d);
    if code != 2 || !err.contains("line 2") {
        problems.push(format!("malformed CSV exited {code}: {err}"));
    }
    let (code, _, _) = run_bin(&["verify", "--extent", "3"], d);
    if code != 3 {
        problems.push(format!("non-self-dual extent exited {code}"));
    }

    let p = Params::default();
    let config = GridSpec::self_dual(2, 32, 1.0).unwrap().wigner_config().unwrap();
    io::write_csv(&gaussian_vacuum(1.0, &p, &config).unwrap(), &d.join("vac.csv")).unwrap();
    let (c1, _, _) = run_bin(&["fsb", "--input", "vac.csv", "--tau", "1", "--out", "f1"], d);
    let (c2, _, _) = run_bin(&["fsb", "--input", "vac.csv", "--tau", "1", "--out", "f2"], d);
    if (c1, c2) != (0, 0) || !same_bytes(&d.join("f1/fsb.csv"), &d.join("f2/fsb.csv")) {
        problems.push("fsb reruns are not byte-identical".into());
    }

    let phase = GridSpec::self_dual(2, 32, 1.0).unwrap();
    io::write_csv(&Field::from_fn(phase, |_| C64::new(1.0, 0.0)), &d.join("one.csv")).unwrap();
    let wide = Field::from_fn(phase, |q| C64::new((-(q[0] * q[0] + q[1] * q[1]) / 6.0).exp(), 0.0));
    io::write_csv(&wide, &d.join("wide.csv")).unwrap();
    let (code, _, err) = run_bin(&["toeplitz", "--symbol", "one.csv", "--input", "wide.csv", "--tau", "1", "--sigma", "1"], d);
    if code != 3 || !err.contains("membership residual") {
        problems.push(format!("non-member input exited {code}: {err}"));
    }

    for outcome in &report.suites {
        for c in &outcome.checks {
            if !anchors(outcome.suite).iter().any(|a| c.check.starts_with(a)) {
                problems.push(format!("check `{}` lacks an identity anchor", c.check));
            }
        }
    }
    let mut names: Vec<&str> = report.checks().map(|c| c.check.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        problems.push("duplicate check names".into());
    }

    if problems.is_empty() {
        (true, "deterministic reruns, exit codes 0/1/2/3, anchored check names".into())
    } else {
        (false, problems.join("; "))
    }
}

#[test]
fn acceptance() {
    let start = std::time::Instant::now();
    let report = run_verify(&ScenarioConfig::default()).expect("default scenario is valid");
    let mut lines = Vec::new();
    for (i, suite) in Suite::ALL.into_iter().enumerate() {
        let (ok, detail) = suite_line(&report, suite);
        lines.push((i + 1, title(suite), ok, detail));
    }
    let (ok, detail) = cli_contract(&report);
    lines.push((13, "command-line harness", ok, detail));
    for (n, name, ok, detail) in &lines {
        println!("criterion {n:>2} [{}] {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("acceptance runtime {elapsed:.1} s");
    let failed: Vec<usize> = lines.iter().filter(|l| !l.2).map(|l| l.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
