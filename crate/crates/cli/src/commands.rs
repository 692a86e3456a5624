//! File-based commands: `fsb`, `toeplitz` and `symbol`.
//!
//! Each writes its data next to a JSON metadata file in the output
//! directory. Outputs depend only on the inputs and parameters, so reruns
//! are byte-identical.

use std::path::{Path, PathBuf};

use heisenphase::calculus::{cross_toeplitz_apply, TOEPLITZ_MEMBERSHIP_TOL};
use heisenphase::fsb::membership_residual;
use heisenphase::grid::io;
use heisenphase::transforms::{fsb_transform, CalibrationRecord};
use heisenphase::twosided::{
    cross_toeplitz_kernel, cross_toeplitz_pdo_symbol, cross_toeplitz_symbol_fsb, doubled_pdo_symbol, in_doubled_chart,
    DENSE_TWOSIDED_CAP,
};
use heisenphase::{Field, GridSpec, Params};
use serde::Serialize;

use crate::report::{round_sig, write_file};
use crate::CliError;

/// Agreement required of the three `a#` evaluations.
pub const SYMBOL_PATH_TOL: f64 = 1e-6;

fn read_field(path: &Path, dim: usize, what: &str) -> Result<Field, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let f = io::parse_csv(&text).map_err(|e| match e {
        heisenphase::Error::Parse { line, msg } => CliError::Parse { line, msg: format!("{}: {msg}", path.display()) },
        other => other.into(),
    })?;
    if f.spec.dim != dim {
        return Err(CliError::Parse {
            line: 1,
            msg: format!("{}: {what} must be {dim}-dimensional, found {}", path.display(), f.spec.dim),
        });
    }
    Ok(f)
}

fn prepare_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn write_csv(f: &Field, path: &Path) -> Result<(), CliError> {
    write_file(path, &io::to_csv_string(f))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    write_file(path, &s)
}

fn params(hbar: f64, tau: f64, sigma: f64, upsilon: f64) -> Result<Params, CliError> {
    Params::new(hbar, tau, sigma, upsilon).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct FsbMeta {
    pub input: String,
    pub config_grid: GridSpec,
    pub phase_grid: GridSpec,
    pub tau: f64,
    pub hbar: f64,
    pub calibration: CalibrationRecord,
    /// Samples zeroed by the peeling overflow guard.
    pub flagged: usize,
}

/// Peeled FSB transform of a configuration-space function.
pub fn run_fsb(input: &Path, tau: f64, hbar: f64, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let f = read_field(input, 1, "the input")?;
    let p = params(hbar, tau, tau, 1.0)?;
    let peeled = fsb_transform(&f, tau, &p)?;
    let phase = peeled.field.spec;
    let meta = FsbMeta {
        input: input.display().to_string(),
        config_grid: f.spec,
        phase_grid: phase,
        tau,
        hbar,
        calibration: CalibrationRecord::measure(&phase, tau, &p)?,
        flagged: peeled.flagged.len(),
    };
    prepare_out(out)?;
    let (csv, json) = (out.join("fsb.csv"), out.join("fsb.json"));
    write_csv(&peeled.field, &csv)?;
    write_json(&meta, &json)?;
    Ok(vec![csv, json])
}

#[derive(Debug, Serialize)]
pub struct ToeplitzMeta {
    pub symbol: String,
    pub input: String,
    pub grid: GridSpec,
    pub tau: f64,
    pub sigma: f64,
    pub hbar: f64,
    /// `‖P_τF − F‖/‖F‖` of the input.
    pub input_membership: f64,
    pub membership_limit: f64,
    /// `‖P_ς G − G‖/‖G‖` of the output.
    pub output_membership: f64,
    /// `‖T_ψF − F‖/‖F‖`; small for `ψ ≡ 1`, `τ = ς`.
    pub relative_change: f64,
}

/// Applies the cross-Toeplitz operator `T_ψ: F_τ → F_ς`.
pub fn run_toeplitz(
    symbol: &Path,
    input: &Path,
    tau: f64,
    sigma: f64,
    hbar: f64,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let psi = read_field(symbol, 2, "the symbol")?;
    let big_f = read_field(input, 2, "the input")?;
    let p = params(hbar, tau, sigma, 1.0)?;
    if !psi.spec.same_as(&big_f.spec) {
        return Err(CliError::Precondition("symbol and input must share one phase grid".into()));
    }
    let membership = membership_residual(&big_f, tau, &p)?;
    if membership > TOEPLITZ_MEMBERSHIP_TOL {
        return Err(CliError::Precondition(format!(
            "input is not in F_{tau}: membership residual {membership:.3e} exceeds {TOEPLITZ_MEMBERSHIP_TOL:.0e}"
        )));
    }
    let g = cross_toeplitz_apply(&psi, &big_f, tau, sigma, &p)?;
    let meta = ToeplitzMeta {
        symbol: symbol.display().to_string(),
        input: input.display().to_string(),
        grid: g.spec,
        tau,
        sigma,
        hbar,
        input_membership: round_sig(membership),
        membership_limit: TOEPLITZ_MEMBERSHIP_TOL,
        output_membership: round_sig(membership_residual(&g, sigma, &p)?),
        relative_change: round_sig(g.rel_dist(&big_f)?),
    };
    prepare_out(out)?;
    let (csv, json) = (out.join("toeplitz.csv"), out.join("toeplitz.json"));
    write_csv(&g, &csv)?;
    write_json(&meta, &json)?;
    Ok(vec![csv, json])
}

#[derive(Debug, Serialize)]
pub struct SymbolMeta {
    pub symbol: String,
    pub grid: GridSpec,
    pub tau: f64,
    pub sigma: f64,
    pub hbar: f64,
    pub upsilon: f64,
    /// `max|a#_kernel − a#_integral| / max|a#_integral|`.
    pub kernel_vs_integral: f64,
    /// Same for the FSB form, over the sampled points.
    pub fsb_vs_integral: f64,
    pub fsb_points: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Doubled symbol `a#` of a cross-Toeplitz operator by three routes; writes
/// the integral route to `symbol.bin` and the agreement to `symbol.json`.
/// Returns the metadata so the caller can map `pass` to an exit code.
pub fn run_symbol(
    symbol: &Path,
    tau: f64,
    sigma: f64,
    hbar: f64,
    upsilon: Option<f64>,
    out: &Path,
) -> Result<(Vec<PathBuf>, SymbolMeta), CliError> {
    let psi = read_field(symbol, 2, "the symbol")?;
    let n = psi.spec.points;
    if n > DENSE_TWOSIDED_CAP {
        return Err(CliError::Precondition(format!(
            "doubled symbols live on R^4: grid N = {n} exceeds the cap {DENSE_TWOSIDED_CAP}"
        )));
    }
    let upsilon = upsilon.unwrap_or((tau * sigma).sqrt());
    let p = params(hbar, tau, sigma, upsilon)?;
    let via_kernel = doubled_pdo_symbol(&cross_toeplitz_kernel(&psi, tau, sigma, &p)?, &p)?;
    let integral = cross_toeplitz_pdo_symbol(&psi, tau, sigma, &p)?;
    let scale = integral.values.max_abs().max(f64::MIN_POSITIVE);
    let spec = integral.values.spec;
    let c = spec.coords();
    let mut idx = [0usize; 4];
    // A deterministic spread of in-chart sample points.
    let stride = (spec.len() / 256).max(1) | 1;
    let picks: Vec<usize> = (0..spec.len())
        .step_by(stride)
        .filter(|&k| {
            spec.unravel(k, &mut idx);
            in_doubled_chart(&psi.spec, upsilon, c[idx[1]], c[idx[3]])
        })
        .collect();
    let points: Vec<[f64; 4]> = picks
        .iter()
        .map(|&k| {
            spec.unravel(k, &mut idx);
            idx.map(|i| c[i])
        })
        .collect();
    let fsb = cross_toeplitz_symbol_fsb(&psi, sigma, &p, &points)?;
    let fsb_err = picks
        .iter()
        .zip(&fsb)
        .map(|(&k, v)| (integral.values.values[k] - v).norm())
        .fold(0.0, f64::max);
    let kernel_vs_integral = round_sig(via_kernel.values.max_dist(&integral.values)? / scale);
    let fsb_vs_integral = round_sig(fsb_err / scale);
    let meta = SymbolMeta {
        symbol: symbol.display().to_string(),
        grid: psi.spec,
        tau,
        sigma,
        hbar,
        upsilon,
        kernel_vs_integral,
        fsb_vs_integral,
        fsb_points: points.len(),
        tolerance: SYMBOL_PATH_TOL,
        pass: kernel_vs_integral.max(fsb_vs_integral) <= SYMBOL_PATH_TOL,
    };
    prepare_out(out)?;
    let (bin, json) = (out.join("symbol.bin"), out.join("symbol.json"));
    io::save_binary(&integral.values, &bin)?;
    write_json(&meta, &json)?;
    Ok((vec![bin, json], meta))
}
