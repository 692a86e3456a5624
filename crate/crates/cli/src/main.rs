use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heisenphase_cli::config::{parse_suites, ScenarioConfig, Tier};
use heisenphase_cli::{commands, run_verify, with_pool, CliError};

#[derive(Parser)]
#[command(name = "heisenphase", version, about = "Heisenberg-group operator identities: verification and data commands")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Scenario settings; flags override the config file.
#[derive(Args)]
struct Overrides {
    /// Flat `key = value` scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    upsilon: Option<f64>,
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    #[arg(long = "grid-n4", global = true)]
    grid_n4: Option<usize>,
    #[arg(long, global = true)]
    extent: Option<f64>,
    /// Tolerance tier: strict, default or loose.
    #[arg(long, global = true)]
    tol: Option<Tier>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suites and report residuals.
    Verify {
        /// Comma-separated suites, `all`, or empty for none.
        #[arg(long)]
        suites: Option<String>,
        /// Keep wall-clock times in the written report.
        #[arg(long)]
        timings: bool,
        /// Print JSON instead of the text table.
        #[arg(long)]
        json: bool,
    },
    /// Peeled FSB transform of a configuration-space CSV.
    Fsb {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cross-Toeplitz operator T_ψ: F_τ → F_ς applied to a phase-space CSV.
    Toeplitz {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Doubled symbol of a cross-Toeplitz operator, with the three-path check.
    Symbol {
        #[arg(long)]
        symbol: PathBuf,
    },
}

impl Overrides {
    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { cfg.$field = v; })* };
        }
        set!(hbar, tau, sigma, upsilon, grid_n, grid_n4, seed);
        if let Some(l) = self.extent {
            cfg.extent = Some(l);
        }
        if let Some(t) = self.tol {
            cfg.tolerance_tier = t;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn out_dir(cfg: &ScenarioConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = cli.overrides.resolve()?;
    match cli.command {
        Command::Verify { suites, timings, json } => {
            if let Some(s) = suites {
                cfg.suites = parse_suites(&s).map_err(|msg| CliError::Parse { line: 0, msg })?;
            }
            let report = run_verify(&cfg)?;
            let shown = if json { report.without_timings().to_json() } else { report.to_text() };
            print!("{shown}");
            if let Some(dir) = &cfg.output_dir {
                let written = if timings { report.clone() } else { report.without_timings() };
                for path in written.write(dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Fsb { input } => {
            let out = out_dir(&cfg);
            for path in with_pool(|| commands::run_fsb(&input, cfg.tau, cfg.hbar, &out))?? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Toeplitz { symbol, input } => {
            let out = out_dir(&cfg);
            let paths = with_pool(|| commands::run_toeplitz(&symbol, &input, cfg.tau, cfg.sigma, cfg.hbar, &out))??;
            for path in paths {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Symbol { symbol } => {
            let out = out_dir(&cfg);
            // The chart scale defaults to sqrt(τς) unless set explicitly.
            let upsilon = cli.overrides.upsilon;
            let (paths, meta) =
                with_pool(|| commands::run_symbol(&symbol, cfg.tau, cfg.sigma, cfg.hbar, upsilon, &out))??;
            println!(
                "a# three-path agreement: kernel {:.3e}, FSB form {:.3e} (tol {:.0e}) {}",
                meta.kernel_vs_integral,
                meta.fsb_vs_integral,
                meta.tolerance,
                if meta.pass { "pass" } else { "FAIL" }
            );
            for path in paths {
                println!("wrote {}", path.display());
            }
            Ok(if meta.pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
