//! `dqfi`: time scans, rotation scans, steady-state split maps and runtime
//! verification for the dephasing QFI library.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::CliError;
use crate::config::{RawConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "dqfi",
    version,
    about = "QFI of symmetric qubit probes under collective dephasing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// QFI against interrogation time, one row per (probe, T).
    ScanTime(Opts),
    /// QFI against rotation angle at each configured T.
    ScanRotation(Opts),
    /// Optimal BSD split and steady-state QFI for every excitation number.
    SteadyMap(Opts),
    /// Run the numerical cross-checks; exits 2 if any fails.
    Verify(Opts),
}

/// Every config key is also a flag; flags win over the config file.
#[derive(clap::Args, Debug)]
struct Opts {
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// STANDARD, DI_IDEAL, DI_SPIN_ECHO or DI_REPEAT.
    #[arg(long)]
    scheme: Option<String>,
    /// Probe family, or a comma-separated list of them.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    n1: Option<String>,
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    /// Fixed rotation angle in radians (`pi/4` style values allowed).
    #[arg(long)]
    alpha: Option<String>,
    /// Optimise the rotation angle per time point.
    #[arg(long = "alpha_opt", alias = "alpha-opt", num_args = 0..=1, default_missing_value = "true")]
    alpha_opt: Option<String>,
    #[arg(long = "alpha_grid", alias = "alpha-grid")]
    alpha_grid: Option<String>,
    #[arg(long = "alpha_min", alias = "alpha-min")]
    alpha_min: Option<String>,
    #[arg(long = "alpha_max", alias = "alpha-max")]
    alpha_max: Option<String>,
    #[arg(long = "alpha_count", alias = "alpha-count")]
    alpha_count: Option<String>,
    /// Noise amplitude γΔB in rad/s.
    #[arg(long = "gamma_delta_b", alias = "gamma-delta-b")]
    gamma_delta_b: Option<String>,
    /// Noise correlation time in seconds.
    #[arg(long = "tau_c", alias = "tau-c")]
    tau_c: Option<String>,
    /// Explicit comma-separated times in seconds; `inf` is the steady state.
    #[arg(long)]
    times: Option<String>,
    #[arg(long = "t_min", alias = "t-min")]
    t_min: Option<String>,
    #[arg(long = "t_max", alias = "t-max")]
    t_max: Option<String>,
    #[arg(long = "t_count", alias = "t-count")]
    t_count: Option<String>,
    /// `log` or `lin`.
    #[arg(long = "t_spacing", alias = "t-spacing")]
    t_spacing: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// `csv` or `jsonl`.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<String>,
}

impl Opts {
    fn overrides(&self) -> [(&'static str, &Option<String>); 22] {
        [
            ("scheme", &self.scheme),
            ("family", &self.family),
            ("n", &self.n),
            ("n1", &self.n1),
            ("k1", &self.k1),
            ("k2", &self.k2),
            ("alpha", &self.alpha),
            ("alpha_opt", &self.alpha_opt),
            ("alpha_grid", &self.alpha_grid),
            ("alpha_min", &self.alpha_min),
            ("alpha_max", &self.alpha_max),
            ("alpha_count", &self.alpha_count),
            ("gamma_delta_b", &self.gamma_delta_b),
            ("tau_c", &self.tau_c),
            ("times", &self.times),
            ("t_min", &self.t_min),
            ("t_max", &self.t_max),
            ("t_count", &self.t_count),
            ("t_spacing", &self.t_spacing),
            ("out", &self.out),
            ("format", &self.format),
            ("threads", &self.threads),
        ]
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        Ok(RunConfig::from_raw(&raw)?)
    }
}

fn init_threads(n: usize) {
    // a second initialisation only happens in-process and is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::ScanTime(o) => {
            let cfg = o.resolve()?;
            init_threads(cfg.threads);
            commands::scan_time(&cfg)
        }
        Command::ScanRotation(o) => {
            let cfg = o.resolve()?;
            init_threads(cfg.threads);
            commands::scan_rotation(&cfg)
        }
        Command::SteadyMap(o) => {
            let cfg = o.resolve()?;
            init_threads(cfg.threads);
            commands::steady_map(&cfg)
        }
        Command::Verify(o) => {
            let cfg = o.resolve()?;
            init_threads(cfg.threads);
            commands::verify(cfg.out.as_deref(), cfg.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
