use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use dephasing_qfi::verify::{run_all, CheckReport};
use dephasing_qfi::{
    build_probe, optimize_bsd_split, scan, steady_scheme_qfi, AlphaMode, ProbeFamily, ProbeSpec, ScanResult,
    SchemeKind, SchemeSpec,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};
use crate::output::{fmt_f64, units_comment, write_rows, Sink};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("evaluation failed: {0}")]
    Compute(String),
    #[error("{0} of {1} verification checks failed")]
    Verify(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(..) => 2,
            _ => 1,
        }
    }
}

fn empty_row(scheme: SchemeKind, p: &ProbeSpec, t: f64, alpha_opt: bool) -> ScanResult {
    ScanResult {
        scheme,
        family: p.family,
        n: p.n,
        n1: p.n1,
        k1: p.k1,
        k2: p.k2,
        alpha: p.alpha,
        t,
        f_phase: f64::NAN,
        f_freq: f64::NAN,
        alpha_opt,
        error: None,
    }
}

/// Frequency QFI of the steady state: `T² F` with `T → ∞`.
fn steady_freq(f: f64) -> f64 {
    if f > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn steady_cell(kind: SchemeKind, p: &ProbeSpec, mode: AlphaMode) -> ScanResult {
    let eval = |p: &ProbeSpec| build_probe(p).and_then(|psi| steady_scheme_qfi(&psi, kind));
    let mut row = empty_row(kind, p, f64::INFINITY, matches!(mode, AlphaMode::Optimize { .. }));
    let outcome = match mode {
        AlphaMode::Fixed => eval(p).map(|f| (p.alpha, f)),
        AlphaMode::Optimize { grid_points } => (0..grid_points)
            .map(|i| FRAC_PI_2 * i as f64 / (grid_points - 1) as f64)
            .try_fold((0.0, f64::NEG_INFINITY), |best, a| {
                let f = eval(&p.with_alpha(a))?;
                Ok(if f > best.1 { (a, f) } else { best })
            }),
    };
    match outcome {
        Ok((alpha, f)) => {
            row.alpha = alpha;
            row.f_phase = f;
            row.f_freq = steady_freq(f);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn cell(spec: &SchemeSpec, p: &ProbeSpec, t: f64, mode: AlphaMode) -> ScanResult {
    if t.is_infinite() {
        return steady_cell(spec.kind, p, mode);
    }
    let one = spec.clone().with_times(vec![t]);
    match scan(&one, std::slice::from_ref(p), mode) {
        Ok(mut rows) => rows.remove(0),
        Err(e) => {
            let mut row = empty_row(spec.kind, p, t, false);
            row.error = Some(e.to_string());
            row
        }
    }
}

fn check_rows(rows: Vec<ScanResult>) -> Result<Vec<ScanResult>, CliError> {
    match rows.iter().find(|r| r.error.is_some()) {
        Some(r) => Err(CliError::Compute(format!(
            "{} {} n={} T={}: {}",
            r.scheme,
            r.family,
            r.n,
            r.t,
            r.error.as_deref().unwrap_or("")
        ))),
        None => Ok(rows),
    }
}

fn header(cfg: &RunConfig) -> String {
    units_comment(cfg.noise.gamma_delta_b(), cfg.noise.tau_c())
}

pub fn scan_time(cfg: &RunConfig) -> Result<(), CliError> {
    let probes = cfg.probes()?;
    let spec = SchemeSpec::new(cfg.scheme, cfg.noise);
    let mode = if cfg.alpha_opt {
        AlphaMode::Optimize {
            grid_points: cfg.alpha_grid,
        }
    } else {
        AlphaMode::Fixed
    };
    let cells: Vec<(&ProbeSpec, f64)> = probes
        .iter()
        .flat_map(|p| cfg.times.iter().map(move |&t| (p, t)))
        .collect();
    let rows = cells.par_iter().map(|&(p, t)| cell(&spec, p, t, mode)).collect();
    write_rows(cfg.out.as_deref(), cfg.format, &header(cfg), &check_rows(rows)?)?;
    Ok(())
}

pub fn scan_rotation(cfg: &RunConfig) -> Result<(), CliError> {
    let probes = cfg.probes()?;
    if let Some(p) = probes.iter().find(|p| !p.family.supports_rotation()) {
        return Err(ConfigError::Invalid(format!("{} has no rotation angle to scan", p.family)).into());
    }
    if cfg.alphas.is_empty() {
        return Err(ConfigError::Invalid("rotation grid is empty".into()).into());
    }
    let spec = SchemeSpec::new(cfg.scheme, cfg.noise);
    let cells: Vec<(ProbeSpec, f64)> = probes
        .iter()
        .flat_map(|p| {
            cfg.times
                .iter()
                .flat_map(move |&t| cfg.alphas.iter().map(move |&a| (p.with_alpha(a), t)))
        })
        .collect();
    let rows = cells
        .par_iter()
        .map(|(p, t)| cell(&spec, p, *t, AlphaMode::Fixed))
        .collect();
    write_rows(cfg.out.as_deref(), cfg.format, &header(cfg), &check_rows(rows)?)?;
    Ok(())
}

/// Best BSD split for every total excitation number `k`. Tied maximisers
/// each get a row.
pub fn steady_map(cfg: &RunConfig) -> Result<(), CliError> {
    let optima = optimize_bsd_split(cfg.n).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let mut rows = Vec::new();
    for opt in &optima {
        for &(n1, k1) in &opt.argmax {
            let p = ProbeSpec::bsd(cfg.n, n1, k1, opt.k - k1);
            let mut row = empty_row(SchemeKind::DiIdeal, &p, f64::INFINITY, false);
            row.f_phase = opt.max_qfi;
            row.f_freq = steady_freq(opt.max_qfi);
            rows.push(row);
        }
    }
    debug_assert!(rows.iter().all(|r| r.family == ProbeFamily::Bsd));
    write_rows(cfg.out.as_deref(), cfg.format, &header(cfg), &rows)?;
    Ok(())
}

fn report_line(r: &CheckReport) -> String {
    format!(
        "[{}] {}: max deviation {:.3e} (tolerance {:.0e})",
        if r.passed { "PASS" } else { "FAIL" },
        r.name,
        r.max_deviation,
        r.tolerance
    )
}

pub fn verify(out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let reports = run_all();
    for r in &reports {
        println!("{}", report_line(r));
    }
    if let Some(path) = out {
        let mut sink = Sink::open(Some(path))?;
        match format {
            Format::Csv => {
                sink.line("check,max_deviation,tolerance,passed")?;
                for r in &reports {
                    sink.line(&format!(
                        "\"{}\",{},{},{}",
                        r.name,
                        fmt_f64(r.max_deviation),
                        fmt_f64(r.tolerance),
                        r.passed
                    ))?;
                }
            }
            Format::Jsonl => {
                for r in &reports {
                    sink.line(&serde_json::to_string(r).map_err(|e| CliError::Compute(e.to_string()))?)?;
                }
            }
        }
        sink.commit()?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Verify(failed, reports.len()));
    }
    Ok(())
}
