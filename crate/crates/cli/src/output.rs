//! Row serialisation. Output goes to `<out>.partial` first and is renamed into
//! place once complete, so a failed run never leaves a truncated file behind.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use dephasing_qfi::ScanResult;

use crate::config::Format;

pub const CSV_HEADER: &str = "scheme,family,n,n1,k1,k2,alpha,T,F_phase,F_freq,alpha_opt_flag";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn csv_row(r: &ScanResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.scheme,
        r.family,
        r.n,
        r.n1.map(|v| v.to_string()).unwrap_or_default(),
        r.k1,
        r.k2,
        fmt_f64(r.alpha),
        fmt_f64(r.t),
        fmt_f64(r.f_phase),
        fmt_f64(r.f_freq),
        r.alpha_opt,
    )
}

/// JSON has no infinities, so non-finite floats are written as strings.
fn json_f64(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::json!(fmt_f64(x))
    }
}

pub fn jsonl_row(r: &ScanResult) -> String {
    serde_json::json!({
        "scheme": r.scheme,
        "family": r.family,
        "n": r.n,
        "n1": r.n1,
        "k1": r.k1,
        "k2": r.k2,
        "alpha": json_f64(r.alpha),
        "T": json_f64(r.t),
        "F_phase": json_f64(r.f_phase),
        "F_freq": json_f64(r.f_freq),
        "alpha_opt_flag": r.alpha_opt,
    })
    .to_string()
}

pub fn units_comment(gamma_delta_b: f64, tau_c: f64) -> String {
    format!(
        "# units: T [s], alpha [rad], F_phase [1/rad^2], F_freq [s^2/rad^2]; noise gamma_delta_b={} [rad/s], tau_c={} [s]",
        fmt_f64(gamma_delta_b),
        fmt_f64(tau_c)
    )
}

/// Destination that is either stdout or a file committed on success.
pub struct Sink {
    target: Option<(PathBuf, PathBuf)>,
    writer: Box<dyn Write>,
}

impl Sink {
    pub fn open(out: Option<&Path>) -> io::Result<Self> {
        match out {
            None => Ok(Self {
                target: None,
                writer: Box::new(BufWriter::new(io::stdout().lock())),
            }),
            Some(path) => {
                let mut partial = path.as_os_str().to_owned();
                partial.push(".partial");
                let partial = PathBuf::from(partial);
                let file = File::create(&partial)?;
                Ok(Self {
                    target: Some((partial, path.to_path_buf())),
                    writer: Box::new(BufWriter::new(file)),
                })
            }
        }
    }

    pub fn line(&mut self, s: &str) -> io::Result<()> {
        self.writer.write_all(s.as_bytes())?;
        self.writer.write_all(b"\n")
    }

    pub fn commit(mut self) -> io::Result<()> {
        self.writer.flush()?;
        if let Some((partial, path)) = self.target.take() {
            std::fs::rename(partial, path)?;
        }
        Ok(())
    }
}

impl Drop for Sink {
    fn drop(&mut self) {
        if let Some((partial, _)) = &self.target {
            let _ = std::fs::remove_file(partial);
        }
    }
}

/// Writes a full table in `format` and commits it.
pub fn write_rows(out: Option<&Path>, format: Format, header: &str, rows: &[ScanResult]) -> io::Result<()> {
    let mut sink = Sink::open(out)?;
    match format {
        Format::Csv => {
            sink.line(header)?;
            sink.line(CSV_HEADER)?;
            for r in rows {
                sink.line(&csv_row(r))?;
            }
        }
        Format::Jsonl => {
            for r in rows {
                sink.line(&jsonl_row(r))?;
            }
        }
    }
    sink.commit()
}
