//! Cross-check suites run at runtime by `dqfi verify`. Each check compares two
//! independent routes to the same quantity and reports the worst deviation.

use std::f64::consts::FRAC_PI_2;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::collective_basis::{generator, ghz_state, wigner_d_matrix, GeneratorKind};
use crate::dephasing::{spin_echo_weights_variance, steady_state, NoiseParams};
use crate::error::Result;
use crate::qfi::qfi_phase;
use crate::schemes::{build_probe, scheme_qfi, ProbeSpec, SchemeKind, SchemeSpec};
use crate::steady_forms::{
    bsd_steady_qfi, dfs_piecewise_qfi, ghz_bipartite_steady_qfi, ghz_qfi_analytic, product_steady_qfi,
    wigner_d_half_pi, SplitChoice,
};

/// Reference magnitude below which relative deviations are measured against
/// this floor instead; keeps exact zeros and subnormal tails comparable.
pub const REL_FLOOR: f64 = 1e-280;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(name: &str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }

    fn failed(name: &str, tolerance: f64, err: crate::Error) -> Self {
        Self {
            name: format!("{name} ({err})"),
            max_deviation: f64::INFINITY,
            tolerance,
            passed: false,
        }
    }
}

/// `|got - want| / max(|want|, floor)`.
pub fn rel_dev(got: f64, want: f64, floor: f64) -> f64 {
    (got - want).abs() / want.abs().max(floor)
}

fn run(name: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> CheckReport {
    match f() {
        Ok(dev) => CheckReport::new(name, dev, tol),
        Err(e) => CheckReport::failed(name, tol, e),
    }
}

/// Log-spaced grid of `count` points over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `max |d dᵀ - I|` over `n ≤ n_max` at a few angles.
pub fn wigner_orthogonality(n_max: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        for angle in [0.3, FRAC_PI_2, 2.0] {
            let d = wigner_d_matrix(n, angle);
            let e = &d * d.transpose() - DMatrix::identity(n + 1, n + 1);
            worst = worst.max(e.amax());
        }
    }
    worst
}

/// `max |d_eig(π/2) - d_exact(π/2)|` for `n ≤ n_max`.
pub fn wigner_route_agreement(n_max: usize) -> f64 {
    (0..=n_max)
        .map(|n| (wigner_d_matrix(n, FRAC_PI_2) - wigner_d_half_pi(n)).amax())
        .fold(0.0, f64::max)
}

/// Numeric GHZ standard-scheme QFI against `N² e^{-N² C(T)}`.
pub fn ghz_decay_deviation(ns: &[usize], times: &[f64], noise: &NoiseParams) -> Result<f64> {
    let scheme = SchemeSpec::new(SchemeKind::Standard, *noise);
    let mut worst: f64 = 0.0;
    for &n in ns {
        let psi = ghz_state(n)?;
        for &t in times {
            let (f, _) = scheme_qfi(&psi, &scheme, t)?;
            worst = worst.max(rel_dev(f, ghz_qfi_analytic(n, t, noise)?, REL_FLOOR));
        }
    }
    Ok(worst)
}

/// Every valid BSD split for `n`: `(n1, k1, k2)`.
pub fn bsd_choices(n: usize) -> Vec<SplitChoice> {
    let mut out = Vec::new();
    for n1 in 0..=n {
        for k1 in 0..=n1 {
            for k2 in 0..=(n - n1) {
                out.push(SplitChoice {
                    n,
                    n1,
                    k1,
                    k: k1 + k2,
                });
            }
        }
    }
    out
}

/// Numeric steady-state DI QFI of the BSD probe.
pub fn bsd_numeric_steady_qfi(c: &SplitChoice) -> Result<f64> {
    let psi = build_probe(&ProbeSpec::bsd(c.n, c.n1, c.k1, c.k2()))?;
    let rho = steady_state(&psi.density_matrix());
    let g = generator(rho.basis(), GeneratorKind::SzPartition2)?;
    qfi_phase(&rho, &g)
}

/// Closed-form steady BSD QFI against the numeric pipeline for `n` in `ns`.
/// Deviations are relative to `max(|want|, 1)`, since many splits are exactly 0.
pub fn bsd_oracle_deviation(ns: &[usize]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &n in ns {
        for c in bsd_choices(n) {
            let want = bsd_numeric_steady_qfi(&c)?;
            worst = worst.max(rel_dev(bsd_steady_qfi(&c)?, want, 1.0));
        }
    }
    Ok(worst)
}

/// Noiseless QFI of the standard and DI anchor probes at `n = 8`.
pub fn noiseless_anchor_deviation() -> Result<f64> {
    let noise = NoiseParams::default();
    let cases = [
        (ProbeSpec::ghz(8), SchemeKind::Standard, 64.0),
        (ProbeSpec::dicke(8), SchemeKind::Standard, 40.0),
        (ProbeSpec::product(8), SchemeKind::Standard, 8.0),
        (ProbeSpec::ghz_pair(8, 4), SchemeKind::DiIdeal, 16.0),
        (ProbeSpec::bsd(8, 4, 2, 2), SchemeKind::DiIdeal, 12.0),
        (ProbeSpec::product_split(8, 4), SchemeKind::DiIdeal, 4.0),
    ];
    let mut worst: f64 = 0.0;
    for (p, kind, want) in cases {
        let psi = build_probe(&p)?;
        let (f, _) = scheme_qfi(&psi, &SchemeSpec::new(kind, noise), 0.0)?;
        worst = worst.max(rel_dev(f, want, 1.0));
    }
    Ok(worst)
}

/// Numeric steady-state DI QFI for product, GHZ pair, BSD and DFS probes at
/// `n = 8` against their closed forms.
pub fn steady_anchor_deviation() -> Result<f64> {
    let numeric = |p: ProbeSpec| -> Result<f64> {
        let psi = build_probe(&p)?;
        crate::schemes::steady_scheme_qfi(&psi, SchemeKind::DiIdeal)
    };
    let cases = [
        (
            numeric(ProbeSpec::product_split(8, 4))?,
            product_steady_qfi(8, 4)?,
        ),
        (numeric(ProbeSpec::ghz_pair(8, 4))?, ghz_bipartite_steady_qfi(8)?),
        (numeric(ProbeSpec::bsd(8, 4, 2, 2))?, 6.0),
        (numeric(ProbeSpec::dfs_optimal(8))?, dfs_piecewise_qfi(8, 4, 4)?),
    ];
    Ok(cases
        .iter()
        .map(|&(got, want)| rel_dev(got, want, 1.0))
        .fold(0.0, f64::max))
}

/// `bsd_steady_qfi(n, n/2, n/4, n/2)` against `n (n + 4) / 16`.
pub fn quarter_split_identity_deviation(ns: &[usize]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &n in ns {
        let c = SplitChoice::new(n, n / 2, n / 4, n / 2)?;
        let want = (n * (n + 4)) as f64 / 16.0;
        worst = worst.max(rel_dev(bsd_steady_qfi(&c)?, want, 1.0));
    }
    Ok(worst)
}

/// Spin-echo phase variance by direct quadrature of the noise covariance
/// `s² e^{-|t - t'|/τ}`, `s² = (γΔB)²/2`, against the window weights `a + b`
/// on `[0, T/2]` and `b - a` on `[T/2, T]`.
///
/// Each of the four half-by-half blocks is integrated separately so the kink
/// at `t = t'` only ever sits on a block edge: the diagonal blocks are folded
/// onto the triangle `t' < t` and mapped to a square.
pub fn spin_echo_quadrature(a: f64, b: f64, t: f64, p: &NoiseParams) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(48).unwrap());
    let tau = p.tau_c();
    let s2 = p.gamma_delta_b() * p.gamma_delta_b() / 2.0;
    let h = t / 2.0;
    let k = |u: f64| s2 * (-u.abs() / tau).exp();

    // ∫_0^h ∫_0^h K = 2 ∫_0^h dx ∫_0^1 x K(x - x v) dv
    let diag = 2.0 * gl.integrate(0.0, h, |x| x * gl.integrate(0.0, 1.0, |v| k(x - x * v)));
    // ∫_0^h ∫_h^T K, smooth since the blocks only touch at a corner
    let cross = gl.integrate(0.0, h, |x| gl.integrate(h, t, |y| k(y - x)));

    let (w1, w2) = (a + b, b - a);
    (w1 * w1 + w2 * w2) * diag + 2.0 * w1 * w2 * cross
}

/// Closed-form spin-echo variance against [`spin_echo_quadrature`] over a
/// grid of weights and times.
pub fn spin_echo_deviation(noise: &NoiseParams) -> Result<f64> {
    let weights = [
        (1.0, 1.0),
        (1.0, -1.0),
        (0.0, 1.0),
        (2.0, 1.0),
        (-1.5, 0.5),
        (3.0, -2.0),
    ];
    let mut worst: f64 = 0.0;
    for t in log_grid(1e-4, 10.0, 11) {
        for &(a, b) in &weights {
            let got = spin_echo_weights_variance(a, b, t, noise)?;
            let want = spin_echo_quadrature(a, b, t, noise);
            worst = worst.max(rel_dev(got, want, REL_FLOOR));
        }
    }
    Ok(worst)
}

/// Runs every suite with the default noise parameters.
pub fn run_all() -> Vec<CheckReport> {
    let noise = NoiseParams::default();
    let times = log_grid(1e-5, 10.0, 20);
    vec![
        CheckReport::new("wigner_d orthogonality, n <= 50", wigner_orthogonality(50), 1e-10),
        CheckReport::new(
            "wigner_d eigen route vs exact sum, n <= 50",
            wigner_route_agreement(50),
            1e-10,
        ),
        run("noiseless anchors, n = 8", 1e-9, noiseless_anchor_deviation),
        run("GHZ decay vs closed form, n in {2,4,8}", 1e-8, || {
            ghz_decay_deviation(&[2, 4, 8], &times, &noise)
        }),
        run("steady-state closed forms, n = 8", 1e-9, steady_anchor_deviation),
        run("BSD steady formula vs numeric, n <= 8", 1e-9, || {
            bsd_oracle_deviation(&[2, 4, 6, 8])
        }),
        run("n(n+4)/16 identity, n = 4..64", 1e-9, || {
            quarter_split_identity_deviation(&(1..=16).map(|i| 4 * i).collect::<Vec<_>>())
        }),
        run("spin-echo variance vs quadrature", 1e-6, || {
            spin_echo_deviation(&noise)
        }),
    ]
}
