//! Collective Gaussian phase noise with exponentially correlated field
//! fluctuations (an Ornstein-Uhlenbeck field).
//!
//! The accumulated noise phase `δφ = γ ∫₀ᵀ ΔB(t) dt` is Gaussian, so averaging
//! `exp(-iδφ S_z) ρ exp(iδφ S_z)` multiplies the element between basis vectors
//! with z-weights `m`, `m'` by `exp[-(m - m')² C(T) / 2]`, where
//!
//! ```text
//! C(T) = (γΔB τ_c)² [exp(-T/τ_c) + T/τ_c - 1].
//! ```
//!
//! `C(T)` is the variance of `δφ` in this normalisation; every variant below
//! uses the same kernel scale, fixed by requiring a uniform weight over `[0, T]`
//! to reproduce `C(T)`.

use serde::{Deserialize, Serialize};

use crate::collective_basis::{Basis, StateMatrix};
use crate::error::{Error, Result};

/// Field-fluctuation strength `γΔB` (rad/s) and correlation time `τ_c` (s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    gamma_delta_b: f64,
    tau_c: f64,
}

impl NoiseParams {
    pub fn new(gamma_delta_b: f64, tau_c: f64) -> Result<Self> {
        for (name, v) in [("gamma_delta_b", gamma_delta_b), ("tau_c", tau_c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidNoise(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { gamma_delta_b, tau_c })
    }

    pub fn gamma_delta_b(&self) -> f64 {
        self.gamma_delta_b
    }

    pub fn tau_c(&self) -> f64 {
        self.tau_c
    }
}

impl Default for NoiseParams {
    /// `γΔB = 2π · 50 rad/s`, `τ_c = 1 s`.
    fn default() -> Self {
        Self {
            gamma_delta_b: 2.0 * std::f64::consts::PI * 50.0,
            tau_c: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseVariant {
    /// Both partitions see the same noise phase.
    IdealCollective,
    /// The first partition is π-flipped at `T/2`, reversing the sign of the
    /// noise it accumulates in the second half.
    SpinEcho,
    /// The two partitions are run in separate experiments with independent
    /// noise realisations.
    IndependentRepeat,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// `exp(-x) + x - 1` without cancellation for small `x`.
fn exp_residual(x: f64) -> f64 {
    if x < 0.1 {
        // alternating series x²/2 - x³/6 + ...; 20 terms is far below ulp at x = 0.1
        let mut term = x * x / 2.0;
        let mut sum = 0.0;
        for j in 3..23 {
            sum += term;
            term *= -x / j as f64;
        }
        sum
    } else {
        (-x).exp_m1() + x
    }
}

/// Variance `C(T)` of the accumulated noise phase over `[0, T]`.
pub fn phase_variance_c(t: f64, p: &NoiseParams) -> Result<f64> {
    check_time(t)?;
    let scale = p.gamma_delta_b * p.tau_c;
    Ok(scale * scale * exp_residual(t / p.tau_c))
}

/// Covariance of the noise phases accumulated on `[0, T/2]` and `[T/2, T]`.
fn half_interval_covariance(t: f64, p: &NoiseParams) -> f64 {
    let scale = p.gamma_delta_b * p.tau_c;
    let g = -(-t / (2.0 * p.tau_c)).exp_m1();
    0.5 * scale * scale * g * g
}

/// Averages `ρ` over the collective noise accumulated during `T`.
pub fn apply_collective_dephasing(rho: &StateMatrix, t: f64, p: &NoiseParams) -> Result<StateMatrix> {
    let c = phase_variance_c(t, p)?;
    if c == 0.0 {
        return Ok(rho.clone());
    }
    let basis = rho.basis();
    let weights: Vec<f64> = (0..basis.dim()).map(|i| basis.total_weight(i)).collect();
    Ok(rho.map_elements(|i, j, v| {
        let dm = weights[i] - weights[j];
        if dm == 0.0 {
            v
        } else {
            v * (-0.5 * dm * dm * c).exp()
        }
    }))
}

/// Infinite-time limit of the collective channel: keeps only the blocks of
/// equal total excitation number.
pub fn steady_state(rho: &StateMatrix) -> StateMatrix {
    let basis = rho.basis();
    rho.map_elements(|i, j, v| {
        if basis.excitations(i) == basis.excitations(j) {
            v
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    })
}

/// Variance of `a·γ(I₁ - I₂) + b·γ(I₁ + I₂)`, with `I₁`, `I₂` the field
/// integrals over the two halves of `[0, T]`.
///
/// With `v = C(T/2)` and `c` the covariance of the two half-interval phases,
/// the result is `[(a+b)² + (b-a)²] v + 2 (a+b)(b-a) c`, where
/// `c = (γΔB τ_c)² (1 - exp(-T/2τ_c))² / 2`.
pub fn spin_echo_weights_variance(a: f64, b: f64, t: f64, p: &NoiseParams) -> Result<f64> {
    check_time(t)?;
    let v = phase_variance_c(t / 2.0, p)?;
    let c = half_interval_covariance(t, p);
    let first = a + b;
    let second = b - a;
    Ok((first * first + second * second) * v + 2.0 * first * second * c)
}

/// Dephasing of a bipartite state under one of the DI noise realisations.
pub fn apply_variant_dephasing(
    rho: &StateMatrix,
    t: f64,
    p: &NoiseParams,
    variant: NoiseVariant,
) -> Result<StateMatrix> {
    check_time(t)?;
    let Basis::Bipartite(b) = rho.basis() else {
        return Err(Error::BasisMismatch(format!(
            "{variant:?} dephasing needs a bipartite basis"
        )));
    };
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let w: Vec<(f64, f64)> = (0..b.dim()).map(|i| b.weights(i)).collect();
    match variant {
        NoiseVariant::IdealCollective => apply_collective_dephasing(rho, t, p),
        NoiseVariant::SpinEcho => {
            let v = phase_variance_c(t / 2.0, p)?;
            let c = half_interval_covariance(t, p);
            Ok(rho.map_elements(|i, j, x| {
                let da = w[i].0 - w[j].0;
                let db = w[i].1 - w[j].1;
                if da == 0.0 && db == 0.0 {
                    return x;
                }
                let first = da + db;
                let second = db - da;
                let var = (first * first + second * second) * v + 2.0 * first * second * c;
                x * (-0.5 * var).exp()
            }))
        }
        NoiseVariant::IndependentRepeat => {
            let c = phase_variance_c(t, p)?;
            Ok(rho.map_elements(|i, j, x| {
                let da = w[i].0 - w[j].0;
                let db = w[i].1 - w[j].1;
                if da == 0.0 && db == 0.0 {
                    x
                } else {
                    x * (-0.5 * (da * da + db * db) * c).exp()
                }
            }))
        }
    }
}
