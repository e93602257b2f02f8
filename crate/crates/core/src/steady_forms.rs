//! Closed-form QFI results, independent of the density-matrix pipeline.
//!
//! The bipartite-symmetric-Dicke (BSD) probe `U_y(π/2)|D_{n1}^{k1}⟩ ⊗
//! U_y(π/2)|D_{n2}^{k2}⟩` splits into blocks of fixed total excitation `k'`.
//! The steady state keeps each block as a pure state `|v_{k'}⟩` with weight
//! `p_{k'}`, and since the generator is block-diagonal the steady QFI is
//! `4 Σ_{k'} p_{k'} Var_{v_{k'}}(𝟙 ⊗ S_z)`. Inside block `k'` the first
//! partition holds `q` excitations with
//!
//! ```text
//! max(k' - n2, 0) <= q <= min(k', n1),
//! ```
//!
//! which is the range the brute-force steady state agrees with. Neither of the
//! lower bounds `max(n2 - k', 0)` or `max(k' - n1, 0)` that appear in some
//! write-ups of this formula is correct for unequal splits.
//!
//! Rotation amplitudes `d^n_{k',k}(π/2)` are evaluated here from the product-of-
//! binomials sum in exact integer arithmetic (`n <= 64`), not through the
//! eigendecomposition used by [`crate::collective_basis::wigner_d_matrix`].

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binom::{binomial, binomial_exact, EXACT_LIMIT};
use crate::collective_basis::wigner_d_matrix;
use crate::dephasing::{phase_variance_c, NoiseParams};
use crate::error::{Error, Result};

/// Blocks lighter than this are skipped; their conditional variance is undefined.
pub const BLOCK_PROBABILITY_FLOOR: f64 = 1e-15;

/// Relative tolerance under which two split values count as tied.
pub const TIE_TOL: f64 = 1e-9;

/// BSD probe with `k1` of `k` excitations in a first partition of `n1` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitChoice {
    pub n: usize,
    pub n1: usize,
    pub k1: usize,
    pub k: usize,
}

impl SplitChoice {
    pub fn new(n: usize, n1: usize, k1: usize, k: usize) -> Result<Self> {
        let c = Self { n, n1, k1, k };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.n1 <= self.n
            && self.k <= self.n
            && self.k1 <= self.k.min(self.n1)
            && self.k - self.k1 <= self.n - self.n1;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid split {self:?}")))
        }
    }

    pub fn n2(&self) -> usize {
        self.n - self.n1
    }

    pub fn k2(&self) -> usize {
        self.k - self.k1
    }
}

/// Steady QFI for the standard scheme with a GHZ probe: `N² exp(-N² C(T))`.
pub fn ghz_qfi_analytic(n: usize, t: f64, p: &NoiseParams) -> Result<f64> {
    let nn = (n * n) as f64;
    Ok(nn * (-nn * phase_variance_c(t, p)?).exp())
}

/// Steady DI QFI of `|+⟩^{⊗n}` split `n1 | n - n1`: `n1 (n - n1) / n`.
pub fn product_steady_qfi(n: usize, n1: usize) -> Result<f64> {
    if n == 0 || n1 > n {
        return Err(Error::Domain(format!("invalid split {n1} of {n}")));
    }
    Ok((n1 * (n - n1)) as f64 / n as f64)
}

/// Steady DI QFI of `|GHZ⟩ ⊗ |GHZ⟩` with equal halves: `n² / 8`.
pub fn ghz_bipartite_steady_qfi(n: usize) -> Result<f64> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Domain(format!(
            "equal GHZ split needs a positive even n, got {n}"
        )));
    }
    Ok((n * n) as f64 / 8.0)
}

/// Best steady QFI reachable in the decoherence-free sector with `k` total
/// excitations, split `n1 | n - n1`.
pub fn dfs_piecewise_qfi(n: usize, n1: usize, k: usize) -> Result<f64> {
    if n1 > n || k > n {
        return Err(Error::Domain(format!("invalid (n, n1, k) = ({n}, {n1}, {k})")));
    }
    let n2 = n - n1;
    let v = if k <= n1.min(n2) {
        k
    } else if n1 < k && k <= n2 {
        n1
    } else if n2 < k && k <= n1 {
        n2
    } else {
        n - k
    };
    Ok((v * v) as f64)
}

/// `d^n_{k',k}(π/2)`, rows `k'`, columns `k`.
pub fn wigner_d_half_pi(n: usize) -> DMatrix<f64> {
    if n > EXACT_LIMIT {
        return wigner_d_matrix(n, std::f64::consts::FRAC_PI_2);
    }
    let pow2 = 2f64.powi(n as i32);
    DMatrix::from_fn(n + 1, n + 1, |kp, k| {
        // Σ_s (-1)^s C(n-k, s) C(k, k'-s); |partial sums| <= C(n, k') < 2^64
        let lo = kp.saturating_sub(k);
        let hi = (n - k).min(kp);
        let mut sum: i128 = 0;
        for s in lo..=hi {
            let term = binomial_exact(n - k, s).unwrap() as i128 * binomial_exact(k, kp - s).unwrap() as i128;
            if s % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let prefactor = (binomial(n, k) / (binomial(n, kp) * pow2)).sqrt();
        prefactor * sum as f64
    })
}

/// Rotation tables for both partitions of one split.
struct SplitTables {
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
}

impl SplitTables {
    fn new(n: usize, n1: usize) -> Self {
        Self {
            d1: wigner_d_half_pi(n1),
            d2: wigner_d_half_pi(n - n1),
        }
    }

    /// Squared amplitudes `(d1_{q,k1} d2_{k'-q,k2})²` over the valid q range.
    fn block_weights(&self, c: &SplitChoice, kp: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let n2 = c.n2();
        let lo = kp.saturating_sub(n2);
        let hi = kp.min(c.n1);
        let (k1, k2) = (c.k1, c.k2());
        (lo..=hi).map(move |q| {
            let a = self.d1[(q, k1)] * self.d2[(kp - q, k2)];
            (q, a * a)
        })
    }

    fn probabilities(&self, c: &SplitChoice) -> Vec<f64> {
        (0..=c.n)
            .map(|kp| self.block_weights(c, kp).map(|(_, w)| w).sum())
            .collect()
    }

    fn steady_qfi(&self, c: &SplitChoice) -> f64 {
        let half_n2 = c.n2() as f64 / 2.0;
        let mut total = 0.0;
        for kp in 0..=c.n {
            let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
            for (q, w) in self.block_weights(c, kp) {
                let m2 = (kp - q) as f64 - half_n2;
                s0 += w;
                s1 += w * m2;
                s2 += w * m2 * m2;
            }
            if s0 < BLOCK_PROBABILITY_FLOOR {
                continue;
            }
            total += s2 - s1 * s1 / s0;
        }
        4.0 * total
    }
}

/// Probability `p_{k'}` of each total-excitation block of the BSD probe.
pub fn block_probabilities(c: &SplitChoice) -> Result<Vec<f64>> {
    c.validate()?;
    Ok(SplitTables::new(c.n, c.n1).probabilities(c))
}

/// Steady-state DI QFI of the BSD probe described by `c`.
pub fn bsd_steady_qfi(c: &SplitChoice) -> Result<f64> {
    c.validate()?;
    Ok(SplitTables::new(c.n, c.n1).steady_qfi(c))
}

/// Best BSD split for one total excitation number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOptimum {
    pub k: usize,
    pub max_qfi: f64,
    /// Every `(n1, k1)` within [`TIE_TOL`] of the maximum, ordered by `(n1, k1)`.
    pub argmax: Vec<(usize, usize)>,
}

/// Exhaustive search over `(n1, k1)` for every `k` in `0..=n`.
pub fn optimize_bsd_split(n: usize) -> Result<Vec<SplitOptimum>> {
    if n < 2 {
        return Err(Error::Domain(format!("split search needs n >= 2, got {n}")));
    }
    let tables: Vec<SplitTables> = (0..=n).map(|n1| SplitTables::new(n, n1)).collect();
    let out = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut values = Vec::new();
            for (n1, tab) in tables.iter().enumerate() {
                let n2 = n - n1;
                for k1 in k.saturating_sub(n2)..=k.min(n1) {
                    let c = SplitChoice { n, n1, k1, k };
                    values.push(((n1, k1), tab.steady_qfi(&c)));
                }
            }
            let max_qfi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
            let argmax = values
                .iter()
                .filter(|(_, f)| max_qfi - f <= TIE_TOL * max_qfi.abs().max(1.0))
                .map(|(nk, _)| *nk)
                .collect();
            SplitOptimum { k, max_qfi, argmax }
        })
        .collect();
    Ok(out)
}
