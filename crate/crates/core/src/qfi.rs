//! Quantum Fisher information of a dephased state for a z-diagonal generator.
//!
//! For `ρ = Σ λ_a |a⟩⟨a|` and generator `G`,
//!
//! ```text
//! F = 4 Σ_{a<b} (λ_a - λ_b)² / (λ_a + λ_b) |⟨a|G|b⟩|²
//!   = 2 Σ_{a≠b} |⟨a|[ρ, G]|b⟩|² / (λ_a + λ_b).
//! ```
//!
//! The second form is what gets evaluated: `[ρ, G]_{ij} = ρ_ij (g_j - g_i)` is
//! exact from the matrix elements, so small coherences (strongly dephased
//! states) keep full relative precision instead of being recovered from
//! differences of nearly equal eigenvalues.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::collective_basis::{hermitian_deviation, Generator, StateMatrix};
use crate::error::{Error, Result};

/// Pairs with `λ_a + λ_b <= DEFAULT_SUM_THRESHOLD * max λ` are dropped.
pub const DEFAULT_SUM_THRESHOLD: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Descending.
    pub eigenvalues: DVector<f64>,
    /// Column `a` is the eigenvector of `eigenvalues[a]`, phase-fixed so its
    /// first non-negligible component is real and positive.
    pub eigenvectors: DMatrix<C64>,
}

impl EigenDecomposition {
    /// `V Λ V†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let lam = DMatrix::from_diagonal(&self.eigenvalues.map(C64::from));
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }
}

pub fn eigh(rho: &StateMatrix) -> Result<EigenDecomposition> {
    eigh_matrix(rho.matrix())
}

/// Hermitian eigendecomposition of a raw matrix.
pub fn eigh_matrix(m: &DMatrix<C64>) -> Result<EigenDecomposition> {
    let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let (values, vectors) = crate::eig::hermitian(m)?;
    let dim = m.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    // stable: equal eigenvalues keep solver order
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let eigenvalues = DVector::from_fn(dim, |i, _| values[order[i]]);
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        let v = vectors.column(src);
        let lead = v
            .iter()
            .copied()
            .find(|c| c.norm() > 1e-10)
            .unwrap_or(C64::from(1.0));
        let phase = lead.conj() / lead.norm();
        eigenvectors.set_column(col, &(v * phase));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn check_basis(rho: &StateMatrix, g: &Generator) -> Result<()> {
    if rho.basis() != g.basis() {
        return Err(Error::BasisMismatch(format!(
            "state on {:?}, generator on {:?}",
            rho.basis(),
            g.basis()
        )));
    }
    Ok(())
}

/// Phase QFI `F^φ[ρ, G]`.
pub fn qfi_phase(rho: &StateMatrix, g: &Generator) -> Result<f64> {
    qfi_phase_with_threshold(rho, g, DEFAULT_SUM_THRESHOLD)
}

/// [`qfi_phase`] with an explicit relative cut-off on `λ_a + λ_b`.
pub fn qfi_phase_with_threshold(rho: &StateMatrix, g: &Generator, rel_eps: f64) -> Result<f64> {
    check_basis(rho, g)?;
    let eig = eigh(rho)?;
    let lam: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let lam_max = lam.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_eps * lam_max;

    let gd = g.diagonal();
    let m = rho.matrix();
    let comm = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (gd[j] - gd[i]));
    let v = &eig.eigenvectors;
    let rotated = v.adjoint() * comm * v;

    let mut f = 0.0;
    for a in 0..lam.len() {
        // a == b terms vanish in an exact eigenbasis; keeping them makes the
        // sum invariant under the solver's choice of basis in (near-)degenerate
        // subspaces
        for b in 0..lam.len() {
            let s = lam[a] + lam[b];
            if s <= cutoff {
                continue;
            }
            f += 2.0 * rotated[(a, b)].norm_sqr() / s;
        }
    }
    Ok(f)
}

/// Frequency QFI `T² F^φ` (units of s²).
pub fn qfi_frequency(rho_t: &StateMatrix, g: &Generator, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    Ok(t * t * qfi_phase(rho_t, g)?)
}

/// `1 / F`; infinite when `F <= 0`.
pub fn cramer_rao_bound(f: f64) -> f64 {
    if f > 0.0 {
        1.0 / f
    } else {
        f64::INFINITY
    }
}

/// Inverse-variance bound `t_total · T · F^φ` for `t_total / T` repetitions.
pub fn repeated_frequency_precision(f_phi: f64, t: f64, t_total: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    if !(t_total.is_finite() && t_total >= t) {
        return Err(Error::Domain(format!(
            "single-shot time {t} exceeds total time {t_total}"
        )));
    }
    Ok(t_total * t * f_phi)
}

/// Largest phase QFI any state can reach for `g`: `(λ_max - λ_min)²`.
pub fn max_qfi_bound(g: &Generator) -> f64 {
    let d = g.diagonal();
    if d.is_empty() {
        return 0.0;
    }
    let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo) * (hi - lo)
}
