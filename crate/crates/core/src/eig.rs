//! Dense self-adjoint eigensolvers (faer), converted to and from nalgebra.
//! Eigenvalues come back ascending.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) fn hermitian(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = m.nrows();
    let a = Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Domain(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let values = (0..n).map(|i| s[i].re).collect();
    Ok((values, DMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}

pub(crate) fn symmetric(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Domain(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let values = (0..n).map(|i| s[i]).collect();
    Ok((values, DMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}
