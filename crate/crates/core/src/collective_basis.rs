//! Bases, probe states and collective operators in the permutation-symmetric
//! sector of `n` qubits and in the product of two such sectors.
//!
//! Index `k` of a [`SymmetricBasis`] labels the Dicke state `|D_n^k⟩` with `k`
//! excitations; its collective-z weight is `m = k - n/2`. A [`BipartiteBasis`]
//! stores `|D_{n1}^q⟩ ⊗ |D_{n2}^r⟩` at index `q * (n2 + 1) + r`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::binom::ln_binomial;
use crate::error::{Error, Result};

/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity and trace tolerance for density matrices.
pub const MATRIX_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricBasis {
    n: usize,
}

impl SymmetricBasis {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Collective-z weight `k - n/2` of basis vector `k`.
    pub fn weight(&self, k: usize) -> f64 {
        k as f64 - self.n as f64 / 2.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteBasis {
    n1: usize,
    n2: usize,
}

impl BipartiteBasis {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn first(&self) -> SymmetricBasis {
        SymmetricBasis::new(self.n1)
    }

    pub fn second(&self) -> SymmetricBasis {
        SymmetricBasis::new(self.n2)
    }

    pub fn dim(&self) -> usize {
        (self.n1 + 1) * (self.n2 + 1)
    }

    pub fn index(&self, q: usize, r: usize) -> usize {
        debug_assert!(q <= self.n1 && r <= self.n2);
        q * (self.n2 + 1) + r
    }

    /// Inverse of [`Self::index`].
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / (self.n2 + 1), i % (self.n2 + 1))
    }

    /// Partition weights `(q - n1/2, r - n2/2)` of basis vector `i`.
    pub fn weights(&self, i: usize) -> (f64, f64) {
        let (q, r) = self.split(i);
        (self.first().weight(q), self.second().weight(r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Symmetric(SymmetricBasis),
    Bipartite(BipartiteBasis),
}

impl Basis {
    pub fn symmetric(n: usize) -> Self {
        Basis::Symmetric(SymmetricBasis::new(n))
    }

    pub fn bipartite(n1: usize, n2: usize) -> Self {
        Basis::Bipartite(BipartiteBasis::new(n1, n2))
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Symmetric(b) => b.dim(),
            Basis::Bipartite(b) => b.dim(),
        }
    }

    /// Total particle count.
    pub fn n(&self) -> usize {
        match self {
            Basis::Symmetric(b) => b.n(),
            Basis::Bipartite(b) => b.n1() + b.n2(),
        }
    }

    /// Total excitation number of basis vector `i`.
    pub fn excitations(&self, i: usize) -> usize {
        match self {
            Basis::Symmetric(_) => i,
            Basis::Bipartite(b) => {
                let (q, r) = b.split(i);
                q + r
            }
        }
    }

    /// Total collective-z weight of basis vector `i`.
    pub fn total_weight(&self, i: usize) -> f64 {
        self.excitations(i) as f64 - self.n() as f64 / 2.0
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self, Basis::Bipartite(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    basis: Basis,
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Checks dimension and normalisation.
    pub fn new(basis: Basis, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Normalises a nonzero vector.
    pub fn normalized(basis: Basis, amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Self::new(basis, amplitudes / C64::from(norm))
    }

    pub(crate) fn from_parts(basis: Basis, amplitudes: DVector<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), basis.dim());
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amplitudes[i]
    }

    /// `|⟨self|other⟩|`, or `None` when the bases differ.
    pub fn overlap(&self, other: &PureState) -> Option<f64> {
        (self.basis == other.basis).then(|| self.amplitudes.dotc(&other.amplitudes).norm())
    }

    pub fn density_matrix(&self) -> StateMatrix {
        StateMatrix::from_pure(self)
    }
}

/// Density matrix over a [`Basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateMatrix {
    basis: Basis,
    matrix: DMatrix<C64>,
}

impl StateMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(basis: Basis, matrix: DMatrix<C64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix for a basis of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > MATRIX_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > MATRIX_TOL || trace.im.abs() > MATRIX_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let (values, _) = crate::eig::hermitian(&matrix)?;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { basis, matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        Self {
            basis: psi.basis(),
            matrix: a * a.adjoint(),
        }
    }

    /// `𝟙 / dim`.
    pub fn maximally_mixed(basis: Basis) -> Self {
        let d = basis.dim();
        Self {
            basis,
            matrix: DMatrix::identity(d, d) / C64::from(d as f64),
        }
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &StateMatrix, p: f64) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch(
                "cannot mix states on different bases".into(),
            ));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("mixing weight {p} outside [0, 1]")));
        }
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix * C64::from(p) + &other.matrix * C64::from(1.0 - p),
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Applies `f(i, j, ρ_ij)` to every element; used by the channels, which
    /// all act elementwise in these bases.
    pub(crate) fn map_elements(&self, mut f: impl FnMut(usize, usize, C64) -> C64) -> Self {
        let d = self.dim();
        let matrix = DMatrix::from_fn(d, d, |i, j| f(i, j, self.matrix[(i, j)]));
        Self {
            basis: self.basis,
            matrix,
        }
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Collective `S_z` on all particles.
    SzTotal,
    /// `𝟙 ⊗ S_z` on the second partition of a bipartite basis.
    SzPartition2,
}

impl GeneratorKind {
    pub fn label(&self) -> &'static str {
        match self {
            GeneratorKind::SzTotal => "SZ_TOTAL",
            GeneratorKind::SzPartition2 => "SZ_PARTITION2",
        }
    }
}

/// A z-diagonal Hermitian generator of the signal phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    basis: Basis,
    diagonal: Vec<f64>,
    kind: GeneratorKind,
}

impl Generator {
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }
}

pub fn generator(basis: Basis, kind: GeneratorKind) -> Result<Generator> {
    let diagonal = match (kind, basis) {
        (GeneratorKind::SzTotal, b) => (0..b.dim()).map(|i| b.total_weight(i)).collect(),
        (GeneratorKind::SzPartition2, Basis::Bipartite(b)) => (0..b.dim()).map(|i| b.weights(i).1).collect(),
        (GeneratorKind::SzPartition2, Basis::Symmetric(_)) => {
            return Err(Error::BasisMismatch(
                "SZ_PARTITION2 requires a bipartite basis".into(),
            ))
        }
    };
    Ok(Generator {
        basis,
        diagonal,
        kind,
    })
}

/// Dicke state `|D_n^k⟩`.
pub fn dicke_state(n: usize, k: usize) -> Result<PureState> {
    if k > n {
        return Err(Error::ExcitationOutOfRange { k, n });
    }
    let mut amps = DVector::zeros(n + 1);
    amps[k] = C64::from(1.0);
    Ok(PureState::from_parts(Basis::symmetric(n), amps))
}

/// `(|0…0⟩ + |1…1⟩) / √2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let mut amps = DVector::zeros(n + 1);
    amps[0] = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    amps[n] = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    Ok(PureState::from_parts(Basis::symmetric(n), amps))
}

/// `|+⟩^{⊗n}`: binomial amplitudes `√C(n,k) / 2^{n/2}` over the Dicke basis.
pub fn plus_product_state(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::EmptyRegister);
    }
    let ln2 = std::f64::consts::LN_2;
    let amps = DVector::from_fn(n + 1, |k, _| {
        C64::from((0.5 * (ln_binomial(n, k) - n as f64 * ln2)).exp())
    });
    Ok(PureState::from_parts(Basis::symmetric(n), amps))
}

/// Wigner small-d matrix `d_{k',k}(θ) = ⟨D_n^{k'}| exp(-iθ S_y) |D_n^k⟩`.
///
/// `S_y = P† S_x P` with `P = diag(i^k)`, and `S_x` is real symmetric
/// tridiagonal, so the rotation is `i^{k-k'} [V exp(-iθΛ) Vᵀ]_{k'k}` from the
/// eigendecomposition `S_x = V Λ Vᵀ`. The result is real and orthogonal with
/// `d_{0,0}(θ) = cos^n(θ/2)`.
pub fn wigner_d_matrix(n: usize, angle: f64) -> DMatrix<f64> {
    let dim = n + 1;
    if n == 0 || angle == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let mut sx = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        let v = 0.5 * (((k + 1) * (n - k)) as f64).sqrt();
        sx[(k, k + 1)] = v;
        sx[(k + 1, k)] = v;
    }
    let (values, vecs) = crate::eig::symmetric(&sx).expect("tridiagonal eigensolver");
    let phases: Vec<C64> = values
        .iter()
        .map(|&lam| C64::from_polar(1.0, -angle * lam))
        .collect();
    // powers of i, indexed mod 4
    const I_POW: [C64; 4] = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    DMatrix::from_fn(dim, dim, |row, col| {
        let mut acc = C64::new(0.0, 0.0);
        for (l, ph) in phases.iter().enumerate() {
            acc += ph * (vecs[(row, l)] * vecs[(col, l)]);
        }
        let shift = (col + 4 * dim - row) % 4;
        let entry = I_POW[shift] * acc;
        debug_assert!(entry.im.abs() < 1e-9, "rotation entry not real: {entry}");
        entry.re
    })
}

/// Collective rotation `exp(-iθ S_y)`, applied per partition on a bipartite basis.
pub fn rotate_y(state: &PureState, angle: f64) -> PureState {
    match state.basis() {
        Basis::Symmetric(b) => {
            let d = wigner_d_matrix(b.n(), angle).map(C64::from);
            PureState::from_parts(state.basis(), d * state.amplitudes())
        }
        Basis::Bipartite(b) => {
            let d1 = wigner_d_matrix(b.n1(), angle).map(C64::from);
            let d2 = wigner_d_matrix(b.n2(), angle).map(C64::from);
            // amplitudes as an (n1+1) x (n2+1) matrix A; rotated = d1 A d2ᵀ
            let a = DMatrix::from_fn(b.n1() + 1, b.n2() + 1, |q, r| state.amplitude(b.index(q, r)));
            let rotated = d1 * a * d2.transpose();
            let amps = DVector::from_fn(b.dim(), |i, _| {
                let (q, r) = b.split(i);
                rotated[(q, r)]
            });
            PureState::from_parts(state.basis(), amps)
        }
    }
}

/// `|a⟩ ⊗ |b⟩` for states on symmetric bases.
pub fn tensor_bipartite(a: &PureState, b: &PureState) -> Result<PureState> {
    let (Basis::Symmetric(ba), Basis::Symmetric(bb)) = (a.basis(), b.basis()) else {
        return Err(Error::BasisMismatch(
            "tensor_bipartite expects two symmetric-basis states".into(),
        ));
    };
    let basis = BipartiteBasis::new(ba.n(), bb.n());
    let amps = DVector::from_fn(basis.dim(), |i, _| {
        let (q, r) = basis.split(i);
        a.amplitude(q) * b.amplitude(r)
    });
    Ok(PureState::from_parts(Basis::Bipartite(basis), amps))
}
