//! Quantum Fisher information for phase and frequency estimation with
//! permutation-symmetric qubit probes under collective Gaussian phase noise.
//!
//! States live in the symmetric (Dicke) sector of `n` qubits, or in the
//! tensor product of two symmetric sectors for differential interferometry
//! (DI), where the signal only acts on the second partition while both
//! partitions share the noise. The full `2^n` Hilbert space is never built.
//!
//! Module map:
//!
//! * [`collective_basis`] - Dicke bases, probe states, y-rotations, generators.
//! * [`dephasing`] - the averaged collective-noise channel and its variants.
//! * [`qfi`] - eigendecomposition, QFI, Cramér-Rao bookkeeping.
//! * [`schemes`] - standard and DI estimation pipelines, rotation optimisation, scans.
//! * [`steady_forms`] - closed-form steady-state results used as oracles.
//! * [`verify`] - runtime cross-check suites (used by `dqfi verify`).

pub mod binom;
pub mod collective_basis;
pub mod dephasing;
mod eig;
pub mod error;
pub mod qfi;
pub mod schemes;
pub mod steady_forms;
pub mod verify;

pub use collective_basis::{
    dicke_state, generator, ghz_state, plus_product_state, rotate_y, tensor_bipartite, wigner_d_matrix,
    Basis, BipartiteBasis, Generator, GeneratorKind, PureState, StateMatrix, SymmetricBasis,
};
pub use dephasing::{
    apply_collective_dephasing, apply_variant_dephasing, phase_variance_c, spin_echo_weights_variance,
    steady_state, NoiseParams, NoiseVariant,
};
pub use error::{Error, Result};
pub use qfi::{
    cramer_rao_bound, eigh, max_qfi_bound, qfi_frequency, qfi_phase, repeated_frequency_precision,
    EigenDecomposition,
};
pub use schemes::{
    build_probe, optimize_rotation, scan, scheme_qfi, steady_scheme_qfi, AlphaMode, ProbeFamily, ProbeSpec,
    RotationOptimum, ScanResult, SchemeKind, SchemeSpec,
};
pub use steady_forms::{
    block_probabilities, bsd_steady_qfi, dfs_piecewise_qfi, ghz_bipartite_steady_qfi, ghz_qfi_analytic,
    optimize_bsd_split, product_steady_qfi, SplitChoice, SplitOptimum,
};

pub type C64 = num_complex::Complex64;
