//! Fixtures shared by the criterion benches.

use dephasing_qfi::{build_probe, NoiseParams, ProbeSpec, PureState, SchemeKind, SchemeSpec};

/// Register sizes the kernels are timed at.
pub const SIZES: [usize; 4] = [8, 16, 32, 64];

pub fn ghz_probe(n: usize) -> PureState {
    build_probe(&ProbeSpec::ghz(n).with_alpha(0.3)).expect("valid probe")
}

pub fn bsd_probe(n: usize) -> PureState {
    build_probe(&ProbeSpec::bsd(n, n / 2, n / 4, n / 4)).expect("valid probe")
}

pub fn scheme(kind: SchemeKind) -> SchemeSpec {
    SchemeSpec::new(kind, NoiseParams::default())
}
