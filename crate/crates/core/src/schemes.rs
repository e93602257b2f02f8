//! Estimation pipelines: the standard scheme (signal on every qubit) and
//! differential interferometry (signal on the second partition only), each
//! under collective phase noise.
//!
//! The signal unitary `exp(-iωT G)` commutes with both the noise and the
//! generator, so it leaves the QFI unchanged and is never applied: the QFI is
//! taken directly on the noise-averaged state.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective_basis::{
    dicke_state, generator, ghz_state, plus_product_state, rotate_y, tensor_bipartite, Basis, BipartiteBasis,
    GeneratorKind, PureState, StateMatrix,
};
use crate::dephasing::{apply_collective_dephasing, apply_variant_dephasing, steady_state};
use crate::dephasing::{NoiseParams, NoiseVariant};
use crate::error::{Error, Result};
use crate::qfi::qfi_phase;

/// Default number of grid points for the rotation-angle scan.
pub const DEFAULT_ALPHA_GRID: usize = 201;
/// Width of the final golden-section bracket, in radians.
pub const GOLDEN_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeFamily {
    ProductPlus,
    Ghz,
    DickeSymmetric,
    Bsd,
    GhzBipartite,
    DfsOptimal,
}

impl ProbeFamily {
    pub const ALL: [ProbeFamily; 6] = [
        ProbeFamily::ProductPlus,
        ProbeFamily::Ghz,
        ProbeFamily::DickeSymmetric,
        ProbeFamily::Bsd,
        ProbeFamily::GhzBipartite,
        ProbeFamily::DfsOptimal,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ProbeFamily::ProductPlus => "PRODUCT_PLUS",
            ProbeFamily::Ghz => "GHZ",
            ProbeFamily::DickeSymmetric => "DICKE_SYMMETRIC",
            ProbeFamily::Bsd => "BSD",
            ProbeFamily::GhzBipartite => "GHZ_BIPARTITE",
            ProbeFamily::DfsOptimal => "DFS_OPTIMAL",
        }
    }

    pub fn supports_rotation(&self) -> bool {
        !matches!(self, ProbeFamily::DfsOptimal)
    }
}

impl fmt::Display for ProbeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProbeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|f| f.label() == norm)
            .ok_or_else(|| Error::InvalidProbe(format!("unknown probe family '{s}'")))
    }
}

/// Parameters of one probe state.
///
/// `n1` is the size of the first partition for bipartite families (`None`
/// otherwise; for `PRODUCT_PLUS` it selects the split product state). `k1` and
/// `k2` are only read by `BSD`. `alpha` is an extra y-rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub family: ProbeFamily,
    pub n: usize,
    pub n1: Option<usize>,
    pub k1: usize,
    pub k2: usize,
    pub alpha: f64,
}

impl ProbeSpec {
    fn base(family: ProbeFamily, n: usize, n1: Option<usize>) -> Self {
        Self {
            family,
            n,
            n1,
            k1: 0,
            k2: 0,
            alpha: 0.0,
        }
    }

    pub fn product(n: usize) -> Self {
        Self::base(ProbeFamily::ProductPlus, n, None)
    }

    pub fn product_split(n: usize, n1: usize) -> Self {
        Self::base(ProbeFamily::ProductPlus, n, Some(n1))
    }

    pub fn ghz(n: usize) -> Self {
        Self::base(ProbeFamily::Ghz, n, None)
    }

    pub fn dicke(n: usize) -> Self {
        Self::base(ProbeFamily::DickeSymmetric, n, None)
    }

    pub fn bsd(n: usize, n1: usize, k1: usize, k2: usize) -> Self {
        Self {
            k1,
            k2,
            ..Self::base(ProbeFamily::Bsd, n, Some(n1))
        }
    }

    pub fn ghz_pair(n: usize, n1: usize) -> Self {
        Self::base(ProbeFamily::GhzBipartite, n, Some(n1))
    }

    pub fn dfs_optimal(n: usize) -> Self {
        Self::base(ProbeFamily::DfsOptimal, n, Some(n / 2))
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn is_bipartite(&self) -> bool {
        self.n1.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProbe(format!("{}: {msg}", self.family)));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !self.alpha.is_finite() {
            return bad(format!("rotation angle {} is not finite", self.alpha));
        }
        let n = self.n;
        match (self.family, self.n1) {
            (ProbeFamily::ProductPlus, None) => {}
            (ProbeFamily::ProductPlus | ProbeFamily::GhzBipartite, Some(n1)) => {
                if n1 == 0 || n1 >= n {
                    return bad(format!("need 0 < n1 < n, got n1={n1}, n={n}"));
                }
            }
            (ProbeFamily::Ghz, None) => {}
            (ProbeFamily::DickeSymmetric, None) => {
                if n % 2 == 1 {
                    return bad(format!("needs even n, got {n}"));
                }
            }
            (ProbeFamily::Bsd, Some(n1)) => {
                if n1 > n {
                    return bad(format!("n1={n1} exceeds n={n}"));
                }
                if self.k1 > n1 || self.k2 > n - n1 {
                    return bad(format!(
                        "excitations (k1, k2) = ({}, {}) do not fit partitions ({n1}, {})",
                        self.k1,
                        self.k2,
                        n - n1
                    ));
                }
            }
            (ProbeFamily::DfsOptimal, Some(n1)) => {
                if n % 2 == 1 || n1 * 2 != n {
                    return bad(format!("needs even n and n1 = n/2, got n={n}, n1={n1}"));
                }
                if self.alpha != 0.0 {
                    return bad("does not take a rotation angle".into());
                }
            }
            (ProbeFamily::Ghz | ProbeFamily::DickeSymmetric, Some(_)) => {
                return bad("is not a bipartite family; omit n1".into())
            }
            (ProbeFamily::Bsd | ProbeFamily::GhzBipartite | ProbeFamily::DfsOptimal, None) => {
                return bad("requires a partition size n1".into())
            }
        }
        Ok(())
    }

    /// Generator-independent bound on the phase QFI for `kind`.
    pub fn qfi_bound(&self, kind: SchemeKind) -> f64 {
        let span = match kind {
            SchemeKind::Standard => self.n,
            _ => self.n - self.n1.unwrap_or(0),
        } as f64;
        span * span
    }
}

pub fn build_probe(spec: &ProbeSpec) -> Result<PureState> {
    spec.validate()?;
    let a = spec.alpha;
    let split = |n1: usize| (n1, spec.n - n1);
    match spec.family {
        ProbeFamily::ProductPlus => match spec.n1 {
            None => Ok(rotate_y(&plus_product_state(spec.n)?, a)),
            Some(n1) => {
                let (n1, n2) = split(n1);
                tensor_bipartite(
                    &rotate_y(&plus_product_state(n1)?, a),
                    &rotate_y(&plus_product_state(n2)?, a),
                )
            }
        },
        ProbeFamily::Ghz => Ok(rotate_y(&ghz_state(spec.n)?, a)),
        ProbeFamily::DickeSymmetric => Ok(rotate_y(&dicke_state(spec.n, spec.n / 2)?, FRAC_PI_2 + a)),
        ProbeFamily::Bsd => {
            let (n1, n2) = split(spec.n1.unwrap_or_default());
            tensor_bipartite(
                &rotate_y(&dicke_state(n1, spec.k1)?, FRAC_PI_2 + a),
                &rotate_y(&dicke_state(n2, spec.k2)?, FRAC_PI_2 + a),
            )
        }
        ProbeFamily::GhzBipartite => {
            let (n1, n2) = split(spec.n1.unwrap_or_default());
            tensor_bipartite(&rotate_y(&ghz_state(n1)?, a), &rotate_y(&ghz_state(n2)?, a))
        }
        ProbeFamily::DfsOptimal => {
            let half = spec.n / 2;
            let b = BipartiteBasis::new(half, half);
            let mut amps = nalgebra::DVector::zeros(b.dim());
            let s = num_complex::Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
            amps[b.index(0, half)] = s;
            amps[b.index(half, 0)] = s;
            PureState::new(Basis::Bipartite(b), amps)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchemeKind {
    Standard,
    DiIdeal,
    DiSpinEcho,
    DiRepeat,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Standard,
        SchemeKind::DiIdeal,
        SchemeKind::DiSpinEcho,
        SchemeKind::DiRepeat,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Standard => "STANDARD",
            SchemeKind::DiIdeal => "DI_IDEAL",
            SchemeKind::DiSpinEcho => "DI_SPIN_ECHO",
            SchemeKind::DiRepeat => "DI_REPEAT",
        }
    }

    pub fn is_differential(&self) -> bool {
        !matches!(self, SchemeKind::Standard)
    }

    pub fn generator_kind(&self) -> GeneratorKind {
        if self.is_differential() {
            GeneratorKind::SzPartition2
        } else {
            GeneratorKind::SzTotal
        }
    }

    fn noise_variant(&self) -> Option<NoiseVariant> {
        match self {
            SchemeKind::Standard => None,
            SchemeKind::DiIdeal => Some(NoiseVariant::IdealCollective),
            SchemeKind::DiSpinEcho => Some(NoiseVariant::SpinEcho),
            SchemeKind::DiRepeat => Some(NoiseVariant::IndependentRepeat),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.label() == norm)
            .ok_or_else(|| Error::Domain(format!("unknown scheme '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub noise: NoiseParams,
    /// Interrogation times in seconds, used by [`scan`].
    pub times: Vec<f64>,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, noise: NoiseParams) -> Self {
        Self {
            kind,
            noise,
            times: Vec::new(),
        }
    }

    pub fn with_times(self, times: Vec<f64>) -> Self {
        Self { times, ..self }
    }
}

fn check_compatible(probe: &PureState, kind: SchemeKind) -> Result<()> {
    if kind.is_differential() && !probe.basis().is_bipartite() {
        return Err(Error::IncompatibleScheme {
            scheme: kind.label().into(),
            reason: "differential schemes need a bipartite probe".into(),
        });
    }
    Ok(())
}

/// Noise-averaged state `ρ̄_T` of `probe` under `kind`.
pub fn averaged_state(
    probe: &PureState,
    kind: SchemeKind,
    noise: &NoiseParams,
    t: f64,
) -> Result<StateMatrix> {
    check_compatible(probe, kind)?;
    let rho = probe.density_matrix();
    match kind.noise_variant() {
        None => apply_collective_dephasing(&rho, t, noise),
        Some(v) => apply_variant_dephasing(&rho, t, noise, v),
    }
}

/// `(F^φ, F^ω)` for `probe` interrogated for `t` seconds.
pub fn scheme_qfi(probe: &PureState, scheme: &SchemeSpec, t: f64) -> Result<(f64, f64)> {
    let rho = averaged_state(probe, scheme.kind, &scheme.noise, t)?;
    let g = generator(rho.basis(), scheme.kind.generator_kind())?;
    let f = qfi_phase(&rho, &g)?;
    Ok((f, t * t * f))
}

/// Phase QFI in the `T → ∞` limit.
///
/// For the standard and ideal DI schemes this is the block projection onto
/// equal total excitation. With spin echo or independent repetitions every
/// coherence with a nonzero partition-weight difference decays, leaving the
/// diagonal.
pub fn steady_scheme_qfi(probe: &PureState, kind: SchemeKind) -> Result<f64> {
    check_compatible(probe, kind)?;
    let rho = probe.density_matrix();
    let limit = match kind {
        SchemeKind::Standard | SchemeKind::DiIdeal => steady_state(&rho),
        SchemeKind::DiSpinEcho | SchemeKind::DiRepeat => {
            rho.map_elements(|i, j, v| if i == j { v } else { 0.0.into() })
        }
    };
    let g = generator(limit.basis(), kind.generator_kind())?;
    qfi_phase(&limit, &g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationOptimum {
    pub alpha: f64,
    pub f_phase: f64,
}

/// Maximises the phase QFI over the rotation angle in `[0, π/2]`: a uniform
/// scan with `grid_points` points, then golden-section refinement in the
/// bracket around the best point. The refined angle replaces the grid angle
/// only if it improves the QFI beyond rounding, so ties resolve to the
/// smallest angle.
pub fn optimize_rotation(
    template: &ProbeSpec,
    scheme: &SchemeSpec,
    t: f64,
    grid_points: usize,
) -> Result<RotationOptimum> {
    if !template.family.supports_rotation() {
        return Err(Error::InvalidProbe(format!(
            "{} has no rotation angle to optimise",
            template.family
        )));
    }
    if grid_points < 2 {
        return Err(Error::Domain(format!(
            "rotation grid needs at least 2 points, got {grid_points}"
        )));
    }
    let eval = |alpha: f64| -> Result<f64> {
        let psi = build_probe(&template.with_alpha(alpha))?;
        Ok(scheme_qfi(&psi, scheme, t)?.0)
    };

    let step = FRAC_PI_2 / (grid_points - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..grid_points {
        let f = eval(i as f64 * step)?;
        if f > best.1 {
            best = (i, f);
        }
    }
    let (i_best, f_grid) = best;
    let alpha_grid = i_best as f64 * step;

    let lo = i_best.saturating_sub(1) as f64 * step;
    let hi = ((i_best + 1).min(grid_points - 1)) as f64 * step;
    let (alpha_ref, f_ref) = golden_section_max(&eval, lo, hi, GOLDEN_TOL)?;

    if f_ref > f_grid + 1e-12 * f_grid.abs().max(1e-300) {
        Ok(RotationOptimum {
            alpha: alpha_ref,
            f_phase: f_ref,
        })
    } else {
        Ok(RotationOptimum {
            alpha: alpha_grid,
            f_phase: f_grid,
        })
    }
}

fn golden_section_max(
    f: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Reflects an angle into `[0, π/2]` using the `α → -α` and `α → π - α`
/// symmetries of the probe families.
pub fn fold_angle(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(PI);
    if a > FRAC_PI_2 {
        PI - a
    } else {
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaMode {
    /// Use each probe's own `alpha`.
    Fixed,
    /// Optimise the angle per time point on a grid of this many points.
    Optimize { grid_points: usize },
}

/// One row of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub scheme: SchemeKind,
    pub family: ProbeFamily,
    pub n: usize,
    pub n1: Option<usize>,
    pub k1: usize,
    pub k2: usize,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "F_phase")]
    pub f_phase: f64,
    #[serde(rename = "F_freq")]
    pub f_freq: f64,
    pub alpha_opt: bool,
    /// Set when the cell could not be evaluated; the QFI fields are NaN then.
    pub error: Option<String>,
}

fn scan_cell(scheme: &SchemeSpec, probe: &ProbeSpec, t: f64, mode: AlphaMode) -> ScanResult {
    let mut row = ScanResult {
        scheme: scheme.kind,
        family: probe.family,
        n: probe.n,
        n1: probe.n1,
        k1: probe.k1,
        k2: probe.k2,
        alpha: probe.alpha,
        t,
        f_phase: f64::NAN,
        f_freq: f64::NAN,
        alpha_opt: matches!(mode, AlphaMode::Optimize { .. }),
        error: None,
    };
    let outcome = match mode {
        AlphaMode::Fixed => build_probe(probe).and_then(|psi| scheme_qfi(&psi, scheme, t)),
        AlphaMode::Optimize { grid_points } => optimize_rotation(probe, scheme, t, grid_points).map(|opt| {
            row.alpha = opt.alpha;
            (opt.f_phase, t * t * opt.f_phase)
        }),
    };
    match outcome {
        Ok((fp, ff)) => {
            row.f_phase = fp;
            row.f_freq = ff;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluates every `(probe, time)` pair of `scheme.times`, probe-major.
/// Cells run in parallel; row order does not depend on scheduling. Failed
/// cells come back as rows with `error` set.
pub fn scan(scheme: &SchemeSpec, probes: &[ProbeSpec], mode: AlphaMode) -> Result<Vec<ScanResult>> {
    if probes.is_empty() || scheme.times.is_empty() {
        return Err(Error::Domain("scan needs at least one probe and one time".into()));
    }
    let cells: Vec<(&ProbeSpec, f64)> = probes
        .iter()
        .flat_map(|p| scheme.times.iter().map(move |&t| (p, t)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|(p, t)| scan_cell(scheme, p, *t, mode))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: SchemeKind) -> SchemeSpec {
        SchemeSpec::new(kind, NoiseParams::default())
    }

    #[test]
    fn family_and_scheme_parsing() {
        assert_eq!("ghz".parse::<ProbeFamily>().unwrap(), ProbeFamily::Ghz);
        assert_eq!(
            "dfs-optimal".parse::<ProbeFamily>().unwrap(),
            ProbeFamily::DfsOptimal
        );
        assert!("w_state".parse::<ProbeFamily>().is_err());
        assert_eq!(
            "di_spin_echo".parse::<SchemeKind>().unwrap(),
            SchemeKind::DiSpinEcho
        );
        for f in ProbeFamily::ALL {
            assert_eq!(f.label().parse::<ProbeFamily>().unwrap(), f);
        }
    }

    #[test]
    fn unrotated_ghz_probe_is_ghz() {
        let psi = build_probe(&ProbeSpec::ghz(8)).unwrap();
        assert_eq!(psi, ghz_state(8).unwrap());
    }

    #[test]
    fn dicke_probe_is_rotated_dicke() {
        let psi = build_probe(&ProbeSpec::dicke(8)).unwrap();
        let want = rotate_y(&dicke_state(8, 4).unwrap(), FRAC_PI_2);
        assert!((psi.amplitudes() - want.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn dfs_probe_layout() {
        let psi = build_probe(&ProbeSpec::dfs_optimal(8)).unwrap();
        let b = BipartiteBasis::new(4, 4);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(psi.amplitude(b.index(0, 4)).re, s);
        assert_eq!(psi.amplitude(b.index(4, 0)).re, s);
        assert_eq!(psi.amplitudes().iter().filter(|c| c.norm() > 0.0).count(), 2);
    }

    #[test]
    fn invalid_probes_are_rejected() {
        assert!(build_probe(&ProbeSpec::dicke(7)).is_err());
        assert!(build_probe(&ProbeSpec::bsd(8, 4, 5, 0)).is_err());
        assert!(build_probe(&ProbeSpec::bsd(8, 9, 0, 0)).is_err());
        assert!(build_probe(&ProbeSpec::ghz_pair(8, 0)).is_err());
        assert!(build_probe(&ProbeSpec::dfs_optimal(7)).is_err());
        assert!(build_probe(&ProbeSpec::dfs_optimal(8).with_alpha(0.1)).is_err());
        let mut g = ProbeSpec::ghz(4);
        g.n1 = Some(2);
        assert!(build_probe(&g).is_err());
        assert!(build_probe(&ProbeSpec::ghz(0)).is_err());
    }

    #[test]
    fn differential_scheme_needs_bipartite_probe() {
        let psi = build_probe(&ProbeSpec::ghz(4)).unwrap();
        let err = scheme_qfi(&psi, &spec(SchemeKind::DiIdeal), 0.1).unwrap_err();
        assert!(matches!(err, Error::IncompatibleScheme { .. }));
    }

    #[test]
    fn noiseless_anchors() {
        let cases = [
            (ProbeSpec::ghz(8), SchemeKind::Standard, 64.0),
            (ProbeSpec::ghz_pair(8, 4), SchemeKind::DiIdeal, 16.0),
            (ProbeSpec::bsd(8, 4, 2, 2), SchemeKind::DiIdeal, 12.0),
            (ProbeSpec::product_split(8, 4), SchemeKind::DiIdeal, 4.0),
        ];
        for (p, kind, want) in cases {
            let psi = build_probe(&p).unwrap();
            let (f, ff) = scheme_qfi(&psi, &spec(kind), 0.0).unwrap();
            assert!((f - want).abs() < 1e-9 * want, "{p:?}: {f}");
            assert_eq!(ff, 0.0);
        }
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let f = |x: f64| -> Result<f64> { Ok(-(x - 0.3) * (x - 0.3)) };
        let (x, _) = golden_section_max(&f, 0.0, 1.0, 1e-8).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn fold_angle_covers_symmetries() {
        assert!((fold_angle(PI - 0.2) - 0.2).abs() < 1e-15);
        assert!((fold_angle(-0.2) - 0.2).abs() < 1e-15);
        assert!((fold_angle(0.4) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn scan_orders_probe_major() {
        let s = spec(SchemeKind::Standard).with_times(vec![0.0, 1e-3, 1e-2]);
        let probes = [ProbeSpec::ghz(4), ProbeSpec::product(4)];
        let rows = scan(&s, &probes, AlphaMode::Fixed).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].family, ProbeFamily::Ghz);
        assert_eq!(rows[2].t, 1e-2);
        assert_eq!(rows[3].family, ProbeFamily::ProductPlus);
        assert_eq!(rows[3].t, 0.0);
    }

    #[test]
    fn scan_flags_bad_cells() {
        let s = spec(SchemeKind::DiIdeal).with_times(vec![0.1]);
        let probes = [ProbeSpec::ghz(4), ProbeSpec::ghz_pair(4, 2)];
        let rows = scan(&s, &probes, AlphaMode::Fixed).unwrap();
        assert!(rows[0].error.is_some() && rows[0].f_phase.is_nan());
        assert!(rows[1].error.is_none());
        assert!(scan(&spec(SchemeKind::Standard), &probes, AlphaMode::Fixed).is_err());
    }

    #[test]
    fn single_cell_scan() {
        let s = spec(SchemeKind::Standard).with_times(vec![1e-3]);
        let rows = scan(&s, &[ProbeSpec::ghz(3)], AlphaMode::Fixed).unwrap();
        assert_eq!(rows.len(), 1);
    }
}
