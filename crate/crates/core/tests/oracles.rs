//! Independent routes to the same numbers: the full 2^n qubit space, the
//! matrix exponential of S_y, and alternative lower limits of the split sum.

use std::f64::consts::FRAC_PI_2;

use dephasing_qfi::qfi::eigh_matrix;
use dephasing_qfi::steady_forms::wigner_d_half_pi;
use dephasing_qfi::verify::{bsd_choices, bsd_numeric_steady_qfi, spin_echo_quadrature};
use dephasing_qfi::*;
use nalgebra::{DMatrix, DVector};

/// State vector on 2^n qubits; bit j of the index is qubit j, 1 = excited.
/// Qubits `0..n1` form the first partition.
struct Full {
    n: usize,
    n1: usize,
    psi: DVector<C64>,
}

fn popcount_range(x: usize, lo: usize, hi: usize) -> usize {
    (lo..hi).filter(|&j| x >> j & 1 == 1).count()
}

impl Full {
    fn dicke(n: usize, k: usize) -> DVector<C64> {
        let v = DVector::from_fn(1 << n, |x, _| {
            if (x as u64).count_ones() as usize == k {
                C64::from(1.0)
            } else {
                C64::from(0.0)
            }
        });
        v.normalize()
    }

    fn ghz(n: usize) -> DVector<C64> {
        let mut v = DVector::zeros(1 << n);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[0] = C64::from(s);
        v[(1 << n) - 1] += C64::from(s);
        v
    }

    fn kron(a: &DVector<C64>, na: usize, b: &DVector<C64>) -> DVector<C64> {
        // qubits of `a` occupy the low bits
        DVector::from_fn(a.len() * b.len(), |x, _| a[x & ((1 << na) - 1)] * b[x >> na])
    }

    /// `exp(-iθσ_y/2)` on every qubit in `lo..hi`.
    fn rotate(v: &DVector<C64>, lo: usize, hi: usize, theta: f64) -> DVector<C64> {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let mut out = v.clone();
        for j in lo..hi {
            let mut next = out.clone();
            for x in 0..out.len() {
                let bit = x >> j & 1;
                let y = x ^ (1 << j);
                // new[x] = Σ_b u[bit(x), b] old[x with bit b]
                next[x] = if bit == 0 {
                    out[x] * c + out[y] * s
                } else {
                    out[y] * (-s) + out[x] * c
                };
            }
            out = next;
        }
        out
    }

    fn m(&self, x: usize, lo: usize, hi: usize) -> f64 {
        popcount_range(x, lo, hi) as f64 - (hi - lo) as f64 / 2.0
    }

    fn rho(&self) -> DMatrix<C64> {
        &self.psi * self.psi.adjoint()
    }

    fn dephase(&self, variance: impl Fn(f64, f64) -> f64) -> DMatrix<C64> {
        let rho = self.rho();
        let dim = rho.nrows();
        DMatrix::from_fn(dim, dim, |x, y| {
            let a = self.m(x, 0, self.n1) - self.m(y, 0, self.n1);
            let b = self.m(x, self.n1, self.n) - self.m(y, self.n1, self.n);
            rho[(x, y)] * (-variance(a, b) / 2.0).exp()
        })
    }

    /// Textbook QFI `2 Σ (λa-λb)²/(λa+λb) |G_ab|²` for diagonal `G`.
    fn qfi(rho: &DMatrix<C64>, g: &[f64]) -> f64 {
        let e = eigh_matrix(rho).unwrap();
        let v = &e.eigenvectors;
        let gm = DMatrix::from_fn(g.len(), g.len(), |i, j| {
            if i == j {
                C64::from(g[i])
            } else {
                C64::from(0.0)
            }
        });
        let gr = v.adjoint() * gm * v;
        let lam: Vec<f64> = e.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let mut f = 0.0;
        for a in 0..lam.len() {
            for b in 0..lam.len() {
                let s = lam[a] + lam[b];
                if s > 1e-12 {
                    f += 2.0 * (lam[a] - lam[b]).powi(2) / s * gr[(a, b)].norm_sqr();
                }
            }
        }
        f
    }

    fn generator(&self, partition2_only: bool) -> Vec<f64> {
        let lo = if partition2_only { self.n1 } else { 0 };
        (0..1usize << self.n).map(|x| self.m(x, lo, self.n)).collect()
    }
}

fn full_probe(p: &ProbeSpec) -> Full {
    let n = p.n;
    let a = p.alpha;
    let psi = match (p.family, p.n1) {
        (ProbeFamily::Ghz, _) => Full::rotate(&Full::ghz(n), 0, n, a),
        (ProbeFamily::DickeSymmetric, _) => Full::rotate(&Full::dicke(n, n / 2), 0, n, FRAC_PI_2 + a),
        (ProbeFamily::ProductPlus, _) => Full::rotate(&Full::dicke(n, 0), 0, n, a - FRAC_PI_2),
        (ProbeFamily::Bsd, Some(n1)) => {
            let v = Full::kron(&Full::dicke(n1, p.k1), n1, &Full::dicke(n - n1, p.k2));
            Full::rotate(&v, 0, n, FRAC_PI_2 + a)
        }
        (ProbeFamily::GhzBipartite, Some(n1)) => {
            let v = Full::kron(&Full::ghz(n1), n1, &Full::ghz(n - n1));
            Full::rotate(&v, 0, n, a)
        }
        (ProbeFamily::DfsOptimal, Some(n1)) => {
            let mut v = DVector::zeros(1 << n);
            let low = (1usize << n1) - 1;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            v[low] = C64::from(s);
            v[((1usize << n) - 1) ^ low] = C64::from(s);
            v
        }
        other => panic!("unsupported {other:?}"),
    };
    Full {
        n,
        n1: p.n1.unwrap_or(0),
        psi,
    }
}

fn full_qfi(p: &ProbeSpec, kind: SchemeKind, t: f64, noise: &NoiseParams) -> f64 {
    let f = full_probe(p);
    let c = |t: f64| phase_variance_c(t, noise).unwrap();
    let rho = match kind {
        SchemeKind::Standard | SchemeKind::DiIdeal => f.dephase(|a, b| (a + b).powi(2) * c(t)),
        SchemeKind::DiRepeat => f.dephase(|a, b| (a * a + b * b) * c(t)),
        SchemeKind::DiSpinEcho => f.dephase(|a, b| spin_echo_quadrature(a, b, t, noise)),
    };
    Full::qfi(&rho, &f.generator(kind.is_differential()))
}

fn close(got: f64, want: f64, tol: f64, floor: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(floor)
}

#[test]
fn symmetric_probes_embed_into_full_space() {
    let cases = [
        ProbeSpec::ghz(5).with_alpha(0.4),
        ProbeSpec::dicke(6).with_alpha(0.2),
        ProbeSpec::product(5).with_alpha(0.7),
    ];
    for p in cases {
        let sym = build_probe(&p).unwrap();
        let full = full_probe(&p);
        for x in 0..1usize << p.n {
            let k = (x as u64).count_ones() as usize;
            let want = sym.amplitude(k) / binom::binomial(p.n, k).sqrt();
            assert!((full.psi[x] - want).norm() < 1e-13, "{p:?} x={x}");
        }
    }
}

#[test]
fn standard_scheme_matches_full_space() {
    let noise = NoiseParams::default();
    let scheme = SchemeSpec::new(SchemeKind::Standard, noise);
    for n in 1..=6 {
        let mut probes = vec![
            ProbeSpec::ghz(n).with_alpha(0.3),
            ProbeSpec::product(n).with_alpha(0.5),
        ];
        if n % 2 == 0 {
            probes.push(ProbeSpec::dicke(n).with_alpha(0.25));
        }
        for p in probes {
            for t in [0.0, 2e-4, 1e-3] {
                let got = scheme_qfi(&build_probe(&p).unwrap(), &scheme, t).unwrap().0;
                let want = full_qfi(&p, SchemeKind::Standard, t, &noise);
                assert!(close(got, want, 1e-8, 1e-6), "{p:?} T={t}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn differential_schemes_match_full_space() {
    let noise = NoiseParams::default();
    let probes = [
        ProbeSpec::bsd(6, 3, 1, 2),
        ProbeSpec::bsd(5, 2, 1, 1).with_alpha(0.3),
        ProbeSpec::ghz_pair(6, 2),
        ProbeSpec::ghz_pair(4, 2).with_alpha(0.2),
        ProbeSpec::product_split(5, 3),
        ProbeSpec::dfs_optimal(6),
    ];
    for kind in [SchemeKind::DiIdeal, SchemeKind::DiSpinEcho, SchemeKind::DiRepeat] {
        let scheme = SchemeSpec::new(kind, noise);
        for p in probes {
            for t in [0.0, 3e-4, 2e-3] {
                let got = scheme_qfi(&build_probe(&p).unwrap(), &scheme, t).unwrap().0;
                let want = full_qfi(&p, kind, t, &noise);
                assert!(
                    close(got, want, 1e-8, 1e-6),
                    "{kind} {p:?} T={t}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn steady_states_match_full_space() {
    let noise = NoiseParams::default();
    for c in bsd_choices(5) {
        let p = ProbeSpec::bsd(5, c.n1, c.k1, c.k2());
        if c.n1 == 0 || c.n1 == 5 {
            continue;
        }
        let want = full_qfi(&p, SchemeKind::DiIdeal, 80.0, &noise);
        let got = bsd_steady_qfi(&c).unwrap();
        assert!(close(got, want, 1e-8, 1.0), "{c:?}: {got} vs {want}");
    }
}

fn s_y(n: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        // S_+ |k⟩ = sqrt((k+1)(n-k)) |k+1⟩, S_y = (S_+ - S_-) / 2i
        let v = (((k + 1) * (n - k)) as f64).sqrt();
        m[(k + 1, k)] = C64::new(0.0, -v / 2.0);
        m[(k, k + 1)] = C64::new(0.0, v / 2.0);
    }
    m
}

#[test]
fn wigner_d_matches_matrix_exponential() {
    for n in [1usize, 2, 4, 7, 10] {
        for theta in [0.1, FRAC_PI_2, 1.3, 2.9, -0.8] {
            let u = (s_y(n) * C64::new(0.0, -theta)).exp();
            let d = wigner_d_matrix(n, theta);
            for i in 0..=n {
                for j in 0..=n {
                    assert!(
                        (u[(i, j)] - C64::from(d[(i, j)])).norm() < 1e-12,
                        "n={n} θ={theta}"
                    );
                }
            }
        }
    }
}

#[test]
fn exact_half_pi_table_matches_matrix_exponential() {
    for n in [3usize, 6, 12] {
        let u = (s_y(n) * C64::new(0.0, -FRAC_PI_2)).exp();
        let d = wigner_d_half_pi(n);
        assert!((u - d.map(C64::from)).camax() < 1e-12);
    }
}

#[test]
fn spin_half_rotation_convention() {
    let d = wigner_d_matrix(1, FRAC_PI_2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let want = DMatrix::from_row_slice(2, 2, &[s, s, -s, s]);
    assert!((d - want).amax() < 1e-15);
}

/// Steady BSD QFI with a caller-chosen lower end of the inner sum over q.
fn bsd_with_lower(c: &SplitChoice, lower: impl Fn(usize) -> i64) -> f64 {
    let (n1, n2, k2) = (c.n1, c.n2(), c.k2());
    let d1 = wigner_d_half_pi(n1);
    let d2 = wigner_d_half_pi(n2);
    let mut total = 0.0;
    for kp in 0..=c.n {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let lo = lower(kp).max(0) as usize;
        for q in lo..=kp.min(n1) {
            if kp - q > n2 {
                // outside the basis; looser lower limits admit it, treat as zero weight
                continue;
            }
            let w = (d1[(q, c.k1)] * d2[(kp - q, k2)]).powi(2);
            let m2 = (kp - q) as f64 - n2 as f64 / 2.0;
            s0 += w;
            s1 += w * m2;
            s2 += w * m2 * m2;
        }
        if s0 > 1e-15 {
            total += s2 - s1 * s1 / s0;
        }
    }
    4.0 * total
}

#[test]
fn lower_limit_of_the_split_sum_matters() {
    let mut n2_based_bad = 0;
    let mut n1_based_bad = 0;
    let mut ours_bad = 0;
    for n in [4usize, 6, 8] {
        for c in bsd_choices(n) {
            let want = bsd_numeric_steady_qfi(&c).unwrap();
            let n1 = c.n1 as i64;
            let nn = n as i64;
            let bad = |v: f64| !close(v, want, 1e-9, 1.0);
            n2_based_bad += bad(bsd_with_lower(&c, |kp| nn - n1 - kp as i64)) as usize;
            n1_based_bad += bad(bsd_with_lower(&c, |kp| kp as i64 - n1)) as usize;
            ours_bad += bad(bsd_with_lower(&c, |kp| kp as i64 - (nn - n1))) as usize;
        }
    }
    assert_eq!(ours_bad, 0);
    assert!(n2_based_bad > 0);
    assert!(n1_based_bad > 0);
}

#[test]
fn n1_based_lower_limit_is_exact_for_equal_splits() {
    for n in [4usize, 6, 8] {
        for c in bsd_choices(n).into_iter().filter(|c| 2 * c.n1 == n) {
            let want = bsd_steady_qfi(&c).unwrap();
            let got = bsd_with_lower(&c, |kp| kp as i64 - c.n1 as i64);
            assert!(close(got, want, 1e-12, 1.0));
        }
    }
}
