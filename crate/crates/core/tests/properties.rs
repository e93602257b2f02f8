use dephasing_qfi::qfi::qfi_phase_with_threshold;
use dephasing_qfi::*;
use nalgebra::DVector;
use proptest::prelude::*;

/// A basis, a generator on it and a normalized random state.
#[derive(Debug, Clone)]
struct Case {
    basis: Basis,
    kind: GeneratorKind,
    psi: PureState,
}

fn basis_strategy() -> impl Strategy<Value = (Basis, GeneratorKind)> {
    prop_oneof![
        (1usize..=10).prop_map(|n| (Basis::symmetric(n), GeneratorKind::SzTotal)),
        (1usize..=4, 1usize..=4, any::<bool>()).prop_map(|(a, b, partition)| {
            let kind = if partition {
                GeneratorKind::SzPartition2
            } else {
                GeneratorKind::SzTotal
            };
            (Basis::bipartite(a, b), kind)
        }),
    ]
}

fn state_on(basis: Basis) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), basis.dim()).prop_filter_map(
        "zero vector",
        move |v| {
            let amps = DVector::from_iterator(v.len(), v.into_iter().map(|(re, im)| C64::new(re, im)));
            PureState::normalized(basis, amps).ok()
        },
    )
}

fn case() -> impl Strategy<Value = Case> {
    basis_strategy()
        .prop_flat_map(|(basis, kind)| state_on(basis).prop_map(move |psi| Case { basis, kind, psi }))
}

fn case_pair() -> impl Strategy<Value = (Case, PureState)> {
    case().prop_flat_map(|c| {
        let b = c.basis;
        (Just(c), state_on(b))
    })
}

fn noise() -> NoiseParams {
    NoiseParams::default()
}

fn variance(psi: &PureState, g: &Generator) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (c, &w) in psi.amplitudes().iter().zip(g.diagonal()) {
        m1 += c.norm_sqr() * w;
        m2 += c.norm_sqr() * w * w;
    }
    m2 - m1 * m1
}

fn assert_valid_state(rho: &StateMatrix) {
    // StateMatrix::new checks Hermiticity, unit trace and positivity
    StateMatrix::new(rho.basis(), rho.matrix().clone()).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pure_state_qfi_is_four_variance(c in case()) {
        let g = generator(c.basis, c.kind).unwrap();
        let f = qfi_phase(&c.psi.density_matrix(), &g).unwrap();
        let want = 4.0 * variance(&c.psi, &g);
        prop_assert!((f - want).abs() <= 1e-9 * want.max(1.0), "{f} vs {want}");
    }

    #[test]
    fn qfi_is_convex((c, other) in case_pair(), p in 0.0f64..1.0, t in 0.0f64..3e-3) {
        let g = generator(c.basis, c.kind).unwrap();
        let r1 = apply_collective_dephasing(&c.psi.density_matrix(), t, &noise()).unwrap();
        let r2 = other.density_matrix();
        let mixed = r1.mix(&r2, p).unwrap();
        let (f1, f2, fm) = (
            qfi_phase(&r1, &g).unwrap(),
            qfi_phase(&r2, &g).unwrap(),
            qfi_phase(&mixed, &g).unwrap(),
        );
        prop_assert!(fm <= p * f1 + (1.0 - p) * f2 + 1e-9 * (f1 + f2).max(1.0));
    }

    #[test]
    fn qfi_respects_generator_bound(c in case(), t in 0.0f64..1e-2) {
        let g = generator(c.basis, c.kind).unwrap();
        let rho = apply_collective_dephasing(&c.psi.density_matrix(), t, &noise()).unwrap();
        let f = qfi_phase(&rho, &g).unwrap();
        prop_assert!(f >= -1e-12);
        prop_assert!(f <= max_qfi_bound(&g) * (1.0 + 1e-12));
    }

    #[test]
    fn qfi_is_invariant_under_commuting_unitaries(c in case(), phi in -3.0f64..3.0, t in 0.0f64..2e-3) {
        let g = generator(c.basis, c.kind).unwrap();
        let phased = DVector::from_fn(c.basis.dim(), |i, _| {
            c.psi.amplitude(i) * C64::from_polar(1.0, -phi * g.diagonal()[i])
        });
        let psi2 = PureState::new(c.basis, phased).unwrap();
        let r1 = apply_collective_dephasing(&c.psi.density_matrix(), t, &noise()).unwrap();
        let r2 = apply_collective_dephasing(&psi2.density_matrix(), t, &noise()).unwrap();
        let (f1, f2) = (qfi_phase(&r1, &g).unwrap(), qfi_phase(&r2, &g).unwrap());
        prop_assert!((f1 - f2).abs() <= 1e-9 * f1.max(1.0));
    }

    #[test]
    fn qfi_is_insensitive_to_the_cutoff((c, other) in case_pair(), p in 0.05f64..0.95, t in 0.0f64..2e-3) {
        let g = generator(c.basis, c.kind).unwrap();
        let rho = apply_collective_dephasing(&c.psi.density_matrix(), t, &noise())
            .unwrap()
            .mix(&other.density_matrix(), p)
            .unwrap();
        let loose = qfi_phase_with_threshold(&rho, &g, 1e-10).unwrap();
        let tight = qfi_phase_with_threshold(&rho, &g, 1e-14).unwrap();
        prop_assert!((loose - tight).abs() <= 1e-6 * tight.max(1.0));
    }

    #[test]
    fn ghz_qfi_is_even_in_the_rotation_angle(n in 1usize..=12, alpha in -3.0f64..3.0) {
        let g_plus = build_probe(&ProbeSpec::ghz(n).with_alpha(alpha)).unwrap();
        let g_minus = build_probe(&ProbeSpec::ghz(n).with_alpha(-alpha)).unwrap();
        let g = generator(Basis::symmetric(n), GeneratorKind::SzTotal).unwrap();
        let f1 = qfi_phase(&g_plus.density_matrix(), &g).unwrap();
        let f2 = qfi_phase(&g_minus.density_matrix(), &g).unwrap();
        prop_assert!((f1 - f2).abs() <= 1e-9 * f1.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dephasing_channels_keep_states_physical(c in case(), t in 0.0f64..5.0, variant in 0usize..3) {
        let rho = c.psi.density_matrix();
        let out = match (c.basis, variant) {
            (Basis::Bipartite(_), 1) => apply_variant_dephasing(&rho, t, &noise(), NoiseVariant::SpinEcho).unwrap(),
            (Basis::Bipartite(_), 2) => apply_variant_dephasing(&rho, t, &noise(), NoiseVariant::IndependentRepeat).unwrap(),
            _ => apply_collective_dephasing(&rho, t, &noise()).unwrap(),
        };
        assert_valid_state(&out);
        assert_valid_state(&steady_state(&rho));
    }

    #[test]
    fn dephased_qfi_is_nonincreasing_in_time(c in case(), t1 in 0.0f64..3e-3, dt in 0.0f64..3e-3) {
        let g = generator(c.basis, c.kind).unwrap();
        let rho = c.psi.density_matrix();
        let a = qfi_phase(&apply_collective_dephasing(&rho, t1, &noise()).unwrap(), &g).unwrap();
        let b = qfi_phase(&apply_collective_dephasing(&rho, t1 + dt, &noise()).unwrap(), &g).unwrap();
        prop_assert!(b <= a + 1e-9 * a.max(1.0), "{a} -> {b}");
    }

    #[test]
    fn steady_projection_is_idempotent(c in case()) {
        let s = steady_state(&c.psi.density_matrix());
        let ss = steady_state(&s);
        prop_assert!((s.matrix() - ss.matrix()).camax() == 0.0);
    }

    #[test]
    fn wigner_d_is_a_group(n in 0usize..=30, a in -3.2f64..3.2, b in -3.2f64..3.2) {
        let prod = wigner_d_matrix(n, a) * wigner_d_matrix(n, b);
        prop_assert!((prod - wigner_d_matrix(n, a + b)).amax() < 1e-11);
    }

    #[test]
    fn block_probabilities_are_a_distribution(n in 1usize..=20, seed in any::<u64>()) {
        let n1 = (seed % (n as u64 + 1)) as usize;
        let k1 = ((seed >> 8) % (n1 as u64 + 1)) as usize;
        let k2 = ((seed >> 16) % ((n - n1) as u64 + 1)) as usize;
        let c = SplitChoice::new(n, n1, k1, k1 + k2).unwrap();
        let p = block_probabilities(&c).unwrap();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_echo_variance_is_symmetric_and_nonnegative(a in -6.0f64..6.0, b in -6.0f64..6.0, t in 0.0f64..10.0) {
        let v = spin_echo_weights_variance(a, b, t, &noise()).unwrap();
        let w = spin_echo_weights_variance(-a, -b, t, &noise()).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!((v - w).abs() <= 1e-12 * v.max(1e-300));
    }
}
