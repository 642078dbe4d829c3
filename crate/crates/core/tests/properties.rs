use hdpath_core::certify::{
    eof_bound, fidelity_from_elements, h_down_mub, h_up_mub, isotropic_fidelity, schmidt_number_bound,
    white_noise_threshold, DiagonalData, OffDiagonalData,
};
use hdpath_core::measure::{
    estimate_diagonals, plan_full, simulate_counts, Acquisition, Normalization,
};
use hdpath_core::optics::{
    compile_subspace_projector, simulate, verify_subspace_setting, Element, Mode, ModeState, Network, Pol,
};
use hdpath_core::qstate::random::{random_density_matrix, random_unitary};
use hdpath_core::qstate::{
    apply_crosstalk, apply_dephasing, apply_white_noise, entanglement_entropy_pure, max_entangled, weighted_entangled,
};
use hdpath_core::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_from_exact_elements_matches_trace(seed in any::<u64>(), d in 2usize..=8, rank in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(d, d, rank, &mut rng).unwrap();
        let f = fidelity_from_elements(&DiagonalData::exact(&rho).unwrap(), &OffDiagonalData::exact(&rho).unwrap(), d).unwrap();
        prop_assert!((f - rho.fidelity_max_entangled().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn schmidt_bound_steps_just_above_boundary(d in 2usize..=64, k_frac in 0.0f64..1.0, eps_frac in 1e-6f64..0.5) {
        let k = 1 + ((d - 1) as f64 * k_frac) as usize % (d - 1);
        let eps = eps_frac / d as f64;
        prop_assert_eq!(schmidt_number_bound(k as f64 / d as f64 + eps, d), k + 1);
        let b = schmidt_number_bound(k as f64 / d as f64, d);
        prop_assert!(b >= 1 && b <= d);
    }

    #[test]
    fn mub_bounds_collapse_at_unit_fidelity(d in 2usize..=64) {
        let log_d = (d as f64).log2();
        prop_assert!((h_down_mub(1.0, d).unwrap() - log_d).abs() < 1e-12);
        prop_assert!((h_up_mub(1.0, d).unwrap() - log_d).abs() < 1e-12);
    }

    #[test]
    fn eof_monotone_in_fidelity(d in 2usize..=32, n in 0.5f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let diag = DiagonalData::from_same_path(&vec![n / d as f64; d], 0.0).unwrap();
        let lo = 1.0 / d as f64;
        let (f1, f2) = (lo + (1.0 - lo) * a.min(b), lo + (1.0 - lo) * a.max(b));
        let e1 = eof_bound(&diag, f1, d).unwrap().value;
        let e2 = eof_bound(&diag, f2, d).unwrap().value;
        prop_assert!(e1 <= e2 + 1e-12);
        prop_assert!(e2 <= (d as f64).log2() + 1e-9);
    }

    #[test]
    fn eof_never_exceeds_pure_state_entropy(weights in prop::sample::select(vec![2usize, 3, 4, 8])
        .prop_flat_map(|d| prop::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), d)))
    {
        let amps: Vec<C64> = weights.iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
        prop_assume!(amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6);
        let psi = weighted_entangled(&amps).unwrap();
        let rho = psi.density();
        let d = amps.len();
        let f = rho.fidelity_max_entangled().unwrap();
        prop_assume!(f >= 1.0 / d as f64);
        let e = eof_bound(&DiagonalData::exact(&rho).unwrap(), f.min(1.0), d).unwrap().value;
        prop_assert!(e <= entanglement_entropy_pure(&psi) + 1e-9);
    }

    #[test]
    fn noise_channels_give_valid_states(d in 2usize..=5, p in 0.0f64..=1.0, sigma in 0.0f64..3.0, eps in 0.0f64..0.01) {
        let rho = max_entangled(d).unwrap().density();
        let noisy = apply_crosstalk(&apply_white_noise(&apply_dephasing(&rho, sigma).unwrap(), p).unwrap(), eps).unwrap();
        prop_assert!(noisy.validate().is_ok());
        prop_assert!((noisy.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_invariant_under_u_conj_u(seed in any::<u64>(), d in 2usize..=5, p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(d, &mut rng);
        let uu = u.kronecker(&u.conjugate());
        let rho = apply_white_noise(&max_entangled(d).unwrap().density(), p).unwrap();
        let rotated = &uu * rho.matrix() * uu.adjoint();
        let rotated = hdpath_core::qstate::DensityMatrix::from_matrix(d, d, rotated).unwrap();
        let f = rotated.fidelity_max_entangled().unwrap();
        prop_assert!((f - isotropic_fidelity(p, d)).abs() < 1e-10);
    }

    #[test]
    fn white_noise_threshold_hits_separable_fidelity(d in 2usize..=32) {
        let p = white_noise_threshold(d).unwrap();
        prop_assert!((isotropic_fidelity(p, d) - 1.0 / d as f64).abs() < 1e-12);
    }

    #[test]
    fn lossless_networks_preserve_norm(ops in prop::collection::vec((0u8..4, 0.0f64..180.0, -3i32..=3, -3i32..=3), 1..12),
                                       h in 0.0f64..1.0, phase in 0.0f64..6.3) {
        let elements: Vec<Element> = ops.iter().map(|&(k, a, dx, dy)| match k {
            0 => Element::Hwp { angle_deg: a, ports: None },
            1 if (dx, dy) != (0, 0) => Element::Bd { offset: (dx, dy) },
            2 if (dx, dy) != (0, 0) => Element::Pbs { reflect: (dx, dy) },
            _ => Element::SlmPhase { phases: [((0, 0), a.to_radians())].into_iter().collect() },
        }).collect();
        let net = Network::new(elements, Vec::new(), Vec::new());
        let mut input = ModeState::new();
        input.add(Mode::new((0, 0), Pol::H), C64::new(h.sqrt(), 0.0));
        input.add(Mode::new((0, 0), Pol::V), C64::from_polar((1.0 - h).sqrt(), phase));
        let out = simulate(&net, &input).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let mut lossy = net.elements.clone();
        lossy.push(Element::PostSelectH);
        let out = simulate(&Network::new(lossy, Vec::new(), Vec::new()), &input).unwrap();
        prop_assert!(out.norm_sqr() <= 1.0 + 1e-12);
    }

    #[test]
    fn compiled_subspaces_verify(n in 2u32..=5, a in any::<u32>(), b in any::<u32>(),
                                 re in -1.0f64..1.0, im in -1.0f64..1.0, t in 0.0f64..1.0) {
        let d = 1usize << n;
        let (x, y) = ((a as usize) % d, (b as usize) % d);
        prop_assume!(x != y);
        let (i, j) = (x.min(y), x.max(y));
        let alpha = C64::new(t.sqrt(), 0.0);
        let beta = C64::new(re, im) * ((1.0 - t) / C64::new(re, im).norm().max(1e-9)).sqrt();
        let s = compile_subspace_projector(i, j, d, alpha, beta).unwrap();
        let r = verify_subspace_setting(&s, alpha, beta).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures);
    }
}

#[test]
fn sampled_populations_never_exceed_unity() {
    let rho = apply_white_noise(&max_entangled(8).unwrap().density(), 0.9).unwrap();
    let plan = plan_full(8).unwrap();
    let acq = Acquisition { rate_hz: 4000.0, duration_s: 0.5, efficiency: 0.16 };
    for seed in 0..30 {
        let recs = simulate_counts(&rho, &plan, &acq, seed).unwrap();
        let norm = Normalization::Calibrated { coincidence_rate_hz: acq.coincidence_rate() };
        let diag = estimate_diagonals(&recs, 8, norm).unwrap();
        assert!(diag.grid().iter().sum::<f64>() <= 1.0 + 1e-12);
    }
}
