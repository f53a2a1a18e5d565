use proptest::prelude::*;

use qchannel::channels::{
    self, apply, canonical_kraus, choi, compose, extend, from_dilation, remix, to_dilation, zoo,
    KrausChannel, StandardChannel,
};
use qchannel::correction::{
    best_random_recovery, construct_corrector, correctability_deficit, environment_info_check,
    verify_correction, DEFAULT_TOL,
};
use qchannel::info::{
    self, dpi_report, entanglement_fidelity, entanglement_fidelity_purified,
    entanglement_fidelity_trace, entropy_exchange, report, rq_and_re_states,
};
use qchannel::linalg::{
    self, c64, herm_eig, kron, partial_trace, projector, ComplexMatrix, SubsystemLayout,
};
use qchannel::random;
use qchannel::states::{
    mix, purify, random_density, random_pure, relative_state_ensemble, schmidt, DensityOperator,
    PureState,
};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn labeled(rho: DensityOperator, layout: SubsystemLayout) -> DensityOperator {
    DensityOperator::new(rho.matrix().clone(), layout).unwrap()
}

fn tripartite(seed: u64, dims: [usize; 3], rank: usize) -> DensityOperator {
    let d = dims.iter().product();
    let layout = SubsystemLayout::new([("A", dims[0]), ("B", dims[1]), ("C", dims[2])]).unwrap();
    labeled(random_density(d, rank.clamp(1, d), seed).unwrap(), layout)
}

/// Three-qubit repetition code with at most one bit flip, conjugated by a
/// random global unitary.
fn repetition_code_fixture(seed: u64) -> (DensityOperator, KrausChannel) {
    let mut rng = random::rng_from_seed(seed);
    let w = random::simplex_weights(&mut rng, 2);
    let probs = random::simplex_weights(&mut rng, 4);
    let v = random::unitary(&mut rng, 8);

    let mut code = ComplexMatrix::zeros(8, 2);
    let a = random::unitary(&mut rng, 2);
    for j in 0..2 {
        code[(0, j)] = a[(0, j)];
        code[(7, j)] = a[(1, j)];
    }
    let rho = &code * linalg::diag(&w) * code.adjoint();
    let rho = DensityOperator::on_system(&v * rho * v.adjoint()).unwrap();

    let x = channels::pauli_x();
    let i2 = linalg::identity(2);
    let flips = [
        linalg::identity(8),
        kron(&kron(&x, &i2), &i2),
        kron(&kron(&i2, &x), &i2),
        kron(&kron(&i2, &i2), &x),
    ];
    let ops = flips
        .iter()
        .zip(&probs)
        .map(|(f, p)| &v * f * v.adjoint() * c64(p.sqrt(), 0.0))
        .collect();
    (rho, KrausChannel::new(ops).unwrap())
}

// tensor-core

proptest! {
    #![proptest_config(config())]

    #[test]
    fn partial_trace_order_independent(seed in any::<u64>(), rank in 1usize..6) {
        let rho = tripartite(seed, [2, 3, 2], rank);
        let layout = rho.layout().clone();
        let direct = partial_trace(rho.matrix(), &layout, &["B"]).unwrap();
        let ab = rho.reduce(&["A", "B"]).unwrap();
        let via_ab = partial_trace(ab.matrix(), ab.layout(), &["B"]).unwrap();
        let bc = rho.reduce(&["B", "C"]).unwrap();
        let via_bc = partial_trace(bc.matrix(), bc.layout(), &["B"]).unwrap();
        prop_assert!((&direct - via_ab).norm() < 1e-12);
        prop_assert!((&direct - via_bc).norm() < 1e-12);
        prop_assert!((linalg::trace(&direct).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_bipartite_marginals_share_spectrum(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let layout = SubsystemLayout::new([("A", da), ("B", db)]).unwrap();
        let psi = PureState::new(random_pure(da * db, seed).vector().clone(), layout).unwrap();
        let sa = psi.reduce(&["A"]).unwrap().spectrum().eigenvalues;
        let sb = psi.reduce(&["B"]).unwrap().spectrum().eigenvalues;
        let nz = |s: &[f64]| s.iter().copied().filter(|&l| l > 1e-12).collect::<Vec<_>>();
        let (na, nb) = (nz(&sa), nz(&sb));
        prop_assert_eq!(na.len(), nb.len());
        for (x, y) in na.iter().zip(&nb) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn subadditivity(seed in any::<u64>(), rank in 1usize..7) {
        let layout = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        let rho = labeled(random_density(6, rank, seed).unwrap(), layout.clone());
        let sa = rho.reduce(&["A"]).unwrap().entropy();
        let sb = rho.reduce(&["B"]).unwrap().entropy();
        prop_assert!(rho.entropy() <= sa + sb + 1e-9);

        let a = random_density(2, 2, seed ^ 1).unwrap();
        let b = random_density(3, 2, seed ^ 2).unwrap();
        let product = DensityOperator::new(kron(a.matrix(), b.matrix()), layout).unwrap();
        prop_assert!((product.entropy() - a.entropy() - b.entropy()).abs() < 1e-9);
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), rank in 1usize..9) {
        let rho = tripartite(seed, [2, 2, 2], rank);
        let s = |keep: &[&str]| rho.reduce(keep).unwrap().entropy();
        prop_assert!(rho.entropy() + s(&["B"]) <= s(&["A", "B"]) + s(&["B", "C"]) + 1e-9);
    }

    #[test]
    fn herm_eig_reconstructs(seed in any::<u64>(), dim in 1usize..=32) {
        let mut rng = random::rng_from_seed(seed);
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| random::gaussian_vector(&mut rng, 1)[0]);
        let m = (&g + g.adjoint()).unscale(2.0);
        let spec = herm_eig(&m).unwrap();
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((spec.reconstruct() - &m).norm() <= 1e-9 * m.norm().max(1.0));
        prop_assert!(linalg::orthonormality_defect(&spec.eigenvectors) < 1e-10);
    }
}

// states

proptest! {
    #![proptest_config(config())]

    #[test]
    fn purification_round_trip(seed in any::<u64>(), dim in 1usize..=8, rank_frac in 0.0f64..1.0) {
        let rank = 1 + (rank_frac * dim as f64) as usize % dim;
        let rho = random_density(dim, rank, seed).unwrap();
        let psi = purify(&rho);
        prop_assert_eq!(psi.layout().dim_of("R"), Some(rank));
        let back = psi.reduce(&["Q"]).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).norm() < 1e-9);

        let s = schmidt(&psi, &["R"], &["Q"]).unwrap();
        let spec = rho.spectrum();
        prop_assert_eq!(s.coefficients.len(), rank);
        for (c, l) in s.coefficients.iter().zip(&spec.eigenvalues) {
            prop_assert!((c * c - l).abs() < 1e-9);
        }
        prop_assert!((s.reconstruct() - psi.vector()).norm() < 1e-8);
    }

    #[test]
    fn relative_state_ensembles_preserve_the_mixture(seed in any::<u64>(), dim in 2usize..5) {
        let rho = random_density(dim, dim, seed).unwrap();
        let psi = purify(&rho);
        let basis = random::unitary(&mut random::rng_from_seed(seed ^ 0xabc), dim);
        let e = relative_state_ensemble(&psi, &basis).unwrap();
        let mixed = mix(&e).unwrap();
        prop_assert!((mixed.matrix() - rho.matrix()).norm() < 1e-9);
    }
}

// channels

fn random_instance(seed: u64, dim: usize) -> (DensityOperator, KrausChannel) {
    let rank = 1 + (seed as usize) % dim;
    let kraus = 1 + (seed as usize / 7) % 4;
    (
        random_density(dim, rank, seed).unwrap(),
        channels::random_channel(dim, kraus, seed.wrapping_mul(31).wrapping_add(5)).unwrap(),
    )
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), dim in 2usize..5) {
        let (rho, ch) = random_instance(seed, dim);
        let out = apply(&ch, &rho).unwrap();
        prop_assert!((linalg::trace(out.matrix()).re - 1.0).abs() <= 1e-9);
        prop_assert!(*out.spectrum().eigenvalues.last().unwrap() >= -1e-8);
        let c = choi(&ch);
        prop_assert!(c.is_completely_positive());
        prop_assert!(c.trace_preservation_defect() < 1e-8);
    }

    #[test]
    fn remix_leaves_choi_invariant(seed in any::<u64>(), dim in 2usize..4, extra in 0usize..3) {
        let (_, ch) = random_instance(seed, dim);
        let v = random::isometry(&mut random::rng_from_seed(seed ^ 77), ch.len() + extra, ch.len());
        let r = remix(&ch, &v).unwrap();
        prop_assert!(choi(&r).distance(&choi(&ch)) < 1e-9);
        prop_assert!(r.validate() < 1e-8);
    }

    #[test]
    fn dilation_round_trip(seed in any::<u64>(), dim in 1usize..5) {
        let (_, ch) = random_instance(seed, dim);
        let dil = to_dilation(&ch).unwrap();
        prop_assert!(linalg::unitarity_defect(dil.unitary()) < 1e-8);
        let back = from_dilation(&dil).unwrap();
        prop_assert!(choi(&back).distance(&choi(&ch)) < 1e-8);
        let canon = canonical_kraus(&ch);
        prop_assert!(canon.len() <= ch.len());
        prop_assert!(choi(&canon).distance(&choi(&ch)) < 1e-8);
    }

    #[test]
    fn extension_commutes_with_partial_trace(seed in any::<u64>(), dim in 2usize..4, r in 1usize..4) {
        let ch = channels::random_channel(dim, 2, seed).unwrap();
        let layout = SubsystemLayout::new([("R", r), ("Q", dim)]).unwrap();
        let joint = labeled(random_density(r * dim, r * dim, seed ^ 3).unwrap(), layout);
        let out = apply(&extend(&ch, r).unwrap(), &joint.flattened()).unwrap();
        let out = labeled(out, joint.layout().clone());
        let lhs = out.reduce(&["Q"]).unwrap();
        let rhs = apply(&ch, &joint.reduce(&["Q"]).unwrap().flattened()).unwrap();
        prop_assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-9);
    }

    #[test]
    fn compose_matches_sequential_application(seed in any::<u64>(), dim in 2usize..4) {
        let (rho, c1) = random_instance(seed, dim);
        let c2 = channels::random_channel(dim, 3, seed ^ 11).unwrap();
        let a = apply(&compose(&c2, &c1).unwrap(), &rho).unwrap();
        let b = apply(&c2, &apply(&c1, &rho).unwrap()).unwrap();
        prop_assert!((a.matrix() - b.matrix()).norm() < 1e-9);
    }
}

// information quantities

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fidelity_routes_agree(seed in any::<u64>(), dim in 1usize..5) {
        let (rho, ch) = random_instance(seed, dim);
        let a = entanglement_fidelity_trace(&rho, &ch).unwrap();
        let b = entanglement_fidelity_purified(&rho, &ch).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn entanglement_fidelity_below_average_fidelity(seed in any::<u64>(), dim in 2usize..4) {
        let (rho, ch) = random_instance(seed, dim);
        let psi = purify(&rho);
        let r = psi.layout().dim_of("R").unwrap();
        let basis = random::unitary(&mut random::rng_from_seed(seed ^ 5), r);
        let e = relative_state_ensemble(&psi, &basis).unwrap();
        let fe = entanglement_fidelity(&rho, &ch).unwrap();
        prop_assert!(fe <= info::average_fidelity(&e, &ch).unwrap() + 1e-9);
    }

    #[test]
    fn report_invariants(seed in any::<u64>(), dim in 2usize..4) {
        let (rho, ch) = random_instance(seed, dim);
        let r = report(&rho, &ch).unwrap();
        prop_assert!((r.coherent_information - (r.output_entropy - r.entropy_exchange)).abs() < 1e-9);
        prop_assert!(r.coherent_information <= r.input_entropy + 1e-9);
        prop_assert!(r.fano_margin >= -1e-9);
        prop_assert!((0.0..=1.0).contains(&r.entanglement_fidelity));
    }

    #[test]
    fn remix_leaves_quantities_invariant(seed in any::<u64>(), dim in 2usize..4) {
        let (rho, ch) = random_instance(seed, dim);
        let v = random::isometry(&mut random::rng_from_seed(seed ^ 99), ch.len() + 1, ch.len());
        let r1 = report(&rho, &ch).unwrap();
        let r2 = report(&rho, &remix(&ch, &v).unwrap()).unwrap();
        prop_assert!((r1.entanglement_fidelity - r2.entanglement_fidelity).abs() <= 1e-9);
        prop_assert!((r1.entropy_exchange - r2.entropy_exchange).abs() <= 1e-9);
        prop_assert!((r1.coherent_information - r2.coherent_information).abs() <= 1e-9);
    }

    #[test]
    fn data_processing_chain(seed in any::<u64>(), dim in 2usize..4) {
        let (rho, c1) = random_instance(seed, dim);
        let c2 = channels::random_channel(dim, 1 + (seed as usize % 3), seed ^ 0x55).unwrap();
        prop_assert!(dpi_report(&rho, &c1, &c2).unwrap().chain_holds());
    }

    #[test]
    fn coherent_bound_tight_for_unitaries(seed in any::<u64>(), dim in 2usize..5) {
        let rho = random_density(dim, 1 + seed as usize % dim, seed).unwrap();
        let ch = channels::random_unitary_channel(dim, seed ^ 1);
        let ie = info::coherent_information(&rho, &ch).unwrap();
        prop_assert!((ie - rho.entropy()).abs() <= 1e-9);
        prop_assert!(rq_and_re_states(&rho, &ch).unwrap().product_defect() <= 1e-7);
    }

    #[test]
    fn coherent_bound_strict_for_dephasing(seed in any::<u64>(), p in 0.05f64..0.95) {
        let rho = random_density(2, 2, seed).unwrap();
        prop_assume!(rho.spectrum().eigenvalues[1] > 0.05);
        let ch = zoo(&StandardChannel::Dephasing(p)).unwrap();
        let ie = info::coherent_information(&rho, &ch).unwrap();
        prop_assert!(rho.entropy() - ie > 1e-9);
        prop_assert!(rq_and_re_states(&rho, &ch).unwrap().product_defect() > 1e-7);
    }
}

#[test]
fn entropy_exchange_is_not_monotone_under_composition() {
    // found by a seeded search over random qubit channel pairs
    let rho = random_density(2, 2, 12).unwrap();
    let c1 = channels::random_channel(2, 2, 1012).unwrap();
    let c2 = channels::random_channel(2, 2, 2012).unwrap();
    let d = dpi_report(&rho, &c1, &c2).unwrap();
    assert!((d.se_stage1 - 0.491678854724).abs() < 1e-9, "{}", d.se_stage1);
    assert!((d.se_both - 0.181033858099).abs() < 1e-9, "{}", d.se_both);
    assert!(d.se_both < d.se_stage1);
    assert!(d.chain_holds());
}

#[test]
fn fidelity_one_forces_zero_entropy_exchange() {
    for seed in 0..10 {
        let rho = random_density(3, 2, seed).unwrap();
        for ch in [KrausChannel::identity(3), channels::random_unitary_channel(3, seed)] {
            let r = report(&rho, &ch).unwrap();
            if (r.entanglement_fidelity - 1.0).abs() < 1e-12 {
                assert!(r.entropy_exchange <= 1e-8);
            }
        }
    }
    assert!(entropy_exchange(&random_density(2, 2, 1).unwrap(), &KrausChannel::identity(2)).unwrap() <= 1e-8);
}

// error correction

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constructed_recovery_is_perfect(seed in any::<u64>()) {
        let (rho, ch) = repetition_code_fixture(seed);
        prop_assert!(correctability_deficit(&rho, &ch).unwrap() <= 1e-9);
        let result = construct_corrector(&rho, &ch, DEFAULT_TOL).unwrap();
        prop_assert!(result.correctable);
        let corrector = result.corrector.unwrap();
        prop_assert!(corrector.validate() <= 1e-8);
        prop_assert!(choi(&corrector).min_eigenvalue() >= -1e-8);

        let (fe, dist) = verify_correction(&rho, &ch, &corrector).unwrap();
        prop_assert!(fe >= 1.0 - 1e-8);
        prop_assert!(dist <= 1e-4);
        prop_assert!(result.product_defect <= 1e-7);
        prop_assert!(environment_info_check(&rho, &ch).unwrap() <= 1e-7);

        let se12 = entropy_exchange(&rho, &compose(&corrector, &ch).unwrap()).unwrap();
        prop_assert!(se12 <= 1e-7);
    }
}

#[test]
fn recovery_corrects_every_support_state() {
    let (rho, ch) = repetition_code_fixture(2024);
    let corrector = construct_corrector(&rho, &ch, DEFAULT_TOL).unwrap().corrector.unwrap();
    let both = compose(&corrector, &ch).unwrap();
    let spec = rho.spectrum();
    let support = spec.eigenvectors.columns(0, spec.rank(1e-12)).into_owned();
    let mut rng = random::rng_from_seed(7);
    for _ in 0..50 {
        let x = random::unit_vector(&mut rng, support.ncols());
        let phi = PureState::on_system(&support * x).unwrap();
        let f = info::pure_state_fidelity(&phi, &both).unwrap();
        assert!(f >= 1.0 - 1e-8, "{f}");
        let out = apply(&both, &phi.density()).unwrap();
        assert!((out.matrix() - projector(phi.vector())).norm() < 1e-7);
    }
}

#[test]
fn uncorrectable_fixtures_resist_random_recovery() {
    let half = DensityOperator::maximally_mixed(2).unwrap();
    let fixtures = [
        (half.clone(), zoo(&StandardChannel::Dephasing(0.25)).unwrap()),
        (half.clone(), zoo(&StandardChannel::AmplitudeDamping(0.3)).unwrap()),
        (half, zoo(&StandardChannel::Depolarizing(0.1)).unwrap()),
    ];
    for (i, (rho, ch)) in fixtures.iter().enumerate() {
        let deficit = correctability_deficit(rho, ch).unwrap();
        assert!(deficit > 1e-3);
        let result = construct_corrector(rho, ch, DEFAULT_TOL).unwrap();
        assert!(!result.correctable);
        assert!(result.product_defect > DEFAULT_TOL);
        let best = best_random_recovery(rho, ch, 200, 100 * i as u64).unwrap();
        assert!(best < 1.0 - 1e-8, "fixture {i}: {best}");
    }
}
