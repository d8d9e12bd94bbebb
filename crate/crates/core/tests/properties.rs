use eqtrap::averaging::{build_eigensystem, reduced_average_map, total_average, unitary_evolve};
use eqtrap::diagnostics::{
    averaged_state, correlation_bound, equilibration_bound, trapping_measure, trapping_measure_infinity, SearchOptions,
};
use eqtrap::linalg::{
    effective_dimension, hermitian_eigensystem, partial_trace_bath, partial_trace_system, tensor_product,
    trace_distance,
};
use eqtrap::models::jc::jc_trapping_closed_form;
use eqtrap::models::{Cutoff, JcParams};
use eqtrap::random::{haar_unitary, random_hermitian, random_mixed_state, rng_from_seed};
use eqtrap::BipartiteDims;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = rng_from_seed(seed);
        let a = random_mixed_state(dim, dim, &mut rng);
        let b = random_mixed_state(dim, 1, &mut rng);
        let c = random_mixed_state(dim, 2, &mut rng);
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn partial_traces_of_products(seed in any::<u64>(), ds in 2usize..4, db in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let s = random_mixed_state(ds, ds, &mut rng);
        let b = random_mixed_state(db, db, &mut rng);
        let dims = BipartiteDims::new(ds, db).unwrap();
        let joint = tensor_product(s.matrix(), b.matrix());
        prop_assert!((partial_trace_bath(&joint, dims).unwrap() - s.matrix()).norm() < 1e-12);
        prop_assert!((partial_trace_system(&joint, dims).unwrap() - b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn effective_dimension_is_unitarily_invariant(seed in any::<u64>(), dim in 2usize..8) {
        let mut rng = rng_from_seed(seed);
        let rho = random_mixed_state(dim, dim, &mut rng);
        let u = haar_unitary(dim, &mut rng);
        let d1 = effective_dimension(&rho);
        let d2 = effective_dimension(&rho.conjugate(&u).unwrap());
        prop_assert!((d1 - d2).abs() < 1e-9 * d1);
        prop_assert!(d1 >= 1.0 - 1e-12 && d1 <= dim as f64 + 1e-9);
    }

    #[test]
    fn averaging_is_a_contraction_and_linear(seed in any::<u64>(), db in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let dims = BipartiteDims::new(2, db).unwrap();
        let es = build_eigensystem(&random_hermitian(dims.total(), &mut rng), dims, None).unwrap();
        let rho_b = random_mixed_state(db, db, &mut rng);
        let map = reduced_average_map(&rho_b, &es).unwrap();
        prop_assert!(map.is_cptp(1e-9));
        let a = random_mixed_state(2, 2, &mut rng);
        let b = random_mixed_state(2, 1, &mut rng);
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&map.apply(&a).unwrap(), &map.apply(&b).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-10);
        let mixed = a.mix(&b, 0.3).unwrap();
        let lhs = map.apply(&mixed).unwrap();
        let rhs = map.apply(&a).unwrap().mix(&map.apply(&b).unwrap(), 0.3).unwrap();
        prop_assert!(trace_distance(&lhs, &rhs).unwrap() < 1e-12);
    }

    #[test]
    fn total_average_is_idempotent(seed in any::<u64>(), db in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let dims = BipartiteDims::new(2, db).unwrap();
        let es = build_eigensystem(&random_hermitian(dims.total(), &mut rng), dims, None).unwrap();
        let rho = random_mixed_state(dims.total(), 2, &mut rng);
        let once = total_average(&rho, &es).unwrap();
        let twice = total_average(&once, &es).unwrap();
        prop_assert!((once.matrix() - twice.matrix()).norm() < 1e-10);
        // and stationary under the dynamics it averages
        let moved = unitary_evolve(&once, &es, 3.7).unwrap();
        prop_assert!((once.matrix() - moved.matrix()).norm() < 1e-10);
    }

    #[test]
    fn trapping_never_exceeds_correlation_bound(seed in any::<u64>(), db in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let dims = BipartiteDims::new(2, db).unwrap();
        let es = build_eigensystem(&random_hermitian(dims.total(), &mut rng), dims, None).unwrap();
        let rho_b = random_mixed_state(db, db, &mut rng);
        let map = reduced_average_map(&rho_b, &es).unwrap();
        let t = trapping_measure(&map, &SearchOptions::default()).unwrap();
        let bound = correlation_bound(&t.maximizer, &rho_b, &es).unwrap();
        prop_assert!(t.value <= bound.total + 1e-9, "{} > {}", t.value, bound.total);
        let once = map.apply(&t.maximizer).unwrap();
        let twice = map.apply(&once).unwrap();
        prop_assert!((trace_distance(&twice, &once).unwrap() - t.value).abs() < 1e-9);
    }

    #[test]
    fn higher_powers_approach_the_limit(seed in any::<u64>(), db in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let dims = BipartiteDims::new(2, db).unwrap();
        let es = build_eigensystem(&random_hermitian(dims.total(), &mut rng), dims, None).unwrap();
        let map = reduced_average_map(&random_mixed_state(db, db, &mut rng), &es).unwrap();
        let limit = map.power_limit(1e-12, 64).unwrap();
        prop_assume!(limit.converged);
        let mut prev = f64::INFINITY;
        for k in [1u32, 2, 4, 8, 16] {
            let d = map.power(k).distance(&limit.limit).unwrap();
            prop_assert!(d <= prev + 1e-12);
            prev = d;
        }
        let t = trapping_measure(&map, &SearchOptions::default()).unwrap();
        let t_inf = trapping_measure_infinity(&map, &SearchOptions::default()).unwrap();
        prop_assert!(t.value <= t_inf.value + 1e-9);
    }

    #[test]
    fn resonance_is_a_local_minimum_of_jc_trapping(g in 0.1f64..2.0, bw in 0.003f64..0.1, frac in -1.0f64..1.0) {
        // Only for a hot mode: when the vacuum dominates, 𝒯 ≈ β̄(1 - β̄) peaks
        // at resonance instead. Far off resonance the coupling is ineffective
        // and 𝒯 decays to zero again, so the check is restricted to |Δ| ≤ g.
        prop_assume!(frac != 0.0);
        let at = |d: f64| {
            let p = JcParams::dimensionless(d, g, bw, Cutoff::default()).unwrap();
            jc_trapping_closed_form(&p)
        };
        prop_assert!(at(0.0) <= at(frac * g) + 1e-12);
    }

    #[test]
    fn resonance_minimizes_trapping_on_the_figure_grid(bw in 0.003f64..0.05, delta in -10.0f64..10.0) {
        let at = |d: f64| {
            let p = JcParams::dimensionless(d, 1.0, bw, Cutoff::default()).unwrap();
            jc_trapping_closed_form(&p)
        };
        prop_assert!(at(0.0) <= at(delta) + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in prop::sample::select(vec![3usize, 17, 64, 200])) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(dim, &mut rng);
        let es = hermitian_eigensystem(&h).unwrap();
        let scale = h.norm();
        prop_assert!((es.reconstruct() - &h).norm() < 1e-10 * scale);
        prop_assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn equilibration_bound_dominates_cesaro_mean(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let dims = BipartiteDims::new(2, 6).unwrap();
        let es = build_eigensystem(&random_hermitian(dims.total(), &mut rng), dims, None).unwrap();
        let rho_s = random_mixed_state(2, 2, &mut rng);
        let rho_b = random_mixed_state(6, 6, &mut rng);
        let avg = averaged_state(&rho_s, &rho_b, &es).unwrap();
        let rhs = equilibration_bound(&avg.omega_b, 2);
        let report = eqtrap::diagnostics::average_distance_mc(&rho_s, &rho_b, &es, 2000.0, 1500, seed).unwrap();
        prop_assert!((report.rhs - rhs).abs() < 1e-12);
        prop_assert!(report.mc_average_distance <= rhs);
    }
}

#[test]
fn cesaro_means_converge_at_rate_one_over_t() {
    // Each off-diagonal eigenbasis entry c_kk' of the running mean over [0, T]
    // is damped by at most 2 / (T |E_k - E_k'|), so T · ‖mean - ω‖_HS ≤ 2 / gap_min.
    let mut rng = rng_from_seed(7);
    let dims = BipartiteDims::new(2, 3).unwrap();
    let es = build_eigensystem(&random_hermitian(dims.total(), &mut rng), dims, None).unwrap();
    let rho = random_mixed_state(6, 6, &mut rng);
    let omega = total_average(&rho, &es).unwrap();
    let width = es.energies().last().unwrap() - es.energies()[0];
    let mut scaled = Vec::new();
    for &t_max in &[50.0, 200.0, 800.0, 3200.0] {
        // midpoint rule with a step well below the fastest period
        let n = (t_max * width / 0.05).ceil() as usize;
        let dt = t_max / n as f64;
        let mut acc = eqtrap::CMatrix::zeros(6, 6);
        for i in 0..n {
            let t = (i as f64 + 0.5) * dt;
            acc += unitary_evolve(&rho, &es, t).unwrap().matrix() * eqtrap::linalg::C64::new(dt / t_max, 0.0);
        }
        let err = (acc - omega.matrix()).norm();
        scaled.push(err * t_max);
    }
    let gap = es.smallest_gap().unwrap();
    let envelope = 2.0 / gap;
    assert!(scaled.last().unwrap() > &0.0);
    assert!(scaled.iter().all(|&s| s <= envelope), "{scaled:?} vs {envelope}");
}
