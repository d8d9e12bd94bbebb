//! The generic dense pipeline against the Jaynes–Cummings closed forms.

use eqtrap::averaging::{build_eigensystem, reduced_average_map, total_average, unitary_evolve, EnergyEigensystem};
use eqtrap::diagnostics::{correlation_bound, trapping_measure, trapping_measure_infinity, SearchOptions};
use eqtrap::linalg::{trace_distance, CMatrix, C64};
use eqtrap::models::jc::{
    jc_alpha_beta_bar, jc_hamiltonian_dense, jc_invariant_state, jc_reduced_state, jc_t_infinity_closed_form,
    jc_time_averaging_map, jc_trapping_closed_form, JcAveragedState,
};
use eqtrap::models::{Cutoff, JcParams};
use eqtrap::DensityMatrix;

const TOL: f64 = 1e-8;

fn params(delta: f64, g: f64) -> JcParams {
    JcParams::dimensionless(delta, g, 1.0, Cutoff::Fixed(10)).unwrap()
}

fn dense(p: &JcParams) -> EnergyEigensystem {
    build_eigensystem(&jc_hamiltonian_dense(p).unwrap(), p.dims(), None).unwrap()
}

// g = ω at resonance makes the vacuum degenerate with the lower one-excitation
// level; the average then keeps their coherence and the closed forms (which
// assume a nondegenerate spectrum) no longer describe the dense model.
fn grid() -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = [0.0, 0.5, 1.0, 5.0].iter().map(|&d| (d, 0.5)).collect();
    out.extend([0.5, 1.0, 5.0].iter().map(|&d| (d, 1.0)));
    out
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn qubit_state(p00: f64, re: f64, im: f64) -> DensityMatrix {
    DensityMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[c(p00, 0.0), c(re, -im), c(re, im), c(1.0 - p00, 0.0)],
    ))
    .unwrap()
}

#[test]
fn averaging_map_matches_closed_form() {
    for (delta, g) in grid() {
        let p = params(delta, g);
        let map = reduced_average_map(&p.thermal_state(), &dense(&p)).unwrap();
        let d = map.distance(&jc_time_averaging_map(&p)).unwrap();
        assert!(d < TOL, "Δ={delta} g={g}: {d:e}");

        let (a, b) = jc_alpha_beta_bar(&p);
        let ground = map.apply(&DensityMatrix::basis(2, 0)).unwrap();
        let excited = map.apply(&DensityMatrix::basis(2, 1)).unwrap();
        assert!((ground.matrix()[(0, 0)].re - a).abs() < TOL);
        assert!((excited.matrix()[(1, 1)].re - b).abs() < TOL);
    }
}

#[test]
fn trapping_measures_match_closed_form() {
    let opts = SearchOptions::default();
    for (delta, g) in grid() {
        let p = params(delta, g);
        let map = reduced_average_map(&p.thermal_state(), &dense(&p)).unwrap();
        let t = trapping_measure(&map, &opts).unwrap();
        assert!((t.value - jc_trapping_closed_form(&p)).abs() < TOL, "Δ={delta} g={g}");
        let t_inf = trapping_measure_infinity(&map, &opts).unwrap();
        assert!(t_inf.converged);
        assert!((t_inf.value - jc_t_infinity_closed_form(&p)).abs() < TOL, "Δ={delta} g={g}");
    }
}

#[test]
fn invariant_state_is_the_power_limit_image() {
    for (delta, g) in grid() {
        let p = params(delta, g);
        let limit = jc_time_averaging_map(&p).power_limit(1e-12, 64).unwrap();
        assert!(limit.converged);
        let inv = jc_invariant_state(&p).unwrap();
        let image = limit.limit.apply(&DensityMatrix::basis(2, 1)).unwrap();
        assert!(trace_distance(&inv, &image).unwrap() < TOL);
    }
}

#[test]
fn reduced_dynamics_match_unitary_evolution() {
    let rho_s = qubit_state(0.3, 0.2, -0.1);
    for (delta, g) in grid() {
        let p = params(delta, g);
        let es = dense(&p);
        let joint = rho_s.tensor(&p.thermal_state());
        for &t in &[0.1, 1.0, 10.0] {
            let evolved = unitary_evolve(&joint, &es, t).unwrap();
            let exact = evolved.reduce_to_system(p.dims()).unwrap();
            let closed = jc_reduced_state(&rho_s, t, &p).unwrap();
            let d = trace_distance(&exact, &closed).unwrap();
            assert!(d < TOL, "Δ={delta} g={g} t={t}: {d:e}");
        }
    }
}

#[test]
fn sector_correlation_bound_matches_dense() {
    let inputs = [DensityMatrix::basis(2, 1), DensityMatrix::basis(2, 0), qubit_state(0.6, 0.1, 0.2)];
    for (delta, g) in grid() {
        let p = params(delta, g);
        let es = dense(&p);
        for rho_s in &inputs {
            let want = correlation_bound(rho_s, &p.thermal_state(), &es).unwrap();
            let got = JcAveragedState::new(&p, rho_s).unwrap().correlation_bound();
            assert!((want.correlations - got.correlations).abs() < TOL, "Δ={delta} g={g}");
            assert!((want.bath_shift - got.bath_shift).abs() < TOL, "Δ={delta} g={g}");
        }
    }
}

#[test]
fn sector_marginals_match_total_average() {
    let rho_s = DensityMatrix::basis(2, 1);
    for (delta, g) in grid() {
        let p = params(delta, g);
        let omega = total_average(&rho_s.tensor(&p.thermal_state()), &dense(&p)).unwrap();
        let sector = JcAveragedState::new(&p, &rho_s).unwrap();
        let ob = omega.reduce_to_bath(p.dims()).unwrap();
        let os = omega.reduce_to_system(p.dims()).unwrap();
        assert!(trace_distance(&ob, &sector.omega_b_state()).unwrap() < TOL);
        assert!(trace_distance(&os, &sector.omega_s()).unwrap() < TOL);
    }
}

#[test]
fn resonant_degeneracy_keeps_vacuum_coherence() {
    // The excluded grid point: the dense map differs from the closed form there.
    let p = params(0.0, 1.0);
    let map = reduced_average_map(&p.thermal_state(), &dense(&p)).unwrap();
    assert!(map.distance(&jc_time_averaging_map(&p)).unwrap() > 1e-3);
    assert!(map.is_cptp(1e-9));
}

#[test]
fn sector_equilibration_bound_matches_dense() {
    use eqtrap::diagnostics::{averaged_state, equilibration_bound};
    let rho_s = DensityMatrix::basis(2, 1);
    for (delta, g) in grid() {
        let p = params(delta, g);
        let avg = averaged_state(&rho_s, &p.thermal_state(), &dense(&p)).unwrap();
        let sector = JcAveragedState::new(&p, &rho_s).unwrap();
        assert!((equilibration_bound(&avg.omega_b, 2) - sector.equilibration_bound()).abs() < TOL);
    }
}
