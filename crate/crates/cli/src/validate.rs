//! Cross-checks run by `eqtrap validate`: closed forms against the generic
//! pipeline, the correlation and equilibration bounds, and map properties.

use eqtrap::averaging::{build_eigensystem, reduced_average_map};
use eqtrap::diagnostics::{strict_contractivity_probe, trapping_measure, trapping_measure_infinity, SearchOptions};
use eqtrap::models::jc::{jc_hamiltonian_dense, jc_t_infinity_closed_form, jc_time_averaging_map, jc_trapping_closed_form};
use eqtrap::models::two_band::{
    two_band_average_map, two_band_rates, two_band_t_infinity_closed_form, two_band_trapping_closed_form,
};
use eqtrap::models::{Cutoff, JcParams, ProductBasisModel, TwoBandParams};
use eqtrap::{BipartiteDims, DensityMatrix, Superoperator};

use crate::args::{linspace, ValidateArgs};
use crate::commands::{bound_trial, jc_point, trial_seed};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(), String>;
type NamedCheck<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn within(what: &str, got: f64, want: f64, tol: f64) -> Outcome {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got:.12e}, want {want:.12e} (tol {tol:e})"))
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn resonance_closed_form() -> Outcome {
    for bw in [0.003f64, 0.01, 1.0] {
        let want = 0.25 * (1.0 - (-bw).exp());
        for g in [0.5, 1.0, 2.0] {
            let p = JcParams::dimensionless(0.0, g, bw, Cutoff::default()).map_err(fail)?;
            within(&format!("βω={bw} g={g}"), jc_trapping_closed_form(&p), want, 1e-10)?;
        }
    }
    Ok(())
}

fn figure1_marks() -> Outcome {
    for (bw, mark) in [(0.003, 0.027), (0.005, 0.035), (0.01, 0.050)] {
        let rec = jc_point(0.0, 1.0, bw, Cutoff::default()).map_err(fail)?;
        within(&format!("βω={bw}"), rec.eq_bound_rhs, mark, 0.002)?;
    }
    Ok(())
}

fn jc_dense_oracle() -> Outcome {
    let opts = SearchOptions::default();
    for delta in [0.0, 0.5, 1.0, 5.0] {
        let p = JcParams::dimensionless(delta, 0.5, 1.0, Cutoff::Fixed(10)).map_err(fail)?;
        let h = jc_hamiltonian_dense(&p).map_err(fail)?;
        let es = build_eigensystem(&h, p.dims(), None).map_err(fail)?;
        let map = reduced_average_map(&p.thermal_state(), &es).map_err(fail)?;
        if !map.is_cptp(1e-9) {
            return Err(format!("Δ={delta}: averaging map is not CPTP"));
        }
        within(&format!("Δ={delta} map"), map.distance(&jc_time_averaging_map(&p)).map_err(fail)?, 0.0, 1e-8)?;
        let t = trapping_measure(&map, &opts).map_err(fail)?;
        within(&format!("Δ={delta} 𝒯"), t.value, jc_trapping_closed_form(&p), 1e-8)?;
        let t_inf = trapping_measure_infinity(&map, &opts).map_err(fail)?;
        within(&format!("Δ={delta} 𝒯∞"), t_inf.value, jc_t_infinity_closed_form(&p), 1e-8)?;
    }
    Ok(())
}

fn correlation_bound_sweep() -> Outcome {
    for delta in linspace(0.0, 10.0, 50, "Δ").map_err(fail)? {
        let rec = jc_point(delta, 1.0, 0.01, Cutoff::default()).map_err(fail)?;
        if rec.trap_measure > rec.bound_total + 1e-9 {
            return Err(format!("Δ={delta}: 𝒯 = {} exceeds bound {}", rec.trap_measure, rec.bound_total));
        }
    }
    Ok(())
}

fn two_band_exactness() -> Outcome {
    let opts = SearchOptions::default();
    for (n1, n2) in [(1, 1), (100, 100), (50, 300)] {
        let p = TwoBandParams::new(n1, n2, 0.01, 0.5, 1.0).map_err(fail)?;
        let map = two_band_average_map(&p);
        let t = trapping_measure(&map, &opts).map_err(fail)?;
        within(&format!("N=({n1},{n2}) 𝒯"), t.value, two_band_trapping_closed_form(&p), 1e-12)?;
        let t_inf = trapping_measure_infinity(&map, &opts).map_err(fail)?;
        within(&format!("N=({n1},{n2}) 𝒯∞"), t_inf.value, two_band_t_infinity_closed_form(&p), 1e-12)?;
        for e in linspace(-5.0, 5.0, 101, "log γt").map_err(fail)? {
            let r = two_band_rates(10f64.powf(e) / p.gamma(), &p).map_err(fail)?;
            if r.decay < 0.0 || r.dephasing < 0.0 {
                return Err(format!("N=({n1},{n2}) γt=1e{e}: negative rate"));
            }
        }
    }
    Ok(())
}

fn map_properties() -> Outcome {
    let model = ProductBasisModel::uncoupled(&[0.0, 1.3], &[0.0, 0.37, 0.81]).map_err(fail)?;
    let es = model.eigensystem().map_err(fail)?;
    let rho_b = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).map_err(fail)?;
    let map = reduced_average_map(&rho_b, &es).map_err(fail)?;
    within("Λ̄² - Λ̄", map.compose(&map).map_err(fail)?.distance(&map).map_err(fail)?, 0.0, 1e-12)?;
    let probe = strict_contractivity_probe(&map, 32, 1).map_err(fail)?;
    within("contraction ratio", probe.max_ratio, 1.0, 1e-12)?;
    let constant = Superoperator::constant(&DensityMatrix::maximally_mixed(3));
    let opts = SearchOptions::default();
    within("constant 𝒯", trapping_measure(&constant, &opts).map_err(fail)?.value, 0.0, 1e-12)?;
    within("constant 𝒯∞", trapping_measure_infinity(&constant, &opts).map_err(fail)?.value, 0.0, 1e-12)?;
    Ok(())
}

fn random_bound(seed: u64) -> Outcome {
    let dims = BipartiteDims::new(2, 8).map_err(fail)?;
    for trial in 0..10 {
        let tr = bound_trial(dims, trial_seed(seed, trial), 500, None).map_err(fail)?;
        if tr.mc_average_distance > tr.rhs {
            return Err(format!("trial {trial}: {} > {}", tr.mc_average_distance, tr.rhs));
        }
    }
    Ok(())
}

pub fn run_all(a: &ValidateArgs) -> Vec<Check> {
    let checks: Vec<NamedCheck> = vec![
        ("resonance_closed_form", Box::new(resonance_closed_form)),
        ("figure1_marks", Box::new(figure1_marks)),
        ("jc_dense_oracle", Box::new(jc_dense_oracle)),
        ("correlation_bound_sweep", Box::new(correlation_bound_sweep)),
        ("two_band_exactness", Box::new(two_band_exactness)),
        ("map_properties", Box::new(map_properties)),
        ("random_bound", Box::new(move || random_bound(a.seed))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let outcome = f();
            Check {
                name,
                passed: outcome.is_ok(),
                detail: outcome.err().unwrap_or_default(),
            }
        })
        .collect()
}
