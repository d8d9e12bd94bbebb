//! Information-trapping measures and the bounds that control them.
//!
//! Both trapping measures maximize a trace distance `½‖M vec(ρ)‖₁` that is a
//! convex function of `ρ`, so the maximum over all states is attained on pure
//! states and the search runs over pure states only.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use rand::Rng;

use crate::averaging::{
    check_nondegenerate_gaps, reduced_average_map, total_average, EnergyEigensystem, GapReport,
    ReducedTrajectory,
};
use crate::error::{Error, Result};
use crate::linalg::{
    c, effective_dimension, partial_trace_bath, partial_trace_system, trace_distance, trace_norm_hermitian,
    CMatrix, C64, CVector, DensityMatrix, PureState,
};
use crate::random::{haar_pure_state, rng_from_seed};
use crate::superop::{Superoperator, EPS_CONV, EPS_MAP, MAX_DOUBLINGS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrappingStrategy {
    BlochGrid,
    Multistart,
    ClosedForm,
}

impl TrappingStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrappingStrategy::BlochGrid => "bloch_grid",
            TrappingStrategy::Multistart => "multistart",
            TrappingStrategy::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrappingResult {
    pub value: f64,
    pub maximizer: DensityMatrix,
    pub strategy: TrappingStrategy,
    pub converged: bool,
}

/// Search settings for the pure-state maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Polar grid points on `[0, π]` for qubits.
    pub theta_steps: usize,
    /// Azimuthal grid points on `[0, 2π)` for qubits.
    pub phi_steps: usize,
    /// Grid points refined after the coarse scan.
    pub refine_candidates: usize,
    /// Random starts for higher dimensions (computational basis states are
    /// always added on top).
    pub starts: usize,
    pub seed: u64,
    /// Stop once an ascent sweep improves the objective by less than this.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            theta_steps: 181,
            phi_steps: 360,
            refine_candidates: 4,
            starts: 64,
            seed: 0x5eed,
            tolerance: 1e-10,
            max_sweeps: 20_000,
        }
    }
}

/// `½‖M vec(ρ)‖₁` for a Hermiticity-preserving difference of maps `M`.
struct DistanceObjective {
    dim: usize,
    diff: CMatrix,
}

impl DistanceObjective {
    fn new(diff: CMatrix, dim: usize) -> Self {
        Self { dim, diff }
    }

    fn eval_vector(&self, psi: &CVector) -> f64 {
        let rho = psi * psi.adjoint();
        let v = &self.diff * CVector::from_column_slice(rho.as_slice());
        0.5 * trace_norm_hermitian(&CMatrix::from_column_slice(self.dim, self.dim, v.as_slice()))
    }
}

fn bloch_vector(theta: f64, phi: f64) -> CVector {
    let (s, co) = (0.5 * theta).sin_cos();
    DVector::from_vec(vec![c(co, 0.0), C64::from_polar(s, phi)])
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

struct PureMaximum {
    value: f64,
    state: CVector,
    strategy: TrappingStrategy,
    converged: bool,
}

fn maximize_qubit(obj: &DistanceObjective, opts: &SearchOptions) -> PureMaximum {
    let nt = opts.theta_steps.max(2);
    let np = opts.phi_steps.max(1);
    let dtheta = PI / (nt - 1) as f64;
    let dphi = TAU / np as f64;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let theta = i as f64 * dtheta;
        // the poles do not depend on φ
        let phis = if i == 0 || i == nt - 1 { 1 } else { np };
        for j in 0..phis {
            let phi = j as f64 * dphi;
            grid.push((obj.eval_vector(&bloch_vector(theta, phi)), theta, phi));
        }
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = (grid[0].0, grid[0].1, grid[0].2);
    let mut converged = true;
    for &(v0, theta0, phi0) in grid.iter().take(opts.refine_candidates.max(1)) {
        let (mut theta, mut phi, mut value) = (theta0, phi0, v0);
        let mut settled = false;
        for _ in 0..200 {
            let (t_new, _) = golden_max(
                |t| obj.eval_vector(&bloch_vector(t, phi)),
                (theta - dtheta).max(0.0),
                (theta + dtheta).min(PI),
                1e-13,
            );
            let (p_new, v_new) = golden_max(
                |p| obj.eval_vector(&bloch_vector(t_new, p)),
                phi - dphi,
                phi + dphi,
                1e-13,
            );
            let gain = v_new - value;
            if v_new >= value {
                theta = t_new;
                phi = p_new;
                value = v_new;
            }
            if gain.abs() < opts.tolerance * 1e-3 {
                settled = true;
                break;
            }
        }
        if value > best.0 {
            best = (value, theta, phi);
        }
        converged &= settled;
    }
    PureMaximum {
        value: best.0,
        state: bloch_vector(best.1, best.2),
        strategy: TrappingStrategy::BlochGrid,
        converged,
    }
}

fn to_params(psi: &CVector) -> Vec<f64> {
    psi.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_params(x: &[f64]) -> CVector {
    let v = DVector::from_iterator(x.len() / 2, x.chunks(2).map(|p| c(p[0], p[1])));
    let n = v.norm();
    v / c(n, 0.0)
}

fn maximize_multistart(obj: &DistanceObjective, opts: &SearchOptions) -> PureMaximum {
    let d = obj.dim;
    let mut rng = rng_from_seed(opts.seed);
    let mut starts: Vec<CVector> = (0..d).map(|k| PureState::basis(d, k).amplitudes().clone()).collect();
    starts.extend((0..opts.starts).map(|_| haar_pure_state(d, &mut rng).amplitudes().clone()));

    let mut best: Option<PureMaximum> = None;
    for start in starts {
        let mut x = to_params(&start);
        let mut value = obj.eval_vector(&from_params(&x));
        let mut step = 0.25;
        let mut converged = false;
        for _ in 0..opts.max_sweeps {
            let before = value;
            for i in 0..x.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = x.clone();
                    trial[i] += sign * step;
                    let v = obj.eval_vector(&from_params(&trial));
                    if v > value {
                        x = trial;
                        value = v;
                        break;
                    }
                }
            }
            if value - before < opts.tolerance {
                if step < 1e-9 {
                    converged = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(PureMaximum {
                value,
                state: from_params(&x),
                strategy: TrappingStrategy::Multistart,
                converged,
            });
        }
    }
    best.expect("at least one start")
}

fn maximize_pure(obj: &DistanceObjective, opts: &SearchOptions) -> PureMaximum {
    if obj.dim == 2 {
        maximize_qubit(obj, opts)
    } else {
        maximize_multistart(obj, opts)
    }
}

fn require_trace_preserving(map: &Superoperator) -> Result<()> {
    let deviation = map.trace_deviation();
    if deviation > EPS_MAP {
        return Err(Error::NotTracePreserving { deviation });
    }
    Ok(())
}

fn finish(max: PureMaximum) -> TrappingResult {
    TrappingResult {
        value: max.value,
        maximizer: PureState::normalized(max.state).expect("unit vector").to_density(),
        strategy: max.strategy,
        converged: max.converged,
    }
}

/// `max_ρ D(Λ̄²ρ, Λ̄ρ)`.
pub fn trapping_measure(map: &Superoperator, opts: &SearchOptions) -> Result<TrappingResult> {
    require_trace_preserving(map)?;
    let square = map.compose(map)?;
    let obj = DistanceObjective::new(square.matrix() - map.matrix(), map.dim());
    Ok(finish(maximize_pure(&obj, opts)))
}

/// `max_ρ D(Λ̄^∞ρ, Λ̄ρ)`, or 1 if the power limit does not exist.
pub fn trapping_measure_infinity(map: &Superoperator, opts: &SearchOptions) -> Result<TrappingResult> {
    require_trace_preserving(map)?;
    let limit = map.power_limit(EPS_CONV, MAX_DOUBLINGS)?;
    if !limit.converged {
        return Ok(TrappingResult {
            value: 1.0,
            maximizer: DensityMatrix::maximally_mixed(map.dim()),
            strategy: if map.dim() == 2 {
                TrappingStrategy::BlochGrid
            } else {
                TrappingStrategy::Multistart
            },
            converged: false,
        });
    }
    let obj = DistanceObjective::new(limit.limit.matrix() - map.matrix(), map.dim());
    Ok(finish(maximize_pure(&obj, opts)))
}

/// Correlations and bath change of the time-averaged total state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationBound {
    /// `D(ω_SB, ω_S ⊗ ω_B)`.
    pub correlations: f64,
    /// `D(ρ_B, ω_B)`.
    pub bath_shift: f64,
    pub total: f64,
}

impl CorrelationBound {
    pub fn new(correlations: f64, bath_shift: f64) -> Self {
        Self {
            correlations,
            bath_shift,
            total: correlations + bath_shift,
        }
    }
}

/// `ω_SB = Ū(ρ_S ⊗ ρ_B)` and its marginals.
#[derive(Debug, Clone)]
pub struct AveragedState {
    pub omega_sb: DensityMatrix,
    pub omega_s: DensityMatrix,
    pub omega_b: DensityMatrix,
}

pub fn averaged_state(rho_s: &DensityMatrix, rho_b: &DensityMatrix, es: &EnergyEigensystem) -> Result<AveragedState> {
    let dims = es.dims();
    if rho_s.dim() != dims.system() {
        return Err(Error::DimensionMismatch {
            expected: dims.system(),
            found: rho_s.dim(),
        });
    }
    if rho_b.dim() != dims.bath() {
        return Err(Error::DimensionMismatch {
            expected: dims.bath(),
            found: rho_b.dim(),
        });
    }
    let omega_sb = total_average(&rho_s.tensor(rho_b), es)?;
    let omega_s = DensityMatrix::from_matrix_unchecked(partial_trace_bath(omega_sb.matrix(), dims)?);
    let omega_b = DensityMatrix::from_matrix_unchecked(partial_trace_system(omega_sb.matrix(), dims)?);
    Ok(AveragedState {
        omega_sb,
        omega_s,
        omega_b,
    })
}

/// Upper bound `D(ω_SB, ω_S ⊗ ω_B) + D(ρ_B, ω_B)` on `D(Λ̄²ρ_S, Λ̄ρ_S)`.
pub fn correlation_bound(rho_s: &DensityMatrix, rho_b: &DensityMatrix, es: &EnergyEigensystem) -> Result<CorrelationBound> {
    let avg = averaged_state(rho_s, rho_b, es)?;
    let correlations = trace_distance(&avg.omega_sb, &avg.omega_s.tensor(&avg.omega_b))?;
    let bath_shift = trace_distance(rho_b, &avg.omega_b)?;
    Ok(CorrelationBound::new(correlations, bath_shift))
}

/// `½ √(d_S / d_eff(ω_B))`.
pub fn equilibration_bound(omega_b: &DensityMatrix, d_s: usize) -> f64 {
    0.5 * (d_s as f64 / effective_dimension(omega_b)).sqrt()
}

/// Time-averaged distance from equilibrium, estimated by sampling.
#[derive(Debug, Clone)]
pub struct EquilibrationReport {
    pub rhs: f64,
    pub mc_average_distance: f64,
    pub n_samples: usize,
    pub t_max: f64,
    pub gaps: GapReport,
}

/// `200 · 2π / ΔE_min`, with `ΔE_min` the smallest nonzero level spacing.
pub fn default_t_max(es: &EnergyEigensystem) -> f64 {
    match es.smallest_gap() {
        Some(gap) => 200.0 * TAU / gap,
        None => 0.0,
    }
}

/// Mean of `D(ρ_S(t), Λ̄ρ_S)` over the given times, with the bound on its time average.
pub fn average_distance_at_times(
    rho_s: &DensityMatrix,
    rho_b: &DensityMatrix,
    es: &EnergyEigensystem,
    times: &[f64],
) -> Result<(f64, f64)> {
    let avg = averaged_state(rho_s, rho_b, es)?;
    let trajectory = ReducedTrajectory::new(&rho_s.tensor(rho_b), es)?;
    let mut total = 0.0;
    for &t in times {
        total += trace_distance(&trajectory.state_at(t), &avg.omega_s)?;
    }
    let mean = if times.is_empty() { 0.0 } else { total / times.len() as f64 };
    Ok((mean, equilibration_bound(&avg.omega_b, es.dims().system())))
}

/// Monte-Carlo estimate of the time-averaged distance from the equilibrium
/// state, sampling `n_samples` times uniformly in `[0, t_max]`.
pub fn average_distance_mc(
    rho_s: &DensityMatrix,
    rho_b: &DensityMatrix,
    es: &EnergyEigensystem,
    t_max: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EquilibrationReport> {
    let gaps = check_nondegenerate_gaps(es, None);
    if !gaps.nondegenerate_gaps {
        log::warn!("{} coincident energy gaps; the equilibration bound may not apply", gaps.count);
    }
    let mut rng = rng_from_seed(seed);
    let times: Vec<f64> = (0..n_samples).map(|_| rng.random::<f64>() * t_max).collect();
    let (mean, rhs) = average_distance_at_times(rho_s, rho_b, es, &times)?;
    Ok(EquilibrationReport {
        rhs,
        mc_average_distance: mean,
        n_samples,
        t_max,
        gaps,
    })
}

/// Largest observed contraction ratio `D(Φρ₁, Φρ₂) / D(ρ₁, ρ₂)`.
#[derive(Debug, Clone)]
pub struct ContractivityProbe {
    pub max_ratio: f64,
    pub witness: (DensityMatrix, DensityMatrix),
}

/// Pairs closer than this are skipped.
pub const MIN_PROBE_DISTANCE: f64 = 1e-8;

/// Probes all computational-basis pairs and `n_pairs` Haar-random pure pairs.
pub fn strict_contractivity_probe(map: &Superoperator, n_pairs: usize, seed: u64) -> Result<ContractivityProbe> {
    let d = map.dim();
    let mut pairs: Vec<(DensityMatrix, DensityMatrix)> = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            pairs.push((DensityMatrix::basis(d, i), DensityMatrix::basis(d, j)));
        }
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..n_pairs {
        pairs.push((haar_pure_state(d, &mut rng).to_density(), haar_pure_state(d, &mut rng).to_density()));
    }
    let mut best: Option<(f64, usize)> = None;
    for (idx, (a, b)) in pairs.iter().enumerate() {
        let before = trace_distance(a, b)?;
        if before < MIN_PROBE_DISTANCE {
            continue;
        }
        let after = trace_distance(&map.apply(a)?, &map.apply(b)?)?;
        let ratio = after / before;
        if best.is_none_or(|(r, _)| ratio > r) {
            best = Some((ratio, idx));
        }
    }
    let (max_ratio, idx) = best.ok_or_else(|| Error::InvalidParameter("no distinguishable pairs to probe".into()))?;
    Ok(ContractivityProbe {
        max_ratio,
        witness: pairs.swap_remove(idx),
    })
}

/// Convenience: the reduced averaging map for `ρ_B` followed by both trapping measures.
pub fn trapping_from_hamiltonian(
    rho_b: &DensityMatrix,
    es: &EnergyEigensystem,
    opts: &SearchOptions,
) -> Result<(Superoperator, TrappingResult, TrappingResult)> {
    let map = reduced_average_map(rho_b, es)?;
    let t = trapping_measure(&map, opts)?;
    let t_inf = trapping_measure_infinity(&map, opts)?;
    Ok((map, t, t_inf))
}
