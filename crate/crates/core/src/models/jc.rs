//! Jaynes–Cummings model: a qubit coupled to one bosonic mode in a thermal
//! state, `H = ω₀ σ₊σ₋ + ω b†b + g (σ₊ ⊗ b + σ₋ ⊗ b†)`.
//!
//! The Fock space is truncated at `n_max` photons. Everything here describes
//! that truncated model exactly: the bath starts in the normalized thermal
//! state of the truncated mode, and `|1, n_max⟩` is an uncoupled eigenstate.
//! With the automatic cutoff the neglected thermal mass is below `τ_tail`, so
//! the results coincide with the untruncated model to that accuracy.
//!
//! Qubit basis: index 0 is the ground state `|0⟩`, index 1 the excited
//! state `|1⟩`. Joint index of `|s, n⟩` is `s · (n_max + 1) + n`.

use crate::averaging::EnergyEigensystem;
use crate::diagnostics::CorrelationBound;
use crate::error::{Error, Result};
use crate::linalg::{c, BipartiteDims, CMatrix, DensityMatrix, C64};
use crate::superop::Superoperator;

/// Default bound on the neglected thermal mass for the automatic cutoff.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;
/// Largest cutoff accepted by closed-form evaluations.
pub const MAX_SERIES_CUTOFF: usize = 1_000_000;
/// Largest cutoff accepted when assembling the dense Hamiltonian.
pub const MAX_DENSE_CUTOFF: usize = 64;

/// How the Fock space is truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// Smallest `n_max` whose neglected thermal mass is at most the given tolerance.
    Auto(f64),
    Fixed(usize),
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff::Auto(DEFAULT_TAIL_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JcParams {
    pub omega0: f64,
    pub omega: f64,
    pub g: f64,
    pub beta: f64,
    n_max: usize,
    weights: Vec<f64>,
}

/// `e^{-βω(n+1)} / (1 - e^{-βω}) / Z` with `Z` the truncated partition sum.
pub fn thermal_tail_mass(beta_omega: f64, n_max: usize) -> f64 {
    let x_next = (-beta_omega * (n_max as f64 + 1.0)).exp();
    x_next / (1.0 - x_next)
}

fn auto_cutoff(beta_omega: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tail tolerance {tol} outside (0, 1)")));
    }
    // x^(n+1) / (1 - x^(n+1)) ≤ tol  ⇔  (n+1) βω ≥ ln((1 + tol) / tol)
    let needed = ((1.0 + tol) / tol).ln() / beta_omega;
    let mut n = (needed.ceil() as usize).saturating_sub(1).max(1);
    while thermal_tail_mass(beta_omega, n) > tol {
        n += 1;
    }
    while n > 1 && thermal_tail_mass(beta_omega, n - 1) <= tol {
        n -= 1;
    }
    if n > MAX_SERIES_CUTOFF {
        return Err(Error::InvalidParameter(format!(
            "temperature too high: cutoff {n} exceeds {MAX_SERIES_CUTOFF}"
        )));
    }
    Ok(n)
}

/// `(Δ² + 2g²n) / (Δ² + 4g²n)`, the time-averaged survival probability of a
/// Rabi doublet; equal to 1 when the doublet is uncoupled.
fn survival(delta: f64, g: f64, n: usize) -> f64 {
    let num = delta * delta + 2.0 * g * g * n as f64;
    let den = delta * delta + 4.0 * g * g * n as f64;
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// `cos(Ωt/2) - i Δ/Ω sin(Ωt/2)` with `Ω = √(Δ² + 4g²n)`, without the global
/// `e^{-iωt/2}` phase.
fn rabi_amplitude(delta: f64, g: f64, n: usize, t: f64) -> C64 {
    let rabi = (delta * delta + 4.0 * g * g * n as f64).sqrt();
    if rabi == 0.0 {
        return c(1.0, 0.0);
    }
    let (s, co) = (0.5 * rabi * t).sin_cos();
    c(co, -delta / rabi * s)
}

impl JcParams {
    pub fn new(omega0: f64, omega: f64, g: f64, beta: f64, cutoff: Cutoff) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("mode frequency must be positive, got {omega}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("inverse temperature must be positive, got {beta}")));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling must be nonnegative, got {g}")));
        }
        if !omega0.is_finite() {
            return Err(Error::InvalidParameter("qubit frequency must be finite".into()));
        }
        let bw = beta * omega;
        let n_max = match cutoff {
            Cutoff::Auto(tol) => auto_cutoff(bw, tol)?,
            Cutoff::Fixed(n) if (1..=MAX_SERIES_CUTOFF).contains(&n) => n,
            Cutoff::Fixed(n) => {
                return Err(Error::InvalidParameter(format!(
                    "cutoff must be in 1..={MAX_SERIES_CUTOFF}, got {n}"
                )))
            }
        };
        let raw: Vec<f64> = (0..=n_max).map(|n| (-bw * n as f64).exp()).collect();
        let z: f64 = raw.iter().sum();
        let weights = raw.into_iter().map(|w| w / z).collect();
        Ok(Self {
            omega0,
            omega,
            g,
            beta,
            n_max,
            weights,
        })
    }

    /// Parameters in units of the mode frequency: `ω = 1`, `ω₀ = 1 + Δ/ω`.
    pub fn dimensionless(detuning: f64, coupling: f64, beta_omega: f64, cutoff: Cutoff) -> Result<Self> {
        Self::new(1.0 + detuning, 1.0, coupling, beta_omega, cutoff)
    }

    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dims(&self) -> BipartiteDims {
        BipartiteDims::new(2, self.n_max + 1).expect("n_max ≥ 1")
    }

    /// Truncated partition sum `Σ_{n ≤ n_max} e^{-βωn}`.
    pub fn partition_sum(&self) -> f64 {
        let bw = self.beta * self.omega;
        (0..=self.n_max).map(|n| (-bw * n as f64).exp()).sum()
    }

    /// Thermal occupation probabilities `p_n`, `n = 0..=n_max`.
    pub fn thermal_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail_mass(&self) -> f64 {
        thermal_tail_mass(self.beta * self.omega, self.n_max)
    }

    pub fn thermal_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&self.weights).expect("normalized weights")
    }

    fn check_dense(&self) -> Result<()> {
        if self.n_max > MAX_DENSE_CUTOFF {
            return Err(Error::InvalidParameter(format!(
                "dense path limited to n_max ≤ {MAX_DENSE_CUTOFF}, got {}",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// Dense truncated Hamiltonian of dimension `2 (n_max + 1)`.
pub fn jc_hamiltonian_dense(p: &JcParams) -> Result<CMatrix> {
    p.check_dense()?;
    let dims = p.dims();
    let nb = dims.bath();
    let mut h = CMatrix::zeros(dims.total(), dims.total());
    for n in 0..nb {
        h[(dims.joint(0, n), dims.joint(0, n))] = c(p.omega * n as f64, 0.0);
        h[(dims.joint(1, n), dims.joint(1, n))] = c(p.omega0 + p.omega * n as f64, 0.0);
    }
    // g σ₊ ⊗ b: |0, n⟩ → g√n |1, n-1⟩, plus the Hermitian conjugate
    for n in 1..nb {
        let amp = c(p.g * (n as f64).sqrt(), 0.0);
        h[(dims.joint(1, n - 1), dims.joint(0, n))] = amp;
        h[(dims.joint(0, n), dims.joint(1, n - 1))] = amp;
    }
    Ok(h)
}

/// One excitation sector `k ≥ 1`, spanned by `|1, k-1⟩` and `|0, k⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedSector {
    pub excitations: usize,
    /// `kω + Δ/2 ∓ Ω/2`, lower level first.
    pub energies: [f64; 2],
    /// Eigenvector components on `(|1, k-1⟩, |0, k⟩)`, lower level first.
    pub vectors: [[f64; 2]; 2],
}

impl DressedSector {
    /// Reduced qubit state of one dressed level, in the `(|0⟩, |1⟩)` basis.
    pub fn qubit_marginal(&self, level: usize) -> DensityMatrix {
        let [excited, ground] = self.vectors[level];
        DensityMatrix::diagonal(&[ground * ground, excited * excited]).expect("unit vector")
    }
}

/// Dressed-state decomposition of the truncated model.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedSpectrum {
    pub sectors: Vec<DressedSector>,
    /// Energy of `|0, 0⟩`.
    pub vacuum_energy: f64,
    /// Energy of the uncoupled `|1, n_max⟩`.
    pub top_energy: f64,
}

impl DressedSpectrum {
    /// All eigenpairs assembled into an [`EnergyEigensystem`].
    pub fn to_eigensystem(&self, p: &JcParams) -> Result<EnergyEigensystem> {
        let dims = p.dims();
        let d = dims.total();
        let mut energies = Vec::with_capacity(d);
        let mut vectors = CMatrix::zeros(d, d);
        let mut col = 0;
        energies.push(self.vacuum_energy);
        vectors[(dims.joint(0, 0), col)] = c(1.0, 0.0);
        col += 1;
        for s in &self.sectors {
            let k = s.excitations;
            for level in 0..2 {
                energies.push(s.energies[level]);
                vectors[(dims.joint(1, k - 1), col)] = c(s.vectors[level][0], 0.0);
                vectors[(dims.joint(0, k), col)] = c(s.vectors[level][1], 0.0);
                col += 1;
            }
        }
        energies.push(self.top_energy);
        vectors[(dims.joint(1, p.n_max), col)] = c(1.0, 0.0);
        EnergyEigensystem::from_parts(dims, &energies, &vectors, None)
    }
}

/// Analytic 2×2 diagonalization of every excitation sector.
pub fn jc_dressed_blocks(p: &JcParams) -> DressedSpectrum {
    let delta = p.detuning();
    let sectors = (1..=p.n_max)
        .map(|k| {
            let kf = k as f64;
            let coupling = 2.0 * p.g * kf.sqrt();
            let rabi = (delta * delta + coupling * coupling).sqrt();
            let mid = kf * p.omega + 0.5 * delta;
            let half = 0.5 * coupling.atan2(delta);
            let (s, co) = half.sin_cos();
            DressedSector {
                excitations: k,
                energies: [mid - 0.5 * rabi, mid + 0.5 * rabi],
                vectors: [[-s, co], [co, s]],
            }
        })
        .collect();
    DressedSpectrum {
        sectors,
        vacuum_energy: 0.0,
        top_energy: p.omega0 + p.omega * p.n_max as f64,
    }
}

/// Thermal expectations `α(t)`, `β(t)`, `γ(t)` of the reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcDynamicsCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: C64,
}

pub fn jc_dynamics_coefficients(p: &JcParams, t: f64) -> JcDynamicsCoefficients {
    let delta = p.detuning();
    let w = &p.weights;
    let top = p.n_max;
    let amp = |n: usize| -> C64 {
        if n > top {
            // |1, n_max⟩ is uncoupled; relative to the sector phase it only detunes
            C64::from_polar(1.0, -0.5 * delta * t)
        } else if n == 0 {
            C64::from_polar(1.0, -0.5 * delta * t)
        } else {
            rabi_amplitude(delta, p.g, n, t)
        }
    };
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = c(0.0, 0.0);
    let mut current = amp(0);
    for (n, &pn) in w.iter().enumerate() {
        let next = amp(n + 1);
        alpha += pn * current.norm_sqr();
        beta += pn * next.norm_sqr();
        gamma += current * next * pn;
        current = next;
    }
    JcDynamicsCoefficients {
        alpha,
        beta,
        gamma: gamma * C64::from_polar(1.0, -p.omega * t),
    }
}

/// Exact reduced qubit state at time `t` for a thermal mode.
pub fn jc_reduced_state(rho_s: &DensityMatrix, t: f64, p: &JcParams) -> Result<DensityMatrix> {
    if rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_s.dim(),
        });
    }
    let k = jc_dynamics_coefficients(p, t);
    let m = rho_s.matrix();
    let (r00, r11, r10) = (m[(0, 0)].re, m[(1, 1)].re, m[(1, 0)]);
    let excited = r00 * (1.0 - k.alpha) + r11 * k.beta;
    let ground = r00 * k.alpha + r11 * (1.0 - k.beta);
    let coh = r10 * k.gamma;
    let out = CMatrix::from_row_slice(2, 2, &[c(ground, 0.0), coh.conj(), coh, c(excited, 0.0)]);
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Time-averaged ground-state survival `ᾱ` and excited-state survival `β̄`.
pub fn jc_alpha_beta_bar(p: &JcParams) -> (f64, f64) {
    let delta = p.detuning();
    let top = p.n_max;
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut mass = 0.0;
    for (n, &pn) in p.weights.iter().enumerate() {
        alpha += pn * survival(delta, p.g, n);
        beta += pn * if n < top { survival(delta, p.g, n + 1) } else { 1.0 };
        mass += pn;
    }
    // divide out the rounding in Σ p_n so that g = 0 gives exactly (1, 1)
    (alpha / mass, beta / mass)
}

/// Qubit map sending populations through `(ᾱ, β̄)` and coherences to zero.
pub fn jc_time_averaging_map(p: &JcParams) -> Superoperator {
    let (a, b) = jc_alpha_beta_bar(p);
    population_map(1.0 - a, b)
}

/// Qubit map `ρ₁₁' = up · ρ₀₀ + stay · ρ₁₁`, coherences removed.
pub(crate) fn population_map(up: f64, stay: f64) -> Superoperator {
    Superoperator::from_action(2, |x| {
        let (r00, r11) = (x[(0, 0)], x[(1, 1)]);
        let excited = r00 * up + r11 * stay;
        let ground = r00 * (1.0 - up) + r11 * (1.0 - stay);
        Ok(CMatrix::from_row_slice(2, 2, &[ground, c(0.0, 0.0), c(0.0, 0.0), excited]))
    })
    .expect("qubit action")
}

/// Basis state attaining both trapping measures: `|1⟩` when `ᾱ ≥ β̄`, which
/// holds except for truncation artefacts at extreme detuning.
pub fn jc_trapping_maximizer(p: &JcParams) -> usize {
    let (a, b) = jc_alpha_beta_bar(p);
    if a >= b {
        1
    } else {
        0
    }
}

/// `(ᾱ + β̄ - 1)(1 - β̄)`, attained at `|1⟩⟨1|`. Written as
/// `|ᾱ + β̄ - 1| · max(1 - ᾱ, 1 - β̄)` to cover `ᾱ < β̄` as well.
pub fn jc_trapping_closed_form(p: &JcParams) -> f64 {
    let (a, b) = jc_alpha_beta_bar(p);
    (a + b - 1.0).abs() * (1.0 - a.min(b))
}

/// `(ᾱ + β̄ - 1)(1 - β̄) / (2 - ᾱ - β̄)`; zero for the idempotent `g = 0` map.
pub fn jc_t_infinity_closed_form(p: &JcParams) -> f64 {
    let (a, b) = jc_alpha_beta_bar(p);
    let den = 2.0 - a - b;
    if den <= 0.0 {
        return 0.0;
    }
    (a + b - 1.0).abs() * (1.0 - a.min(b)) / den
}

/// Unique fixed point of the averaging map, defined for `g > 0`.
pub fn jc_invariant_state(p: &JcParams) -> Result<DensityMatrix> {
    let (a, b) = jc_alpha_beta_bar(p);
    let den = 2.0 - a - b;
    if den <= 0.0 {
        return Err(Error::UndefinedInvariantState(
            "averaging map is idempotent without coupling; every diagonal state is invariant".into(),
        ));
    }
    DensityMatrix::diagonal(&[(1.0 - b) / den, (1.0 - a) / den])
}

/// The time-averaged total state `Ū(ρ_S ⊗ ρ_B)` in sector-block form.
///
/// Only the qubit populations of `ρ_S` enter: its coherences connect
/// neighbouring excitation sectors and are removed by the average. Every
/// joint product state `|s, n⟩` belongs to exactly one block, so `ω_S ⊗ ω_B`
/// is diagonal in the same block structure and all trace distances reduce to
/// 2×2 problems.
#[derive(Debug, Clone)]
pub struct JcAveragedState {
    n_max: usize,
    rho_b: Vec<f64>,
    vacuum: f64,
    top: f64,
    /// Per sector `k`, the Hermitian block on `(|1, k-1⟩, |0, k⟩)` as
    /// `[upper-left, off-diagonal, lower-right]`.
    blocks: Vec<[f64; 3]>,
}

impl JcAveragedState {
    pub fn new(p: &JcParams, rho_s: &DensityMatrix) -> Result<Self> {
        if rho_s.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho_s.dim(),
            });
        }
        let ground = rho_s.matrix()[(0, 0)].re;
        let excited = rho_s.matrix()[(1, 1)].re;
        let w = &p.weights;
        let spectrum = jc_dressed_blocks(p);
        let blocks = spectrum
            .sectors
            .iter()
            .map(|s| {
                let k = s.excitations;
                let (pe, pg) = (excited * w[k - 1], ground * w[k]);
                let mut block = [0.0; 3];
                for v in s.vectors {
                    let weight = v[0] * v[0] * pe + v[1] * v[1] * pg;
                    block[0] += weight * v[0] * v[0];
                    block[1] += weight * v[0] * v[1];
                    block[2] += weight * v[1] * v[1];
                }
                block
            })
            .collect();
        Ok(Self {
            n_max: p.n_max,
            rho_b: w.clone(),
            vacuum: ground * w[0],
            top: excited * w[p.n_max],
            blocks,
        })
    }

    /// Diagonal of `ω_B`.
    pub fn omega_b(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_max + 1];
        out[0] += self.vacuum;
        out[self.n_max] += self.top;
        for (i, b) in self.blocks.iter().enumerate() {
            let k = i + 1;
            out[k - 1] += b[0];
            out[k] += b[2];
        }
        out
    }

    /// Excited-state population of `ω_S`.
    pub fn omega_s_excited(&self) -> f64 {
        self.top + self.blocks.iter().map(|b| b[0]).sum::<f64>()
    }

    pub fn omega_s(&self) -> DensityMatrix {
        let e = self.omega_s_excited();
        DensityMatrix::diagonal(&[1.0 - e, e]).expect("populations")
    }

    pub fn omega_b_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&self.omega_b()).expect("populations")
    }

    /// `D(ω_SB, ω_S ⊗ ω_B)`.
    pub fn correlations(&self) -> f64 {
        let ob = self.omega_b();
        let e = self.omega_s_excited();
        let g = 1.0 - e;
        let mut norm = (self.vacuum - g * ob[0]).abs() + (self.top - e * ob[self.n_max]).abs();
        for (i, b) in self.blocks.iter().enumerate() {
            let k = i + 1;
            let a = b[0] - e * ob[k - 1];
            let d = b[2] - g * ob[k];
            let radius = (0.25 * (a - d) * (a - d) + b[1] * b[1]).sqrt();
            let mean = 0.5 * (a + d);
            norm += (mean + radius).abs() + (mean - radius).abs();
        }
        0.5 * norm
    }

    /// `D(ρ_B, ω_B)`.
    pub fn bath_shift(&self) -> f64 {
        0.5 * self
            .omega_b()
            .iter()
            .zip(&self.rho_b)
            .map(|(o, r)| (o - r).abs())
            .sum::<f64>()
    }

    pub fn correlation_bound(&self) -> CorrelationBound {
        CorrelationBound::new(self.correlations(), self.bath_shift())
    }

    /// `½ √(2 / d_eff(ω_B))`, computed from the diagonal of `ω_B`.
    pub fn equilibration_bound(&self) -> f64 {
        let purity: f64 = self.omega_b().iter().map(|w| w * w).sum();
        0.5 * (2.0 * purity).sqrt()
    }
}
