//! Qubit coupled to two quasi-continuum energy bands, described through its
//! exact effective population and coherence dynamics
//!
//! ```text
//! ρ̇₁₁ = -γ ρ₁₁ + γ₁ ρ₁₁(0),      ρ̇₁₀ = -(iΔE + γ₂/2) ρ₁₀,
//! ```
//!
//! with `γ_i = 2πλ²N_i/δε` and `γ = γ₁ + γ₂`.

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::superop::Superoperator;

use super::jc::population_map;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBandParams {
    pub n1: u64,
    pub n2: u64,
    pub band_width: f64,
    pub lambda: f64,
    pub gap: f64,
}

impl TwoBandParams {
    pub fn new(n1: u64, n2: u64, lambda: f64, band_width: f64, gap: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidParameter("band level counts must be positive".into()));
        }
        if !(band_width > 0.0 && band_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("band width must be positive, got {band_width}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling must be positive, got {lambda}")));
        }
        if !gap.is_finite() {
            return Err(Error::InvalidParameter("band gap must be finite".into()));
        }
        Ok(Self {
            n1,
            n2,
            band_width,
            lambda,
            gap,
        })
    }

    /// Decay rate into the lower band, `2πλ²N₁/δε`.
    pub fn gamma1(&self) -> f64 {
        std::f64::consts::TAU * self.lambda * self.lambda * self.n1 as f64 / self.band_width
    }

    pub fn gamma2(&self) -> f64 {
        std::f64::consts::TAU * self.lambda * self.lambda * self.n2 as f64 / self.band_width
    }

    pub fn gamma(&self) -> f64 {
        self.gamma1() + self.gamma2()
    }

    /// `γ₁/γ = N₁/(N₁ + N₂)`.
    pub fn retained_fraction(&self) -> f64 {
        self.n1 as f64 / (self.n1 + self.n2) as f64
    }
}

/// Dynamical map `Λ(t)`.
pub fn two_band_propagator(t: f64, p: &TwoBandParams) -> Superoperator {
    let (g1, g2, g) = (p.gamma1(), p.gamma2(), p.gamma());
    let stay = (g1 + g2 * (-g * t).exp()) / g;
    let coherence = C64::from_polar((-0.5 * g2 * t).exp(), -p.gap * t);
    Superoperator::from_action(2, |x| {
        let excited = x[(1, 1)] * stay;
        let ground = x[(0, 0)] + x[(1, 1)] * (1.0 - stay);
        let r10 = x[(1, 0)] * coherence;
        let r01 = x[(0, 1)] * coherence.conj();
        Ok(CMatrix::from_row_slice(2, 2, &[ground, r01, r10, excited]))
    })
    .expect("qubit action")
}

/// Time-averaging map: `ρ₁₁ ↦ (γ₁/γ) ρ₁₁`, coherences removed.
pub fn two_band_average_map(p: &TwoBandParams) -> Superoperator {
    population_map(0.0, p.gamma1() / p.gamma())
}

/// `N₁N₂/(N₁ + N₂)²`.
pub fn two_band_trapping_closed_form(p: &TwoBandParams) -> f64 {
    let r = p.retained_fraction();
    r - r * r
}

/// `N₁/(N₁ + N₂)`.
pub fn two_band_t_infinity_closed_form(p: &TwoBandParams) -> f64 {
    p.retained_fraction()
}

/// Rates of the time-local master equation at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBandRates {
    /// Amplitude-damping rate `Γ₁(t)`.
    pub decay: f64,
    /// Pure-dephasing rate `Γ₂(t)`.
    pub dephasing: f64,
}

pub fn two_band_rates(t: f64, p: &TwoBandParams) -> Result<TwoBandRates> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("rates are defined for t ≥ 0, got {t}")));
    }
    let (g1, g2, g) = (p.gamma1(), p.gamma2(), p.gamma());
    let decay_factor = (-g * t).exp();
    // γ₂γ / (γ₁ e^{γt} + γ₂), written with e^{-γt} to stay finite
    let decay = g2 * g * decay_factor / (g1 + g2 * decay_factor);
    let dephasing = 0.25 * g1 * g2 * (-(-g * t).exp_m1()) / (g2 * decay_factor + g1);
    Ok(TwoBandRates { decay, dephasing })
}

/// Time-local generator
/// `K(t)ρ = -iΔE[σ₊σ₋, ρ] + Γ₁(σ₋ρσ₊ - ½{σ₊σ₋, ρ}) + Γ₂(σ_z ρ σ_z - ρ)`.
pub fn two_band_generator(t: f64, p: &TwoBandParams) -> Result<Superoperator> {
    let rates = two_band_rates(t, p)?;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let lower = CMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]);
    let raise = lower.adjoint();
    let number = &raise * &lower;
    let sz = CMatrix::from_row_slice(2, 2, &[-one, zero, zero, one]);
    let hamiltonian = &number * c(p.gap, 0.0);
    Superoperator::from_action(2, |x| {
        let unitary = (&hamiltonian * x - x * &hamiltonian) * c(0.0, -1.0);
        let damping = &lower * x * &raise - (&number * x + x * &number) * c(0.5, 0.0);
        let dephasing = &sz * x * &sz - x;
        Ok(unitary + damping * c(rates.decay, 0.0) + dephasing * c(rates.dephasing, 0.0))
    })
}
