//! Closed-form kink (single-flux-quantum) solutions of the sine-Gordon
//! equation and the transmon coupling-amplitude pulse a passing fluxon drives.
//!
//! Everything here is exact: these functions seed the PDE initial conditions
//! and serve as reference solutions for both numerical tiers.

use thiserror::Error;

use crate::constants::REDUCED_FLUX_QUANTUM;
use crate::params::DerivedParams;

#[derive(Debug, Error, PartialEq)]
pub enum KinkError {
    #[error("invalid kink: {0}")]
    Invalid(String),
}

/// Polarity of the kink's 2π phase winding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Plus => 1.0,
            Polarity::Minus => -1.0,
        }
    }
}

/// A free kink: dimensionless velocity, initial centroid, winding polarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkSpec {
    pub u0: f64,
    pub xi0: f64,
    pub polarity: Polarity,
}

impl KinkSpec {
    pub fn new(u0: f64, xi0: f64, polarity: Polarity) -> Result<Self, KinkError> {
        if !(u0 > -1.0 && u0 < 1.0) || !u0.is_finite() {
            return Err(KinkError::Invalid(format!(
                "|u0| must be below the line's characteristic velocity (dimensionless 1), got {u0}"
            )));
        }
        if !xi0.is_finite() {
            return Err(KinkError::Invalid(format!("xi0 must be finite, got {xi0}")));
        }
        Ok(KinkSpec { u0, xi0, polarity })
    }

    /// Lorentz-style width factor √(1−u₀²).
    pub fn width(&self) -> f64 {
        (1.0 - self.u0 * self.u0).sqrt()
    }

    /// Comoving coordinate (ξ − u₀τ − ξ₀)/√(1−u₀²).
    fn theta(&self, xi: f64, tau: f64) -> f64 {
        (xi - self.u0 * tau - self.xi0) / self.width()
    }
}

/// Kink phase profile φ(ξ,τ) = 4·arctan(exp(±Θ)), in radians.
/// Runs from 0 to 2π (polarity +) or 2π to 0 (polarity −) across the kink.
pub fn kink_phase(xi: f64, tau: f64, k: &KinkSpec) -> f64 {
    4.0 * (k.polarity.sign() * k.theta(xi, tau)).exp().atan()
}

/// Exact time derivative ∂_τφ of the kink phase (dimensionless).
pub fn kink_phase_tau_derivative(xi: f64, tau: f64, k: &KinkSpec) -> f64 {
    // d/dΘ [4 atan(e^{sΘ})] = 2 s sech(Θ), and ∂_τΘ = −u₀/w.
    -2.0 * k.polarity.sign() * (k.u0 / k.width()) * sech(k.theta(xi, tau))
}

/// Voltage pulse of the passing fluxon, V = −φ₀·ω_p·∂_τφ, in volts.
/// Peak (ħω_p/e)·u₀/√(1−u₀²) at the centroid; time integral 2πφ₀ per passage.
pub fn kink_voltage(xi: f64, tau: f64, k: &KinkSpec, d: &DerivedParams) -> f64 {
    -REDUCED_FLUX_QUANTUM * d.omega_p * kink_phase_tau_derivative(xi, tau, k)
}

/// Coupling amplitude g_c(t) (angular rate, s⁻¹) driven on the transmon by a
/// fluxon passing the coupling point at ξ = 0:
/// g_c(t) = √2·n₀,tr·(C_c/C_Σ)·(u₀ω_p/√(1−u₀²))·sech[(u₀ω_p·t + ξ₀)/√(1−u₀²)].
/// Peaks at t = −ξ₀/(u₀·ω_p), when the centroid reaches the coupling point.
pub fn coupling_profile(t: f64, k: &KinkSpec, d: &DerivedParams) -> f64 {
    let w = k.width();
    let peak = coupling_peak(k, d);
    peak * sech((k.u0 * d.omega_p * t + k.xi0) / w)
}

/// Peak value of [`coupling_profile`].
pub fn coupling_peak(k: &KinkSpec, d: &DerivedParams) -> f64 {
    std::f64::consts::SQRT_2 * d.n0_tr * d.cap_ratio * k.u0 * d.omega_p / k.width()
}

/// Overflow-free sech. For |x| ≥ ~745 the true value underflows to zero.
pub(crate) fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}
