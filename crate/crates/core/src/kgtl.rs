//! Linearized (fluxon-free) transmission line: gapped dispersion, the
//! closed-form solution of the impedance Riccati equation
//!
//!   dZ/dx + X₀·Z² = iωℓ,   X₀ = g_J − iω·c_J·(ω_p²/ω² − 1),   Z(0) = Z₀,
//!
//! and the transmon decay rate γ(ω_q) = Re[1/Z_eff]/C_Σ seen through the
//! coupling capacitor, in exact, dissipationless-approximate, and
//! underdamped-approximate forms.
//!
//! Numerics: with λ₀ = √(iωℓ/X₀) on the branch Re[λ₀X₀] ≥ 0, the solution is
//! written as Z = λ₀·(1 + q)/(1 − q), q = ρ·e^{−2λ₀X₀x}, ρ = (Z₀−λ₀)/(Z₀+λ₀),
//! so no growing exponential is ever formed. Real and imaginary parts are
//! assembled separately: below the gap with g_J = 0, λ₀ is exactly imaginary
//! and Re[Z] is carried entirely by the exponentially small q-term, which a
//! naive complex evaluation would round away (q ~ e^{-l/λ_J} ≈ 1e-36 for a
//! 1 mm line).

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::params::DerivedParams;

#[derive(Debug, Error, PartialEq)]
pub enum KgtlError {
    #[error("invalid decay spec: {0}")]
    Invalid(String),
    /// ω = ω_p sits on the dispersion edge where X₀ degenerates.
    #[error("frequency {omega:.6e} coincides with the spectral gap edge")]
    Singularity { omega: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    /// An approximation was requested outside its validity ordering.
    #[error("outside approximation regime: {0}")]
    Regime(String),
}

/// Line termination and geometry for decay-rate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySpec {
    pub d: DerivedParams,
    /// Termination resistance (Ω).
    pub r_in: f64,
    /// Termination inductance (H).
    pub l_in: f64,
    /// Line length between termination and transmon, l/2 (m).
    pub half_length: f64,
    /// Dimensionless subgap damping of the line.
    pub alpha: f64,
}

impl DecaySpec {
    pub fn new(
        d: DerivedParams,
        r_in: f64,
        l_in: f64,
        half_length: f64,
        alpha: f64,
    ) -> Result<Self, KgtlError> {
        if !(half_length > 0.0) {
            return Err(KgtlError::Invalid(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        if !(r_in >= 0.0) || !(l_in >= 0.0) || !(alpha >= 0.0) {
            return Err(KgtlError::Invalid(
                "R_in, L_in, and alpha must be non-negative".into(),
            ));
        }
        Ok(DecaySpec { d, r_in, l_in, half_length, alpha })
    }

    /// Spec for a full line of physical length `l` terminated at one end,
    /// transmon at the midpoint-facing end (length l/2 in between).
    pub fn from_circuit(c: &crate::params::CircuitParams, d: DerivedParams) -> Result<Self, KgtlError> {
        Self::new(d, c.r_in, c.l_in, 0.5 * c.l, c.alpha)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, KgtlError> {
        if !(alpha >= 0.0) {
            return Err(KgtlError::Invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    /// Line inductance per length, recovered from Z_J and the characteristic
    /// velocity (ℓ = Z_J/c̄).
    fn ell(&self) -> f64 {
        self.d.z_j / self.d.c_bar
    }

    /// Line capacitance per length (c_J = 1/(Z_J·c̄)).
    fn c_j(&self) -> f64 {
        1.0 / (self.d.z_j * self.d.c_bar)
    }

    /// Subgap conductance per length from the dimensionless damping,
    /// g_J = α·ω_p·c_J.
    fn g_j(&self) -> f64 {
        self.alpha * self.d.omega_p * self.c_j()
    }
}

/// Complex impedance split into parts (Ω).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexImpedance {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexImpedance> for Complex64 {
    fn from(z: ComplexImpedance) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Gapped dispersion ω(k) = √(ω_p² + c̄²k²) (positive branch).
pub fn dispersion(k: f64, d: &DerivedParams) -> f64 {
    (d.omega_p * d.omega_p + d.c_bar * d.c_bar * k * k).sqrt()
}

/// Real propagating wavenumber at angular frequency ω, if one exists
/// (none below the gap).
pub fn propagating_wavenumber(omega: f64, d: &DerivedParams) -> Option<f64> {
    if omega <= d.omega_p {
        return None;
    }
    Some((omega * omega - d.omega_p * d.omega_p).sqrt() / d.c_bar)
}

/// Effective line impedance below the gap, Z̃(ω) = Z_J/√(ω_p²/ω² − 1).
pub fn effective_impedance(omega: f64, d: &DerivedParams) -> Result<f64, KgtlError> {
    if !(omega > 0.0 && omega < d.omega_p) {
        return Err(KgtlError::Domain(format!(
            "effective impedance needs 0 < omega < omega_p, got {omega:.6e}"
        )));
    }
    let w = d.omega_p / omega;
    Ok(d.z_j / (w * w - 1.0).sqrt())
}

struct RiccatiTerms {
    lambda0: Complex64,
    x0: Complex64,
    rho: Complex64,
}

fn riccati_terms(omega: f64, spec: &DecaySpec) -> Result<RiccatiTerms, KgtlError> {
    if !(omega > 0.0) {
        return Err(KgtlError::Domain(format!("omega must be positive, got {omega:.6e}")));
    }
    if omega == spec.d.omega_p {
        return Err(KgtlError::Singularity { omega });
    }
    let w2 = (spec.d.omega_p / omega).powi(2) - 1.0;
    let x0 = Complex64::new(spec.g_j(), -omega * spec.c_j() * w2);
    if x0 == Complex64::new(0.0, 0.0) {
        return Err(KgtlError::Singularity { omega });
    }
    let s = Complex64::new(0.0, omega * spec.ell()) / x0;
    // Exact imaginary root when s is a negative real (g_J = 0 below the gap):
    // the spurious ~1e-16 real part of a polar-form sqrt would otherwise
    // swamp the physical exponentially small Re[Z].
    let mut lambda0 = if s.im == 0.0 {
        if s.re >= 0.0 {
            Complex64::new(s.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-s.re).sqrt())
        }
    } else {
        s.sqrt()
    };
    let lx = lambda0 * x0;
    if lx.re < 0.0 || (lx.re == 0.0 && lx.im < 0.0) {
        lambda0 = -lambda0;
    }
    let z0 = Complex64::new(spec.r_in, omega * spec.l_in);
    let rho = (z0 - lambda0) / (z0 + lambda0);
    Ok(RiccatiTerms { lambda0, x0, rho })
}

/// Closed-form impedance Z(x) of a line of length x terminated by
/// Z₀ = R_in + iωL_in, seen from the far end.
pub fn impedance(x: f64, omega: f64, spec: &DecaySpec) -> Result<ComplexImpedance, KgtlError> {
    if !(x >= 0.0) {
        return Err(KgtlError::Domain(format!("length must be non-negative, got {x}")));
    }
    let t = riccati_terms(omega, spec)?;
    let q = t.rho * (-2.0 * t.lambda0 * t.x0 * x).exp();
    // Z = λ₀ (1+q)/(1−q); assembled from (1+q)(1−q̄) = (1−|q|²) + 2i·Im q so
    // the tiny Im q survives when λ₀ is purely imaginary.
    let (a, b) = (t.lambda0.re, t.lambda0.im);
    let one_minus_q2 = 1.0 - q.norm_sqr();
    let denom = (Complex64::new(1.0, 0.0) - q).norm_sqr();
    Ok(ComplexImpedance {
        re: (a * one_minus_q2 - 2.0 * b * q.im) / denom,
        im: (b * one_minus_q2 + 2.0 * a * q.im) / denom,
    })
}

/// Exact transmon decay rate (s⁻¹): the coupling capacitor in series with the
/// line impedance at x = half_length, γ = Re[1/Z_eff]/C_Σ.
pub fn decay_rate(omega_q: f64, spec: &DecaySpec) -> Result<f64, KgtlError> {
    if !(omega_q > 0.0 && omega_q < spec.d.omega_p) {
        return Err(KgtlError::Domain(format!(
            "decay rate needs 0 < omega_q < omega_p, got {omega_q:.6e}"
        )));
    }
    let z = impedance(spec.half_length, omega_q, spec)?;
    let reactance = z.im - 1.0 / (omega_q * spec.d.c_c);
    let norm = z.re * z.re + reactance * reactance;
    Ok(z.re / (norm * spec.d.c_sigma))
}

/// Dissipationless-line approximation:
/// γ ≈ 4ω²·(C_c²/C_Σ)·(Z̃²(ω)/R_in)·e^{−l/λ_J}, valid for α = 0, L_in = 0,
/// Z̃ well below both R_in and the coupling reactance (factor-10 orderings).
pub fn decay_rate_dissipationless_approx(
    omega_q: f64,
    spec: &DecaySpec,
) -> Result<f64, KgtlError> {
    if spec.alpha != 0.0 {
        return Err(KgtlError::Regime(format!(
            "dissipationless form needs alpha = 0, got {}",
            spec.alpha
        )));
    }
    if spec.l_in != 0.0 {
        return Err(KgtlError::Regime(format!(
            "dissipationless form needs L_in = 0, got {}",
            spec.l_in
        )));
    }
    let zt = effective_impedance(omega_q, &spec.d)?;
    let coupling_reactance = 1.0 / (omega_q * spec.d.c_c);
    if zt * 10.0 > spec.r_in || zt * 10.0 > coupling_reactance {
        return Err(KgtlError::Regime(format!(
            "impedance ordering violated: Z~ = {zt:.3e} vs R_in = {:.3e}, 1/(w C_c) = {:.3e}",
            spec.r_in, coupling_reactance
        )));
    }
    let l_full = 2.0 * spec.half_length;
    Ok(4.0 * omega_q * omega_q * (spec.d.c_c * spec.d.c_c / spec.d.c_sigma) * (zt * zt / spec.r_in)
        * (-l_full / spec.d.lambda_j).exp())
}

/// Underdamped-line approximation:
/// γ ≈ α·(ω_q³/(2ω_p))·(C_c²/C_Σ)·Z̃(ω_q), independent of termination and
/// length once l ≫ λ_J.
pub fn decay_rate_underdamped_approx(omega_q: f64, spec: &DecaySpec) -> Result<f64, KgtlError> {
    if spec.alpha >= 0.1 {
        return Err(KgtlError::Regime(format!(
            "underdamped form needs alpha << 1, got {}",
            spec.alpha
        )));
    }
    let zt = effective_impedance(omega_q, &spec.d)?;
    Ok(spec.alpha * omega_q.powi(3) / (2.0 * spec.d.omega_p)
        * (spec.d.c_c * spec.d.c_c / spec.d.c_sigma)
        * zt)
}
