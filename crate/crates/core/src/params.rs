//! Circuit parameters and every derived quantity used by the other modules.
//!
//! All configuration enters in SI units through [`CircuitParams`]; dimensionless
//! conversion happens once, in [`derive`], so nothing downstream ever touches a
//! raw SI value again except through [`DerivedParams`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{ELEMENTARY_CHARGE, HBAR, REDUCED_FLUX_QUANTUM};

/// Transmon regime gate: E_J/E_C below this is rejected outright.
pub const MIN_EJ_OVER_EC: f64 = 20.0;

/// Perturbative-coupling gate: η_c at or above this is rejected outright.
pub const MAX_ETA_C: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    /// An input violates a structural invariant (sign, finiteness).
    #[error("invalid circuit parameter: {0}")]
    Invalid(String),
    /// Inputs are valid numbers but outside the perturbative regime the
    /// downstream formulas assume.
    #[error("outside modeled regime: {0}")]
    Regime(String),
    /// An operation was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
}

/// Physical circuit constants of the line, the transmon, and the termination.
///
/// Field names double as the configuration keys (SI values only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Inductance per unit length of the line (H/m).
    #[serde(rename = "ell")]
    pub ell: f64,
    /// Capacitance per unit length of the line (F/m).
    #[serde(rename = "c_J")]
    pub c_j: f64,
    /// Critical current per unit length of the line (A/m).
    #[serde(rename = "i_c")]
    pub i_c: f64,
    /// Transmon total capacitance (F).
    #[serde(rename = "C_Sigma")]
    pub c_sigma: f64,
    /// Transmon junction critical current (A).
    #[serde(rename = "I_c_tr")]
    pub i_c_tr: f64,
    /// Coupling capacitance between transmon and line (F).
    #[serde(rename = "C_c")]
    pub c_c: f64,
    /// Dimensionless subgap damping coefficient of the line.
    #[serde(rename = "alpha")]
    pub alpha: f64,
    /// Termination resistance (Ω).
    #[serde(rename = "R_in")]
    pub r_in: f64,
    /// Termination inductance (H).
    #[serde(rename = "L_in")]
    pub l_in: f64,
    /// Physical line length (m).
    #[serde(rename = "l")]
    pub l: f64,
}

impl CircuitParams {
    /// Reference device: a 1 mm niobium-process line (250 A/cm² critical
    /// current density) capacitively coupled to a standard transmon.
    /// Every scenario default starts from this set.
    pub fn reference() -> Self {
        CircuitParams {
            ell: 1.8e-6,
            c_j: 3.0e-8,
            i_c: 1.25,
            c_sigma: 100e-15,
            i_c_tr: 20e-9,
            c_c: 10e-15,
            alpha: 1.0e-6,
            r_in: 50.0,
            l_in: 0.0,
            l: 1.0e-3,
        }
    }

    /// Structural validation: positivity of the device's own elements.
    /// The termination may be a short (R_in = 0) or purely resistive (L_in = 0).
    pub fn validate(&self) -> Result<(), ParamsError> {
        let positive = [
            ("ell", self.ell),
            ("c_J", self.c_j),
            ("i_c", self.i_c),
            ("C_Sigma", self.c_sigma),
            ("I_c_tr", self.i_c_tr),
            ("C_c", self.c_c),
            ("l", self.l),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ParamsError::Invalid(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("R_in", self.r_in), ("L_in", self.l_in)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ParamsError::Invalid(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// All derived and dimensionless quantities.
///
/// Frequencies are ANGULAR rates (s⁻¹) throughout: the natural time unit of
/// the dimensionless equations is 1/omega_p (≈ 2.8 ps for the reference
/// device), which fixes the angular convention for the plasma frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Josephson penetration depth λ_J = √(φ₀/(ℓ·i_c)) (m); the spatial unit.
    pub lambda_j: f64,
    /// Plasma frequency ω_p = √(i_c/(φ₀·c_J)) (angular, s⁻¹); 1/ω_p is the time unit.
    pub omega_p: f64,
    /// Swihart velocity c̄ = 1/√(ℓ·c_J) (m/s); equals λ_J·ω_p.
    pub c_bar: f64,
    /// Characteristic line impedance Z_J = √(ℓ/c_J) (Ω).
    pub z_j: f64,
    /// Transmon charging energy E_C = e²/(2·C_Σ) (J).
    pub e_c_tr: f64,
    /// Transmon Josephson energy E_J = φ₀·I_c,tr (J).
    pub e_j_tr: f64,
    /// Bare transmon frequency ω_tr = √(8·E_J·E_C)/ħ (angular, s⁻¹).
    pub omega_tr: f64,
    /// Qubit frequency ω_q = E₁/ħ = ω_tr − E_C/ħ (angular, s⁻¹).
    pub omega_q: f64,
    /// Zero-point phase fluctuation φ₀,tr = (8E_C/E_J)^{1/4} (dimensionless).
    pub phi0_tr: f64,
    /// Zero-point Cooper-pair-number fluctuation n₀,tr = (E_J/(8E_C))^{1/4}.
    pub n0_tr: f64,
    /// Anharmonicity ratio p = √(E_C/(8E_J)) ∈ (0, 1/8).
    pub p: f64,
    /// Dimensionless capacitive coupling constant η_c = C_c²/((1−p)·λ_J·c_J·C_Σ).
    pub eta_c: f64,
    /// Coupling-to-total capacitance ratio C_c/C_Σ (dimensionless).
    pub cap_ratio: f64,
    /// Transmon total capacitance (F), forwarded for decay-rate evaluation.
    pub c_sigma: f64,
    /// Coupling capacitance (F), forwarded for decay-rate evaluation.
    pub c_c: f64,
}

/// Convert physical circuit parameters into every derived quantity, enforcing
/// the regime gates (transmon limit, perturbative coupling) as hard errors.
pub fn derive(params: &CircuitParams) -> Result<DerivedParams, ParamsError> {
    params.validate()?;
    let phi0 = REDUCED_FLUX_QUANTUM;

    let lambda_j = (phi0 / (params.ell * params.i_c)).sqrt();
    let omega_p = (params.i_c / (phi0 * params.c_j)).sqrt();
    let c_bar = 1.0 / (params.ell * params.c_j).sqrt();
    let z_j = (params.ell / params.c_j).sqrt();

    let e_c_tr = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * params.c_sigma);
    let e_j_tr = phi0 * params.i_c_tr;
    let ratio = e_j_tr / e_c_tr;
    if ratio < MIN_EJ_OVER_EC {
        return Err(ParamsError::Regime(format!(
            "E_J/E_C = {ratio:.2} is below {MIN_EJ_OVER_EC}; transmon expansion invalid"
        )));
    }

    let omega_tr = (8.0 * e_j_tr * e_c_tr).sqrt() / HBAR;
    let omega_q = omega_tr - e_c_tr / HBAR;
    let phi0_tr = (8.0 * e_c_tr / e_j_tr).powf(0.25);
    let n0_tr = (e_j_tr / (8.0 * e_c_tr)).powf(0.25);
    let p = (e_c_tr / (8.0 * e_j_tr)).sqrt();

    let raw = params.c_c * params.c_c / (lambda_j * params.c_j * params.c_sigma);
    let eta_c = raw / (1.0 - p);
    if eta_c >= MAX_ETA_C {
        return Err(ParamsError::Regime(format!(
            "eta_c = {eta_c:.3e} is at or above {MAX_ETA_C}; perturbative treatment invalid"
        )));
    }

    Ok(DerivedParams {
        lambda_j,
        omega_p,
        c_bar,
        z_j,
        e_c_tr,
        e_j_tr,
        omega_tr,
        omega_q,
        phi0_tr,
        n0_tr,
        p,
        eta_c,
        cap_ratio: params.c_c / params.c_sigma,
        c_sigma: params.c_sigma,
        c_c: params.c_c,
    })
}

impl DerivedParams {
    /// Bare coupling strength C_c²/(λ_J·c_J·C_Σ) = η_c·(1−p), the building
    /// block of the state-dependent coupling constants.
    pub fn raw_coupling(&self) -> f64 {
        self.eta_c * (1.0 - self.p)
    }
}

/// Energy of the n-th transmon level, E_n = ħ·ω_tr·n − (E_C/2)·n·(n+1), in J.
/// The ground state is the zero of energy.
pub fn transmon_level_energy(n: u32, d: &DerivedParams) -> f64 {
    let n = f64::from(n);
    HBAR * d.omega_tr * n - 0.5 * d.e_c_tr * n * (n + 1.0)
}

/// Angular frequency of the |n−1⟩ ↔ |n⟩ transition, (E_n − E_{n−1})/ħ.
pub fn transmon_transition_frequency(n: u32, d: &DerivedParams) -> Result<f64, ParamsError> {
    if n == 0 {
        return Err(ParamsError::Domain(
            "transition frequency needs n >= 1".into(),
        ));
    }
    Ok((transmon_level_energy(n, d) - transmon_level_energy(n - 1, d)) / HBAR)
}

/// Signed coupling constant seen by the line when the transmon occupies Fock
/// state |n⟩ (no two-level truncation):
/// η(|n⟩) = −C_c²/(λ_J·c_J·C_Σ) / ([1−np]·[1−(n+1)p]).
/// Negative for all physical (small n, small p) inputs.
pub fn eta_multilevel(n: u32, d: &DerivedParams) -> Result<f64, ParamsError> {
    eta_multilevel_from(n, d.p, d.raw_coupling())
}

/// Same formula with the anharmonicity ratio and bare coupling passed explicitly.
pub fn eta_multilevel_from(n: u32, p: f64, raw_coupling: f64) -> Result<f64, ParamsError> {
    let n = f64::from(n);
    if (n + 1.0) * p >= 1.0 {
        return Err(ParamsError::Domain(format!(
            "(n+1)p = {:.3} >= 1; level spacing closes and the expansion fails",
            (n + 1.0) * p
        )));
    }
    Ok(-raw_coupling / ((1.0 - n * p) * (1.0 - (n + 1.0) * p)))
}

/// Validity ratio Q(n) = L(n)/R(n) for dropping the off-diagonal part of the
/// diagonalizing transformation at Fock state |n⟩, with
/// L(n) = (1−(n+2)p)/(p·(1−np)) and R(n) = √((n+1)(n+2))/2.
/// Q(n) ≥ 10 is treated by callers as "off-diagonal term negligible".
pub fn sw_validity_ratio(n: u32, p: f64) -> Result<f64, ParamsError> {
    let n = f64::from(n);
    if !(p > 0.0) {
        return Err(ParamsError::Domain(format!("p must be positive, got {p}")));
    }
    if (n + 2.0) * p >= 1.0 {
        return Err(ParamsError::Domain(format!(
            "(n+2)p = {:.3} >= 1; ratio undefined",
            (n + 2.0) * p
        )));
    }
    let l = (1.0 - (n + 2.0) * p) / (p * (1.0 - n * p));
    let r = 0.5 * ((n + 1.0) * (n + 2.0)).sqrt();
    Ok(l / r)
}
