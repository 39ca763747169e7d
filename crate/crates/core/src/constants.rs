//! Physical constants (2019 SI exact values where defined).

/// Reduced Planck constant ħ (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant h (J·s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Elementary charge e (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced magnetic flux quantum φ₀ = ħ/(2e) ≈ 3.29106e-16 Wb.
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);
