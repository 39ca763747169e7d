//! Collective-coordinate tier: the kink is reduced to its modulation
//! parameters, velocity u(τ) and centroid Ξ(τ), which obey ordinary
//! differential equations driven by bias, damping, and the localized
//! capacitive coupling at ξ = 0:
//!
//!   du/dτ = −(π/4)·γ·(1−u²)^{3/2} − α·u·(1−u²) − (η/2)·u²·sech³(Θ₀)·sinh(Θ₀)
//!   dΞ/dτ = u + (η/2)·(u³/√(1−u²))·Θ₀·sech³(Θ₀)·sinh(Θ₀)
//!
//! with Θ₀ = Ξ/√(1−u²) and η the signed coupling constant (state-dependent).
//! Integration is fixed-step classical Runge–Kutta: the trajectories are
//! smooth and the output must be bitwise reproducible.

use thiserror::Error;

use crate::kink::sech;

/// Launch centroid used by [`measure_delay`]. At |Ξ| = 10 the neglected
/// coupling tail is sech²(10) ≈ 8.2e-9, far below any delay tolerance here.
pub const LAUNCH_XI: f64 = -10.0;
/// Probe centroid used by [`measure_delay`]; see [`LAUNCH_XI`].
pub const PROBE_XI: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("invalid modulation state or spec: {0}")]
    Invalid(String),
    /// |u| reached 1 within 1e-12: the collective coordinate leaves its chart.
    #[error("velocity reached the characteristic limit at tau = {tau}")]
    Range { tau: f64 },
    /// No steady state exists (undamped biased kink runs away to |u| → 1).
    #[error("domain error: {0}")]
    Domain(String),
    /// The centroid never reached the probe (fluxon stalled under damping).
    #[error("centroid never crossed the probe (final u = {final_u:.3e}, final Xi = {final_xi:.3})")]
    NoCrossing { final_u: f64, final_xi: f64 },
}

/// Modulation parameters of a perturbed kink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkState {
    pub u: f64,
    pub xi: f64,
    pub tau: f64,
}

impl KinkState {
    pub fn new(u: f64, xi: f64, tau: f64) -> Result<Self, OdeError> {
        if !(u > -1.0 && u < 1.0) || !u.is_finite() || !xi.is_finite() || !tau.is_finite() {
            return Err(OdeError::Invalid(format!("u = {u}, xi = {xi}, tau = {tau}")));
        }
        Ok(KinkState { u, xi, tau })
    }
}

/// Perturbations acting on the kink: uniform damping and bias, plus the
/// signed local coupling (zero if no transmon is attached).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub alpha: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl PerturbationSpec {
    pub fn new(alpha: f64, gamma: f64, eta: f64) -> Result<Self, OdeError> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(OdeError::Invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(gamma.abs() < 1.0) {
            return Err(OdeError::Invalid(format!("|gamma| must be < 1, got {gamma}")));
        }
        if !(eta.abs() < 0.1) {
            return Err(OdeError::Invalid(format!("|eta| must be < 0.1, got {eta}")));
        }
        Ok(PerturbationSpec { alpha, gamma, eta })
    }

    /// Damping-only spec (free kink if alpha = 0).
    pub fn damped(alpha: f64) -> Result<Self, OdeError> {
        Self::new(alpha, 0.0, 0.0)
    }

    /// True when the coupling dominates the damping (α < |η|·u0), the regime
    /// in which the closed-form delay applies.
    pub fn coupling_dominates(&self, u0: f64) -> bool {
        self.alpha < self.eta.abs() * u0.abs()
    }
}

/// sech³(x)·sinh(x), regrouped as tanh(x)·sech²(x) so sinh never overflows.
/// Underflows cleanly to zero for |x| beyond ~370.
pub fn sech3_sinh(x: f64) -> f64 {
    let s = sech(x);
    x.tanh() * s * s
}

/// Right-hand side (du/dτ, dΞ/dτ) of the modulation equations.
pub fn rhs(state: &KinkState, p: &PerturbationSpec) -> (f64, f64) {
    let u = state.u;
    let one_m_u2 = 1.0 - u * u;
    let w = one_m_u2.sqrt();
    let theta0 = state.xi / w;
    let shape = sech3_sinh(theta0);

    let du = -0.25 * std::f64::consts::PI * p.gamma * one_m_u2 * w
        - p.alpha * u * one_m_u2
        - 0.5 * p.eta * u * u * shape;
    let dxi = u + 0.5 * p.eta * (u * u * u / w) * theta0 * shape;
    (du, dxi)
}

fn rk4_step(state: &KinkState, p: &PerturbationSpec, dtau: f64) -> KinkState {
    let s = state;
    let (k1u, k1x) = rhs(s, p);
    let s2 = KinkState { u: s.u + 0.5 * dtau * k1u, xi: s.xi + 0.5 * dtau * k1x, tau: s.tau };
    let (k2u, k2x) = rhs(&s2, p);
    let s3 = KinkState { u: s.u + 0.5 * dtau * k2u, xi: s.xi + 0.5 * dtau * k2x, tau: s.tau };
    let (k3u, k3x) = rhs(&s3, p);
    let s4 = KinkState { u: s.u + dtau * k3u, xi: s.xi + dtau * k3x, tau: s.tau };
    let (k4u, k4x) = rhs(&s4, p);
    KinkState {
        u: s.u + dtau / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        xi: s.xi + dtau / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        tau: s.tau + dtau,
    }
}

fn check_range(state: &KinkState) -> Result<(), OdeError> {
    if state.u.abs() >= 1.0 - 1e-12 || !state.u.is_finite() {
        return Err(OdeError::Range { tau: state.tau });
    }
    Ok(())
}

/// Fixed-step RK4 trajectory from `initial` to `tau_end`, recording every step.
pub fn integrate(
    initial: KinkState,
    p: &PerturbationSpec,
    dtau: f64,
    tau_end: f64,
) -> Result<Vec<KinkState>, OdeError> {
    if !(dtau > 0.0 && dtau <= 0.1) {
        return Err(OdeError::Invalid(format!("dtau must be in (0, 0.1], got {dtau}")));
    }
    check_range(&initial)?;
    let n_steps = ((tau_end - initial.tau) / dtau).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(initial);
    let mut state = initial;
    for _ in 0..n_steps {
        state = rk4_step(&state, p, dtau);
        check_range(&state)?;
        out.push(state);
    }
    Ok(out)
}

/// Steady-state velocity from the bias/damping balance,
/// u_ss = −sign(γ)·[1 + (4α/(πγ))²]^{−1/2}.
pub fn steady_state_velocity(gamma: f64, alpha: f64) -> Result<f64, OdeError> {
    if alpha < 0.0 {
        return Err(OdeError::Invalid(format!("alpha must be >= 0, got {alpha}")));
    }
    if gamma == 0.0 {
        if alpha > 0.0 {
            return Ok(0.0);
        }
        return Err(OdeError::Domain(
            "no bias and no damping: every velocity is steady".into(),
        ));
    }
    if alpha == 0.0 {
        return Err(OdeError::Domain(
            "undamped biased kink has no steady state (|u| runs to 1)".into(),
        ));
    }
    let r = 4.0 * alpha / (std::f64::consts::PI * gamma);
    Ok(-gamma.signum() / (1.0 + r * r).sqrt())
}

/// Closed-form velocity u(Θ₀) of a kink launched at u₀ interacting with the
/// localized coupling, from √(1−u²) = √(1−u₀²)·[1 − (η/4)·(u₀²/√(1−u₀²))·sech²(Θ₀)]
/// (positive branch).
pub fn analytic_velocity(u0: f64, eta: f64, theta0: f64) -> f64 {
    let w0_sq = 1.0 - u0 * u0;
    let w0 = w0_sq.sqrt();
    let s = sech(theta0);
    let w = w0 * (1.0 - 0.25 * eta * (u0 * u0 / w0) * s * s);
    (1.0 - w * w).max(0.0).sqrt()
}

/// Outcome of one launch-to-probe integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Interpolated time at which the centroid crossed the probe.
    pub tau: f64,
    /// Velocity at the recorded step after the crossing.
    pub u_at_probe: f64,
}

/// Integrate from (u0, Ξ = LAUNCH_XI) until the centroid crosses `probe`,
/// without storing the trajectory. Fails with `NoCrossing` if the kink stalls
/// (u falls below u0/1000) or the time budget 50·span/u0 runs out.
pub fn integrate_until_crossing(
    u0: f64,
    p: &PerturbationSpec,
    dtau: f64,
    launch: f64,
    probe: f64,
) -> Result<Crossing, OdeError> {
    if !(u0 > 0.0 && u0 < 1.0) {
        return Err(OdeError::Invalid(format!("u0 must be in (0, 1), got {u0}")));
    }
    if !(probe > launch) {
        return Err(OdeError::Invalid(format!("probe {probe} must exceed launch {launch}")));
    }
    let mut state = KinkState { u: u0, xi: launch, tau: 0.0 };
    let tau_max = 50.0 * (probe - launch) / u0;
    let stall = u0 * 1e-3;
    loop {
        let prev = state;
        state = rk4_step(&state, p, dtau);
        check_range(&state)?;
        if state.xi >= probe {
            let frac = (probe - prev.xi) / (state.xi - prev.xi);
            return Ok(Crossing { tau: prev.tau + frac * dtau, u_at_probe: state.u });
        }
        if state.u < stall || state.tau > tau_max {
            return Err(OdeError::NoCrossing { final_u: state.u, final_xi: state.xi });
        }
    }
}

/// State-dependent time delay: difference of probe-crossing times for the two
/// coupling signs, τ_delay = τ(p_down) − τ(p_up). Both specs must agree on
/// damping and bias; launch and probe sit at Ξ = ∓10.
pub fn measure_delay(
    u0: f64,
    p_up: &PerturbationSpec,
    p_down: &PerturbationSpec,
    dtau: f64,
) -> Result<f64, OdeError> {
    if p_up.alpha != p_down.alpha || p_up.gamma != p_down.gamma {
        return Err(OdeError::Invalid(
            "delay specs must differ only in the coupling".into(),
        ));
    }
    let up = integrate_until_crossing(u0, p_up, dtau, LAUNCH_XI, PROBE_XI)?;
    let down = integrate_until_crossing(u0, p_down, dtau, LAUNCH_XI, PROBE_XI)?;
    Ok(down.tau - up.tau)
}
