//! Classical SIS/SIR compartment models and closed-form basic reproduction
//! numbers, used as analytic cross-checks for the cellular engine.
//!
//! The compartment models work in population fractions on the unit simplex;
//! the cellular engine works in head counts. The general integral definition
//! of R0 is not implemented, only the closed forms derived from it.

use thiserror::Error;

use crate::model::DiseaseParams;

#[derive(Debug, Error, PartialEq)]
pub enum ReferenceError {
    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("state ({s}, {i}, {r}) is off the unit simplex")]
    OffSimplex { s: f64, i: f64, r: f64 },
    #[error("R0 denominator {0} is degenerate")]
    DegenerateDenominator(f64),
}

/// Population fractions (s, i, r); s + i + r = 1 for a constant population.
/// SIS states keep r = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompartmentState {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl CompartmentState {
    pub fn new(s: f64, i: f64, r: f64) -> Self {
        CompartmentState { s, i, r }
    }

    pub fn sum(&self) -> f64 {
        self.s + self.i + self.r
    }

    fn on_simplex(&self) -> bool {
        (self.sum() - 1.0).abs() <= 1e-9
            && self.s >= -1e-12
            && self.i >= -1e-12
            && self.r >= -1e-12
    }
}

/// SIS right-hand sides:
/// S' = μ(1 − S) + (1 − θ)αI − βSI,
/// I' = βSI − (1 − θ)αI − μI.
pub fn sis_derivative(state: CompartmentState, params: &DiseaseParams) -> (f64, f64) {
    let CompartmentState { s, i, .. } = state;
    let (beta, alpha, mu, theta) = (params.beta, params.alpha, params.mu, params.theta);
    let ds = mu * (1.0 - s) + (1.0 - theta) * alpha * i - beta * s * i;
    let di = beta * s * i - (1.0 - theta) * alpha * i - mu * i;
    (ds, di)
}

/// SIR right-hand sides:
/// S' = μ(1 − S) + αθI − βSI,
/// I' = βSI − αI − μI,
/// R' = αI − αθI − μR.
pub fn sir_derivative(state: CompartmentState, params: &DiseaseParams) -> (f64, f64, f64) {
    let CompartmentState { s, i, r } = state;
    let (beta, alpha, mu, theta) = (params.beta, params.alpha, params.mu, params.theta);
    let ds = mu * (1.0 - s) + alpha * theta * i - beta * s * i;
    let di = beta * s * i - alpha * i - mu * i;
    let dr = alpha * i - alpha * theta * i - mu * r;
    (ds, di, dr)
}

/// Which compartment model to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompartmentModel {
    Sis,
    Sir,
}

fn derivative(
    model: CompartmentModel,
    state: CompartmentState,
    params: &DiseaseParams,
) -> CompartmentState {
    match model {
        CompartmentModel::Sis => {
            let (ds, di) = sis_derivative(state, params);
            CompartmentState::new(ds, di, 0.0)
        }
        CompartmentModel::Sir => {
            let (ds, di, dr) = sir_derivative(state, params);
            CompartmentState::new(ds, di, dr)
        }
    }
}

/// One classical fourth-order Runge-Kutta step.
fn rk4_step(
    model: CompartmentModel,
    state: CompartmentState,
    params: &DiseaseParams,
    dt: f64,
) -> CompartmentState {
    let advance = |y: CompartmentState, k: CompartmentState, h: f64| {
        CompartmentState::new(y.s + h * k.s, y.i + h * k.i, y.r + h * k.r)
    };
    let k1 = derivative(model, state, params);
    let k2 = derivative(model, advance(state, k1, dt / 2.0), params);
    let k3 = derivative(model, advance(state, k2, dt / 2.0), params);
    let k4 = derivative(model, advance(state, k3, dt), params);
    CompartmentState::new(
        state.s + dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s),
        state.i + dt / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i),
        state.r + dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
    )
}

/// Fixed-step RK4 integration from 0 to `t_end`, sampling after every step.
/// The final step is shortened to land exactly on `t_end`.
pub fn integrate(
    model: CompartmentModel,
    initial: CompartmentState,
    params: &DiseaseParams,
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, CompartmentState)>, ReferenceError> {
    if dt <= 0.0 {
        return Err(ReferenceError::NonPositiveStep(dt));
    }
    if !initial.on_simplex() {
        return Err(ReferenceError::OffSimplex {
            s: initial.s,
            i: initial.i,
            r: initial.r,
        });
    }
    let mut trajectory = vec![(0.0, initial)];
    let mut t = 0.0;
    let mut state = initial;
    while t < t_end {
        let h = dt.min(t_end - t);
        state = rk4_step(model, state, params, h);
        t += h;
        trajectory.push((t, state));
    }
    Ok(trajectory)
}

/// SIS basic reproduction number β / (α(1 − θ) + μ).
pub fn r0_sis(params: &DiseaseParams) -> Result<f64, ReferenceError> {
    let denominator = params.alpha * (1.0 - params.theta) + params.mu;
    if denominator <= 0.0 {
        return Err(ReferenceError::DegenerateDenominator(denominator));
    }
    Ok(params.beta / denominator)
}

/// SIR basic reproduction number β / (α + μ).
pub fn r0_sir(params: &DiseaseParams) -> Result<f64, ReferenceError> {
    let denominator = params.alpha + params.mu;
    if denominator <= 0.0 {
        return Err(ReferenceError::DegenerateDenominator(denominator));
    }
    Ok(params.beta / denominator)
}
