//! Trajectory integration, time reparametrization and diagnostics.

mod csv;
mod drift;
mod period;
mod reparam;
mod solver;

use crate::error::Result;
use crate::model::{BodyState, VectorField};

pub use csv::{csv_header, write_csv};
pub use drift::{drift_report, DriftEntry, DRIFT_FLOOR};
pub use period::{detect_period, detect_period_series, PERIOD_CONSISTENCY};
pub use reparam::{reparametrize, reparametrize_times, Convention};
pub use solver::{output_grid, solve, IntegratorConfig, Method, OdeSystem, Solution};

/// Per-sample diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub energy: f64,
    pub constraint_residual: f64,
    pub gamma_norm_err: f64,
}

/// Sampled solution of a phase-space field.
///
/// `times` is strictly monotone: increasing for integrated trajectories, and
/// possibly decreasing after a reparametrization with a negative rate.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub n: usize,
    pub times: Vec<f64>,
    pub states: Vec<BodyState>,
    pub aux: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn observable<F: Fn(&BodyState) -> f64>(&self, f: F) -> Vec<f64> {
        self.states.iter().map(f).collect()
    }

    pub fn last(&self) -> &BodyState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.aux
            .iter()
            .map(|a| a.constraint_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_gamma_norm_err(&self) -> f64 {
        self.aux
            .iter()
            .map(|a| a.gamma_norm_err.abs())
            .fold(0.0, f64::max)
    }
}

/// Adapts a [`VectorField`] to flat coordinates (strict upper triangle of
/// `Omega`, then `Gamma`).
pub struct BodyOde<'a> {
    field: &'a dyn VectorField,
    renormalize: bool,
}

impl<'a> BodyOde<'a> {
    pub fn new(field: &'a dyn VectorField, renormalize: bool) -> Self {
        Self { field, renormalize }
    }
}

impl OdeSystem for BodyOde<'_> {
    fn dim(&self) -> usize {
        BodyState::packed_len(self.field.n())
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let state = BodyState::unpack(self.field.n(), y)?;
        let rate = self.field.rate(&state)?;
        dy.copy_from_slice(&rate.pack());
        Ok(())
    }

    fn post_step(&self, y: &mut [f64]) {
        if self.renormalize {
            let n = self.field.n();
            let gamma = &mut y[n * (n - 1) / 2..];
            let norm = gamma.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm > 0.0 {
                gamma.iter_mut().for_each(|g| *g /= norm);
            }
        }
    }
}

pub fn diagnostics(field: &dyn VectorField, state: &BodyState) -> Diagnostics {
    Diagnostics {
        energy: field.energy(state),
        constraint_residual: field.constraints().residual(&state.omega),
        gamma_norm_err: state.gamma.norm() - 1.0,
    }
}

/// Integrates `field` from `state0` over `[t0, t_end]`, sampling every
/// `output_dt`. Constraint residuals are recorded, never projected away.
pub fn integrate(
    field: &dyn VectorField,
    state0: &BodyState,
    t_span: (f64, f64),
    output_dt: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let n = field.n();
    crate::error::check_dim(n, state0.n())?;
    let ode = BodyOde::new(field, cfg.renormalize_gamma);
    let sol = solve(&ode, &state0.pack(), t_span.0, t_span.1, output_dt, cfg)?;
    let states = sol
        .states
        .iter()
        .map(|y| BodyState::unpack(n, y))
        .collect::<Result<Vec<_>>>()?;
    let aux = states.iter().map(|s| diagnostics(field, s)).collect();
    Ok(Trajectory {
        n,
        times: sol.times,
        states,
        aux,
    })
}
