use serde::Serialize;

use super::Trajectory;
use crate::cases::IntegralSet;

/// Lower bound on the denominator of relative drifts.
pub const DRIFT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftEntry {
    pub label: String,
    pub initial: f64,
    /// `max_t |F(t) - F(0)| / max(|F(0)|, scale(0), DRIFT_FLOOR)`, where
    /// `scale` is the magnitude of the terms of `F`.
    pub relative_drift: f64,
}

pub fn drift_report(traj: &Trajectory, integrals: &IntegralSet) -> Vec<DriftEntry> {
    integrals
        .iter()
        .map(|integral| {
            let values = traj.observable(|s| integral.eval(s));
            let initial = values[0];
            let scale = integral.scale(&traj.states[0]);
            let max_change = values
                .iter()
                .map(|v| (v - initial).abs())
                .fold(0.0, f64::max);
            DriftEntry {
                label: integral.label.clone(),
                initial,
                relative_drift: max_change / initial.abs().max(scale).max(DRIFT_FLOOR),
            }
        })
        .collect()
}
