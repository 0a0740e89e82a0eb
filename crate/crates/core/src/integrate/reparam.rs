use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{check_dim, Error, Result};
use crate::model::BodyState;

/// How the observable `phi` defines the new time `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `d tau = phi dt`
    Rate,
    /// `d tau = dt / phi`
    Denominator,
}

impl Convention {
    pub fn inverse(self) -> Self {
        match self {
            Convention::Rate => Convention::Denominator,
            Convention::Denominator => Convention::Rate,
        }
    }
}

/// New times for samples of `phi` taken at `times`, starting from `times[0]`.
///
/// Each interval uses the signed geometric mean of the endpoint values of
/// `phi`, a second-order rule whose two conventions are exact inverses of
/// each other. `phi` must keep a strict sign along the samples.
pub fn reparametrize_times(times: &[f64], phi: &[f64], convention: Convention) -> Result<Vec<f64>> {
    check_dim(times.len(), phi.len())?;
    if times.is_empty() {
        return Ok(Vec::new());
    }
    let sign = phi[0].signum();
    if phi[0] == 0.0 || !phi[0].is_finite() {
        return Err(Error::SignChange { t: times[0] });
    }
    let mut out = Vec::with_capacity(times.len());
    out.push(times[0]);
    for k in 1..times.len() {
        let (a, b) = (phi[k - 1], phi[k]);
        if !(b * sign > 0.0) {
            // linear estimate of the crossing
            let t = if a != b {
                times[k - 1] + (times[k] - times[k - 1]) * a / (a - b)
            } else {
                times[k]
            };
            return Err(Error::SignChange { t });
        }
        let mean = sign * (a * b).sqrt();
        let dt = times[k] - times[k - 1];
        let dtau = match convention {
            Convention::Rate => dt * mean,
            Convention::Denominator => dt / mean,
        };
        out.push(out[k - 1] + dtau);
    }
    Ok(out)
}

/// Re-indexes `traj` by the new time defined by `phi`.
pub fn reparametrize<F>(traj: &Trajectory, phi: F, convention: Convention) -> Result<Trajectory>
where
    F: Fn(&BodyState) -> f64,
{
    let values = traj.observable(phi);
    let times = reparametrize_times(&traj.times, &values, convention)?;
    Ok(Trajectory {
        n: traj.n,
        times,
        states: traj.states.clone(),
        aux: traj.aux.clone(),
    })
}
