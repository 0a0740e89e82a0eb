use super::Trajectory;
use crate::model::BodyState;

/// Maximum relative spread among consecutive return times accepted as a period.
pub const PERIOD_CONSISTENCY: f64 = 1e-6;

/// Number of consecutive consistent returns required before reporting.
const REQUIRED_RETURNS: usize = 3;

/// Cubic (or lower-order near the ends) interpolant root on `[t_k, t_{k+1}]`.
fn crossing(times: &[f64], values: &[f64], k: usize) -> f64 {
    let lo = k.saturating_sub(1);
    let hi = (k + 3).min(times.len());
    let ts = &times[lo..hi];
    let vs = &values[lo..hi];
    let interp = |x: f64| -> f64 {
        let mut sum = 0.0;
        for i in 0..ts.len() {
            let mut basis = 1.0;
            for j in 0..ts.len() {
                if i != j {
                    basis *= (x - ts[j]) / (ts[i] - ts[j]);
                }
            }
            sum += vs[i] * basis;
        }
        sum
    };
    let (mut a, mut b) = (times[k], times[k + 1]);
    let (mut fa, fb) = (interp(a), interp(b));
    if fa.signum() == fb.signum() {
        // interpolant disagrees with the samples; fall back to a secant
        let (v0, v1) = (values[k], values[k + 1]);
        return times[k] + (times[k + 1] - times[k]) * v0 / (v0 - v1);
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = interp(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Period of a sampled scalar signal from its increasing zero crossings.
///
/// Returns `None` unless three consecutive return intervals agree to
/// [`PERIOD_CONSISTENCY`] (relative).
pub fn detect_period_series(times: &[f64], values: &[f64]) -> Option<f64> {
    if times.len() != values.len() || times.len() < 4 {
        return None;
    }
    let crossings: Vec<f64> = (0..times.len() - 1)
        .filter(|&k| values[k] < 0.0 && values[k + 1] >= 0.0)
        .map(|k| crossing(times, values, k))
        .collect();
    let returns: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    returns.windows(REQUIRED_RETURNS).find_map(|w| {
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let max = w.iter().cloned().fold(f64::MIN, f64::max);
        let min = w.iter().cloned().fold(f64::MAX, f64::min);
        (mean > 0.0 && (max - min) / mean < PERIOD_CONSISTENCY).then_some(mean)
    })
}

pub fn detect_period<F>(traj: &Trajectory, observable: F) -> Option<f64>
where
    F: Fn(&BodyState) -> f64,
{
    detect_period_series(&traj.times, &traj.observable(observable))
}
