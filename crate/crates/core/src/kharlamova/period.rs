use serde::Serialize;

use super::poly::QuarticPolynomial;
use crate::error::{Error, Result};

/// Relative threshold on `|P'(xi)|` below which an endpoint counts as a
/// double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-8;
/// Relative change between successive node doublings that stops the quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

const START_NODES: usize = 64;
const MAX_NODES: usize = 1 << 22;

/// Adjacent real roots of `P` around the initial `omega_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_multiplicity: usize,
    pub hi_multiplicity: usize,
}

impl OrbitInterval {
    /// True when the initial point sits at a rest configuration.
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodResult {
    Periodic {
        period: f64,
        nodes: usize,
        /// Relative change of the last node doubling.
        rel_change: f64,
    },
    /// An endpoint is a multiple root; motion tends to it and never returns.
    Asymptotic { endpoint: f64 },
    /// The orbit is a single point.
    Stationary,
}

impl PeriodResult {
    pub fn period(&self) -> Option<f64> {
        match self {
            PeriodResult::Periodic { period, .. } => Some(*period),
            _ => None,
        }
    }
}

pub fn orbit_interval(p: &QuarticPolynomial, w10: f64) -> Result<OrbitInterval> {
    let scale = p.magnitude(w10).max(1.0);
    let p0 = p.eval(w10);
    if p0 < -1e-10 * scale {
        return Err(Error::InconsistentData(format!(
            "P(omega_1) = {p0:.3e} < 0 at the initial point"
        )));
    }
    let roots = p.real_roots();
    let near = 1e-8 * (1.0 + w10.abs());
    let at = roots.iter().position(|r| (r.x - w10).abs() <= near);
    let (lo, hi) = match at {
        Some(k) => {
            let slope = p.derivative(roots[k].x);
            if slope.abs() < DOUBLE_ROOT_TOL * p.derivative_scale(roots[k].x).max(1e-300) {
                let r = roots[k];
                return Ok(OrbitInterval {
                    lo: r.x,
                    hi: r.x,
                    lo_multiplicity: r.multiplicity,
                    hi_multiplicity: r.multiplicity,
                });
            }
            if slope > 0.0 {
                (Some(roots[k]), roots.get(k + 1).copied())
            } else {
                (k.checked_sub(1).map(|j| roots[j]), Some(roots[k]))
            }
        }
        None => (
            roots.iter().rev().find(|r| r.x < w10).copied(),
            roots.iter().find(|r| r.x > w10).copied(),
        ),
    };
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(OrbitInterval {
            lo: lo.x,
            hi: hi.x,
            lo_multiplicity: lo.multiplicity,
            hi_multiplicity: hi.multiplicity,
        }),
        _ => Err(Error::InconsistentData(
            "P is not bounded by real roots around the initial point".into(),
        )),
    }
}

fn is_multiple(p: &QuarticPolynomial, x: f64, multiplicity: usize) -> bool {
    multiplicity >= 2 || p.derivative(x).abs() < DOUBLE_ROOT_TOL * p.derivative_scale(x)
}

/// `T = 2 int_lo^hi dx / sqrt(P(x))` with `x = m + h sin(theta)` and a
/// fixed number of trapezoid nodes over a full period of `theta`.
pub fn period_with_nodes(
    p: &QuarticPolynomial,
    interval: &OrbitInterval,
    nodes: usize,
) -> Result<f64> {
    let (lo, hi) = (interval.lo, interval.hi);
    // P = (x - lo)(hi - x) Q
    let q = p.deflate(lo).deflate(hi);
    let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let step = std::f64::consts::TAU / nodes as f64;
    let mut sum = 0.0;
    for k in 0..nodes {
        let x = m + h * (k as f64 * step).sin();
        let qx = -q.eval(x);
        if !(qx > 0.0) {
            return Err(Error::InconsistentData(format!(
                "P has an extra root inside the orbit interval near {x}"
            )));
        }
        sum += 1.0 / qx.sqrt();
    }
    Ok(sum * step)
}

pub fn period(p: &QuarticPolynomial, interval: &OrbitInterval) -> Result<PeriodResult> {
    if interval.is_degenerate() {
        return Ok(PeriodResult::Stationary);
    }
    for (x, mult) in [
        (interval.lo, interval.lo_multiplicity),
        (interval.hi, interval.hi_multiplicity),
    ] {
        if is_multiple(p, x, mult) {
            return Ok(PeriodResult::Asymptotic { endpoint: x });
        }
    }
    let mut nodes = START_NODES;
    let mut t = period_with_nodes(p, interval, nodes)?;
    loop {
        let t2 = period_with_nodes(p, interval, 2 * nodes)?;
        nodes *= 2;
        let rel_change = ((t2 - t) / t2).abs();
        if rel_change < QUADRATURE_TOL {
            return Ok(PeriodResult::Periodic {
                period: t2,
                nodes,
                rel_change,
            });
        }
        if nodes >= MAX_NODES {
            return Err(Error::InconsistentData(format!(
                "period quadrature did not converge (relative change {rel_change:.3e} at {nodes} nodes)"
            )));
        }
        t = t2;
    }
}
