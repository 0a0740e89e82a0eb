//! Invariant tori of the Klebsh–Tisserand case: integrals `F_i`, the
//! disjoint-tori criterion, angle coordinates and rotation numbers.

use serde::Serialize;

use crate::cases::{CaseKind, CaseSpec};
use crate::error::{check_dim, Error, Result};
use crate::integrate::Trajectory;
use crate::model::BodyState;

/// Half-width of the band around `sum c_i/(B_i - B_n) = 1` reported as degenerate.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Integral values at or below this are treated as zero (inactive angle).
pub const ACTIVE_FLOOR: f64 = 1e-20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    TwoDisjointTori,
    BranchedCovering,
    Degenerate,
    /// Some `B_i <= B_n`: level sets need not be compact.
    OutsideHypotheses,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusSpec {
    pub c: Vec<f64>,
    pub classification: Classification,
    /// Empty when outside the hypotheses.
    pub frequencies: Vec<f64>,
    /// Zero-based indices with `c_i > 0`.
    pub active: Vec<usize>,
}

impl TorusSpec {
    pub fn dimension(&self) -> usize {
        self.active.len()
    }
}

/// Parameters of the case: diagonal mass `I` and quadratic potential
/// `V = 1/2 sum B_i Gamma_i^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClebschParams {
    pub i: Vec<f64>,
    pub b: Vec<f64>,
}

impl ClebschParams {
    pub fn new(i: &[f64], b: &[f64]) -> Result<Self> {
        check_dim(i.len(), b.len())?;
        if i.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "dimension {} below the minimum 3",
                i.len()
            )));
        }
        Ok(Self {
            i: i.to_vec(),
            b: b.to_vec(),
        })
    }

    pub fn from_spec(spec: &CaseSpec) -> Result<Self> {
        if spec.kind != CaseKind::ClebschTisserandND {
            return Err(Error::InvalidArgument(format!(
                "expected a ClebschTisserandND case, got {}",
                spec.kind
            )));
        }
        Self::new(
            spec.mass.diag().expect("validated"),
            spec.quadratic_b().expect("validated"),
        )
    }

    pub fn n(&self) -> usize {
        self.i.len()
    }

    fn gap(&self, k: usize) -> f64 {
        self.b[k] - self.b[self.n() - 1]
    }

    fn inertia(&self, k: usize) -> f64 {
        self.i[k] + self.i[self.n() - 1]
    }

    fn check_hypotheses(&self) -> Result<()> {
        let n = self.n();
        match (0..n - 1).find(|&k| !(self.gap(k) > 0.0)) {
            Some(k) => Err(Error::CaseViolation {
                case: "ClebschTisserandND".into(),
                reason: format!(
                    "requires B_i > B_n, but B_{} = {} <= B_{} = {}",
                    k + 1,
                    self.b[k],
                    n,
                    self.b[n - 1]
                ),
            }),
            None => Ok(()),
        }
    }
}

/// `F_i = (B_i - B_n) Gamma_i^2 + (I_i + I_n) Omega_in^2` for `i < n`.
pub fn integrals_f(state: &BodyState, params: &ClebschParams) -> Result<Vec<f64>> {
    let n = params.n();
    check_dim(n, state.n())?;
    Ok((0..n - 1)
        .map(|k| {
            params.gap(k) * state.gamma[k].powi(2)
                + params.inertia(k) * state.omega.get(k, n - 1).powi(2)
        })
        .collect())
}

/// `E - 1/2 sum F_i`, constant along motions.
pub fn energy_offset(state: &BodyState, params: &ClebschParams) -> Result<f64> {
    let n = params.n();
    let f = integrals_f(state, params)?;
    let kinetic: f64 = (0..n - 1)
        .map(|k| params.inertia(k) * state.omega.get(k, n - 1).powi(2))
        .sum();
    let potential: f64 = (0..n).map(|k| params.b[k] * state.gamma[k].powi(2)).sum();
    Ok(0.5 * (kinetic + potential) - 0.5 * f.iter().sum::<f64>())
}

/// Disjoint-tori criterion `sum c_i / (B_i - B_n) < 1`.
pub fn torus_classify(c: &[f64], params: &ClebschParams) -> Result<Classification> {
    let n = params.n();
    check_dim(n - 1, c.len())?;
    params.check_hypotheses()?;
    if c.iter().all(|x| *x <= ACTIVE_FLOOR) {
        return Ok(Classification::Degenerate);
    }
    let s: f64 = (0..n - 1).map(|k| c[k] / params.gap(k)).sum();
    Ok(if (s - 1.0).abs() <= BOUNDARY_TOL {
        Classification::Degenerate
    } else if s < 1.0 {
        Classification::TwoDisjointTori
    } else {
        Classification::BranchedCovering
    })
}

/// `omega_i = sqrt((B_i - B_n) / (I_i + I_n))`, per unit of `tau` with `d tau = Gamma_n dt`.
pub fn frequencies(params: &ClebschParams) -> Result<Vec<f64>> {
    params.check_hypotheses()?;
    Ok((0..params.n() - 1)
        .map(|k| (params.gap(k) / params.inertia(k)).sqrt())
        .collect())
}

/// Classification of the level set through `state`. Parameters outside the
/// hypotheses yield [`Classification::OutsideHypotheses`] instead of an error.
pub fn torus_spec(state: &BodyState, params: &ClebschParams) -> Result<TorusSpec> {
    let c = integrals_f(state, params)?;
    let active = (0..c.len()).filter(|&k| c[k] > ACTIVE_FLOOR).collect();
    if params.check_hypotheses().is_err() {
        return Ok(TorusSpec {
            c,
            classification: Classification::OutsideHypotheses,
            frequencies: Vec::new(),
            active,
        });
    }
    Ok(TorusSpec {
        classification: torus_classify(&c, params)?,
        frequencies: frequencies(params)?,
        c,
        active,
    })
}

/// `phi_i = atan2(Omega_in sqrt(I_i + I_n), Gamma_i sqrt(B_i - B_n))`, or
/// `None` where `F_i = 0`.
pub fn angle_coords(state: &BodyState, params: &ClebschParams) -> Result<Vec<Option<f64>>> {
    params.check_hypotheses()?;
    let n = params.n();
    let c = integrals_f(state, params)?;
    Ok((0..n - 1)
        .map(|k| {
            (c[k] > ACTIVE_FLOOR).then(|| {
                (state.omega.get(k, n - 1) * params.inertia(k).sqrt())
                    .atan2(state.gamma[k] * params.gap(k).sqrt())
            })
        })
        .collect())
}

/// `(Omega_in, Gamma_i) = (sqrt(c/(I_i+I_n)) sin phi, sqrt(c/(B_i-B_n)) cos phi)`.
pub fn from_angle(k: usize, c: f64, phi: f64, params: &ClebschParams) -> (f64, f64) {
    (
        (c / params.inertia(k)).sqrt() * phi.sin(),
        (c / params.gap(k)).sqrt() * phi.cos(),
    )
}

/// Phase continuation: adds multiples of `2 pi` wherever consecutive samples
/// jump by more than `pi`.
pub fn unwrap_phase(phi: &[f64]) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out = Vec::with_capacity(phi.len());
    let mut offset = 0.0;
    for (k, p) in phi.iter().enumerate() {
        if k > 0 {
            let d = p - phi[k - 1];
            if d > PI {
                offset -= TAU;
            } else if d < -PI {
                offset += TAU;
            }
        }
        out.push(p + offset);
    }
    out
}

/// Least-squares line through `(tau, phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    check_dim(x.len(), y.len())?;
    if x.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).abs())
        .fold(0.0, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        max_residual,
    })
}

/// Rotation numbers of the active angles of a trajectory whose `times` are
/// already the new time `tau`. Entries are `None` for angles with `F_i = 0`.
///
/// The grid must satisfy `max omega_i |d tau| < pi/4`, otherwise the phase
/// cannot be unwrapped reliably.
pub fn rotation_numbers(
    traj: &Trajectory,
    params: &ClebschParams,
) -> Result<Vec<Option<LinearFit>>> {
    let omega = frequencies(params)?;
    let w_max = omega.iter().cloned().fold(0.0, f64::max);
    let max_step = traj
        .times
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    if w_max * max_step >= std::f64::consts::FRAC_PI_4 {
        return Err(Error::CoarseGrid(format!(
            "max omega * d tau = {:.3} >= pi/4; refine the output grid",
            w_max * max_step
        )));
    }
    let angles = traj
        .states
        .iter()
        .map(|s| angle_coords(s, params))
        .collect::<Result<Vec<_>>>()?;
    (0..params.n() - 1)
        .map(|k| {
            let phi: Option<Vec<f64>> = angles.iter().map(|a| a[k]).collect();
            match phi {
                Some(phi) => fit_line(&traj.times, &unwrap_phase(&phi)).map(Some),
                None => Ok(None),
            }
        })
        .collect()
}
