//! Separated coordinates, orbit curves, the quartic `P` with `gamma_n^2 =
//! P(omega_1)`, and the period of Kharlamova orbits.

mod period;
mod poly;

use serde::Serialize;

use crate::cases::{CaseKind, CaseSpec};
use crate::error::{check_dim, Error, Result};
use crate::model::BodyState;

pub use period::{
    orbit_interval, period, period_with_nodes, OrbitInterval, PeriodResult, DOUBLE_ROOT_TOL,
    QUADRATURE_TOL,
};
pub use poly::{QuarticPolynomial, RealRoot};

/// Parameters of the case: diagonal mass `I` and linear potential `B` with
/// `B_n = 0` and `B_i != 0` for `i < n`.
#[derive(Clone, Debug, PartialEq)]
pub struct KharlamovaParams {
    i: Vec<f64>,
    b: Vec<f64>,
    /// `k_i = (I_i + I_n) / B_i`
    k: Vec<f64>,
}

impl KharlamovaParams {
    pub fn new(i: &[f64], b: &[f64]) -> Result<Self> {
        let n = i.len();
        check_dim(n, b.len())?;
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "dimension {n} below the minimum 3"
            )));
        }
        if b[n - 1] != 0.0 {
            return Err(Error::CaseViolation {
                case: "KharlamovaND".into(),
                reason: "requires B_n = 0".into(),
            });
        }
        if let Some(p) = b[..n - 1].iter().position(|x| *x == 0.0) {
            return Err(Error::CaseViolation {
                case: "KharlamovaND".into(),
                reason: format!(
                    "B_{} = 0 leaves the coordinate change undefined; integrate the body equations directly",
                    p + 1
                ),
            });
        }
        let k = (0..n - 1).map(|j| (i[j] + i[n - 1]) / b[j]).collect();
        Ok(Self {
            i: i.to_vec(),
            b: b.to_vec(),
            k,
        })
    }

    pub fn from_spec(spec: &CaseSpec) -> Result<Self> {
        if spec.kind != CaseKind::KharlamovaND {
            return Err(Error::InvalidArgument(format!(
                "expected a KharlamovaND case, got {}",
                spec.kind
            )));
        }
        let i = spec.mass.diag().expect("validated");
        Self::new(i, spec.linear_b().expect("validated"))
    }

    pub fn n(&self) -> usize {
        self.i.len()
    }

    pub fn inertia(&self) -> &[f64] {
        &self.i
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `beta_i = B_i / (I_i + I_n)`
    pub fn beta(&self, i: usize) -> f64 {
        1.0 / self.k[i]
    }
}

/// `(omega_1, ..., omega_{n-1})` and `(gamma_1, ..., gamma_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KharlamovaCoords {
    pub omega: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl KharlamovaCoords {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }
}

pub fn to_kharlamova(state: &BodyState, params: &KharlamovaParams) -> Result<KharlamovaCoords> {
    let n = params.n();
    check_dim(n, state.n())?;
    let last = n - 1;
    let k = &params.k;
    let g = &state.gamma;
    let w1 = k[0] * state.omega.get(0, last);
    let g1 = -k[0] * g[0];
    let mut omega = vec![w1];
    let mut gamma = vec![g1];
    for i in 1..last {
        omega.push(k[i] * state.omega.get(i, last) - w1);
        gamma.push(-k[i] * g[i] + k[0] * g[0]);
    }
    gamma.push(g[last]);
    Ok(KharlamovaCoords { omega, gamma })
}

pub fn from_kharlamova(coords: &KharlamovaCoords, params: &KharlamovaParams) -> Result<BodyState> {
    let n = params.n();
    check_dim(n, coords.gamma.len())?;
    check_dim(n - 1, coords.omega.len())?;
    let k = &params.k;
    let (w1, g1) = (coords.omega[0], coords.gamma[0]);
    let mut omega_in = vec![w1 / k[0]];
    let mut gamma = vec![-g1 / k[0]];
    for i in 1..n - 1 {
        omega_in.push((coords.omega[i] + w1) / k[i]);
        gamma.push(-(coords.gamma[i] + g1) / k[i]);
    }
    gamma.push(coords.gamma[n - 1]);
    BodyState::suslov(&omega_in, &gamma)
}

/// Equations of motion in separated coordinates:
/// `omega_1' = gamma_n`, `omega_i' = 0`, `gamma_i' = gamma_n omega_i`,
/// `gamma_n' = -beta_1^2 gamma_1 omega_1 - sum beta_i^2 (gamma_1 + gamma_i)(omega_1 + omega_i)`.
pub fn reduced_field(
    coords: &KharlamovaCoords,
    params: &KharlamovaParams,
) -> Result<KharlamovaCoords> {
    let n = params.n();
    check_dim(n, coords.gamma.len())?;
    check_dim(n - 1, coords.omega.len())?;
    let (w, g) = (&coords.omega, &coords.gamma);
    let gn = g[n - 1];
    let mut omega = vec![0.0; n - 1];
    omega[0] = gn;
    let mut gamma: Vec<f64> = w.iter().map(|wi| gn * wi).collect();
    let mut gn_dot = -params.beta(0).powi(2) * g[0] * w[0];
    for i in 1..n - 1 {
        gn_dot -= params.beta(i).powi(2) * (g[0] + g[i]) * (w[0] + w[i]);
    }
    gamma.push(gn_dot);
    Ok(KharlamovaCoords { omega, gamma })
}

/// `beta_1^2 gamma_1^2 + sum_{i>=2} beta_i^2 (gamma_1 + gamma_i)^2` for
/// `gammas = (gamma_1, ..., gamma_{n-1})`; adding `gamma_n^2` gives `|Gamma|^2`.
pub fn ellipsoid_form(gammas: &[f64], params: &KharlamovaParams) -> f64 {
    let mut s = (params.beta(0) * gammas[0]).powi(2);
    for i in 1..gammas.len() {
        s += (params.beta(i) * (gammas[0] + gammas[i])).powi(2);
    }
    s
}

/// The curve `omega_1 -> (gamma_1, ..., gamma_{n-1})` through an initial point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitCurve {
    pub omega0: Vec<f64>,
    pub gamma0: Vec<f64>,
}

impl OrbitCurve {
    pub fn eval(&self, w1: f64) -> Vec<f64> {
        let w10 = self.omega0[0];
        let mut out = vec![self.gamma0[0] + 0.5 * (w1 * w1 - w10 * w10)];
        for i in 1..self.omega0.len() {
            out.push(self.gamma0[i] + self.omega0[i] * (w1 - w10));
        }
        out
    }
}

pub fn orbit_curve(initial: &KharlamovaCoords) -> OrbitCurve {
    let m = initial.omega.len();
    OrbitCurve {
        omega0: initial.omega.clone(),
        gamma0: initial.gamma[..m].to_vec(),
    }
}

/// `P(omega_1) = 1 - ellipsoid_form(orbit_curve(omega_1))`, so that
/// `gamma_n^2 = P(omega_1)` along the orbit.
pub fn trajectory_polynomial(
    initial: &KharlamovaCoords,
    params: &KharlamovaParams,
) -> QuarticPolynomial {
    let (w, g) = (&initial.omega, &initial.gamma);
    // gamma_1(x) = x^2/2 + c1
    let c1 = g[0] - 0.5 * w[0] * w[0];
    let mut c = [1.0, 0.0, 0.0, 0.0, 0.0];
    let mut sub_square = |beta: f64, q: [f64; 3]| {
        let b2 = beta * beta;
        c[0] -= b2 * q[0] * q[0];
        c[1] -= b2 * 2.0 * q[0] * q[1];
        c[2] -= b2 * (q[1] * q[1] + 2.0 * q[0] * q[2]);
        c[3] -= b2 * 2.0 * q[1] * q[2];
        c[4] -= b2 * q[2] * q[2];
    };
    sub_square(params.beta(0), [c1, 0.0, 0.5]);
    for i in 1..w.len() {
        // gamma_1(x) + gamma_i(x)
        let q = [c1 + g[i] - w[i] * w[0], w[i], 0.5];
        sub_square(params.beta(i), q);
    }
    QuarticPolynomial::new(c)
}

/// Everything known about the orbit through `state` in closed form.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitAnalysis {
    pub coords: KharlamovaCoords,
    pub polynomial: QuarticPolynomial,
    pub interval: OrbitInterval,
    pub period: PeriodResult,
}

pub fn analyze_orbit(state: &BodyState, params: &KharlamovaParams) -> Result<OrbitAnalysis> {
    let coords = to_kharlamova(state, params)?;
    let polynomial = trajectory_polynomial(&coords, params);
    let interval = orbit_interval(&polynomial, coords.omega[0])?;
    let period = period(&polynomial, &interval)?;
    Ok(OrbitAnalysis {
        coords,
        polynomial,
        interval,
        period,
    })
}
