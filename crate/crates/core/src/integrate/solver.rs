//! Explicit Runge-Kutta solvers on flat state vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An autonomous or time-dependent ODE `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
    /// Hook applied to every accepted step.
    fn post_step(&self, _y: &mut [f64]) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4,
    /// Dormand-Prince 5(4) with local error control.
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4; initial step guess for the adaptive method.
    pub step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub renormalize_gamma: bool,
    pub max_steps: usize,
}

impl IntegratorConfig {
    /// Tolerances used by the conservation checks.
    pub fn reference() -> Self {
        Self {
            method: Method::Adaptive,
            step: 1e-2,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            renormalize_gamma: true,
            max_steps: 50_000_000,
        }
    }

    pub fn rk4(step: f64) -> Self {
        Self {
            method: Method::Rk4,
            step,
            ..Self::reference()
        }
    }

    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::reference()
        }
    }

    pub fn with_renormalization(mut self, on: bool) -> Self {
        self.renormalize_gamma = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidArgument(format!(
                "{what} must be positive, got {v}"
            )))
        };
        if !(self.step > 0.0) {
            return bad("step", self.step);
        }
        if !(self.rel_tol > 0.0) {
            return bad("rel_tol", self.rel_tol);
        }
        if !(self.abs_tol > 0.0) {
            return bad("abs_tol", self.abs_tol);
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be positive".into()));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::reference()
    }
}

/// Raw solution sampled on the output grid.
#[derive(Clone, Debug)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Attempted steps, accepted and rejected.
    pub steps: usize,
}

/// `t0, t0 + dt, ...` up to and including `t_end`.
pub fn output_grid(t0: f64, t_end: f64, output_dt: f64) -> Result<Vec<f64>> {
    if !(t_end > t0) {
        return Err(Error::InvalidArgument(format!(
            "empty time span [{t0}, {t_end}]"
        )));
    }
    if !(output_dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "output_dt must be positive, got {output_dt}"
        )));
    }
    let count = ((t_end - t0) / output_dt + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|k| t0 + k as f64 * output_dt).collect();
    let last = *grid.last().expect("grid has t0");
    if t_end - last > 1e-9 * output_dt {
        grid.push(t_end);
    } else {
        *grid.last_mut().expect("grid has t0") = t_end;
    }
    Ok(grid)
}

pub fn solve<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    output_dt: f64,
    cfg: &IntegratorConfig,
) -> Result<Solution> {
    cfg.validate()?;
    if y0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: y0.len(),
        });
    }
    let grid = output_grid(t0, t_end, output_dt)?;
    match cfg.method {
        Method::Rk4 => rk4(sys, y0, &grid, cfg),
        Method::Adaptive => dopri5(sys, y0, &grid, cfg),
    }
}

fn check_finite(y: &[f64], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

fn rk4<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[f64],
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Solution> {
    let d = y0.len();
    let mut y = y0.to_vec();
    let mut states = vec![y.clone()];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut steps = 0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let sub = ((b - a) / cfg.step - 1e-9).ceil().max(1.0) as usize;
        let h = (b - a) / sub as f64;
        for s in 0..sub {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: cfg.max_steps,
                    t: a + s as f64 * h,
                });
            }
            let t = a + s as f64 * h;
            sys.rhs(t, &y, &mut k1)?;
            for i in 0..d {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            sys.rhs(t + 0.5 * h, &tmp, &mut k2)?;
            for i in 0..d {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            sys.rhs(t + 0.5 * h, &tmp, &mut k3)?;
            for i in 0..d {
                tmp[i] = y[i] + h * k3[i];
            }
            sys.rhs(t + h, &tmp, &mut k4)?;
            for i in 0..d {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            sys.post_step(&mut y);
            check_finite(&y, t + h)?;
        }
        states.push(y.clone());
    }
    Ok(Solution {
        times: grid.to_vec(),
        states,
        steps,
    })
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dopri5<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[f64],
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Solution> {
    let d = y0.len();
    let mut y = y0.to_vec();
    let mut states = vec![y.clone()];
    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut y_new = vec![0.0; d];
    let mut t = grid[0];
    let mut h = cfg.step;
    let mut steps = 0usize;
    sys.rhs(t, &y, &mut k[0])?;

    for &target in &grid[1..] {
        while t < target {
            let remaining = target - t;
            let clamped = h >= remaining * (1.0 - 1e-12);
            let h_try = if clamped { remaining } else { h };
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: cfg.max_steps,
                    t,
                });
            }
            for s in 1..7 {
                for i in 0..d {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += h_try * A[s][j] * kj[i];
                    }
                    tmp[i] = acc;
                }
                sys.rhs(t + C[s] * h_try, &tmp, &mut k[s])?;
                if s == 6 {
                    y_new.copy_from_slice(&tmp);
                }
            }
            let mut err = 0.0;
            for i in 0..d {
                let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h_try;
                let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / d as f64).sqrt();
            if !err.is_finite() {
                h = 0.25 * h_try;
            } else if err <= 1.0 {
                t = if clamped { target } else { t + h_try };
                y.copy_from_slice(&y_new);
                sys.post_step(&mut y);
                check_finite(&y, t)?;
                sys.rhs(t, &y, &mut k[0])?;
                let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                let proposal = h_try * fac;
                h = if clamped { proposal.max(h) } else { proposal };
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                h = h_try * fac;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t });
            }
        }
        states.push(y.clone());
    }
    Ok(Solution {
        times: grid.to_vec(),
        states,
        steps,
    })
}
