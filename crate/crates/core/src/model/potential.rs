use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Tolerance of the finite-difference gradient check run at construction.
pub const GRADIENT_CHECK_TOL: f64 = 1e-6;

/// A user-supplied potential on R^n.
pub trait PotentialFn: Send + Sync {
    fn value(&self, gamma: &[f64]) -> f64;
    fn gradient(&self, gamma: &[f64]) -> Vec<f64>;
}

/// A function of two variables `v(p, q)` with its gradient.
#[derive(Clone)]
pub enum Bivariate {
    Zero,
    /// `amp * sin(p) + q_coef * q`
    Sin {
        amp: f64,
        q_coef: f64,
    },
    /// `pp * p^2 + q * q + qq * q^2`
    Quadratic {
        pp: f64,
        q: f64,
        qq: f64,
    },
    Custom(Arc<dyn BivariateFn>),
}

pub trait BivariateFn: Send + Sync {
    fn value(&self, p: f64, q: f64) -> f64;
    fn gradient(&self, p: f64, q: f64) -> (f64, f64);
}

impl Bivariate {
    pub fn value(&self, p: f64, q: f64) -> f64 {
        match self {
            Bivariate::Zero => 0.0,
            Bivariate::Sin { amp, q_coef } => amp * p.sin() + q_coef * q,
            Bivariate::Quadratic { pp, q: lin, qq } => pp * p * p + lin * q + qq * q * q,
            Bivariate::Custom(f) => f.value(p, q),
        }
    }

    pub fn gradient(&self, p: f64, q: f64) -> (f64, f64) {
        match self {
            Bivariate::Zero => (0.0, 0.0),
            Bivariate::Sin { amp, q_coef } => (amp * p.cos(), *q_coef),
            Bivariate::Quadratic { pp, q: lin, qq } => (2.0 * pp * p, lin + 2.0 * qq * q),
            Bivariate::Custom(f) => f.gradient(p, q),
        }
    }
}

impl fmt::Debug for Bivariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bivariate::Zero => write!(f, "Zero"),
            Bivariate::Sin { amp, q_coef } => write!(f, "Sin {{ amp: {amp}, q_coef: {q_coef} }}"),
            Bivariate::Quadratic { pp, q, qq } => {
                write!(f, "Quadratic {{ pp: {pp}, q: {q}, qq: {qq} }}")
            }
            Bivariate::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Three-dimensional potential
/// `V = v1(G1, G2^2 + G3^2) + v2(G2, G1^2 + G3^2)`.
#[derive(Clone, Debug)]
pub struct DgjPotential {
    pub v1: Bivariate,
    pub v2: Bivariate,
}

impl DgjPotential {
    pub fn v1_args(gamma: &[f64]) -> (f64, f64) {
        (gamma[0], gamma[1] * gamma[1] + gamma[2] * gamma[2])
    }

    pub fn v2_args(gamma: &[f64]) -> (f64, f64) {
        (gamma[1], gamma[0] * gamma[0] + gamma[2] * gamma[2])
    }

    fn value(&self, g: &[f64]) -> f64 {
        let (p1, q1) = Self::v1_args(g);
        let (p2, q2) = Self::v2_args(g);
        self.v1.value(p1, q1) + self.v2.value(p2, q2)
    }

    fn gradient(&self, g: &[f64]) -> Vec<f64> {
        let (p1, q1) = Self::v1_args(g);
        let (p2, q2) = Self::v2_args(g);
        let (a_p, a_q) = self.v1.gradient(p1, q1);
        let (b_p, b_q) = self.v2.gradient(p2, q2);
        vec![
            a_p + 2.0 * g[0] * b_q,
            2.0 * g[1] * a_q + b_p,
            2.0 * g[2] * (a_q + b_q),
        ]
    }
}

/// Potential energy `V(Gamma)`.
#[derive(Clone)]
pub enum Potential {
    Zero,
    /// `V = <B, Gamma>`
    Linear(DVector<f64>),
    /// `V = 1/2 sum B_i Gamma_i^2`
    Quadratic(DVector<f64>),
    Dgj(DgjPotential),
    Custom(Arc<dyn PotentialFn>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Linear(b) => write!(f, "Linear({:?})", b.as_slice()),
            Potential::Quadratic(b) => write!(f, "Quadratic({:?})", b.as_slice()),
            Potential::Dgj(d) => write!(f, "Dgj({d:?})"),
            Potential::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Potential {
    pub fn linear(b: &[f64]) -> Self {
        Potential::Linear(DVector::from_column_slice(b))
    }

    pub fn quadratic(b: &[f64]) -> Self {
        Potential::Quadratic(DVector::from_column_slice(b))
    }

    /// Builds a three-dimensional two-function potential after checking its
    /// gradients by finite differences.
    pub fn dgj(v1: Bivariate, v2: Bivariate) -> Result<Self> {
        let p = Potential::Dgj(DgjPotential { v1, v2 });
        p.check_gradient(3)?;
        Ok(p)
    }

    /// Wraps a user potential on R^n after checking its gradient.
    pub fn custom(n: usize, f: Arc<dyn PotentialFn>) -> Result<Self> {
        let p = Potential::Custom(f);
        p.check_gradient(n)?;
        Ok(p)
    }

    /// Dimension the potential is tied to, if any.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Potential::Linear(b) | Potential::Quadratic(b) => Some(b.len()),
            Potential::Dgj(_) => Some(3),
            Potential::Zero | Potential::Custom(_) => None,
        }
    }

    pub fn value(&self, gamma: &DVector<f64>) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Linear(b) => b.dot(gamma),
            Potential::Quadratic(b) => {
                0.5 * b
                    .iter()
                    .zip(gamma.iter())
                    .map(|(b, g)| b * g * g)
                    .sum::<f64>()
            }
            Potential::Dgj(d) => d.value(gamma.as_slice()),
            Potential::Custom(f) => f.value(gamma.as_slice()),
        }
    }

    /// `dV/dGamma`.
    pub fn gradient(&self, gamma: &DVector<f64>) -> DVector<f64> {
        match self {
            Potential::Zero => DVector::zeros(gamma.len()),
            Potential::Linear(b) => b.clone(),
            Potential::Quadratic(b) => b.component_mul(gamma),
            Potential::Dgj(d) => DVector::from_vec(d.gradient(gamma.as_slice())),
            Potential::Custom(f) => DVector::from_vec(f.gradient(gamma.as_slice())),
        }
    }

    /// Compares the gradient with central differences of the value at a fixed
    /// set of points on and near the unit sphere.
    pub fn check_gradient(&self, n: usize) -> Result<()> {
        if let Some(d) = self.dimension() {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d,
                });
            }
        }
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for k in 0..8 {
            let point: Vec<f64> = (0..n)
                .map(|i| ((1.7 * (k * n + i) as f64 + 0.3).sin()) * 0.8)
                .collect();
            let g = DVector::from_vec(point);
            let grad = self.gradient(&g);
            if grad.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: grad.len(),
                });
            }
            for i in 0..n {
                let mut plus = g.clone();
                let mut minus = g.clone();
                plus[i] += h;
                minus[i] -= h;
                let fd = (self.value(&plus) - self.value(&minus)) / (2.0 * h);
                let err = (fd - grad[i]).abs() / (1.0 + grad[i].abs());
                worst = worst.max(err);
            }
        }
        if worst.is_finite() && worst <= GRADIENT_CHECK_TOL {
            Ok(())
        } else {
            Err(Error::InconsistentGradient { error: worst })
        }
    }
}
