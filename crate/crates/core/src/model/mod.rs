//! Physical model: mass tensors, potentials, phase-space states and the
//! right-hand sides of the constrained and unconstrained equations of motion.

mod field;
mod mass;
mod measure;
mod potential;

use nalgebra::DVector;

use crate::algebra::{inner_unchecked, ConstraintSet, SkewMatrix};
use crate::error::{check_dim, Error, Result};

pub use field::{
    j_from_i, lagrange_full_field, multipliers, vector_field_3d, vector_field_general,
    vector_field_reduced, GeneralField, LagrangeFullField, ReducedField, Suslov3dField,
};
pub use mass::{inertia_apply, inertia_invert, MassTensor};
pub use measure::{divergence, divergence_fd, DIVERGENCE_STEP};
pub use potential::{
    Bivariate, BivariateFn, DgjPotential, Potential, PotentialFn, GRADIENT_CHECK_TOL,
};

/// A point `(Omega, Gamma)` of phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyState {
    pub omega: SkewMatrix,
    pub gamma: DVector<f64>,
}

impl BodyState {
    pub fn new(omega: SkewMatrix, gamma: DVector<f64>) -> Result<Self> {
        check_dim(omega.n(), gamma.len())?;
        Ok(Self { omega, gamma })
    }

    /// State on the canonical distribution from the components `Omega_{i,n}`
    /// (`i < n`) and `Gamma`.
    pub fn suslov(omega_in: &[f64], gamma: &[f64]) -> Result<Self> {
        let n = gamma.len();
        check_dim(n - 1, omega_in.len())?;
        let mut omega = SkewMatrix::zeros(n);
        for (i, w) in omega_in.iter().enumerate() {
            omega.set(i, n - 1, *w);
        }
        Self::new(omega, DVector::from_column_slice(gamma))
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    /// Components `Omega_{i,n}` for `i < n`.
    pub fn omega_in(&self) -> Vec<f64> {
        let n = self.n();
        (0..n - 1).map(|i| self.omega.get(i, n - 1)).collect()
    }

    /// Flat coordinates: strict upper triangle of `Omega`, then `Gamma`.
    pub fn pack(&self) -> Vec<f64> {
        let mut y = self.omega.upper();
        y.extend(self.gamma.iter());
        y
    }

    pub fn unpack(n: usize, y: &[f64]) -> Result<Self> {
        let m = n * (n - 1) / 2;
        check_dim(m + n, y.len())?;
        Ok(Self {
            omega: SkewMatrix::from_upper(n, &y[..m])?,
            gamma: DVector::from_column_slice(&y[m..]),
        })
    }

    pub fn packed_len(n: usize) -> usize {
        n * (n - 1) / 2 + n
    }

    pub fn gamma_norm_error(&self) -> f64 {
        (self.gamma.norm() - 1.0).abs()
    }
}

/// Time derivative of a [`BodyState`].
#[derive(Clone, Debug, PartialEq)]
pub struct BodyRate {
    pub omega_dot: SkewMatrix,
    pub gamma_dot: DVector<f64>,
}

impl BodyRate {
    pub fn pack(&self) -> Vec<f64> {
        let mut y = self.omega_dot.upper();
        y.extend(self.gamma_dot.iter());
        y
    }
}

/// A vector field on phase space.
pub trait VectorField: Send + Sync {
    fn n(&self) -> usize;
    fn rate(&self, state: &BodyState) -> Result<BodyRate>;
    fn energy(&self, state: &BodyState) -> f64;
    /// The admissible distribution; unconstrained fields return an empty set.
    fn constraints(&self) -> &ConstraintSet;
}

/// `E = 1/2 <J Omega, Omega> + V(Gamma)`.
pub fn energy(state: &BodyState, mass: &MassTensor, potential: &Potential) -> Result<f64> {
    check_dim(mass.n(), state.n())?;
    let m = mass.apply_unchecked(&state.omega);
    Ok(0.5 * inner_unchecked(&m, &state.omega) + potential.value(&state.gamma))
}

pub(crate) fn require_n_at_least(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidArgument(format!(
            "dimension {n} below the minimum {min}"
        )))
    } else {
        Ok(())
    }
}
