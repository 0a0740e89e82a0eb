use nalgebra::{DMatrix, DVector};

use crate::algebra::SkewMatrix;
use crate::error::{check_dim, Error, Result};

/// Symmetric mass tensor `I`; the inertia map is `J(Omega) = I Omega + Omega I`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassTensor {
    matrix: DMatrix<f64>,
    diagonal: Option<Vec<f64>>,
    /// Inverse of `J` on strict-upper-triangle coordinates (full tensors only).
    inverse_map: Option<DMatrix<f64>>,
}

impl MassTensor {
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("mass tensor needs n >= 2".into()));
        }
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "mass tensor entry I_{} = {v} is not positive",
                k + 1
            )));
        }
        Ok(Self::diagonal_unchecked(values))
    }

    fn diagonal_unchecked(values: &[f64]) -> Self {
        Self {
            matrix: DMatrix::from_diagonal(&DVector::from_column_slice(values)),
            diagonal: Some(values.to_vec()),
            inverse_map: None,
        }
    }

    /// General symmetric positive definite tensor. Diagonal input is stored in
    /// diagonal form.
    pub fn full(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || n < 2 {
            return Err(Error::InvalidArgument(
                "mass tensor must be square, n >= 2".into(),
            ));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        if (&matrix - matrix.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidArgument(
                "mass tensor is not symmetric".into(),
            ));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::InvalidArgument(
                "mass tensor is not positive definite".into(),
            ));
        }
        let off_diagonal = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .any(|(i, j)| i != j && matrix[(i, j)] != 0.0);
        if !off_diagonal {
            let d: Vec<f64> = (0..n).map(|i| matrix[(i, i)]).collect();
            return Ok(Self::diagonal_unchecked(&d));
        }
        let mut out = Self {
            matrix,
            diagonal: None,
            inverse_map: None,
        };
        out.inverse_map = Some(out.invert_map()?);
        Ok(out)
    }

    fn invert_map(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        let dim = n * (n - 1) / 2;
        let mut map = DMatrix::zeros(dim, dim);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let image = self.apply_unchecked(&SkewMatrix::basis(n, i, j)).upper();
                map.set_column(k, &DVector::from_vec(image));
                k += 1;
            }
        }
        map.try_inverse()
            .ok_or(Error::SingularInertia { i: 1, j: 2 })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn diag(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal.is_some()
    }

    /// `M = I Omega + Omega I`.
    pub fn apply(&self, omega: &SkewMatrix) -> Result<SkewMatrix> {
        check_dim(self.n(), omega.n())?;
        Ok(self.apply_unchecked(omega))
    }

    pub(crate) fn apply_unchecked(&self, omega: &SkewMatrix) -> SkewMatrix {
        let n = self.n();
        match &self.diagonal {
            Some(d) => {
                let mut out = SkewMatrix::zeros(n);
                for i in 0..n {
                    for j in (i + 1)..n {
                        out.set(i, j, (d[i] + d[j]) * omega.get(i, j));
                    }
                }
                out
            }
            None => {
                let w = omega.as_matrix();
                let m = &self.matrix * w + w * &self.matrix;
                SkewMatrix::from_matrix(&m).expect("square")
            }
        }
    }

    /// Solves `I Omega + Omega I = M` for `Omega`.
    pub fn invert(&self, m: &SkewMatrix) -> Result<SkewMatrix> {
        check_dim(self.n(), m.n())?;
        let n = self.n();
        match (&self.diagonal, &self.inverse_map) {
            (Some(d), _) => {
                let mut out = SkewMatrix::zeros(n);
                for i in 0..n {
                    for j in (i + 1)..n {
                        let s = d[i] + d[j];
                        if s == 0.0 {
                            return Err(Error::SingularInertia { i: i + 1, j: j + 1 });
                        }
                        out.set(i, j, m.get(i, j) / s);
                    }
                }
                Ok(out)
            }
            (None, Some(inv)) => {
                let x = inv * DVector::from_vec(m.upper());
                SkewMatrix::from_upper(n, x.as_slice())
            }
            (None, None) => unreachable!("full tensors carry their inverse map"),
        }
    }
}

/// `M = J(Omega)`.
pub fn inertia_apply(mass: &MassTensor, omega: &SkewMatrix) -> Result<SkewMatrix> {
    mass.apply(omega)
}

/// `Omega = J^{-1}(M)`.
pub fn inertia_invert(mass: &MassTensor, m: &SkewMatrix) -> Result<SkewMatrix> {
    mass.invert(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_doubles() {
        let i = MassTensor::diagonal(&[1.0; 4]).unwrap();
        let w = SkewMatrix::from_upper(4, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        let m = i.apply(&w).unwrap();
        assert_eq!(m, &w * 2.0);
    }

    #[test]
    fn diagonal_entries() {
        let i = MassTensor::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let m = i.apply(&SkewMatrix::basis(3, 0, 1)).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        let mut rhs = SkewMatrix::zeros(3);
        rhs.set(0, 2, 4.0);
        let w = i.invert(&rhs).unwrap();
        assert_eq!(w.get(0, 2), 1.0);
        assert_eq!(
            i.invert(&SkewMatrix::zeros(3)).unwrap(),
            SkewMatrix::zeros(3)
        );
    }

    #[test]
    fn full_tensor_round_trip() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 3.0]);
        let i = MassTensor::full(a).unwrap();
        assert!(!i.is_diagonal());
        let w = SkewMatrix::from_upper(3, &[0.7, -1.1, 0.25]).unwrap();
        let back = i.invert(&i.apply(&w).unwrap()).unwrap();
        assert_abs_diff_eq!((&back - &w).max_abs(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_tensors() {
        assert!(MassTensor::diagonal(&[1.0, 0.0, 2.0]).is_err());
        assert!(MassTensor::diagonal(&[1.0, f64::NAN, 2.0]).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(MassTensor::full(asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(MassTensor::full(indefinite).is_err());
    }

    #[test]
    fn singular_pair_is_named() {
        let i = MassTensor::diagonal_unchecked(&[1.0, -1.0, 2.0]);
        let err = i.invert(&SkewMatrix::basis(3, 0, 1)).unwrap_err();
        assert_eq!(err, Error::SingularInertia { i: 1, j: 2 });
    }
}
