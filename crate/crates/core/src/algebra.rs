//! Dense skew-symmetric matrix algebra on so(n).
//!
//! Elements of so(n) are stored as full `n x n` matrices; construction from an
//! arbitrary square matrix antisymmetrizes it, so every [`SkewMatrix`] is
//! exactly skew. The pairing used throughout the crate is
//! `<A, B> = -1/2 tr(AB) = sum_{i<j} A_ij B_ij`, which turns the usual
//! identification of so(3) with R^3 into an isometry.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{check_dim, Error, Result};

/// Relative threshold below which a bracket component counts as zero.
pub const NONHOLONOMY_TOL: f64 = 1e-10;

/// An element of so(n).
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    m: DMatrix<f64>,
}

impl SkewMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    /// Antisymmetrizes `a` as `(a - a^T) / 2`.
    pub fn from_matrix(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidArgument(format!(
                "expected a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let m = (a - a.transpose()) * 0.5;
        Ok(Self { m })
    }

    /// The basis element `E_ij = e_i e_j^T - e_j e_i^T` (0-based indices).
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n && i != j, "basis index out of range");
        let mut out = Self::zeros(n);
        out.set(i, j, 1.0);
        out
    }

    /// Builds from the strict upper triangle listed row by row.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        check_dim(n * (n - 1) / 2, upper.len())?;
        let mut out = Self::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                out.set(i, j, upper[k]);
                k += 1;
            }
        }
        Ok(out)
    }

    /// Strict upper triangle, row by row.
    pub fn upper(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    /// Writes `value` at `(i, j)` and `-value` at `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.m[(i, j)] = value;
        self.m[(j, i)] = -value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Matrix-vector product `A v`.
    pub fn mul_vec(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.n(), v.len())?;
        Ok(&self.m * v)
    }

    /// Identification of R^3 with so(3): `(w1, w2, w3) = (-A_23, A_13, -A_12)`.
    pub fn from_vec3(v: &Vector3<f64>) -> Self {
        let mut out = Self::zeros(3);
        out.set(1, 2, -v[0]);
        out.set(0, 2, v[1]);
        out.set(0, 1, -v[2]);
        out
    }

    pub fn to_vec3(&self) -> Result<Vector3<f64>> {
        check_dim(3, self.n())?;
        Ok(Vector3::new(
            -self.m[(1, 2)],
            self.m[(0, 2)],
            -self.m[(0, 1)],
        ))
    }

    pub fn norm(&self) -> f64 {
        inner_unchecked(self, self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.amax()
    }

    fn from_raw(m: DMatrix<f64>) -> Self {
        Self { m }
    }
}

impl Add for &SkewMatrix {
    type Output = SkewMatrix;
    fn add(self, rhs: &SkewMatrix) -> SkewMatrix {
        SkewMatrix::from_raw(&self.m + &rhs.m)
    }
}

impl Sub for &SkewMatrix {
    type Output = SkewMatrix;
    fn sub(self, rhs: &SkewMatrix) -> SkewMatrix {
        SkewMatrix::from_raw(&self.m - &rhs.m)
    }
}

impl Mul<f64> for &SkewMatrix {
    type Output = SkewMatrix;
    fn mul(self, rhs: f64) -> SkewMatrix {
        SkewMatrix::from_raw(&self.m * rhs)
    }
}

impl Neg for &SkewMatrix {
    type Output = SkewMatrix;
    fn neg(self) -> SkewMatrix {
        SkewMatrix::from_raw(-&self.m)
    }
}

/// Lie bracket `AB - BA`.
pub fn commutator(a: &SkewMatrix, b: &SkewMatrix) -> Result<SkewMatrix> {
    check_dim(a.n(), b.n())?;
    Ok(commutator_unchecked(a, b))
}

pub(crate) fn commutator_unchecked(a: &SkewMatrix, b: &SkewMatrix) -> SkewMatrix {
    let ab = &a.m * &b.m;
    // (AB)^T = BA for skew A, B, so the bracket is ab - ab^T.
    let m = &ab - ab.transpose();
    SkewMatrix::from_raw(m)
}

/// Wedge product `u v^T - v u^T`.
pub fn wedge(u: &DVector<f64>, v: &DVector<f64>) -> Result<SkewMatrix> {
    check_dim(u.len(), v.len())?;
    let uv = u * v.transpose();
    let m = &uv - uv.transpose();
    Ok(SkewMatrix::from_raw(m))
}

/// Pairing `-1/2 tr(AB) = sum_{i<j} A_ij B_ij`.
pub fn inner(a: &SkewMatrix, b: &SkewMatrix) -> Result<f64> {
    check_dim(a.n(), b.n())?;
    Ok(inner_unchecked(a, b))
}

pub(crate) fn inner_unchecked(a: &SkewMatrix, b: &SkewMatrix) -> f64 {
    0.5 * a.m.dot(&b.m)
}

/// Left-invariant linear constraints `<a^i, Omega> = 0`.
///
/// Besides the generators, the set caches orthonormal bases (with respect to
/// [`inner`]) of the generator span and of the admissible subspace `D`.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    n: usize,
    generators: Vec<SkewMatrix>,
    normal_basis: Vec<SkewMatrix>,
    distribution_basis: Vec<SkewMatrix>,
    canonical: bool,
}

impl ConstraintSet {
    pub fn new(n: usize, generators: Vec<SkewMatrix>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension {n} too small")));
        }
        for g in &generators {
            check_dim(n, g.n())?;
        }
        let normal_basis = orthonormalize(&generators, &[]);
        if normal_basis.len() != generators.len() {
            return Err(Error::DependentConstraints);
        }
        let full: Vec<SkewMatrix> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| SkewMatrix::basis(n, i, j))
            .collect();
        let distribution_basis = orthonormalize(&full, &normal_basis);
        Ok(Self {
            n,
            generators,
            normal_basis,
            distribution_basis,
            canonical: false,
        })
    }

    /// No constraints: `D = so(n)`.
    pub fn unconstrained(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("empty constraint set is valid")
    }

    /// `Omega_ij = 0` for `i, j < n - 1` (0-based): only rotations in planes
    /// containing the last basis vector are allowed.
    pub fn canonical_suslov(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "canonical constraints need n >= 3, got {n}"
            )));
        }
        let gens = (0..n - 1)
            .flat_map(|i| ((i + 1)..n - 1).map(move |j| (i, j)))
            .map(|(i, j)| SkewMatrix::basis(n, i, j))
            .collect();
        let mut set = Self::new(n, gens)?;
        set.canonical = true;
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[SkewMatrix] {
        &self.generators
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Orthonormal basis of `D`.
    pub fn distribution_basis(&self) -> &[SkewMatrix] {
        &self.distribution_basis
    }

    /// Orthonormal basis of the orthogonal complement of `D`.
    pub fn normal_basis(&self) -> &[SkewMatrix] {
        &self.normal_basis
    }

    /// Largest constraint violation `max_i |<a^i, omega>|`.
    pub fn residual(&self, omega: &SkewMatrix) -> f64 {
        self.generators
            .iter()
            .map(|a| inner_unchecked(a, omega).abs())
            .fold(0.0, f64::max)
    }
}

fn orthonormalize(vectors: &[SkewMatrix], against: &[SkewMatrix]) -> Vec<SkewMatrix> {
    let mut out: Vec<SkewMatrix> = Vec::new();
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in against.iter().chain(out.iter()) {
                let c = inner_unchecked(q, &w);
                w = &w - &(q * c);
            }
        }
        let norm = w.norm();
        if norm > 1e-10 * scale {
            out.push(&w * (1.0 / norm));
        }
    }
    out
}

/// Orthogonal projection onto `D`.
pub fn project_d(a: &SkewMatrix, constraints: &ConstraintSet) -> Result<SkewMatrix> {
    check_dim(constraints.n(), a.n())?;
    Ok(project_d_unchecked(a, constraints))
}

pub(crate) fn project_d_unchecked(a: &SkewMatrix, constraints: &ConstraintSet) -> SkewMatrix {
    let mut out = a.clone();
    for q in &constraints.normal_basis {
        let c = inner_unchecked(q, a);
        out = &out - &(q * c);
    }
    out
}

/// Whether the distribution `D` fails to be a subalgebra.
pub fn is_nonholonomic(constraints: &ConstraintSet) -> bool {
    let basis = constraints.distribution_basis();
    for (k, x) in basis.iter().enumerate() {
        for y in &basis[k + 1..] {
            let bracket = commutator_unchecked(x, y);
            let leak = constraints
                .normal_basis
                .iter()
                .map(|q| inner_unchecked(q, &bracket).powi(2))
                .sum::<f64>()
                .sqrt();
            if leak > NONHOLONOMY_TOL * x.norm() * y.norm() {
                return true;
            }
        }
    }
    false
}
