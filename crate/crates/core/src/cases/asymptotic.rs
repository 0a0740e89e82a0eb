use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::algebra::SkewMatrix;
use crate::error::{Error, Result};
use crate::model::MassTensor;

/// Angular tolerance of the root-find along the energy ellipse.
pub const ASYMPTOTIC_TOL: f64 = 1e-10;

const SCAN: usize = 720;
const EIGEN_TOL: f64 = 1e-12;

/// Limit points of free constrained motion on an energy level:
/// `w_plus` as `t -> +inf`, `w_minus = -w_plus` as `t -> -inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPoints {
    pub w_minus: SkewMatrix,
    pub w_plus: SkewMatrix,
}

fn check_level(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "energy level must be positive, got {h}"
        )))
    }
}

/// Closed form for the canonical distribution (`Omega_ij = 0` for
/// `i, j < n`) and a full mass tensor.
///
/// With `u_i = Omega_in`, the free equations read
/// `A u' = (b.u) u - |u|^2 b` where `A = I' + I_nn Id` and `b_i = I_in`, so
/// the rest points are the two multiples of `b` on `1/2 u^T A u = h`, and
/// `b.u` decreases along motions.
pub fn asymptotic_points(mass: &MassTensor, h: f64) -> Result<AsymptoticPoints> {
    check_level(h)?;
    let n = mass.n();
    let i = mass.matrix();
    let last = n - 1;
    let b = DVector::from_fn(last, |k, _| i[(k, last)]);
    if b.norm() <= EIGEN_TOL * i.norm() {
        return Err(Error::NoAsymptoticLine(
            "the constraint is compatible with an eigenvector of the inertia operator; solutions are constants"
                .into(),
        ));
    }
    let a = DMatrix::from_fn(last, last, |r, c| {
        i[(r, c)] + if r == c { i[(last, last)] } else { 0.0 }
    });
    let scale = (2.0 * h / b.dot(&(&a * &b))).sqrt();
    let mut w_plus = SkewMatrix::zeros(n);
    for k in 0..last {
        w_plus.set(k, last, -scale * b[k]);
    }
    Ok(AsymptoticPoints {
        w_minus: -&w_plus,
        w_plus,
    })
}

/// Free rate in the vector picture:
/// `J w' = J w x w + lambda a` with `<a, w'> = 0`.
fn free_rate_3d(
    j: &Matrix3<f64>,
    j_inv: &Matrix3<f64>,
    a: &Vector3<f64>,
    w: &Vector3<f64>,
) -> Vector3<f64> {
    let free = j_inv * (j * w).cross(w);
    let ja = j_inv * a;
    let lambda = -a.dot(&free) / a.dot(&ja);
    free + ja * lambda
}

/// Limit points in the vector picture for an arbitrary symmetric positive
/// inertia operator `j` and constraint `<a, w> = 0`, located by scanning the
/// energy ellipse for rest points and bisecting to [`ASYMPTOTIC_TOL`].
///
/// Returns `(w_minus, w_plus)`.
pub fn asymptotic_points_3d(
    j: &Matrix3<f64>,
    a: &Vector3<f64>,
    h: f64,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    check_level(h)?;
    if a.norm() == 0.0 {
        return Err(Error::InvalidArgument("constraint vector is zero".into()));
    }
    let a = a.normalize();
    let ja = j * a;
    if (ja - a * a.dot(&ja)).norm() <= EIGEN_TOL * j.norm() {
        return Err(Error::NoAsymptoticLine(
            "a is an eigenvector of J; solutions are constants".into(),
        ));
    }
    let j_inv = j
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("inertia operator is singular".into()))?;
    let seed = if a.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = a.cross(&seed).normalize();
    let e2 = a.cross(&e1);
    let point = |theta: f64| -> Vector3<f64> {
        let d = e1 * theta.cos() + e2 * theta.sin();
        d * (2.0 * h / d.dot(&(j * d))).sqrt()
    };
    // angular speed of the projection onto (e1, e2), up to a positive factor
    let f = |theta: f64| -> f64 {
        let w = point(theta);
        let wd = free_rate_3d(j, &j_inv, &a, &w);
        w.dot(&e1) * wd.dot(&e2) - w.dot(&e2) * wd.dot(&e1)
    };
    let step = std::f64::consts::TAU / SCAN as f64;
    for k in 0..SCAN {
        let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
        let (flo, fhi) = (f(lo), f(hi));
        if !(flo > 0.0 && fhi <= 0.0) {
            continue;
        }
        while hi - lo > ASYMPTOTIC_TOL * 1e-3 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w_plus = point(0.5 * (lo + hi));
        return Ok((-w_plus, w_plus));
    }
    Err(Error::NoAsymptoticLine(
        "no attracting rest point found on the energy ellipse".into(),
    ))
}
