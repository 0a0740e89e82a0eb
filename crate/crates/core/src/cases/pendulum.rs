use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::integrate::OdeSystem;
use crate::model::BodyState;

const UNIT_TOL: f64 = 1e-9;

/// Acceleration of the spherical pendulum on `S^{n-1}` with potential
/// `B_n k_n` and mass `m`:
/// `k'' = -(B_n / m)(e_n - k_n k) - |k'|^2 k`.
pub fn pendulum_reference_field(
    gamma: &DVector<f64>,
    gamma_dot: &DVector<f64>,
    mass: f64,
    b_n: f64,
) -> Result<DVector<f64>> {
    let n = gamma.len();
    check_dim(n, gamma_dot.len())?;
    if (gamma.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!(
            "pendulum position must be a unit vector, |k| = {}",
            gamma.norm()
        )));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pendulum mass must be positive, got {mass}"
        )));
    }
    Ok(pendulum_acc(
        gamma.as_slice(),
        gamma_dot.as_slice(),
        mass,
        b_n,
    ))
}

fn pendulum_acc(k: &[f64], kd: &[f64], mass: f64, b_n: f64) -> DVector<f64> {
    let n = k.len();
    let kn = k[n - 1];
    let v2: f64 = kd.iter().map(|x| x * x).sum();
    let g = b_n / mass;
    DVector::from_fn(n, |i, _| {
        let e = if i == n - 1 { 1.0 } else { 0.0 };
        -g * (e - kn * k[i]) - v2 * k[i]
    })
}

pub fn pendulum_energy(k: &[f64], kd: &[f64], mass: f64, b_n: f64) -> f64 {
    0.5 * mass * kd.iter().map(|x| x * x).sum::<f64>() + b_n * k[k.len() - 1]
}

/// First-order form of the spherical pendulum on `y = (k, k')`.
#[derive(Clone, Debug)]
pub struct SphericalPendulum {
    pub n: usize,
    pub mass: f64,
    pub b_n: f64,
}

impl OdeSystem for SphericalPendulum {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (k, kd) = y.split_at(self.n);
        let acc = pendulum_acc(k, kd, self.mass, self.b_n);
        dy[..self.n].copy_from_slice(kd);
        dy[self.n..].copy_from_slice(acc.as_slice());
        Ok(())
    }
}

/// Pendulum initial data matching a symmetric Suslov state.
///
/// With `G` the reflection exchanging `Gamma(0)` and `e_n`, the pendulum
/// starts at `k = G e_n` with velocity `G u`, `u = (Omega_1n, ..., Omega_{n-1,n}, 0)`.
/// Its height `k_n(t)` then follows `Gamma_n(t)`.
pub fn lagrange_pendulum_initial(state: &BodyState) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = state.n();
    let gamma = &state.gamma;
    if (gamma.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument("Gamma must be a unit vector".into()));
    }
    let mut u = DVector::zeros(n);
    for i in 0..n - 1 {
        u[i] = state.omega.get(i, n - 1);
    }
    let mut v = gamma.clone();
    v[n - 1] -= 1.0;
    let vv = v.norm_squared();
    let reflect = |x: &DVector<f64>| -> DVector<f64> {
        if vv < 1e-30 {
            x.clone()
        } else {
            x - &v * (2.0 * v.dot(x) / vv)
        }
    };
    let mut e_n = DVector::zeros(n);
    e_n[n - 1] = 1.0;
    Ok((reflect(&e_n), reflect(&u)))
}
