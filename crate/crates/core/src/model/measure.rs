use super::{BodyState, VectorField};
use crate::algebra::{inner_unchecked, project_d_unchecked, SkewMatrix};
use crate::error::{check_dim, Result};

/// Default finite-difference step for [`divergence`].
pub const DIVERGENCE_STEP: f64 = 1e-5;

/// Central-difference divergence of `f: R^d -> R^d` at `x`.
pub fn divergence_fd<F>(f: F, x: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    let mut div = 0.0;
    for k in 0..x.len() {
        plus[k] = x[k] + h;
        minus[k] = x[k] - h;
        div += (f(&plus)[k] - f(&minus)[k]) / (2.0 * h);
        plus[k] = x[k];
        minus[k] = x[k];
    }
    div
}

/// Divergence of a phase-space field with respect to `d Omega d Gamma`, where
/// `Omega` is coordinatized by an orthonormal basis of the field's
/// distribution `D` and `Gamma` by its ambient components.
pub fn divergence(field: &dyn VectorField, state: &BodyState, h: f64) -> Result<f64> {
    let n = field.n();
    check_dim(n, state.n())?;
    let basis: Vec<SkewMatrix> = field.constraints().distribution_basis().to_vec();
    let d = basis.len();
    // keep whatever part of Omega lies off D fixed
    let off_d = &state.omega - &project_d_unchecked(&state.omega, field.constraints());

    let mut x: Vec<f64> = basis
        .iter()
        .map(|b| inner_unchecked(b, &state.omega))
        .collect();
    x.extend(state.gamma.iter());

    let failure = std::cell::RefCell::new(None);
    let f = |y: &[f64]| -> Vec<f64> {
        let mut omega = off_d.clone();
        for (c, b) in y[..d].iter().zip(&basis) {
            omega = &omega + &(b * *c);
        }
        let s = BodyState {
            omega,
            gamma: nalgebra::DVector::from_column_slice(&y[d..]),
        };
        match field.rate(&s) {
            Ok(rate) => {
                let mut out: Vec<f64> = basis
                    .iter()
                    .map(|b| inner_unchecked(b, &rate.omega_dot))
                    .collect();
                out.extend(rate.gamma_dot.iter());
                out
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                vec![f64::NAN; y.len()]
            }
        }
    };
    let div = divergence_fd(f, &x, h);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(div),
    }
}
