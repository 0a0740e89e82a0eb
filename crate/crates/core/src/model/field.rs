use nalgebra::{DMatrix, DVector, Vector3};

use super::{require_n_at_least, BodyRate, BodyState, MassTensor, Potential, VectorField};
use crate::algebra::{commutator_unchecked, inner_unchecked, wedge, ConstraintSet, SkewMatrix};
use crate::error::{check_dim, Error, Result};

fn check_potential(potential: &Potential, n: usize) -> Result<()> {
    match potential.dimension() {
        Some(d) if d != n => Err(Error::DimensionMismatch {
            expected: n,
            got: d,
        }),
        _ => Ok(()),
    }
}

/// Constrained field with Lagrange multipliers:
/// `J(dOmega) = [M, Omega] + dV/dGamma ^ Gamma + sum lambda_i a^i`,
/// `dGamma = -Omega Gamma`.
#[derive(Clone, Debug)]
pub struct GeneralField {
    mass: MassTensor,
    potential: Potential,
    constraints: ConstraintSet,
    /// `J^{-1} a^k` for every generator.
    inv_generators: Vec<SkewMatrix>,
    /// Inverse of `G_ik = <a^i, J^{-1} a^k>`.
    gram_inverse: DMatrix<f64>,
}

impl GeneralField {
    pub fn new(mass: MassTensor, potential: Potential, constraints: ConstraintSet) -> Result<Self> {
        let n = mass.n();
        check_dim(n, constraints.n())?;
        check_potential(&potential, n)?;
        let inv_generators = constraints
            .generators()
            .iter()
            .map(|a| mass.invert(a))
            .collect::<Result<Vec<_>>>()?;
        let r = inv_generators.len();
        let gram = DMatrix::from_fn(r, r, |i, k| {
            inner_unchecked(&constraints.generators()[i], &inv_generators[k])
        });
        let gram_inverse = if r == 0 {
            gram
        } else {
            gram.try_inverse().ok_or(Error::SingularMultiplierSystem)?
        };
        if !gram_inverse.iter().all(|x| x.is_finite()) {
            return Err(Error::SingularMultiplierSystem);
        }
        Ok(Self {
            mass,
            potential,
            constraints,
            inv_generators,
            gram_inverse,
        })
    }

    pub fn mass(&self) -> &MassTensor {
        &self.mass
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Unconstrained torque `[M, Omega] + dV/dGamma ^ Gamma`.
    fn torque(&self, state: &BodyState) -> Result<SkewMatrix> {
        let m = self.mass.apply_unchecked(&state.omega);
        let bracket = commutator_unchecked(&m, &state.omega);
        let grad = self.potential.gradient(&state.gamma);
        let force = wedge(&grad, &state.gamma)?;
        Ok(&bracket + &force)
    }

    fn multipliers_for(&self, free_rate: &SkewMatrix) -> DVector<f64> {
        let rhs = DVector::from_iterator(
            self.inv_generators.len(),
            self.constraints
                .generators()
                .iter()
                .map(|a| -inner_unchecked(a, free_rate)),
        );
        &self.gram_inverse * rhs
    }

    pub fn multipliers(&self, state: &BodyState) -> Result<DVector<f64>> {
        check_dim(self.n(), state.n())?;
        let free_rate = self.mass.invert(&self.torque(state)?)?;
        Ok(self.multipliers_for(&free_rate))
    }
}

impl VectorField for GeneralField {
    fn n(&self) -> usize {
        self.mass.n()
    }

    fn rate(&self, state: &BodyState) -> Result<BodyRate> {
        check_dim(self.n(), state.n())?;
        let mut omega_dot = self.mass.invert(&self.torque(state)?)?;
        let lambda = self.multipliers_for(&omega_dot);
        for (l, b) in lambda.iter().zip(&self.inv_generators) {
            omega_dot = &omega_dot + &(b * *l);
        }
        let gamma_dot = -state.omega.mul_vec(&state.gamma)?;
        Ok(BodyRate {
            omega_dot,
            gamma_dot,
        })
    }

    fn energy(&self, state: &BodyState) -> f64 {
        super::energy(state, &self.mass, &self.potential).unwrap_or(f64::NAN)
    }

    fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }
}

/// Lagrange multipliers of the constrained field at `state`.
pub fn multipliers(
    state: &BodyState,
    mass: &MassTensor,
    potential: &Potential,
    constraints: &ConstraintSet,
) -> Result<DVector<f64>> {
    GeneralField::new(mass.clone(), potential.clone(), constraints.clone())?.multipliers(state)
}

pub fn vector_field_general(
    state: &BodyState,
    mass: &MassTensor,
    potential: &Potential,
    constraints: &ConstraintSet,
) -> Result<BodyRate> {
    GeneralField::new(mass.clone(), potential.clone(), constraints.clone())?.rate(state)
}

/// Field on the canonical distribution for a diagonal mass tensor:
/// `(I_i + I_n) dOmega_in = dV/dGamma_i Gamma_n - Gamma_i dV/dGamma_n`,
/// `dGamma_i = -Gamma_n Omega_in`, `dGamma_n = sum Gamma_i Omega_in`.
#[derive(Clone, Debug)]
pub struct ReducedField {
    mass: MassTensor,
    diag: Vec<f64>,
    potential: Potential,
    constraints: ConstraintSet,
}

impl ReducedField {
    pub fn new(mass: MassTensor, potential: Potential) -> Result<Self> {
        let n = mass.n();
        require_n_at_least(n, 3)?;
        check_potential(&potential, n)?;
        let diag = mass
            .diag()
            .ok_or_else(|| {
                Error::InvalidArgument(
                    "reduced field needs a diagonal mass tensor; use the general field".into(),
                )
            })?
            .to_vec();
        Ok(Self {
            mass,
            diag,
            potential,
            constraints: ConstraintSet::canonical_suslov(n)?,
        })
    }

    pub fn mass(&self) -> &MassTensor {
        &self.mass
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }
}

impl VectorField for ReducedField {
    fn n(&self) -> usize {
        self.diag.len()
    }

    fn rate(&self, state: &BodyState) -> Result<BodyRate> {
        let n = self.n();
        check_dim(n, state.n())?;
        let last = n - 1;
        let g = &state.gamma;
        let grad = self.potential.gradient(g);
        let mut omega_dot = SkewMatrix::zeros(n);
        let mut gamma_dot = DVector::zeros(n);
        for i in 0..last {
            let w = state.omega.get(i, last);
            let torque = grad[i] * g[last] - g[i] * grad[last];
            omega_dot.set(i, last, torque / (self.diag[i] + self.diag[last]));
            gamma_dot[i] = -g[last] * w;
            gamma_dot[last] += g[i] * w;
        }
        Ok(BodyRate {
            omega_dot,
            gamma_dot,
        })
    }

    fn energy(&self, state: &BodyState) -> f64 {
        super::energy(state, &self.mass, &self.potential).unwrap_or(f64::NAN)
    }

    fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }
}

pub fn vector_field_reduced(
    state: &BodyState,
    mass: &MassTensor,
    potential: &Potential,
) -> Result<BodyRate> {
    ReducedField::new(mass.clone(), potential.clone())?.rate(state)
}

/// `J = (I2 + I3, I1 + I3, I1 + I2)`: the inertia operator of a diagonal
/// mass tensor in the vector picture of so(3).
pub fn j_from_i(i: &[f64; 3]) -> [f64; 3] {
    [i[1] + i[2], i[0] + i[2], i[0] + i[1]]
}

/// Three-dimensional form with constraint `Omega_3 = 0`, diagonal `J`, and an
/// optional gyroscopic term `eps Gamma x Omega`:
/// `J dOmega = J Omega x Omega + Gamma x dV/dGamma + eps Gamma x Omega + lambda e3`,
/// `dGamma = Gamma x Omega`.
pub fn vector_field_3d(
    omega: &Vector3<f64>,
    gamma: &Vector3<f64>,
    j: &[f64; 3],
    potential: &Potential,
    gyro_eps: f64,
) -> (Vector3<f64>, Vector3<f64>) {
    let jw = Vector3::new(j[0] * omega[0], j[1] * omega[1], j[2] * omega[2]);
    let grad = potential.gradient(&DVector::from_column_slice(gamma.as_slice()));
    let grad = Vector3::new(grad[0], grad[1], grad[2]);
    let rhs = jw.cross(omega) + gamma.cross(&grad) + gamma.cross(omega) * gyro_eps;
    // the multiplier cancels the third component exactly
    let omega_dot = Vector3::new(rhs[0] / j[0], rhs[1] / j[1], 0.0);
    (omega_dot, gamma.cross(omega))
}

#[derive(Clone, Debug)]
pub struct Suslov3dField {
    j: [f64; 3],
    potential: Potential,
    gyro_eps: f64,
    constraints: ConstraintSet,
}

impl Suslov3dField {
    pub fn new(j: [f64; 3], potential: Potential, gyro_eps: f64) -> Result<Self> {
        if j.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "inertia operator entries must be positive, got {j:?}"
            )));
        }
        check_potential(&potential, 3)?;
        Ok(Self {
            j,
            potential,
            gyro_eps,
            constraints: ConstraintSet::canonical_suslov(3)?,
        })
    }

    pub fn from_mass(i: &[f64; 3], potential: Potential, gyro_eps: f64) -> Result<Self> {
        Self::new(j_from_i(i), potential, gyro_eps)
    }

    pub fn j(&self) -> [f64; 3] {
        self.j
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }
}

impl VectorField for Suslov3dField {
    fn n(&self) -> usize {
        3
    }

    fn rate(&self, state: &BodyState) -> Result<BodyRate> {
        check_dim(3, state.n())?;
        let w = state.omega.to_vec3()?;
        let g = Vector3::new(state.gamma[0], state.gamma[1], state.gamma[2]);
        let (wd, gd) = vector_field_3d(&w, &g, &self.j, &self.potential, self.gyro_eps);
        Ok(BodyRate {
            omega_dot: SkewMatrix::from_vec3(&wd),
            gamma_dot: DVector::from_column_slice(gd.as_slice()),
        })
    }

    fn energy(&self, state: &BodyState) -> f64 {
        let w = match state.omega.to_vec3() {
            Ok(w) => w,
            Err(_) => return f64::NAN,
        };
        let kinetic = 0.5 * (0..3).map(|k| self.j[k] * w[k] * w[k]).sum::<f64>();
        kinetic + self.potential.value(&state.gamma)
    }

    fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }
}

/// Unconstrained heavy symmetric body with `I = diag(I1, ..., I1, In)` and
/// `V = B_n Gamma_n`: `J(dOmega) = [M, Omega] + dV/dGamma ^ Gamma`.
#[derive(Clone, Debug)]
pub struct LagrangeFullField {
    mass: MassTensor,
    potential: Potential,
    constraints: ConstraintSet,
}

impl LagrangeFullField {
    pub fn new(mass: MassTensor, b_n: f64) -> Result<Self> {
        let n = mass.n();
        require_n_at_least(n, 3)?;
        let d = mass.diag().ok_or_else(|| {
            Error::InvalidArgument("symmetric body needs a diagonal mass tensor".into())
        })?;
        if d[..n - 1].iter().any(|x| *x != d[0]) {
            return Err(Error::InvalidArgument(format!(
                "mass tensor must have the form diag(I1, ..., I1, In), got {d:?}"
            )));
        }
        let mut b = vec![0.0; n];
        b[n - 1] = b_n;
        Ok(Self {
            mass,
            potential: Potential::linear(&b),
            constraints: ConstraintSet::unconstrained(n),
        })
    }
}

impl VectorField for LagrangeFullField {
    fn n(&self) -> usize {
        self.mass.n()
    }

    fn rate(&self, state: &BodyState) -> Result<BodyRate> {
        check_dim(self.n(), state.n())?;
        let m = self.mass.apply_unchecked(&state.omega);
        let bracket = commutator_unchecked(&m, &state.omega);
        let force = wedge(&self.potential.gradient(&state.gamma), &state.gamma)?;
        let omega_dot = self.mass.invert(&(&bracket + &force))?;
        let gamma_dot = -state.omega.mul_vec(&state.gamma)?;
        Ok(BodyRate {
            omega_dot,
            gamma_dot,
        })
    }

    fn energy(&self, state: &BodyState) -> f64 {
        super::energy(state, &self.mass, &self.potential).unwrap_or(f64::NAN)
    }

    fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }
}

pub fn lagrange_full_field(state: &BodyState, mass: &MassTensor, b_n: f64) -> Result<BodyRate> {
    LagrangeFullField::new(mass.clone(), b_n)?.rate(state)
}
