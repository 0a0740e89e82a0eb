//! Catalog of integrable cases, their first integrals and reference systems.

mod asymptotic;
mod integrals;
mod pendulum;

use serde::{Deserialize, Serialize};

use crate::algebra::ConstraintSet;
use crate::error::{Error, Result};
use crate::model::{
    require_n_at_least, GeneralField, MassTensor, Potential, ReducedField, Suslov3dField,
    VectorField,
};

pub use asymptotic::{asymptotic_points, asymptotic_points_3d, AsymptoticPoints, ASYMPTOTIC_TOL};
pub use integrals::{first_integrals, functional_rank, Integral, IntegralSet, RANK_TOL};
pub use pendulum::{
    lagrange_pendulum_initial, pendulum_energy, pendulum_reference_field, SphericalPendulum,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseKind {
    SuslovFree,
    Lagrange3D,
    Kharlamova3D,
    ClebschTisserand3D,
    DGJ3D,
    Gyroscopic3D,
    LagrangeND,
    KharlamovaND,
    ClebschTisserandND,
}

impl CaseKind {
    pub const ALL: [CaseKind; 9] = [
        CaseKind::SuslovFree,
        CaseKind::Lagrange3D,
        CaseKind::Kharlamova3D,
        CaseKind::ClebschTisserand3D,
        CaseKind::DGJ3D,
        CaseKind::Gyroscopic3D,
        CaseKind::LagrangeND,
        CaseKind::KharlamovaND,
        CaseKind::ClebschTisserandND,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::SuslovFree => "SuslovFree",
            CaseKind::Lagrange3D => "Lagrange3D",
            CaseKind::Kharlamova3D => "Kharlamova3D",
            CaseKind::ClebschTisserand3D => "ClebschTisserand3D",
            CaseKind::DGJ3D => "DGJ3D",
            CaseKind::Gyroscopic3D => "Gyroscopic3D",
            CaseKind::LagrangeND => "LagrangeND",
            CaseKind::KharlamovaND => "KharlamovaND",
            CaseKind::ClebschTisserandND => "ClebschTisserandND",
        }
    }

    pub fn is_3d(self) -> bool {
        matches!(
            self,
            CaseKind::Lagrange3D
                | CaseKind::Kharlamova3D
                | CaseKind::ClebschTisserand3D
                | CaseKind::DGJ3D
                | CaseKind::Gyroscopic3D
        )
    }
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Relative tolerance for equalities among case parameters.
const PARAM_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= PARAM_TOL * a.abs().max(b.abs()).max(1.0)
}

/// An integrable case: kind, dimension, mass tensor, potential and
/// gyroscopic coefficient.
#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub kind: CaseKind,
    pub n: usize,
    pub mass: MassTensor,
    pub potential: Potential,
    pub gyro_eps: f64,
}

impl CaseSpec {
    pub fn new(
        kind: CaseKind,
        mass: MassTensor,
        potential: Potential,
        gyro_eps: f64,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            n: mass.n(),
            mass,
            potential,
            gyro_eps,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn violation(&self, reason: impl Into<String>) -> Error {
        Error::CaseViolation {
            case: self.kind.name().to_string(),
            reason: reason.into(),
        }
    }

    fn diag(&self) -> Result<&[f64]> {
        self.mass
            .diag()
            .ok_or_else(|| self.violation("mass tensor must be diagonal"))
    }

    /// Linear potential coefficients, if the potential is linear.
    pub fn linear_b(&self) -> Option<&[f64]> {
        match &self.potential {
            Potential::Linear(b) => Some(b.as_slice()),
            _ => None,
        }
    }

    /// Quadratic potential coefficients, if the potential is quadratic.
    pub fn quadratic_b(&self) -> Option<&[f64]> {
        match &self.potential {
            Potential::Quadratic(b) => Some(b.as_slice()),
            _ => None,
        }
    }

    /// Checks the hypotheses of the case; errors name the violated condition.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        require_n_at_least(n, 3)?;
        if let Some(d) = self.potential.dimension() {
            if d != n {
                return Err(self.violation(format!(
                    "potential has dimension {d} but the body has dimension {n}"
                )));
            }
        }
        if self.kind != CaseKind::Gyroscopic3D && self.gyro_eps != 0.0 {
            return Err(self.violation("gyro_eps must be 0 outside Gyroscopic3D"));
        }
        if self.kind.is_3d() {
            if n != 3 {
                return Err(self.violation(format!("requires n = 3, got {n}")));
            }
            self.diag()?;
        }
        match self.kind {
            CaseKind::SuslovFree => {
                if !matches!(self.potential, Potential::Zero) {
                    return Err(self.violation("requires V = 0"));
                }
            }
            CaseKind::Lagrange3D => {
                let i = self.diag()?;
                if !close(i[0], i[1]) {
                    return Err(self.violation(format!(
                        "requires J1 = J2 (I1 = I2), got I1 = {}, I2 = {}",
                        i[0], i[1]
                    )));
                }
                match self.linear_b() {
                    Some(b) if b[0] == 0.0 && b[1] == 0.0 => {}
                    _ => return Err(self.violation("requires V = B3 Gamma3")),
                }
            }
            CaseKind::Kharlamova3D => match self.linear_b() {
                Some(b) if b[2] == 0.0 => {}
                _ => return Err(self.violation("requires V = B1 Gamma1 + B2 Gamma2")),
            },
            CaseKind::ClebschTisserand3D => {
                let b = self
                    .quadratic_b()
                    .ok_or_else(|| self.violation("requires a quadratic potential"))?;
                let j =
                    crate::model::j_from_i(&[self.diag()?[0], self.diag()?[1], self.diag()?[2]]);
                let eps = b[0] / j[0];
                if (0..3).any(|k| !close(b[k], eps * j[k])) {
                    return Err(self.violation(format!(
                        "requires V = eps/2 <J Gamma, Gamma>, i.e. B proportional to J = {j:?}"
                    )));
                }
            }
            CaseKind::DGJ3D => {
                if !matches!(self.potential, Potential::Dgj(_)) {
                    return Err(
                        self.violation("requires V = v1(G1, G2^2+G3^2) + v2(G2, G1^2+G3^2)")
                    );
                }
            }
            CaseKind::Gyroscopic3D => {}
            CaseKind::LagrangeND => {
                let i = self.diag()?;
                if i[..n - 1].iter().any(|x| !close(*x, i[0])) {
                    return Err(self.violation("requires I = diag(I1, ..., I1, In)"));
                }
                match self.linear_b() {
                    Some(b) if b[..n - 1].iter().all(|x| *x == 0.0) => {}
                    _ => return Err(self.violation("requires V = Bn Gamma_n")),
                }
            }
            CaseKind::KharlamovaND => {
                self.diag()?;
                let b = self
                    .linear_b()
                    .ok_or_else(|| self.violation("requires a linear potential"))?;
                if b[n - 1] != 0.0 {
                    return Err(self.violation("requires B_n = 0"));
                }
                if let Some(i) = b[..n - 1].iter().position(|x| *x == 0.0) {
                    return Err(self.violation(format!("requires B_{} != 0", i + 1)));
                }
            }
            CaseKind::ClebschTisserandND => {
                self.diag()?;
                if self.quadratic_b().is_none() {
                    return Err(self.violation("requires a quadratic potential"));
                }
            }
        }
        Ok(())
    }

    /// Equations of motion of the case.
    pub fn field(&self) -> Result<Box<dyn VectorField>> {
        self.validate()?;
        Ok(match self.kind {
            CaseKind::SuslovFree => Box::new(GeneralField::new(
                self.mass.clone(),
                Potential::Zero,
                ConstraintSet::canonical_suslov(self.n)?,
            )?),
            k if k.is_3d() => {
                let d = self.diag()?;
                Box::new(Suslov3dField::from_mass(
                    &[d[0], d[1], d[2]],
                    self.potential.clone(),
                    self.gyro_eps,
                )?)
            }
            _ => Box::new(ReducedField::new(
                self.mass.clone(),
                self.potential.clone(),
            )?),
        })
    }
}
