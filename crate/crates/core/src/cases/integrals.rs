use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{CaseKind, CaseSpec};
use crate::error::Result;
use crate::model::{j_from_i, BodyState, DgjPotential, Potential, VectorField};

/// Relative singular-value threshold used by [`functional_rank`].
pub const RANK_TOL: f64 = 1e-8;

type Eval = Arc<dyn Fn(&BodyState) -> f64 + Send + Sync>;

/// A labelled scalar function on phase space.
#[derive(Clone)]
pub struct Integral {
    pub label: String,
    /// Closed-form expression, for reports.
    pub formula: String,
    f: Eval,
    scale: Option<Eval>,
}

impl Integral {
    pub fn new<F>(label: impl Into<String>, formula: impl Into<String>, f: F) -> Self
    where
        F: Fn(&BodyState) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            formula: formula.into(),
            f: Arc::new(f),
            scale: None,
        }
    }

    /// Attaches the sum of absolute values of the terms of the integral,
    /// used as the reference magnitude when the integral itself is near zero.
    pub fn with_scale<F>(mut self, scale: F) -> Self
    where
        F: Fn(&BodyState) -> f64 + Send + Sync + 'static,
    {
        self.scale = Some(Arc::new(scale));
        self
    }

    pub fn eval(&self, state: &BodyState) -> f64 {
        (self.f)(state)
    }

    /// Reference magnitude at `state`: the term sum if attached, else `|F|`.
    pub fn scale(&self, state: &BodyState) -> f64 {
        match &self.scale {
            Some(g) => g(state),
            None => self.eval(state).abs(),
        }
    }
}

impl fmt::Debug for Integral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integral")
            .field("label", &self.label)
            .field("formula", &self.formula)
            .finish()
    }
}

#[derive(Clone, Debug, Default)]
pub struct IntegralSet {
    items: Vec<Integral>,
}

impl IntegralSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, integral: Integral) {
        self.items.push(integral);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Integral> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Integral> {
        self.items.iter().find(|i| i.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.label.as_str()).collect()
    }

    pub fn evaluate(&self, state: &BodyState) -> Vec<f64> {
        self.items.iter().map(|i| i.eval(state)).collect()
    }

    /// The subset whose labels satisfy `keep`.
    pub fn filter<P: Fn(&str) -> bool>(&self, keep: P) -> Self {
        Self {
            items: self
                .items
                .iter()
                .filter(|i| keep(&i.label))
                .cloned()
                .collect(),
        }
    }
}

impl<'a> IntoIterator for &'a IntegralSet {
    type Item = &'a Integral;
    type IntoIter = std::slice::Iter<'a, Integral>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// `(Omega_1, Omega_2, Omega_3)` under the hat map.
fn w3(s: &BodyState) -> [f64; 3] {
    let o = &s.omega;
    [-o.get(1, 2), o.get(0, 2), -o.get(0, 1)]
}

/// Energy plus the case-specific first integrals.
pub fn first_integrals(spec: &CaseSpec) -> Result<IntegralSet> {
    spec.validate()?;
    let field: Arc<dyn VectorField> = Arc::from(spec.field()?);
    let mut set = IntegralSet::new();
    {
        let (field, scale_field) = (field.clone(), field.clone());
        let potential = spec.potential.clone();
        set.push(
            Integral::new("E", "1/2 <J Omega, Omega> + V(Gamma)", move |s| {
                field.energy(s)
            })
            .with_scale(move |s| {
                let v = potential.value(&s.gamma);
                (scale_field.energy(s) - v).abs() + v.abs()
            }),
        );
    }
    let n = spec.n;
    let last = n - 1;
    match spec.kind {
        CaseKind::SuslovFree | CaseKind::Gyroscopic3D => {}
        CaseKind::Lagrange3D => {
            let d = spec.mass.diag().expect("validated");
            let j = j_from_i(&[d[0], d[1], d[2]]);
            set.push(
                Integral::new("F", "J1 W1 G1 + J2 W2 G2", move |s| {
                    let w = w3(s);
                    j[0] * w[0] * s.gamma[0] + j[1] * w[1] * s.gamma[1]
                })
                .with_scale(move |s| {
                    let w = w3(s);
                    (j[0] * w[0] * s.gamma[0]).abs() + (j[1] * w[1] * s.gamma[1]).abs()
                }),
            );
        }
        CaseKind::Kharlamova3D => {
            let d = spec.mass.diag().expect("validated");
            let j = j_from_i(&[d[0], d[1], d[2]]);
            let b = spec.linear_b().expect("validated").to_vec();
            let bs = b.clone();
            set.push(
                Integral::new("F", "J1 W1 B1 + J2 W2 B2", move |s| {
                    let w = w3(s);
                    j[0] * w[0] * b[0] + j[1] * w[1] * b[1]
                })
                .with_scale(move |s| {
                    let w = w3(s);
                    (j[0] * w[0] * bs[0]).abs() + (j[1] * w[1] * bs[1]).abs()
                }),
            );
        }
        CaseKind::ClebschTisserand3D => {
            let d = spec.mass.diag().expect("validated");
            let j = j_from_i(&[d[0], d[1], d[2]]);
            let b = spec.quadratic_b().expect("validated");
            let eps = b[0] / j[0];
            let a = [eps * j[1] * j[2], eps * j[0] * j[2], eps * j[0] * j[1]];
            set.push(
                Integral::new(
                    "F",
                    "1/2 <J Omega, J Omega> - 1/2 <A Gamma, Gamma>, A = eps det(J) J^-1",
                    move |s| {
                        let w = w3(s);
                        let g = &s.gamma;
                        0.5 * (0..3)
                            .map(|k| (j[k] * w[k]).powi(2) - a[k] * g[k] * g[k])
                            .sum::<f64>()
                    },
                )
                .with_scale(move |s| {
                    let w = w3(s);
                    let g = &s.gamma;
                    0.5 * (0..3)
                        .map(|k| (j[k] * w[k]).powi(2) + (a[k] * g[k] * g[k]).abs())
                        .sum::<f64>()
                }),
            );
        }
        CaseKind::DGJ3D => {
            let d = spec.mass.diag().expect("validated");
            let j = j_from_i(&[d[0], d[1], d[2]]);
            let Potential::Dgj(pot) = spec.potential.clone() else {
                unreachable!("validated")
            };
            let terms = move |s: &BodyState| {
                let w = w3(s);
                let g = s.gamma.as_slice();
                let (p1, q1) = DgjPotential::v1_args(g);
                let (p2, q2) = DgjPotential::v2_args(g);
                [
                    0.5 * (0..3).map(|k| (j[k] * w[k]).powi(2)).sum::<f64>(),
                    j[1] * pot.v1.value(p1, q1),
                    j[0] * pot.v2.value(p2, q2),
                ]
            };
            let abs_terms = terms.clone();
            set.push(
                Integral::new("F", "1/2 <J Omega, J Omega> + J2 v1 + J1 v2", move |s| {
                    terms(s).iter().sum()
                })
                .with_scale(move |s| abs_terms(s).iter().map(|t| t.abs()).sum()),
            );
        }
        CaseKind::LagrangeND => {
            // With I_1 = ... = I_{n-1} the kinetic momentum is a multiple of
            // Omega, so the bracket term vanishes and only the potential acts:
            // dOmega_in/dt = k Gamma_i and dGamma_i/dt = s Gamma_n Omega_in for
            // i < n, with k and s independent of i. Hence
            // d/dt (Gamma_j Omega_in - Gamma_i Omega_jn) = 0.
            for i in 0..last {
                for k in (i + 1)..last {
                    set.push(
                        Integral::new(
                            format!("L_{}_{}", i + 1, k + 1),
                            format!(
                                "G{k1} W{i1},{n} - G{i1} W{k1},{n}",
                                i1 = i + 1,
                                k1 = k + 1,
                                n = n
                            ),
                            move |s| {
                                s.gamma[k] * s.omega.get(i, last)
                                    - s.gamma[i] * s.omega.get(k, last)
                            },
                        )
                        .with_scale(move |s| {
                            (s.gamma[k] * s.omega.get(i, last)).abs()
                                + (s.gamma[i] * s.omega.get(k, last)).abs()
                        }),
                    );
                }
            }
        }
        CaseKind::KharlamovaND => {
            let d = spec.mass.diag().expect("validated").to_vec();
            let b = spec.linear_b().expect("validated");
            let k: Vec<f64> = (0..last).map(|i| (d[i] + d[last]) / b[i]).collect();
            for i in 0..last {
                for j in (i + 1)..last {
                    let (ki, kj) = (k[i], k[j]);
                    set.push(
                        Integral::new(
                            format!("F_{}_{}", i + 1, j + 1),
                            format!(
                                "(I{i1}+I{n})/B{i1} W{i1},{n} - (I{j1}+I{n})/B{j1} W{j1},{n}",
                                i1 = i + 1,
                                j1 = j + 1,
                                n = n
                            ),
                            move |s| ki * s.omega.get(i, last) - kj * s.omega.get(j, last),
                        )
                        .with_scale(move |s| {
                            (ki * s.omega.get(i, last)).abs() + (kj * s.omega.get(j, last)).abs()
                        }),
                    );
                }
            }
        }
        CaseKind::ClebschTisserandND => {
            let d = spec.mass.diag().expect("validated").to_vec();
            let b = spec.quadratic_b().expect("validated").to_vec();
            for i in 0..last {
                let (db, m) = (b[i] - b[last], d[i] + d[last]);
                set.push(
                    Integral::new(
                        format!("F_{}", i + 1),
                        format!(
                            "(B{i1}-B{n}) G{i1}^2 + (I{i1}+I{n}) W{i1},{n}^2",
                            i1 = i + 1,
                            n = n
                        ),
                        move |s| db * s.gamma[i].powi(2) + m * s.omega.get(i, last).powi(2),
                    )
                    .with_scale(move |s| {
                        (db * s.gamma[i].powi(2)).abs() + m.abs() * s.omega.get(i, last).powi(2)
                    }),
                );
            }
        }
    }
    Ok(set)
}

/// Numerical rank of the Jacobian of `integrals` with respect to the flat
/// state coordinates, by central differences and SVD.
pub fn functional_rank(integrals: &IntegralSet, state: &BodyState, h: f64) -> Result<usize> {
    let n = state.n();
    let y0 = state.pack();
    let mut jac = DMatrix::zeros(integrals.len(), y0.len());
    let mut y = y0.clone();
    for c in 0..y0.len() {
        y[c] = y0[c] + h;
        let plus = integrals.evaluate(&BodyState::unpack(n, &y)?);
        y[c] = y0[c] - h;
        let minus = integrals.evaluate(&BodyState::unpack(n, &y)?);
        y[c] = y0[c];
        for r in 0..integrals.len() {
            jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    let sv = jac.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|s| **s > RANK_TOL * max).count())
}
