//! Scenario files.
//!
//! ```toml
//! n = 4
//! t_end = 50.0
//! output_dt = 0.01
//! analyses = ["verify_integrals", "measure_check"]
//!
//! [case]
//! kind = "KharlamovaND"
//! mass = [1.0, 1.4, 1.9, 0.8]
//! potential = { type = "linear", b = [1.2, -0.8, 1.5, 0.0] }
//!
//! [initial]
//! omega = [[1, 4, 0.3], [2, 4, -0.1], [3, 4, 0.2]]
//! gamma = [0.5, 0.5, 0.5, 0.5]
//!
//! [integrator]
//! method = "adaptive"
//! rel_tol = 1e-10
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use suslov_core::algebra::SkewMatrix;
use suslov_core::cases::{CaseKind, CaseSpec};
use suslov_core::integrate::{IntegratorConfig, Method};
use suslov_core::model::{Bivariate, BodyState, MassTensor, Potential};

use crate::error::{setup_error, CliError, Result};

/// Tolerance for accepting and normalizing the initial `Gamma`.
pub const UNIT_NORM_TOL: f64 = 1e-6;
const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    VerifyIntegrals,
    MeasureCheck,
    KharlamovaQuadrature,
    ClebschTori,
    Asymptotic,
    Period,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Spanned<usize>,
    t_end: Spanned<f64>,
    output_dt: Spanned<f64>,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    analyses: Option<Spanned<Vec<Analysis>>>,
    case: Spanned<RawCase>,
    initial: Spanned<RawInitial>,
    #[serde(default)]
    integrator: Option<Spanned<RawIntegrator>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    kind: CaseKind,
    mass: Option<Spanned<Vec<f64>>>,
    mass_full: Option<Spanned<Vec<Vec<f64>>>>,
    potential: Option<Spanned<RawPotential>>,
    gyro_eps: Option<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawPotential {
    Zero,
    Linear { b: Vec<f64> },
    Quadratic { b: Vec<f64> },
    Dgj { v1: RawBivariate, v2: RawBivariate },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawBivariate {
    Zero,
    Sin { amp: f64, q_coef: f64 },
    Quadratic { pp: f64, q: f64, qq: f64 },
}

impl From<RawBivariate> for Bivariate {
    fn from(raw: RawBivariate) -> Self {
        match raw {
            RawBivariate::Zero => Bivariate::Zero,
            RawBivariate::Sin { amp, q_coef } => Bivariate::Sin { amp, q_coef },
            RawBivariate::Quadratic { pp, q, qq } => Bivariate::Quadratic { pp, q, qq },
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(default)]
    omega: Option<Spanned<Vec<(usize, usize, f64)>>>,
    gamma: Spanned<Vec<f64>>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    method: Option<Method>,
    step: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    renormalize_gamma: Option<bool>,
    max_steps: Option<usize>,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub source: String,
    pub spec: CaseSpec,
    pub initial: BodyState,
    pub integrator: IntegratorConfig,
    pub t_end: f64,
    pub output_dt: f64,
    pub output_dir: Option<PathBuf>,
    pub analyses: Vec<Analysis>,
}

struct Ctx<'a> {
    path: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn err(&self, span: Option<Range<usize>>, field: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.to_string(),
            line: span.map(|s| self.line(s)),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text, &path.display().to_string())
}

pub fn parse(text: &str, source: &str) -> Result<Scenario> {
    let ctx = Ctx { path: source, text };
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config {
        path: source.to_string(),
        line: e.span().map(|s| ctx.line(s)),
        field: None,
        message: e.message().trim().to_string(),
    })?;

    let n = *raw.n.get_ref();
    if n < 3 {
        return Err(ctx.err(
            Some(raw.n.span()),
            "n",
            format!("dimension must be at least 3, got {n}"),
        ));
    }
    let t_end = *raw.t_end.get_ref();
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(ctx.err(
            Some(raw.t_end.span()),
            "t_end",
            "must be positive and finite",
        ));
    }
    let output_dt = *raw.output_dt.get_ref();
    if !(output_dt.is_finite() && output_dt > 0.0) {
        return Err(ctx.err(
            Some(raw.output_dt.span()),
            "output_dt",
            "must be positive and finite",
        ));
    }

    let case_span = raw.case.span();
    let case = raw.case.into_inner();
    let mass = match (case.mass, case.mass_full) {
        (Some(_), Some(full)) => {
            return Err(ctx.err(
                Some(full.span()),
                "case.mass_full",
                "give either `mass` or `mass_full`, not both",
            ))
        }
        (None, None) => {
            return Err(ctx.err(
                Some(case_span),
                "case.mass",
                "missing field `mass` (diagonal) or `mass_full` (matrix)",
            ))
        }
        (Some(d), None) => {
            let span = d.span();
            let d = d.into_inner();
            if d.len() != n {
                return Err(ctx.err(
                    Some(span),
                    "case.mass",
                    format!("expected {n} entries, got {}", d.len()),
                ));
            }
            MassTensor::diagonal(&d).map_err(|e| ctx.err(Some(span), "case.mass", e.to_string()))?
        }
        (None, Some(full)) => {
            let span = full.span();
            let rows = full.into_inner();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(ctx.err(
                    Some(span),
                    "case.mass_full",
                    format!("expected a {n}x{n} matrix"),
                ));
            }
            let m = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
            MassTensor::full(m).map_err(|e| ctx.err(Some(span), "case.mass_full", e.to_string()))?
        }
    };

    let potential = match case.potential {
        None => Potential::Zero,
        Some(p) => {
            let span = p.span();
            let check = |b: &Vec<f64>| {
                if b.len() == n {
                    Ok(())
                } else {
                    Err(ctx.err(
                        Some(span.clone()),
                        "case.potential.b",
                        format!("expected {n} entries, got {}", b.len()),
                    ))
                }
            };
            match p.into_inner() {
                RawPotential::Zero => Potential::Zero,
                RawPotential::Linear { b } => {
                    check(&b)?;
                    Potential::linear(&b)
                }
                RawPotential::Quadratic { b } => {
                    check(&b)?;
                    Potential::quadratic(&b)
                }
                RawPotential::Dgj { v1, v2 } => {
                    if n != 3 {
                        return Err(ctx.err(
                            Some(span),
                            "case.potential",
                            "the dgj potential needs n = 3",
                        ));
                    }
                    Potential::dgj(v1.into(), v2.into())
                        .map_err(|e| ctx.err(Some(span), "case.potential", e.to_string()))?
                }
            }
        }
    };

    let spec = CaseSpec::new(case.kind, mass, potential, case.gyro_eps.unwrap_or(0.0))
        .map_err(|e| ctx.err(Some(case_span.clone()), "case", e.to_string()))?;

    let initial = raw.initial.into_inner();
    let gamma_span = initial.gamma.span();
    let gamma = initial.gamma.into_inner();
    if gamma.len() != n {
        return Err(ctx.err(
            Some(gamma_span),
            "initial.gamma",
            format!("expected {n} entries, got {}", gamma.len()),
        ));
    }
    let norm = gamma.iter().map(|g| g * g).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(ctx.err(
            Some(gamma_span),
            "initial.gamma",
            format!("|gamma| = {norm} is not within {UNIT_NORM_TOL:e} of 1"),
        ));
    }
    let gamma = DVector::from_iterator(n, gamma.iter().map(|g| g / norm));

    let mut omega = SkewMatrix::zeros(n);
    if let Some(entries) = initial.omega {
        let span = entries.span();
        let mut seen = Vec::new();
        for (i, j, v) in entries.into_inner() {
            if i == 0 || j == 0 || i > n || j > n || i == j {
                return Err(ctx.err(
                    Some(span),
                    "initial.omega",
                    format!(
                        "entry ({i}, {j}) is not an off-diagonal 1-based index pair for n = {n}"
                    ),
                ));
            }
            let key = (i.min(j), i.max(j));
            if seen.contains(&key) {
                return Err(ctx.err(
                    Some(span),
                    "initial.omega",
                    format!("entry ({i}, {j}) given twice"),
                ));
            }
            seen.push(key);
            omega.set(i - 1, j - 1, v);
        }
    }
    let initial_state = BodyState::new(omega, gamma).expect("dimensions checked");

    let field = spec.field().map_err(|e| setup_error(source, "case", e))?;
    let residual = field.constraints().residual(&initial_state.omega);
    if residual > CONSTRAINT_TOL * (1.0 + initial_state.omega.norm()) {
        return Err(ctx.err(
            None,
            "initial.omega",
            format!(
                "initial velocity violates the constraints of {} (residual {residual:.3e})",
                spec.kind
            ),
        ));
    }

    let mut integrator = IntegratorConfig::reference();
    if let Some(raw_int) = raw.integrator {
        let span = raw_int.span();
        let r = raw_int.into_inner();
        if let Some(m) = r.method {
            integrator.method = m;
        }
        if let Some(v) = r.step {
            integrator.step = v;
        }
        if let Some(v) = r.rel_tol {
            integrator.rel_tol = v;
        }
        if let Some(v) = r.abs_tol {
            integrator.abs_tol = v;
        }
        if let Some(v) = r.renormalize_gamma {
            integrator.renormalize_gamma = v;
        }
        if let Some(v) = r.max_steps {
            integrator.max_steps = v;
        }
        integrator
            .validate()
            .map_err(|e| ctx.err(Some(span), "integrator", e.to_string()))?;
    }

    let (analyses, analyses_span) = match raw.analyses {
        Some(a) => {
            let span = a.span();
            (a.into_inner(), Some(span))
        }
        None => (Vec::new(), None),
    };
    for a in &analyses {
        if let Some(reason) = inapplicable(*a, &spec) {
            return Err(ctx.err(analyses_span.clone(), "analyses", reason));
        }
    }

    Ok(Scenario {
        source: source.to_string(),
        spec,
        initial: initial_state,
        integrator,
        t_end,
        output_dt,
        output_dir: raw.output_dir,
        analyses,
    })
}

/// Why `analysis` cannot run on `spec`, if it cannot.
pub fn inapplicable(analysis: Analysis, spec: &CaseSpec) -> Option<String> {
    let need = |kind: CaseKind| {
        (spec.kind != kind).then(|| format!("{analysis:?} needs a {kind} case, got {}", spec.kind))
    };
    match analysis {
        Analysis::KharlamovaQuadrature => need(CaseKind::KharlamovaND),
        Analysis::ClebschTori => need(CaseKind::ClebschTisserandND),
        Analysis::Asymptotic => need(CaseKind::SuslovFree).or_else(|| {
            (!matches!(spec.potential, Potential::Zero))
                .then(|| "Asymptotic needs a zero potential".to_string())
        }),
        Analysis::VerifyIntegrals | Analysis::MeasureCheck | Analysis::Period => None,
    }
}

impl Scenario {
    /// Applies command-line overrides.
    pub fn override_with(
        &mut self,
        t_end: Option<f64>,
        step: Option<f64>,
        output_dir: Option<PathBuf>,
    ) -> Result<()> {
        let flag_err = |field: &str, message: &str| CliError::Config {
            path: self.source.clone(),
            line: None,
            field: Some(field.to_string()),
            message: message.to_string(),
        };
        if let Some(t) = t_end {
            if !(t.is_finite() && t > 0.0) {
                return Err(flag_err("--t-end", "must be positive and finite"));
            }
            self.t_end = t;
        }
        if let Some(h) = step {
            if !(h.is_finite() && h > 0.0) {
                return Err(flag_err("--step", "must be positive and finite"));
            }
            self.integrator.step = h;
        }
        if output_dir.is_some() {
            self.output_dir = output_dir;
        }
        Ok(())
    }
}
