//! Run orchestration: integrate once, then apply each requested analysis to
//! the shared trajectory.

use suslov_core::batch;
use suslov_core::cases::{asymptotic_points, first_integrals};
use suslov_core::clebsch::{self, Classification, ClebschParams};
use suslov_core::integrate::{
    detect_period, drift_report, integrate, reparametrize, Convention, Trajectory,
};
use suslov_core::kharlamova::{analyze_orbit, KharlamovaParams, OrbitAnalysis, PeriodResult};
use suslov_core::model::{divergence, VectorField, DIVERGENCE_STEP};
use suslov_core::Error as CoreError;

use crate::config::{Analysis, Scenario};
use crate::error::{setup_error, CliError, Result};
use crate::report::*;

pub const DRIFT_TOL: f64 = 1e-8;
pub const DIVERGENCE_TOL: f64 = 1e-6;
/// Divergence above this marks a field without an invariant measure.
pub const NO_MEASURE_THRESHOLD: f64 = 1e-3;
pub const PERIOD_TOL: f64 = 1e-6;
pub const FREQUENCY_TOL: f64 = 1e-4;
pub const ASYMPTOTIC_DISTANCE_TOL: f64 = 1e-6;
pub const STATIONARY_TOL: f64 = 1e-10;
const DIVERGENCE_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    KharlamovaPeriod,
    ClebschTori,
    SuslovAsymptotic,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::KharlamovaPeriod => "kharlamova-period",
            Command::ClebschTori => "clebsch-tori",
            Command::SuslovAsymptotic => "suslov-asymptotic",
        }
    }

    /// Analyses implied by the command; `simulate` runs those listed in the
    /// scenario.
    pub fn analyses(self, scenario: &Scenario) -> Vec<Analysis> {
        match self {
            Command::Simulate => scenario.analyses.clone(),
            Command::Verify => vec![Analysis::VerifyIntegrals, Analysis::MeasureCheck],
            Command::KharlamovaPeriod => vec![Analysis::KharlamovaQuadrature, Analysis::Period],
            Command::ClebschTori => vec![Analysis::ClebschTori],
            Command::SuslovAsymptotic => vec![Analysis::Asymptotic],
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub trajectory: Trajectory,
}

pub fn run(scenario: &Scenario, command: Command) -> Result<Outcome> {
    let analyses = command.analyses(scenario);
    for a in &analyses {
        if let Some(reason) = crate::config::inapplicable(*a, &scenario.spec) {
            return Err(CliError::Config {
                path: scenario.source.clone(),
                line: None,
                field: Some("case.kind".into()),
                message: format!("{} cannot run: {reason}", command.name()),
            });
        }
    }
    let spec = &scenario.spec;
    let field = spec
        .field()
        .map_err(|e| setup_error(&scenario.source, "case", e))?;
    let traj = integrate(
        field.as_ref(),
        &scenario.initial,
        (0.0, scenario.t_end),
        scenario.output_dt,
        &scenario.integrator,
    )
    .map_err(CliError::Numerical)?;

    let n = spec.n;
    let mass = spec.mass.matrix();
    let mut report = Report {
        status: Status::Pass,
        command: command.name().into(),
        scenario: scenario.source.clone(),
        case: CaseMeta {
            kind: spec.kind,
            n,
            mass: (0..n)
                .map(|r| (0..n).map(|c| mass[(r, c)]).collect())
                .collect(),
            potential: format!("{:?}", spec.potential),
            gyro_eps: spec.gyro_eps,
        },
        integrator: scenario.integrator.clone(),
        t_end: scenario.t_end,
        output_dt: scenario.output_dt,
        samples: traj.len(),
        max_constraint_residual: traj.max_constraint_residual(),
        max_gamma_norm_err: traj.max_gamma_norm_err(),
        integrals: None,
        divergence: None,
        kharlamova: None,
        period: None,
        clebsch: None,
        asymptotic: None,
        failures: Vec::new(),
    };

    let mut orbit: Option<OrbitAnalysis> = None;
    if analyses.contains(&Analysis::VerifyIntegrals) {
        let set = first_integrals(spec).map_err(CliError::Numerical)?;
        let entries = drift_report(&traj, &set);
        let max = entries.iter().map(|e| e.relative_drift).fold(0.0, f64::max);
        report.integrals = Some(IntegralTable {
            tolerance: DRIFT_TOL,
            max_relative_drift: max,
            pass: max <= DRIFT_TOL,
            entries,
        });
    }
    if analyses.contains(&Analysis::MeasureCheck) {
        report.divergence = Some(measure_check(
            field.as_ref(),
            &traj,
            spec.mass.is_diagonal(),
        )?);
    }
    if analyses.contains(&Analysis::KharlamovaQuadrature) {
        let params = KharlamovaParams::from_spec(spec).map_err(CliError::Numerical)?;
        orbit = Some(analyze_orbit(&scenario.initial, &params).map_err(CliError::Numerical)?);
    }
    if analyses.contains(&Analysis::Period) {
        report.period = Some(period_report(&traj, orbit.as_ref()));
    }
    report.kharlamova = orbit;
    if analyses.contains(&Analysis::ClebschTori) {
        report.clebsch = Some(clebsch_report(scenario, &traj)?);
    }
    if analyses.contains(&Analysis::Asymptotic) {
        report.asymptotic = Some(asymptotic_report(scenario, field.as_ref(), &traj)?);
    }

    let checks = [
        ("integrals", report.integrals.as_ref().map(|r| r.pass)),
        ("divergence", report.divergence.as_ref().map(|r| r.pass)),
        ("period", report.period.as_ref().map(|r| r.pass)),
        ("clebsch", report.clebsch.as_ref().map(|r| r.pass)),
        (
            "asymptotic",
            report.asymptotic.as_ref().map(|r| match r {
                AsymptoticReport::Asymptotic { pass, .. }
                | AsymptoticReport::Stationary { pass, .. } => *pass,
            }),
        ),
    ];
    report.failures = checks
        .iter()
        .filter(|(_, pass)| *pass == Some(false))
        .map(|(name, _)| name.to_string())
        .collect();
    if !report.failures.is_empty() {
        report.status = Status::Fail;
    }
    Ok(Outcome {
        report,
        trajectory: traj,
    })
}

fn measure_check(
    field: &dyn VectorField,
    traj: &Trajectory,
    expected: bool,
) -> Result<DivergenceStats> {
    let stride = traj.len().div_ceil(DIVERGENCE_SAMPLES).max(1);
    let states: Vec<_> = traj.states.iter().step_by(stride).collect();
    let divs = batch::map(&states, |s| divergence(field, s, DIVERGENCE_STEP))
        .into_iter()
        .collect::<std::result::Result<Vec<f64>, CoreError>>()
        .map_err(CliError::Numerical)?;
    let max_abs = divs.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let mean_abs = divs.iter().map(|d| d.abs()).sum::<f64>() / divs.len() as f64;
    let flag =
        (!expected && max_abs > NO_MEASURE_THRESHOLD).then(|| "no invariant measure".to_string());
    Ok(DivergenceStats {
        samples: divs.len(),
        max_abs,
        mean_abs,
        invariant_measure_expected: expected,
        tolerance: DIVERGENCE_TOL,
        flag,
        pass: !expected || max_abs <= DIVERGENCE_TOL,
    })
}

fn period_report(traj: &Trajectory, orbit: Option<&OrbitAnalysis>) -> PeriodReport {
    let n = traj.n;
    let measured = detect_period(traj, |s| s.gamma[n - 1]);
    let quadrature = match orbit.map(|o| o.period) {
        Some(PeriodResult::Periodic { period, .. }) => Some(period),
        _ => None,
    };
    let relative_error = match (measured, quadrature) {
        (Some(m), Some(q)) => Some(((m - q) / q).abs()),
        _ => None,
    };
    let pass = match quadrature {
        Some(_) => relative_error.is_some_and(|e| e <= PERIOD_TOL),
        None => true,
    };
    PeriodReport {
        observable: format!("Gamma_{n}"),
        measured,
        quadrature,
        relative_error,
        tolerance: quadrature.map(|_| PERIOD_TOL),
        pass,
    }
}

fn clebsch_report(scenario: &Scenario, traj: &Trajectory) -> Result<ClebschReport> {
    let n = traj.n;
    let params = ClebschParams::from_spec(&scenario.spec).map_err(CliError::Numerical)?;
    let torus = clebsch::torus_spec(&scenario.initial, &params).map_err(CliError::Numerical)?;
    let g0 = scenario.initial.gamma[n - 1];
    let sign_kept = g0 != 0.0 && traj.states.iter().all(|s| s.gamma[n - 1] * g0 > 0.0);
    let exact = clebsch::frequencies(&params).unwrap_or_default();

    let mut rows: Vec<FrequencyRow> = exact
        .iter()
        .enumerate()
        .map(|(k, w)| FrequencyRow {
            index: k + 1,
            exact: *w,
            measured: None,
            abs_error: None,
            phase_residual: None,
        })
        .collect();
    let claims = torus.classification == Classification::TwoDisjointTori;
    if claims && sign_kept {
        let tau = reparametrize(traj, |s| s.gamma[n - 1], Convention::Rate)
            .map_err(CliError::Numerical)?;
        let fits = clebsch::rotation_numbers(&tau, &params).map_err(CliError::Numerical)?;
        for (row, fit) in rows.iter_mut().zip(fits) {
            if let Some(f) = fit {
                let slope = f.slope.abs();
                row.measured = Some(slope);
                row.abs_error = Some((slope - row.exact).abs());
                row.phase_residual = Some(f.max_residual);
            }
        }
    }
    let pass = !claims
        || (sign_kept
            && rows
                .iter()
                .filter(|r| torus.active.contains(&(r.index - 1)))
                .all(|r| r.abs_error.is_some_and(|e| e < FREQUENCY_TOL)));
    Ok(ClebschReport {
        torus,
        sign_gamma_n_invariant: sign_kept,
        tolerance: FREQUENCY_TOL,
        frequencies: rows,
        pass,
    })
}

fn asymptotic_report(
    scenario: &Scenario,
    field: &dyn VectorField,
    traj: &Trajectory,
) -> Result<AsymptoticReport> {
    let n = traj.n;
    let h = field.energy(&scenario.initial);
    match asymptotic_points(&scenario.spec.mass, h) {
        Err(CoreError::NoAsymptoticLine(_)) => {
            let change = traj
                .states
                .iter()
                .map(|s| (&s.omega - &scenario.initial.omega).max_abs())
                .fold(0.0, f64::max);
            Ok(AsymptoticReport::Stationary {
                max_omega_change: change,
                tolerance: STATIONARY_TOL,
                pass: change <= STATIONARY_TOL,
            })
        }
        Err(e) => Err(CliError::Numerical(e)),
        Ok(points) => {
            let dist: Vec<f64> = traj
                .states
                .iter()
                .map(|s| (&s.omega - &points.w_plus).norm())
                .collect();
            // earliest sample after which the distance never grows
            let mut start = dist.len() - 1;
            while start > 0 && dist[start] <= dist[start - 1] {
                start -= 1;
            }
            let last = *dist.last().expect("trajectory is never empty");
            let column = |w: &suslov_core::algebra::SkewMatrix| {
                (0..n - 1).map(|k| w.get(k, n - 1)).collect()
            };
            Ok(AsymptoticReport::Asymptotic {
                energy: h,
                w_minus: column(&points.w_minus),
                w_plus: column(&points.w_plus),
                initial_distance: dist[0],
                final_distance: last,
                monotone_after: (start + 1 < dist.len()).then(|| traj.times[start]),
                period_detected: detect_period(traj, |s| s.omega.get(0, n - 1)),
                tolerance: ASYMPTOTIC_DISTANCE_TOL,
                pass: last < ASYMPTOTIC_DISTANCE_TOL,
            })
        }
    }
}
