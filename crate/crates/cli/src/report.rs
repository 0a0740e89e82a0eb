//! Report schema and artifact output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use suslov_core::cases::CaseKind;
use suslov_core::clebsch::TorusSpec;
use suslov_core::integrate::{write_csv, DriftEntry, IntegratorConfig, Trajectory};
use suslov_core::kharlamova::OrbitAnalysis;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub status: Status,
    pub command: String,
    pub scenario: String,
    pub case: CaseMeta,
    pub integrator: IntegratorConfig,
    pub t_end: f64,
    pub output_dt: f64,
    pub samples: usize,
    pub max_constraint_residual: f64,
    pub max_gamma_norm_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrals: Option<IntegralTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kharlamova: Option<OrbitAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clebsch: Option<ClebschReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<AsymptoticReport>,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CaseMeta {
    pub kind: CaseKind,
    pub n: usize,
    pub mass: Vec<Vec<f64>>,
    pub potential: String,
    pub gyro_eps: f64,
}

#[derive(Debug, Serialize)]
pub struct IntegralTable {
    pub tolerance: f64,
    pub max_relative_drift: f64,
    pub entries: Vec<DriftEntry>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct DivergenceStats {
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub invariant_measure_expected: bool,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct PeriodReport {
    pub observable: String,
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct FrequencyRow {
    pub index: usize,
    pub exact: f64,
    pub measured: Option<f64>,
    pub abs_error: Option<f64>,
    pub phase_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ClebschReport {
    pub torus: TorusSpec,
    pub sign_gamma_n_invariant: bool,
    pub tolerance: f64,
    pub frequencies: Vec<FrequencyRow>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum AsymptoticReport {
    Asymptotic {
        energy: f64,
        w_minus: Vec<f64>,
        w_plus: Vec<f64>,
        initial_distance: f64,
        final_distance: f64,
        monotone_after: Option<f64>,
        period_detected: Option<f64>,
        tolerance: f64,
        pass: bool,
    },
    Stationary {
        max_omega_change: f64,
        tolerance: f64,
        pass: bool,
    },
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

pub fn write_artifacts(dir: &Path, traj: &Trajectory, report: &Report) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut csv = Vec::new();
    write_csv(traj, &mut csv).map_err(|source| CliError::Io {
        path: "trajectory.csv".into(),
        source,
    })?;
    write_atomic(&dir.join("trajectory.csv"), &csv)?;
    let mut json = serde_json::to_vec_pretty(report).expect("report serializes");
    json.push(b'\n');
    write_atomic(&dir.join("report.json"), &json)
}
