//! `suslov`: runs one scenario file and writes `trajectory.csv` and
//! `report.json` to the output directory.

mod config;
mod error;
mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::report::Status;
use crate::run::Command;

/// Environment variable naming the base directory for outputs.
const OUTPUT_ENV: &str = "SUSLOV_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "suslov-out";

#[derive(Parser)]
#[command(name = "suslov", version, about = "Constrained rigid body scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate and run the analyses listed in the scenario
    Simulate(RunArgs),
    /// Integral drift and divergence checks
    Verify(RunArgs),
    /// Closed-form period against the measured one
    KharlamovaPeriod(RunArgs),
    /// Torus classification and rotation numbers
    ClebschTori(RunArgs),
    /// Convergence to the asymptotic rest points
    SuslovAsymptotic(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML)
    config: PathBuf,
    /// Override `t_end`
    #[arg(long)]
    t_end: Option<f64>,
    /// Override the integrator step
    #[arg(long)]
    step: Option<f64>,
    /// Output directory [default: $SUSLOV_OUTPUT_DIR/<scenario>, else suslov-out/<scenario>]
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn default_output_dir(config: &Path) -> PathBuf {
    let base = std::env::var_os(OUTPUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let stem = config
        .file_stem()
        .map(PathBuf::from)
        .unwrap_or_else(|| "scenario".into());
    base.join(stem)
}

fn execute(command: Command, args: RunArgs) -> Result<Status> {
    let mut scenario = config::load(&args.config)?;
    scenario.override_with(args.t_end, args.step, args.output_dir)?;
    let dir = scenario
        .output_dir
        .clone()
        .unwrap_or_else(|| default_output_dir(&args.config));
    let outcome = run::run(&scenario, command)?;
    report::write_artifacts(&dir, &outcome.trajectory, &outcome.report)?;

    let r = &outcome.report;
    println!(
        "{} {} (n = {}): {} samples to t = {}",
        command.name(),
        r.case.kind,
        r.case.n,
        r.samples,
        r.t_end
    );
    if let Some(t) = &r.integrals {
        println!(
            "  integrals: max relative drift {:.3e}",
            t.max_relative_drift
        );
    }
    if let Some(d) = &r.divergence {
        let flag = d
            .flag
            .as_deref()
            .map(|f| format!(" [{f}]"))
            .unwrap_or_default();
        println!(
            "  divergence: max |div| {:.3e} over {} states{flag}",
            d.max_abs, d.samples
        );
    }
    if let Some(p) = &r.period {
        match (p.measured, p.quadrature) {
            (m, Some(q)) => println!("  period: quadrature {q:.12}, measured {m:?}"),
            (Some(m), None) => println!("  period: measured {m:.12}"),
            (None, None) => println!("  period: none detected"),
        }
    }
    if let Some(c) = &r.clebsch {
        println!("  tori: {:?}", c.torus.classification);
        for row in &c.frequencies {
            println!(
                "    omega_{}: exact {:.10}, measured {:?}",
                row.index, row.exact, row.measured
            );
        }
    }
    if let Some(a) = &r.asymptotic {
        match a {
            report::AsymptoticReport::Asymptotic { final_distance, .. } => {
                println!("  asymptotic: final distance to w+ {final_distance:.3e}")
            }
            report::AsymptoticReport::Stationary {
                max_omega_change, ..
            } => {
                println!("  stationary: max |Omega(t) - Omega(0)| {max_omega_change:.3e}")
            }
        }
    }
    println!("  status: {:?}, output in {}", r.status, dir.display());
    Ok(r.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::KharlamovaPeriod(a) => (Command::KharlamovaPeriod, a),
        Cmd::ClebschTori(a) => (Command::ClebschTori, a),
        Cmd::SuslovAsymptotic(a) => (Command::SuslovAsymptotic, a),
    };
    match execute(command, args) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(4),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
