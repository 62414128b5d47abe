//! `phaserk simulate`: seeded trajectory with energy tracking.

use std::path::PathBuf;

use phaserk::integrator::{self, IntegratorError, StepPlan};
use phaserk::{spectral, stability};

use crate::args::SimulateArgs;
use crate::error::CliError;
use crate::init::random_initial_field;
use crate::io_util::write_atomic;

pub struct SimulateOutput {
    pub max_increase: f64,
    pub slack: f64,
    pub energy_csv: PathBuf,
    pub exit_code: i32,
}

/// Per-step round-off allowance in the dissipation verdict, scaled by the
/// initial energy.
pub fn monotonicity_slack(initial_energy: f64) -> f64 {
    1e-9 * (1.0 + initial_energy.abs())
}

pub fn run(args: &SimulateArgs) -> Result<SimulateOutput, CliError> {
    let pair = super::load_tableau(&args.tableau)?;
    let lipschitz = super::model_lipschitz(&args.model)?;
    let report = stability::certify_unconditional(&pair, lipschitz)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    if !report.unconditional && !args.force {
        return Err(CliError::NotCertified);
    }
    let spec = super::build_model_spec(&args.model, &report)?;
    let grid = super::build_grid(&args.model)?;
    if !(args.tau > 0.0) {
        return Err(CliError::Usage("--tau must be positive".into()));
    }
    let plan = StepPlan::new(pair, spec, grid, args.tau)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_dealiasing(args.model.dealias);
    let u0 = random_initial_field(grid, args.seed);
    let traj = integrator::run(&plan, &u0, args.tend, args.snap_stride).map_err(|e| match e {
        IntegratorError::Divergence { stage, step } => {
            CliError::Divergence { step: step.unwrap_or(0), stage }
        }
        IntegratorError::HorizonTooShort { .. } => CliError::Usage(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })?;

    std::fs::create_dir_all(&args.out)?;
    let energy_csv = args.out.join("energy.csv");
    let mut csv = Vec::new();
    traj.write_energy_csv(&mut csv)?;
    write_atomic(&energy_csv, &csv)?;
    for (step, field) in &traj.snapshots {
        let path = args.out.join(format!("snap_{step}.bin"));
        let tmp = args.out.join(format!("snap_{step}.bin.tmp"));
        spectral::write_snapshot(&tmp, field).map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::rename(&tmp, &path)?;
    }
    if args.plot_script {
        write_atomic(&args.out.join("plot.py"), super::PLOT_SCRIPT.as_bytes())?;
    }

    let max_increase =
        integrator::check_monotone(&traj).map_err(|e| CliError::Internal(e.to_string()))?;
    let slack = monotonicity_slack(traj.energies[0]);
    let monotone = max_increase <= slack;
    println!("steps={}", traj.steps());
    println!("energy_initial={:e}", traj.energies[0]);
    println!("energy_final={:e}", traj.energies[traj.energies.len() - 1]);
    println!("max_energy_increase={max_increase:e}");
    println!("slack={slack:e}");
    println!("monotone={monotone}");
    Ok(SimulateOutput {
        max_increase,
        slack,
        energy_csv,
        exit_code: i32::from(!monotone),
    })
}
