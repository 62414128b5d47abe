//! `phaserk converge`: self-convergence order against a fine-step
//! reference run of the same scheme.

use std::fmt::Write as _;
use std::path::PathBuf;

use phaserk::integrator::{self, StepPlan};
use phaserk::spectral::{norm_h1, norm_l2, SpectralField};
use phaserk::stability;

use crate::args::ConvergeArgs;
use crate::error::CliError;
use crate::init::cosine_initial_field;
use crate::io_util::write_atomic;

/// The reference step is the smallest requested step divided by this.
pub const REFERENCE_REFINEMENT: f64 = 16.0;

pub struct ConvergeOutput {
    /// `(tau, h1_error, l2_error)`, largest step first.
    pub rows: Vec<(f64, f64, f64)>,
    pub fitted_order: f64,
    pub csv: PathBuf,
    pub exit_code: i32,
}

pub fn run(args: &ConvergeArgs) -> Result<ConvergeOutput, CliError> {
    run_with_refinement(args, REFERENCE_REFINEMENT)
}

/// [`run`] with an explicit refinement factor for the reference step;
/// exposed so the protocol's self-consistency (insensitivity to the
/// reference resolution) can be checked directly.
pub fn run_with_refinement(
    args: &ConvergeArgs,
    refinement: f64,
) -> Result<ConvergeOutput, CliError> {
    let pair = super::load_tableau(&args.tableau)?;
    let lipschitz = super::model_lipschitz(&args.model)?;
    let report = stability::certify_unconditional(&pair, lipschitz)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let spec = super::build_model_spec(&args.model, &report)?;
    let grid = super::build_grid(&args.model)?;

    let mut taus = args.taus.clone();
    if taus.len() < 3 {
        return Err(CliError::Usage("--taus needs at least three step sizes".into()));
    }
    taus.sort_by(|a, b| b.partial_cmp(a).expect("finite taus"));
    taus.dedup();
    if taus.len() < 3 {
        return Err(CliError::Usage("--taus needs at least three distinct step sizes".into()));
    }
    for &tau in &taus {
        if !(tau > 0.0) {
            return Err(CliError::Usage(format!("step size {tau} is not positive")));
        }
        let ratio = args.tend / tau;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.round().max(1.0) {
            return Err(CliError::Usage(format!(
                "step size {tau} does not divide the horizon {}",
                args.tend
            )));
        }
    }

    let u0 = cosine_initial_field(grid);
    let step_to = |tau: f64, u0: &SpectralField<f64>| -> Result<SpectralField<f64>, CliError> {
        let plan = StepPlan::new(pair.clone(), spec, grid, tau)
            .map_err(|e| CliError::Usage(e.to_string()))?
            .with_dealiasing(args.model.dealias);
        let steps = (args.tend / tau).round() as usize;
        let mut u = u0.clone();
        for step in 1..=steps {
            u = integrator::imex_step(&plan, &u).map_err(|e| match e {
                integrator::IntegratorError::Divergence { stage, .. } => {
                    CliError::Divergence { step, stage }
                }
                other => CliError::Internal(other.to_string()),
            })?;
        }
        Ok(u)
    };

    let tau_ref = taus[taus.len() - 1] / refinement;
    let reference = step_to(tau_ref, &u0)?;
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let u = step_to(tau, &u0)?;
        let diff = u.sub(&reference).map_err(|e| CliError::Internal(e.to_string()))?;
        rows.push((tau, norm_h1(&diff), norm_l2(&diff)));
    }

    let fitted_order = fit_order(&rows);

    std::fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("convergence.csv");
    let mut csv = String::from("tau,h1_error,l2_error\n");
    for (tau, h1, l2) in &rows {
        let _ = writeln!(csv, "{tau:e},{h1:e},{l2:e}");
    }
    let _ = writeln!(csv, "order={fitted_order:e}");
    write_atomic(&csv_path, csv.as_bytes())?;
    if args.plot_script {
        write_atomic(&args.out.join("plot.py"), super::PLOT_SCRIPT.as_bytes())?;
    }
    println!("order={fitted_order:e}");
    Ok(ConvergeOutput { rows, fitted_order, csv: csv_path, exit_code: 0 })
}

/// Least-squares slope of `log(h1_error)` against `log(tau)`.
fn fit_order(rows: &[(f64, f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|(t, h1, _)| (t.ln(), h1.ln())).collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
