//! `phaserk analyze`: certificate eigenvalues and thresholds of a tableau.

use phaserk::stability::{self, StabilityReport};

use crate::args::AnalyzeArgs;
use crate::error::CliError;

pub struct AnalyzeOutput {
    pub report: StabilityReport<f64>,
    pub exit_code: i32,
}

pub fn run(args: &AnalyzeArgs) -> Result<AnalyzeOutput, CliError> {
    let pair = super::load_tableau(&args.tableau)?;
    let report = stability::certify_unconditional(&pair, args.lipschitz)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    println!("{report}");
    for (k, v) in report.key_values() {
        println!("{k}={v}");
    }
    let exit_code = i32::from(!report.unconditional);
    Ok(AnalyzeOutput { report, exit_code })
}
