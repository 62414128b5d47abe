pub mod analyze;
pub mod construct;
pub mod converge;
pub mod simulate;

use std::path::Path;

use phaserk::models::{ModelKind, ModelSpec};
use phaserk::spectral::{GridDim, PeriodicGrid};
use phaserk::stability::StabilityReport;
use phaserk::tableau::{self, ButcherPair};

use crate::args::ModelArgs;
use crate::error::CliError;

pub(crate) fn load_tableau(path: &Path) -> Result<ButcherPair<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    tableau::parse_tableau(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub(crate) fn parse_model_kind(name: &str) -> Result<ModelKind, CliError> {
    name.parse::<ModelKind>().map_err(|e| CliError::Usage(e.to_string()))
}

/// Grid from the common flags: default 128 points in 1-D, 64 in 2-D, on
/// the default box.
pub(crate) fn build_grid(args: &ModelArgs) -> Result<PeriodicGrid<f64>, CliError> {
    let dim = GridDim::try_from(args.dim).map_err(|e| CliError::Usage(e.to_string()))?;
    let n = args.n.unwrap_or(match dim {
        GridDim::One => 128,
        GridDim::Two => 64,
    });
    PeriodicGrid::with_default_length(dim, n).map_err(|e| CliError::Usage(e.to_string()))
}

/// Model spec from the common flags, with absent stabilization weights
/// filled from the certificate thresholds (zero when no certificate
/// exists).
pub(crate) fn build_model_spec(
    args: &ModelArgs,
    report: &StabilityReport<f64>,
) -> Result<ModelSpec<f64>, CliError> {
    let kind = parse_model_kind(&args.model)?;
    let alpha = args.alpha.unwrap_or_else(|| report.alpha0.unwrap_or(0.0));
    let beta = args.beta.unwrap_or_else(|| report.beta0.unwrap_or(0.0));
    ModelSpec::new(kind, args.eps, args.cutoff)
        .and_then(|s| s.with_stabilization(alpha, beta))
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Lipschitz constant implied by the model flags.
pub(crate) fn model_lipschitz(args: &ModelArgs) -> Result<f64, CliError> {
    let kind = parse_model_kind(&args.model)?;
    Ok(ModelSpec::new(kind, args.eps, args.cutoff)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .lipschitz())
}

pub(crate) const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Plot helper for phaserk CSV outputs (energy.csv / convergence.csv)."""
import csv
import sys

import matplotlib.pyplot as plt


def main(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    header = rows[0]
    body = [r for r in rows[1:] if r and "=" not in r[0]]
    cols = {name: [float(r[i]) for r in body] for i, name in enumerate(header)}
    if "energy" in cols:
        plt.plot(cols["time"], cols["energy"], marker=".")
        plt.xlabel("time")
        plt.ylabel("energy")
    else:
        plt.loglog(cols["tau"], cols["h1_error"], marker="o")
        plt.xlabel("tau")
        plt.ylabel("H1 error")
    plt.grid(True, which="both", alpha=0.3)
    plt.tight_layout()
    plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "energy.csv")
"#;
