//! `phaserk construct`: build a third-order pair from a family parameter
//! file and report its certificate.

use std::fmt::Write as _;
use std::path::PathBuf;

use phaserk::constructor::{self, ConstructError, Rk3FamilySpec, ORDER_RESIDUAL_TOL};
use phaserk::stability::{self, StabilityReport};
use phaserk::tableau::{self, ButcherPair};

use crate::args::ConstructArgs;
use crate::error::CliError;
use crate::io_util::write_atomic;

pub struct ConstructOutput {
    pub pair: ButcherPair<f64>,
    pub report: StabilityReport<f64>,
    pub order3_residual: f64,
    pub tableau_path: PathBuf,
    pub report_path: PathBuf,
    pub exit_code: i32,
}

/// Parses `key = value` lines (`#` comments allowed) into a family spec; all
/// seven keys are required.
pub fn parse_spec_file(text: &str) -> Result<Rk3FamilySpec<f64>, CliError> {
    let mut seen: std::collections::BTreeMap<String, f64> = Default::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Parse(format!(
                "spec line {}: expected key = value, found {raw:?}",
                lineno + 1
            )));
        };
        let v: f64 = value.trim().parse().map_err(|_| {
            CliError::Parse(format!("spec line {}: bad number {:?}", lineno + 1, value.trim()))
        })?;
        seen.insert(key.trim().to_string(), v);
    }
    let fetch = |key: &str| -> Result<f64, CliError> {
        seen.get(key)
            .copied()
            .ok_or_else(|| CliError::Parse(format!("spec file is missing key {key:?}")))
    };
    Ok(Rk3FamilySpec {
        c2: fetch("c2")?,
        c3: fetch("c3")?,
        c4: fetch("c4")?,
        zeta: fetch("zeta")?,
        zeta_hat: fetch("zeta_hat")?,
        free_a: fetch("free_a")?,
        free_ahat: fetch("free_ahat")?,
    })
}

pub fn run(args: &ConstructArgs) -> Result<ConstructOutput, CliError> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec = parse_spec_file(&text)?;
    let pair = constructor::construct_rk3(&spec).map_err(|e| match e {
        ConstructError::DegenerateNodes(_) | ConstructError::InvalidResult(_) => {
            CliError::Construction(e.to_string())
        }
        other => CliError::Internal(other.to_string()),
    })?;
    let order3_residual = pair.verify_order(3).map_err(|e| CliError::Internal(e.to_string()))?;
    let report = stability::certify_unconditional(&pair, args.lipschitz)
        .map_err(|e| CliError::Internal(e.to_string()))?;

    std::fs::create_dir_all(&args.out)?;
    let tableau_path = args.out.join("tableau.txt");
    write_atomic(&tableau_path, tableau::render(&pair).as_bytes())?;
    let report_path = args.out.join("report.txt");
    let mut body = format!("{report}\n");
    for (k, v) in report.key_values() {
        let _ = writeln!(body, "{k}={v}");
    }
    let _ = writeln!(body, "order3_residual={order3_residual:e}");
    write_atomic(&report_path, body.as_bytes())?;

    println!("tableau written to {}", tableau_path.display());
    println!("order3_residual={order3_residual:e}");
    println!("verdict={}", report.verdict().replace(' ', "_"));
    let exit_code = i32::from(order3_residual > ORDER_RESIDUAL_TOL);
    Ok(ConstructOutput { pair, report, order3_residual, tableau_path, report_path, exit_code })
}
