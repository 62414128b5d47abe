//! The whole stack instantiates at f32 as well as f64; this exercises the
//! certificate path and a short stabilized run at single precision.

use phaserk::integrator::{self, StepPlan};
use phaserk::models::{ModelKind, ModelSpec};
use phaserk::spectral::{GridDim, PeriodicGrid, SpectralField};
use phaserk::stability;
use phaserk::tableau::{catalog, parse_tableau, render};

#[test]
fn f32_certificates_match_f64_to_single_precision() {
    let r32 = stability::certify_unconditional(&catalog::second_order::<f32>(), 2.0f32).unwrap();
    let r64 = stability::certify_unconditional(&catalog::second_order::<f64>(), 2.0f64).unwrap();
    assert!(r32.unconditional && r64.unconditional);
    assert!((f64::from(r32.lambda_q) - r64.lambda_q).abs() < 1e-5);
    assert!((f64::from(r32.lambda_h0) - r64.lambda_h0).abs() < 1e-5);
    assert!((f64::from(r32.alpha0.unwrap()) - r64.alpha0.unwrap()).abs() < 1e-4);
}

#[test]
fn f32_tableau_roundtrip_and_order() {
    let pair = catalog::third_order_b::<f32>();
    let reparsed = parse_tableau::<f32>(&render(&pair)).unwrap();
    assert_eq!(reparsed, pair);
    assert!(pair.verify_order(3).unwrap() <= 1e-5);
}

#[test]
fn f32_stabilized_run_decreases_energy() {
    let grid = PeriodicGrid::<f32>::with_default_length(GridDim::One, 64).unwrap();
    let spec = ModelSpec::new(ModelKind::AllenCahn, 0.2f32, 1.0)
        .unwrap()
        .with_stabilization(0.0, 1.0)
        .unwrap();
    let plan = StepPlan::new(catalog::first_order::<f32>(), spec, grid, 0.5f32).unwrap();
    let u0 = SpectralField::from_fn_1d(grid, |x: f32| 0.7 * x.cos()).unwrap();
    let traj = integrator::run(&plan, &u0, 25.0f32, 0).unwrap();
    let worst = integrator::check_monotone(&traj).unwrap();
    // single-precision round-off slack
    assert!(worst <= 1e-4 * (1.0 + traj.energies[0].abs()), "increase {worst:e}");
    assert!(*traj.energies.last().unwrap() < traj.energies[0]);
}
