//! Energy-decreasing IMEX Runge-Kutta schemes for phase-field gradient flows.
//!
//! The crate has two halves that meet in the middle:
//!
//! * an algebraic side ([`tableau`], [`stability`], [`constructor`]) that
//!   represents coupled implicit/explicit Butcher tableau pairs, checks their
//!   order conditions, and evaluates the small-matrix certificates deciding
//!   whether a pair dissipates the free energy of a gradient flow for every
//!   step size;
//! * a PDE side ([`spectral`], [`models`], [`integrator`]) that realizes
//!   Allen-Cahn, Cahn-Hilliard and thin-film (MBE) flows on periodic grids
//!   with Fourier collocation and advances them with the certified schemes,
//!   tracking the discrete energy along the way.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! the aliases below fix `f64`, which is what the command-line tools use.

pub mod constructor;
pub mod integrator;
pub mod linalg;
pub mod models;
pub mod scalar;
pub mod spectral;
pub mod stability;
pub mod tableau;

pub use scalar::Real;

/// `f64` tableau pair.
pub type ButcherPair64 = tableau::ButcherPair<f64>;
/// `f64` padded tableau pair.
pub type SigmaPair64 = tableau::SigmaPair<f64>;
/// `f64` certificate matrices.
pub type CertificateMatrices64 = stability::CertificateMatrices<f64>;
/// `f64` stability report.
pub type StabilityReport64 = stability::StabilityReport<f64>;
/// `f64` third-order family specification.
pub type Rk3FamilySpec64 = constructor::Rk3FamilySpec<f64>;
/// `f64` periodic grid.
pub type PeriodicGrid64 = spectral::PeriodicGrid<f64>;
/// `f64` grid field.
pub type SpectralField64 = spectral::SpectralField<f64>;
/// `f64` model specification.
pub type ModelSpec64 = models::ModelSpec<f64>;
/// `f64` step plan.
pub type StepPlan64 = integrator::StepPlan<f64>;
/// `f64` trajectory.
pub type Trajectory64 = integrator::Trajectory<f64>;
