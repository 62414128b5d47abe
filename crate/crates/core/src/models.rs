//! The three phase-field flows: operators, nonlinearities, and energies.
//!
//! Each model is a gradient flow `u_t = G(D u - f(u))`-type system realized
//! through two Fourier symbols (`G` negative, `D` negative and dissipative)
//! and a nonlinearity `f` that is the variational derivative of the
//! potential part of the energy. The double-well derivative is truncated to
//! its tangent lines outside `[-M, M]`, which globally bounds `|f'|` by
//! `L = 3 M^2 - 1`; the thin-film (MBE) nonlinearity has a Hessian bounded
//! by one, so its constant is `L = 1` without truncation.
//!
//! Splitting with stabilization `(alpha, beta)` replaces `D` by
//! `D_s = -(1 + alpha) D + beta I` implicitly and compensates explicitly,
//! leaving the flow unchanged while strengthening every stage solve.

use thiserror::Error;

use crate::scalar::{cast, Real};
use crate::spectral::{
    divergence, gradient, modal_measure, OperatorSymbol, PeriodicGrid, SpectralError,
    SpectralField, TransformPlan,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Equation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    AllenCahn,
    CahnHilliard,
    Mbe,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::AllenCahn => "ac",
            ModelKind::CahnHilliard => "ch",
            ModelKind::Mbe => "mbe",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.to_ascii_lowercase().as_str() {
            "ac" | "allen-cahn" => Ok(ModelKind::AllenCahn),
            "ch" | "cahn-hilliard" => Ok(ModelKind::CahnHilliard),
            "mbe" => Ok(ModelKind::Mbe),
            other => Err(ModelError::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Model parameters: equation, interface width, truncation bound, and the
/// splitting stabilization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec<T> {
    pub kind: ModelKind,
    pub epsilon: T,
    /// Truncation bound `M >= 1` for the double-well nonlinearity.
    pub cutoff: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> ModelSpec<T> {
    pub fn new(kind: ModelKind, epsilon: T, cutoff: T) -> Result<Self, ModelError> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(ModelError::InvalidParameter("epsilon must be positive".into()));
        }
        if !(cutoff >= T::one()) || !cutoff.is_finite() {
            return Err(ModelError::InvalidParameter("cutoff must be at least 1".into()));
        }
        Ok(Self { kind, epsilon, cutoff, alpha: T::zero(), beta: T::zero() })
    }

    pub fn with_stabilization(mut self, alpha: T, beta: T) -> Result<Self, ModelError> {
        if alpha < T::zero() || beta < T::zero() || !alpha.is_finite() || !beta.is_finite() {
            return Err(ModelError::InvalidParameter(
                "stabilization parameters must be nonnegative".into(),
            ));
        }
        self.alpha = alpha;
        self.beta = beta;
        Ok(self)
    }

    /// Lipschitz constant of the model nonlinearity: `3 M^2 - 1` for the
    /// truncated double-well, `1` for the thin-film gradient potential.
    pub fn lipschitz(&self) -> T {
        match self.kind {
            ModelKind::AllenCahn | ModelKind::CahnHilliard => {
                cast::<T>(3.0) * self.cutoff * self.cutoff - T::one()
            }
            ModelKind::Mbe => T::one(),
        }
    }
}

/// Truncated double-well derivative: cubic inside `[-M, M]`, the tangent
/// lines of slope `3 M^2 - 1` outside, continuously differentiable at the
/// seams.
pub fn f_trunc<T: Real>(u: T, cutoff: T) -> T {
    let m = cutoff;
    let slope = cast::<T>(3.0) * m * m - T::one();
    let shift = cast::<T>(2.0) * m * m * m;
    if u > m {
        slope * u - shift
    } else if u < -m {
        slope * u + shift
    } else {
        (u * u - T::one()) * u
    }
}

/// Truncated double-well potential with `potential_trunc' = f_trunc`
/// exactly: quartic inside `[-M, M]`, quadratic continuation outside.
pub fn potential_trunc<T: Real>(u: T, cutoff: T) -> T {
    let m = cutoff;
    let quarter = cast::<T>(0.25);
    if u.abs() <= m {
        let w = u * u - T::one();
        quarter * w * w
    } else {
        let slope = cast::<T>(3.0) * m * m - T::one();
        let shift = cast::<T>(2.0) * m * m * m;
        let tail = quarter * (cast::<T>(3.0) * m * m * m * m + T::one());
        let half = cast::<T>(0.5);
        if u > m {
            half * slope * u * u - shift * u + tail
        } else {
            half * slope * u * u + shift * u + tail
        }
    }
}

/// The model nonlinearity as a field map: the truncated double-well
/// derivative pointwise for Allen-Cahn/Cahn-Hilliard, the variational
/// derivative of the thin-film potential `-(1/2) log(1 + |grad u|^2)` for
/// MBE.
pub fn nonlinearity<T: Real>(
    spec: &ModelSpec<T>,
    u: &SpectralField<T>,
) -> Result<SpectralField<T>, ModelError> {
    match spec.kind {
        ModelKind::AllenCahn | ModelKind::CahnHilliard => {
            Ok(u.map(|v| f_trunc(v, spec.cutoff)))
        }
        ModelKind::Mbe => {
            let grads = gradient(u)?;
            let mut norm2 = SpectralField::zeros(*u.grid());
            for g in &grads {
                let sq = g.map(|v| v * v);
                norm2 = norm2.add(&sq)?;
            }
            let scaled: Vec<SpectralField<T>> = grads
                .iter()
                .map(|g| {
                    let mut out = g.clone();
                    for (o, &w) in out.values_mut().iter_mut().zip(norm2.values()) {
                        *o = *o / (T::one() + w);
                    }
                    out
                })
                .collect();
            Ok(divergence(&scaled)?)
        }
    }
}

/// Per-mode symbol of the dissipative operator `D`.
fn d_symbol<T: Real>(spec: &ModelSpec<T>, k2: T) -> T {
    let e2 = spec.epsilon * spec.epsilon;
    match spec.kind {
        ModelKind::AllenCahn | ModelKind::CahnHilliard => -e2 * k2,
        ModelKind::Mbe => -e2 * k2 * k2,
    }
}

/// Per-mode symbol of the mobility operator `G`.
fn g_symbol<T: Real>(spec: &ModelSpec<T>, k2: T) -> T {
    match spec.kind {
        ModelKind::AllenCahn | ModelKind::Mbe => -T::one(),
        ModelKind::CahnHilliard => -k2,
    }
}

/// The three per-mode symbols the integrator needs: the implicit stage
/// operator `G D_s`, the product `G D`, and `G` alone.
#[derive(Debug, Clone)]
pub struct SplitSymbols<T> {
    /// `G D_s` with `D_s = -(1 + alpha) D + beta I`; nonpositive at every
    /// mode, which keeps every stage solve well-posed.
    pub gds: OperatorSymbol<T>,
    /// `G D`.
    pub gd: OperatorSymbol<T>,
    /// `G`.
    pub g: OperatorSymbol<T>,
}

/// Builds the split symbols of a model on a grid.
pub fn split_symbols<T: Real>(spec: &ModelSpec<T>, grid: PeriodicGrid<T>) -> SplitSymbols<T> {
    let s = *spec;
    let one_plus_alpha = T::one() + s.alpha;
    let gds = OperatorSymbol::from_k_squared(grid, move |k2| {
        g_symbol(&s, k2) * (-one_plus_alpha * d_symbol(&s, k2) + s.beta)
    });
    let gd = OperatorSymbol::from_k_squared(grid, move |k2| g_symbol(&s, k2) * d_symbol(&s, k2));
    let g = OperatorSymbol::from_k_squared(grid, move |k2| g_symbol(&s, k2));
    SplitSymbols { gds, gd, g }
}

/// Discrete free energy.
///
/// Allen-Cahn/Cahn-Hilliard: `(eps^2/2) |grad u|^2 + potential(u)` summed
/// over the grid, with the gradient part evaluated modally through the same
/// `D` symbol the integrator uses, so this is the exact Lyapunov function of
/// the discrete flow. MBE: `(eps^2/2) |lap u|^2 - (1/2) log(1 + |grad u|^2)`.
pub fn energy<T: Real>(spec: &ModelSpec<T>, u: &SpectralField<T>) -> Result<T, ModelError> {
    let grid = *u.grid();
    let plan = TransformPlan::new(grid);
    let spectrum = plan.transform(u)?;
    let k2s = grid.k_squared();
    let half = cast::<T>(0.5);
    // -(1/2) (u, D u) in modal form; D <= 0 makes this nonnegative.
    let mut quad = T::zero();
    for (c, &k2) in spectrum.coeffs().iter().zip(&k2s) {
        quad = quad - d_symbol(spec, k2) * c.norm_sqr();
    }
    quad = half * quad * modal_measure(&grid);
    let cell = grid.cell_measure();
    let nonlinear = match spec.kind {
        ModelKind::AllenCahn | ModelKind::CahnHilliard => {
            let sum = u
                .values()
                .iter()
                .fold(T::zero(), |acc, &v| acc + potential_trunc(v, spec.cutoff));
            sum * cell
        }
        ModelKind::Mbe => {
            let grads = gradient(u)?;
            let mut sum = T::zero();
            for i in 0..u.values().len() {
                let mut g2 = T::zero();
                for g in &grads {
                    let gv = g.values()[i];
                    g2 = g2 + gv * gv;
                }
                sum = sum - half * (T::one() + g2).ln();
            }
            sum * cell
        }
    };
    Ok(quad + nonlinear)
}

/// Kept for callers that track mass: the mean of the field, conserved by
/// the Cahn-Hilliard flow.
pub fn mass<T: Real>(u: &SpectralField<T>) -> T {
    u.mean()
}
