//! Time stepping: one IMEX stage loop and whole trajectories.
//!
//! A step follows the stage system of the coupled pair: starting from
//! `v_0 = u_n`, stage `i` solves
//! `(I - tau a_ii G D_s) v_i = u_n + tau [ sum_{j<i} a_ij (G D_s) v_j
//!   + sum_{j<=i} ahat_ij N(v_{j-1}) ]`
//! in Fourier space, where the explicit term
//! `N(v) = G f(v) + alpha (G D) v - beta G v` carries the nonlinearity and
//! the stabilization compensation. The stiffly accurate update is the last
//! stage. Two transforms move each stage between physical space (pointwise
//! nonlinearity) and mode space (everything linear).

use std::io::Write;

use num_complex::Complex;
use thiserror::Error;

use crate::models::{self, ModelError, ModelSpec, SplitSymbols};
use crate::scalar::{cast, Real};
use crate::spectral::{
    spectrum_from_parts, stage_solve_spectrum, PeriodicGrid, SpectralError, SpectralField,
    TransformPlan,
};
use crate::tableau::ButcherPair;

/// Any stage value beyond this magnitude aborts the step as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e10;

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("invalid step plan: {0}")]
    InvalidPlan(String),
    #[error("solution diverged at stage {stage}{}", step.map(|s| format!(" of step {s}")).unwrap_or_default())]
    Divergence { stage: usize, step: Option<usize> },
    #[error("horizon {t_end} is shorter than one step {tau}")]
    HorizonTooShort { t_end: f64, tau: f64 },
    #[error("trajectory has fewer than two energy samples")]
    TooFewSamples,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Everything one step needs, with the grid symbols and transform plan
/// cached; build once, step many times.
#[derive(Debug, Clone)]
pub struct StepPlan<T> {
    pair: ButcherPair<T>,
    spec: ModelSpec<T>,
    grid: PeriodicGrid<T>,
    tau: T,
    symbols: SplitSymbols<T>,
    plan: TransformPlan<T>,
    dealias: bool,
    nonlinearity_enabled: bool,
}

impl<T: Real> StepPlan<T> {
    pub fn new(
        pair: ButcherPair<T>,
        spec: ModelSpec<T>,
        grid: PeriodicGrid<T>,
        tau: T,
    ) -> Result<Self, IntegratorError> {
        if let Some(d) = pair.validate().into_iter().next() {
            return Err(IntegratorError::InvalidPlan(format!("tableau invalid: {d}")));
        }
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(IntegratorError::InvalidPlan("step size must be positive".into()));
        }
        let symbols = models::split_symbols(&spec, grid);
        let plan = TransformPlan::new(grid);
        Ok(Self {
            pair,
            spec,
            grid,
            tau,
            symbols,
            plan,
            dealias: false,
            nonlinearity_enabled: true,
        })
    }

    /// Applies the 2/3 rule to the nonlinear term's spectrum each stage.
    pub fn with_dealiasing(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    /// Diagnostic mode that drops the nonlinear term, leaving the pure
    /// linear flow; used by the consistency checks against exact
    /// single-mode solutions.
    pub fn without_nonlinearity(mut self) -> Self {
        self.nonlinearity_enabled = false;
        self
    }

    pub fn pair(&self) -> &ButcherPair<T> {
        &self.pair
    }

    pub fn spec(&self) -> &ModelSpec<T> {
        &self.spec
    }

    pub fn grid(&self) -> &PeriodicGrid<T> {
        &self.grid
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// Spectrum of the explicit term `N(v) = G f(v) + alpha (G D) v
    /// - beta G v` for one stage value given in both representations.
    fn explicit_term(
        &self,
        v_phys: &SpectralField<T>,
        v_hat: &[Complex<T>],
    ) -> Result<Vec<Complex<T>>, IntegratorError> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); v_hat.len()];
        if self.nonlinearity_enabled {
            let f_v = models::nonlinearity(&self.spec, v_phys)?;
            let mut f_hat = self.plan.transform(&f_v)?;
            if self.dealias {
                f_hat.dealias_two_thirds();
            }
            for ((o, c), &g) in out
                .iter_mut()
                .zip(f_hat.coeffs())
                .zip(self.symbols.g.multipliers())
            {
                *o = Complex::new(c.re * g, c.im * g);
            }
        }
        let alpha = self.spec.alpha;
        let beta = self.spec.beta;
        for (i, o) in out.iter_mut().enumerate() {
            let gd = self.symbols.gd.multipliers()[i];
            let g = self.symbols.g.multipliers()[i];
            let w = alpha * gd - beta * g;
            let v = v_hat[i];
            *o = *o + Complex::new(v.re * w, v.im * w);
        }
        Ok(out)
    }

    fn check_finite(&self, v: &SpectralField<T>, stage: usize) -> Result<(), IntegratorError> {
        let limit = cast::<T>(DIVERGENCE_LIMIT);
        for &x in v.values() {
            if !x.is_finite() || x.abs() > limit {
                return Err(IntegratorError::Divergence { stage, step: None });
            }
        }
        Ok(())
    }
}

/// Advances one step; the input is untouched and the stiffly accurate last
/// stage is returned.
pub fn imex_step<T: Real>(
    plan: &StepPlan<T>,
    u_n: &SpectralField<T>,
) -> Result<SpectralField<T>, IntegratorError> {
    if u_n.grid() != &plan.grid {
        return Err(IntegratorError::Spectral(SpectralError::GridMismatch));
    }
    let s = plan.pair.stages();
    let tau = plan.tau;
    let n_modes = plan.grid.points();
    let u_hat = plan.plan.transform(u_n)?;
    let mut stage_hats: Vec<Vec<Complex<T>>> = Vec::with_capacity(s + 1);
    stage_hats.push(u_hat.coeffs().to_vec());
    let mut explicit_hats: Vec<Vec<Complex<T>>> = Vec::with_capacity(s);
    let mut last_phys = u_n.clone();
    for i in 1..=s {
        explicit_hats.push(plan.explicit_term(&last_phys, &stage_hats[i - 1])?);
        let mut rhs = stage_hats[0].clone();
        for j in 1..i {
            let a_ij = plan.pair.a()[(i - 1, j - 1)];
            if a_ij == T::zero() {
                continue;
            }
            let w = tau * a_ij;
            let gds = plan.symbols.gds.multipliers();
            for k in 0..n_modes {
                let v = stage_hats[j][k];
                let m = w * gds[k];
                rhs[k] = rhs[k] + Complex::new(v.re * m, v.im * m);
            }
        }
        for j in 1..=i {
            let ahat_ij = plan.pair.a_hat()[(i - 1, j - 1)];
            if ahat_ij == T::zero() {
                continue;
            }
            let w = tau * ahat_ij;
            for k in 0..n_modes {
                let nv = explicit_hats[j - 1][k];
                rhs[k] = rhs[k] + Complex::new(nv.re * w, nv.im * w);
            }
        }
        let mut spectrum = spectrum_from_parts(plan.grid, rhs);
        stage_solve_spectrum(&plan.symbols.gds, plan.pair.a()[(i - 1, i - 1)], tau, &mut spectrum)?;
        last_phys = plan.plan.inverse_transform(&spectrum)?;
        plan.check_finite(&last_phys, i)?;
        stage_hats.push(spectrum.coeffs().to_vec());
    }
    Ok(last_phys)
}

/// Energies, masses, and optional snapshots along a run.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    /// `t_k = k tau`, starting at zero.
    pub times: Vec<T>,
    /// Discrete energy at each time, the initial state included.
    pub energies: Vec<T>,
    /// Field mean at each time.
    pub masses: Vec<T>,
    /// `(step, state)` pairs at the configured stride.
    pub snapshots: Vec<(usize, SpectralField<T>)>,
}

impl<T: Real> Trajectory<T> {
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    /// Writes the `step,time,energy,mass` table.
    pub fn write_energy_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,time,energy,mass")?;
        for (k, ((t, e), m)) in self
            .times
            .iter()
            .zip(&self.energies)
            .zip(&self.masses)
            .enumerate()
        {
            writeln!(w, "{k},{t:e},{e:e},{m:e}")?;
        }
        Ok(())
    }
}

/// Runs `ceil(t_end / tau)` steps from `u0`, recording the energy and mass
/// after every step; `snapshot_stride > 0` also stores every stride-th
/// state (and the final one).
pub fn run<T: Real>(
    plan: &StepPlan<T>,
    u0: &SpectralField<T>,
    t_end: T,
    snapshot_stride: usize,
) -> Result<Trajectory<T>, IntegratorError> {
    if t_end < plan.tau {
        return Err(IntegratorError::HorizonTooShort {
            t_end: t_end.to_f64().unwrap_or(f64::NAN),
            tau: plan.tau.to_f64().unwrap_or(f64::NAN),
        });
    }
    let steps = (t_end / plan.tau).ceil().to_usize().ok_or_else(|| {
        IntegratorError::InvalidPlan("step count does not fit in usize".into())
    })?;
    let mut u = u0.clone();
    let mut traj = Trajectory {
        times: vec![T::zero()],
        energies: vec![models::energy(&plan.spec, &u)?],
        masses: vec![u.mean()],
        snapshots: Vec::new(),
    };
    if snapshot_stride > 0 {
        traj.snapshots.push((0, u.clone()));
    }
    for step in 1..=steps {
        u = imex_step(plan, &u).map_err(|e| match e {
            IntegratorError::Divergence { stage, .. } => {
                IntegratorError::Divergence { stage, step: Some(step) }
            }
            other => other,
        })?;
        traj.times.push(plan.tau * T::from_usize(step).expect("step fits scalar"));
        traj.energies.push(models::energy(&plan.spec, &u)?);
        traj.masses.push(u.mean());
        if snapshot_stride > 0 && (step % snapshot_stride == 0 || step == steps) {
            traj.snapshots.push((step, u.clone()));
        }
    }
    Ok(traj)
}

/// Largest single-step energy increase along the trajectory; dissipation
/// holds when this does not exceed the caller's round-off slack.
pub fn check_monotone<T: Real>(traj: &Trajectory<T>) -> Result<T, IntegratorError> {
    if traj.energies.len() < 2 {
        return Err(IntegratorError::TooFewSamples);
    }
    let mut worst = T::neg_infinity();
    for pair in traj.energies.windows(2) {
        worst = worst.max(pair[1] - pair[0]);
    }
    Ok(worst)
}
