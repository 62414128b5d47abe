//! Construction of four-stage, third-order pairs by linearization.
//!
//! The third-order conditions couple the two tableaux bilinearly, but they
//! become a chain of linear solves once the abscissae and two scalar moments
//! are prescribed: first the weight vectors come out of Vandermonde-type
//! systems, then the remaining coefficient rows satisfy their row sums and
//! the four `b' M c = 1/6` conditions, leaving exactly one free entry per
//! matrix. Sampling the free parameters and certifying each candidate turns
//! the construction into a search for energy-dissipating schemes.

use thiserror::Error;

use crate::linalg::{self, LinalgError, Mat};
use crate::scalar::{cast, Real};
use crate::stability::{self, StabilityError, StabilityReport};
use crate::tableau::{catalog, ButcherPair, Diagnostic};

/// Order-3 residual accepted from a constructed pair.
pub const ORDER_RESIDUAL_TOL: f64 = 1e-10;

/// Pairwise abscissa separation below which the Vandermonde systems are
/// treated as degenerate.
pub const NODE_SEPARATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("degenerate abscissae: {0}")]
    DegenerateNodes(String),
    #[error("linear solve failed: {0}")]
    Singular(#[from] LinalgError),
    #[error("constructed pair violates an invariant: {0}")]
    InvalidResult(Diagnostic),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("empty range for parameter {0}")]
    EmptyRange(&'static str),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// Which weight vector a Vandermonde solve targets; the ARS structure pins a
/// different entry of each to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRole {
    /// First entry zero (the padded stage never enters implicitly).
    Implicit,
    /// Last entry zero (the update stage never enters explicitly).
    Explicit,
}

/// Parameters of the four-stage, third-order family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk3FamilySpec<T> {
    /// Interior abscissae; together with the fixed endpoints 0 and 1 they
    /// must be pairwise distinct.
    pub c2: T,
    pub c3: T,
    pub c4: T,
    /// Prescribed third moment of the implicit weights, `b' c^3`.
    pub zeta: T,
    /// Prescribed third moment of the explicit weights.
    pub zeta_hat: T,
    /// Residual free entry of the implicit matrix (`a_32` in the padded
    /// form).
    pub free_a: T,
    /// Residual free entry of the explicit matrix (`ahat_32` in the padded
    /// form).
    pub free_ahat: T,
}

impl<T: Real> Rk3FamilySpec<T> {
    /// Padded abscissae `(0, c2, c3, c4, 1)`.
    pub fn c_sigma(&self) -> [T; 5] {
        [T::zero(), self.c2, self.c3, self.c4, T::one()]
    }

    fn check_nodes(&self) -> Result<(), ConstructError> {
        let c = self.c_sigma();
        let scale = c.iter().fold(T::one(), |acc, &x| acc.max(x.abs()));
        let tol = cast::<T>(NODE_SEPARATION_TOL) * scale;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                if (c[i] - c[j]).abs() <= tol {
                    return Err(ConstructError::DegenerateNodes(format!(
                        "abscissae {} and {} coincide ({} vs {})",
                        i, j, c[i], c[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Family parameters recovering the bundled certificate-positive scheme
/// ([`catalog::third_order_stable`]): the printed abscissae and free entries,
/// with the moments recomputed from the printed weight rows.
pub fn reference_spec<T: Real>() -> Rk3FamilySpec<T> {
    let pair = catalog::third_order_stable::<T>();
    let c2 = cast::<T>(0.6);
    let c3 = cast::<T>(1.5);
    let c4 = cast::<T>(0.95);
    let q = [T::zero(), c2, c3, c4, T::one()];
    let cube = |x: T| x * x * x;
    let sp = pair.embed_sigma();
    let dot_cube = |w: &[T]| {
        w.iter().zip(&q).fold(T::zero(), |acc, (&wi, &qi)| acc + wi * cube(qi))
    };
    Rk3FamilySpec {
        c2,
        c3,
        c4,
        zeta: dot_cube(sp.b_sigma()),
        zeta_hat: dot_cube(sp.b_hat_sigma()),
        free_a: pair.a()[(2, 1)],
        free_ahat: pair.a_hat()[(2, 2)],
    }
}

/// Solves the four moment conditions `b'e = 1`, `b'c = 1/2`, `b'c^2 = 1/3`,
/// `b'c^3 = zeta` for the padded weight vector with the role-specific entry
/// pinned to zero.
pub fn solve_weights<T: Real>(
    c_sigma: &[T; 5],
    zeta: T,
    role: WeightRole,
) -> Result<Vec<T>, ConstructError> {
    let scale = c_sigma.iter().fold(T::one(), |acc, &x| acc.max(x.abs()));
    let tol = cast::<T>(NODE_SEPARATION_TOL) * scale;
    for i in 0..5 {
        for j in i + 1..5 {
            if (c_sigma[i] - c_sigma[j]).abs() <= tol {
                return Err(ConstructError::DegenerateNodes(format!(
                    "abscissae {i} and {j} coincide"
                )));
            }
        }
    }
    let active: [usize; 4] = match role {
        WeightRole::Implicit => [1, 2, 3, 4],
        WeightRole::Explicit => [0, 1, 2, 3],
    };
    let mut m = Mat::zeros(4, 4);
    for (col, &idx) in active.iter().enumerate() {
        let mut pw = T::one();
        for row in 0..4 {
            m[(row, col)] = pw;
            pw = pw * c_sigma[idx];
        }
    }
    let third = T::one() / cast::<T>(3.0);
    let rhs = [T::one(), cast::<T>(0.5), third, zeta];
    let x = linalg::solve(&m, &rhs).map_err(|e| match e {
        LinalgError::Singular { .. } => {
            ConstructError::DegenerateNodes("Vandermonde system singular".into())
        }
        other => ConstructError::Singular(other),
    })?;
    let mut b = vec![T::zero(); 5];
    for (col, &idx) in active.iter().enumerate() {
        b[idx] = x[col];
    }
    Ok(b)
}

/// Builds the four-stage pair determined by `spec`: row sums reproduce the
/// abscissae, the last rows are the solved weights, and the four bilinear
/// third-order conditions hold; the construction is deterministic.
pub fn construct_rk3<T: Real>(spec: &Rk3FamilySpec<T>) -> Result<ButcherPair<T>, ConstructError> {
    spec.check_nodes()?;
    let q = spec.c_sigma();
    let b = solve_weights(&q, spec.zeta, WeightRole::Implicit)?;
    let bh = solve_weights(&q, spec.zeta_hat, WeightRole::Explicit)?;
    let (c2, c3, c4) = (spec.c2, spec.c3, spec.c4);
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |acc, (&a, &x)| acc + a * x);
    let sixth = T::one() / cast::<T>(6.0);
    let b_dot_q = dot(&b, &q);
    let bh_dot_q = dot(&bh, &q);

    // Implicit rows in the padded frame: row 1 is fixed by its sum, rows 2
    // and 3 keep unknowns (A21, A31) after eliminating A22 and A33 through
    // the row sums and pinning A32 to the free parameter.
    let mut m = Mat::zeros(2, 2);
    let mut rhs = [T::zero(); 2];
    for (row, u) in [&b, &bh].into_iter().enumerate() {
        m[(row, 0)] = u[2] * (c2 - c3);
        m[(row, 1)] = u[3] * (c2 - c4);
        rhs[row] = sixth
            - u[1] * c2 * c2
            - u[2] * c3 * c3
            - u[3] * (spec.free_a * (c3 - c4) + c4 * c4)
            - u[4] * b_dot_q;
    }
    let sol = linalg::solve(&m, &rhs).map_err(|e| match e {
        LinalgError::Singular { .. } => ConstructError::DegenerateNodes(
            "bilinear system for the implicit rows is singular".into(),
        ),
        other => ConstructError::Singular(other),
    })?;
    let (a21, a31) = (sol[0], sol[1]);

    // Explicit rows: unknowns (Ah21, Ah31) with Ah32 pinned; the padded
    // abscissa 0 removes the first column from the bilinear conditions.
    let mut mh = Mat::zeros(2, 2);
    let mut rhs_h = [T::zero(); 2];
    for (row, u) in [&b, &bh].into_iter().enumerate() {
        mh[(row, 0)] = u[2] * c2;
        mh[(row, 1)] = u[3] * c2;
        rhs_h[row] = sixth - u[3] * spec.free_ahat * c3 - u[4] * bh_dot_q;
    }
    let sol_h = linalg::solve(&mh, &rhs_h).map_err(|e| match e {
        LinalgError::Singular { .. } => ConstructError::DegenerateNodes(
            "bilinear system for the explicit rows is singular".into(),
        ),
        other => ConstructError::Singular(other),
    })?;
    let (ah21, ah31) = (sol_h[0], sol_h[1]);

    let z = T::zero();
    // Reduced forms: drop the padded row/column (implicit) and the padded
    // row/last column (explicit).
    let a = Mat::from_rows(&[
        &[c2, z, z, z],
        &[a21, c3 - a21, z, z],
        &[a31, spec.free_a, c4 - a31 - spec.free_a, z],
        &[b[1], b[2], b[3], b[4]],
    ]);
    let a_hat = Mat::from_rows(&[
        &[c2, z, z, z],
        &[c3 - ah21, ah21, z, z],
        &[c4 - ah31 - spec.free_ahat, ah31, spec.free_ahat, z],
        &[bh[0], bh[1], bh[2], bh[3]],
    ]);
    let pair = ButcherPair::from_matrices(a, a_hat).expect("4x4 shapes by construction");
    if let Some(d) = pair.validate_with_tol(cast::<T>(1e-9)).into_iter().next() {
        return Err(ConstructError::InvalidResult(d));
    }
    Ok(pair)
}

/// Closed interval for one family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> ParamRange<T> {
    pub fn pinned(v: T) -> Self {
        Self { lo: v, hi: v }
    }

    fn at(&self, t: T) -> T {
        self.lo + (self.hi - self.lo) * t
    }
}

/// Search box over the seven family parameters.
#[derive(Debug, Clone, Copy)]
pub struct SearchRanges<T> {
    pub c2: ParamRange<T>,
    pub c3: ParamRange<T>,
    pub c4: ParamRange<T>,
    pub zeta: ParamRange<T>,
    pub zeta_hat: ParamRange<T>,
    pub free_a: ParamRange<T>,
    pub free_ahat: ParamRange<T>,
}

impl<T: Real> SearchRanges<T> {
    /// Degenerate box containing exactly one spec.
    pub fn pinned(spec: &Rk3FamilySpec<T>) -> Self {
        Self {
            c2: ParamRange::pinned(spec.c2),
            c3: ParamRange::pinned(spec.c3),
            c4: ParamRange::pinned(spec.c4),
            zeta: ParamRange::pinned(spec.zeta),
            zeta_hat: ParamRange::pinned(spec.zeta_hat),
            free_a: ParamRange::pinned(spec.free_a),
            free_ahat: ParamRange::pinned(spec.free_ahat),
        }
    }

    fn validate(&self) -> Result<(), ConstructError> {
        for (name, r) in [
            ("c2", &self.c2),
            ("c3", &self.c3),
            ("c4", &self.c4),
            ("zeta", &self.zeta),
            ("zeta_hat", &self.zeta_hat),
            ("free_a", &self.free_a),
            ("free_ahat", &self.free_ahat),
        ] {
            if r.lo > r.hi {
                return Err(ConstructError::EmptyRange(name));
            }
        }
        Ok(())
    }

    fn spec_at(&self, point: &[T; 7]) -> Rk3FamilySpec<T> {
        Rk3FamilySpec {
            c2: self.c2.at(point[0]),
            c3: self.c3.at(point[1]),
            c4: self.c4.at(point[2]),
            zeta: self.zeta.at(point[3]),
            zeta_hat: self.zeta_hat.at(point[4]),
            free_a: self.free_a.at(point[5]),
            free_ahat: self.free_ahat.at(point[6]),
        }
    }
}

/// One search hit: the spec, the constructed pair, its certificate report,
/// and the ranking score `min(lambda_Q, lambda_H0)`.
#[derive(Debug, Clone)]
pub struct SearchCandidate<T> {
    pub spec: Rk3FamilySpec<T>,
    pub pair: ButcherPair<T>,
    pub report: StabilityReport<T>,
    pub score: T,
}

/// Radical-inverse (Halton) coordinate, base `base`, index `i` starting at 1.
fn halton<T: Real>(mut i: usize, base: usize) -> T {
    let b = T::from_usize(base).expect("small base");
    let mut f = T::one() / b;
    let mut r = T::zero();
    while i > 0 {
        r = r + f * T::from_usize(i % base).expect("digit");
        i /= base;
        f = f / b;
    }
    r
}

/// Samples `samples` specs from `ranges` on a low-discrepancy sequence,
/// constructs and certifies each, and returns the candidates that pass the
/// third-order residual check, best certificate first. Candidates whose
/// construction fails (degenerate nodes, invariant violations) are skipped;
/// an empty result is legal.
pub fn search_energy_stable_rk3<T: Real>(
    ranges: &SearchRanges<T>,
    samples: usize,
    lipschitz: T,
) -> Result<Vec<SearchCandidate<T>>, ConstructError> {
    if samples == 0 {
        return Err(ConstructError::NoSamples);
    }
    ranges.validate()?;
    const BASES: [usize; 7] = [2, 3, 5, 7, 11, 13, 17];
    let half = cast::<T>(0.5);
    let mut out = Vec::new();
    for i in 0..samples {
        let point: [T; 7] = if samples == 1 {
            [half; 7]
        } else {
            std::array::from_fn(|d| halton(i + 1, BASES[d]))
        };
        let spec = ranges.spec_at(&point);
        let Ok(pair) = construct_rk3(&spec) else { continue };
        let residual = pair.verify_order(3).expect("order 3 is supported");
        if residual > cast::<T>(ORDER_RESIDUAL_TOL) {
            continue;
        }
        let report = stability::certify_unconditional(&pair, lipschitz)?;
        let score = report.lambda_q.min(report.lambda_h0);
        out.push(SearchCandidate { spec, pair, report, score });
    }
    // Stable sort keeps the sampling order among ties, so results are
    // deterministic for a fixed grid.
    out.sort_by(|a, b| {
        (b.score, b.report.lambda_h2_0)
            .partial_cmp(&(a.score, a.report.lambda_h2_0))
            .expect("scores are finite")
    });
    Ok(out)
}
