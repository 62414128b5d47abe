//! Energy-dissipation certificates for tableau pairs.
//!
//! A pair dissipates the free energy of the split gradient flow for every
//! step size when three stage-space matrices are positive-definite (in the
//! symmetrizer sense): `H0 = Ahat^-1 El`, `H1(beta) = beta Q - (L/2) I`, and
//! `H2(alpha) = alpha Q + Ahat^-1 A El - E/2`, with
//! `Q = (Ahat^-1 A - I) El + I`. `Q` and `H0` are intrinsic to the pair;
//! once both are positive-definite, `alpha` and `beta` can always be raised
//! past thresholds `alpha0` and `beta0` that make the other two follow.
//! Model-specific step-size conditions for the Allen-Cahn and Cahn-Hilliard
//! flows come out of the same eigenvalues.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, LinalgError, Mat};
use crate::scalar::{cast, Real};
use crate::tableau::ButcherPair;

/// Positive-definiteness margin: a symmetrizer eigenvalue above this counts
/// as positive, one in `(-POSITIVITY_TOL, POSITIVITY_TOL]` as marginal.
/// Sized for coefficient tables printed with six decimals.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum StabilityError {
    #[error("explicit matrix is singular: {0}")]
    SingularExplicit(LinalgError),
    #[error("eigenvalue computation failed: {0}")]
    Eigen(LinalgError),
    #[error("no certificate: lambda_min(Q) = {lambda_q} is not positive")]
    NoCertificate { lambda_q: f64 },
}

/// The assembled certificate matrices of a pair.
#[derive(Debug, Clone)]
pub struct CertificateMatrices<T> {
    /// Lower-triangular all-ones matrix.
    pub e_l: Mat<T>,
    /// All-ones matrix.
    pub e: Mat<T>,
    /// Identity.
    pub id: Mat<T>,
    /// `(Ahat^-1 A - I) El + I`.
    pub q: Mat<T>,
    /// `Ahat^-1 El`.
    pub h0: Mat<T>,
    /// `Ahat^-1 A El - E/2`, the alpha-free part of `H2`.
    pub h2_0: Mat<T>,
}

impl<T: Real> CertificateMatrices<T> {
    /// `H2(alpha) = alpha Q + H2(0)`.
    pub fn h2_at(&self, alpha: T) -> Mat<T> {
        self.q.scale(alpha).add(&self.h2_0)
    }
}

/// Certificate eigenvalues, thresholds, and the verdict for one pair.
#[derive(Debug, Clone)]
pub struct StabilityReport<T> {
    pub lambda_q: T,
    pub lambda_h0: T,
    pub lambda_h2_0: T,
    /// Stabilization threshold `max(0, -lambda_h2_0 / lambda_q)`; absent
    /// without a certificate.
    pub alpha0: Option<T>,
    /// `L / (2 lambda_q)`; absent without a certificate.
    pub beta0: Option<T>,
    /// The Lipschitz constant `beta0` was computed for.
    pub lipschitz: T,
    /// True iff both `Q` and `H0` are positive-definite.
    pub unconditional: bool,
    pub diagnostics: String,
}

impl<T: Real> StabilityReport<T> {
    pub fn verdict(&self) -> &'static str {
        if self.unconditional {
            "CERTIFIED"
        } else {
            "NOT CERTIFIED"
        }
    }

    /// Machine-readable `key=value` lines.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let mut kv = vec![
            ("lambda_Q", format!("{:e}", self.lambda_q)),
            ("lambda_H0", format!("{:e}", self.lambda_h0)),
            ("lambda_H2_0", format!("{:e}", self.lambda_h2_0)),
            ("L", format!("{:e}", self.lipschitz)),
        ];
        if let Some(a0) = self.alpha0 {
            kv.push(("alpha0", format!("{a0:e}")));
        }
        if let Some(b0) = self.beta0 {
            kv.push(("beta0", format!("{b0:e}")));
        }
        kv.push(("verdict", self.verdict().replace(' ', "_")));
        kv
    }
}

impl<T: Real> fmt::Display for StabilityReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda_min(sym Q)     = {:.9}", self.lambda_q.to_f64().unwrap_or(f64::NAN))?;
        writeln!(f, "lambda_min(sym H0)    = {:.9}", self.lambda_h0.to_f64().unwrap_or(f64::NAN))?;
        writeln!(
            f,
            "lambda_min(sym H2(0)) = {:.9}",
            self.lambda_h2_0.to_f64().unwrap_or(f64::NAN)
        )?;
        match (self.alpha0, self.beta0) {
            (Some(a0), Some(b0)) => {
                writeln!(f, "alpha0 = {:.9}", a0.to_f64().unwrap_or(f64::NAN))?;
                writeln!(
                    f,
                    "beta0  = {:.9}  (L = {})",
                    b0.to_f64().unwrap_or(f64::NAN),
                    self.lipschitz
                )?;
            }
            _ => writeln!(f, "no stabilization thresholds (Q not positive-definite)")?,
        }
        if !self.diagnostics.is_empty() {
            writeln!(f, "{}", self.diagnostics)?;
        }
        write!(f, "verdict: {}", self.verdict())
    }
}

/// Assembles the certificate matrices, inverting the explicit matrix by
/// forward substitution (it is lower-triangular by construction).
pub fn build_certificates<T: Real>(
    pair: &ButcherPair<T>,
) -> Result<CertificateMatrices<T>, StabilityError> {
    let s = pair.stages();
    let e_l = Mat::lower_ones(s);
    let e = Mat::ones(s);
    let id = Mat::identity(s);
    let b_hat_inv = linalg::invert_lower(pair.a_hat()).map_err(StabilityError::SingularExplicit)?;
    let ba = b_hat_inv.matmul(pair.a());
    let q = ba.sub(&id).matmul(&e_l).add(&id);
    let h0 = b_hat_inv.matmul(&e_l);
    let h2_0 = ba.matmul(&e_l).sub(&e.scale(cast::<T>(0.5)));
    Ok(CertificateMatrices { e_l, e, id, q, h0, h2_0 })
}

/// Smallest eigenvalue of `(M + M^T)/2`.
pub fn min_eig_symmetric_part<T: Real>(m: &Mat<T>) -> Result<T, StabilityError> {
    let eig = linalg::sym_eigenvalues(&m.symmetrize()).map_err(StabilityError::Eigen)?;
    Ok(eig[0])
}

/// Evaluates the unconditional certificate of a pair for Lipschitz constant
/// `lipschitz`, reporting the three eigenvalues, the thresholds, and the
/// verdict.
pub fn certify_unconditional<T: Real>(
    pair: &ButcherPair<T>,
    lipschitz: T,
) -> Result<StabilityReport<T>, StabilityError> {
    let certs = build_certificates(pair)?;
    let lambda_q = min_eig_symmetric_part(&certs.q)?;
    let lambda_h0 = min_eig_symmetric_part(&certs.h0)?;
    let lambda_h2_0 = min_eig_symmetric_part(&certs.h2_0)?;
    let tol = cast::<T>(POSITIVITY_TOL);
    let q_pos = lambda_q > tol;
    let h0_pos = lambda_h0 > tol;
    let unconditional = q_pos && h0_pos;
    let mut diagnostics = String::new();
    for (name, lambda) in [("Q", lambda_q), ("H0", lambda_h0), ("H2(0)", lambda_h2_0)] {
        if lambda.abs() <= tol {
            diagnostics.push_str(&format!(
                "marginal: lambda_min(sym {name}) = {lambda:e} within +-{POSITIVITY_TOL:e}\n"
            ));
        }
    }
    if diagnostics.ends_with('\n') {
        diagnostics.pop();
    }
    let (alpha0, beta0) = if q_pos {
        (
            Some(T::zero().max(-lambda_h2_0 / lambda_q)),
            Some(lipschitz / (cast::<T>(2.0) * lambda_q)),
        )
    } else {
        (None, None)
    };
    Ok(StabilityReport {
        lambda_q,
        lambda_h0,
        lambda_h2_0,
        alpha0,
        beta0,
        lipschitz,
        unconditional,
        diagnostics,
    })
}

/// Stabilization threshold `alpha0 = max(0, -lambda_min(sym H2(0)) /
/// lambda_min(sym Q))`; errors when `Q` has no positive certificate.
pub fn required_alpha<T: Real>(pair: &ButcherPair<T>) -> Result<T, StabilityError> {
    let certs = build_certificates(pair)?;
    let lambda_q = min_eig_symmetric_part(&certs.q)?;
    if lambda_q <= cast::<T>(POSITIVITY_TOL) {
        return Err(StabilityError::NoCertificate {
            lambda_q: lambda_q.to_f64().unwrap_or(f64::NAN),
        });
    }
    let lambda_h2_0 = min_eig_symmetric_part(&certs.h2_0)?;
    Ok(T::zero().max(-lambda_h2_0 / lambda_q))
}

/// Step condition for the Allen-Cahn flow:
/// `lambda_H0 / tau + beta lambda_Q >= L/2` and
/// `alpha lambda_Q >= -lambda_H2(0)`.
pub fn ac_step_condition<T: Real>(
    pair: &ButcherPair<T>,
    alpha: T,
    beta: T,
    lipschitz: T,
    tau: T,
) -> Result<bool, StabilityError> {
    assert!(tau > T::zero(), "step size must be positive");
    let certs = build_certificates(pair)?;
    let lambda_q = min_eig_symmetric_part(&certs.q)?;
    let lambda_h0 = min_eig_symmetric_part(&certs.h0)?;
    let lambda_h2_0 = min_eig_symmetric_part(&certs.h2_0)?;
    let half_l = lipschitz / cast::<T>(2.0);
    Ok(lambda_h0 / tau + beta * lambda_q >= half_l && alpha * lambda_q >= -lambda_h2_0)
}

/// Step condition for the Cahn-Hilliard flow:
/// `(4 eps^2 / tau) lambda_H0 lambda_H2(alpha) + beta lambda_Q >= L/2`,
/// with `lambda_H2(alpha)` recomputed at the supplied `alpha` rather than
/// bounded below by `alpha lambda_Q + lambda_H2(0)`.
pub fn ch_step_condition<T: Real>(
    pair: &ButcherPair<T>,
    alpha: T,
    beta: T,
    lipschitz: T,
    tau: T,
    epsilon: T,
) -> Result<bool, StabilityError> {
    assert!(tau > T::zero(), "step size must be positive");
    assert!(epsilon > T::zero(), "interface width must be positive");
    let certs = build_certificates(pair)?;
    let lambda_q = min_eig_symmetric_part(&certs.q)?;
    let lambda_h0 = min_eig_symmetric_part(&certs.h0)?;
    let lambda_h2_alpha = min_eig_symmetric_part(&certs.h2_at(alpha))?;
    let half_l = lipschitz / cast::<T>(2.0);
    let four = cast::<T>(4.0);
    Ok(four * epsilon * epsilon / tau * lambda_h0 * lambda_h2_alpha + beta * lambda_q >= half_l)
}
