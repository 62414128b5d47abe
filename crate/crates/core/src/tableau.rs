//! Coupled implicit/explicit Runge-Kutta tableau pairs.
//!
//! The canonical in-memory form is the reduced `s x s` pair `(A, Ahat)`: a
//! diagonally implicit matrix `A` and an explicit matrix `Ahat` whose entry
//! `ahat_ij` weights the nonlinearity evaluated at stage `j-1`, so its
//! diagonal is populated. Both tableaux share the abscissae
//! `c_i = sum_j a_ij = sum_j ahat_ij`, the implicit first stage is the step
//! start (ARS structure), and the weight vectors equal the last rows (stiff
//! accuracy), so the final stage is the step update.
//!
//! The padded `(s+1) x (s+1)` sigma form, with an explicit zeroth stage
//! prepended, is what the order conditions are naturally written in; it is
//! derived on demand by [`ButcherPair::embed_sigma`].

use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::Mat;
use crate::scalar::{cast, recip_usize, Real};

pub mod catalog;

/// Default tolerance on `|sum_j a_ij - c_i|` and `|sum_j ahat_ij - c_i|`.
///
/// Wide enough to accept coefficient tables printed to six decimal places,
/// where a row of a handful of entries can miss its abscissa by a few 1e-6.
pub const ROW_SUM_TOL: f64 = 1e-5;

/// Tolerance for structural identities on exactly representable tableaux.
pub const STRICT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum TableauError {
    #[error("line {line}, entry {col}: malformed number {text:?}")]
    MalformedNumber { line: usize, col: usize, text: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    WrongRowLength { line: usize, expected: usize, found: usize },
    #[error("line {line}: stage count must be a positive integer, found {text:?}")]
    BadStageCount { line: usize, text: String },
    #[error("file ends before all {expected} tableau rows are given")]
    TruncatedFile { expected: usize },
    #[error("trailing content at line {line}")]
    TrailingContent { line: usize },
    #[error("invalid tableau: {0}")]
    Invalid(Diagnostic),
    #[error("order {0} is unsupported (order conditions are implemented for 1..=3)")]
    UnsupportedOrder(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A single validation finding; an empty diagnostic list means a valid pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    NotLowerTriangular { matrix: &'static str, row: usize, col: usize },
    RowSumMismatch { matrix: &'static str, row: usize, sum: f64, abscissa: f64 },
    NotStifflyAccurate { matrix: &'static str, col: usize },
    ZeroExplicitDiagonal { stage: usize },
    NegativeImplicitDiagonal { stage: usize, value: f64 },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::NotLowerTriangular { matrix, row, col } => {
                write!(f, "{matrix} is not lower-triangular at row {row}, column {col}")
            }
            Diagnostic::RowSumMismatch { matrix, row, sum, abscissa } => write!(
                f,
                "row-sum mismatch at row {row}: {matrix} row sums to {sum} but the abscissa is {abscissa}"
            ),
            Diagnostic::NotStifflyAccurate { matrix, col } => {
                write!(f, "not stiffly accurate: weight {col} differs from the last row of {matrix}")
            }
            Diagnostic::ZeroExplicitDiagonal { stage } => {
                write!(f, "explicit diagonal zero at stage {stage}")
            }
            Diagnostic::NegativeImplicitDiagonal { stage, value } => {
                write!(f, "implicit diagonal negative at stage {stage}: {value}")
            }
        }
    }
}

/// The reduced implicit/explicit tableau pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherPair<T> {
    s: usize,
    a: Mat<T>,
    a_hat: Mat<T>,
    b: Vec<T>,
    b_hat: Vec<T>,
    c: Vec<T>,
}

impl<T: Real> ButcherPair<T> {
    /// Builds a pair from the two coefficient matrices, deriving the weights
    /// from the last rows (stiff accuracy) and the abscissae from the
    /// implicit row sums. No validation is performed; call [`Self::validate`].
    pub fn from_matrices(a: Mat<T>, a_hat: Mat<T>) -> Result<Self, TableauError> {
        if !a.is_square() || !a_hat.is_square() || a.rows() != a_hat.rows() || a.rows() == 0 {
            return Err(TableauError::Dimension(format!(
                "expected two equal square matrices, got {}x{} and {}x{}",
                a.rows(),
                a.cols(),
                a_hat.rows(),
                a_hat.cols()
            )));
        }
        let s = a.rows();
        let b = a.row(s - 1).to_vec();
        let b_hat = a_hat.row(s - 1).to_vec();
        let c = (0..s).map(|i| a.row_sum(i)).collect();
        Ok(Self { s, a, a_hat, b, b_hat, c })
    }

    /// Builds a pair with every field supplied explicitly. Intended for
    /// exercising [`Self::validate`] on deliberately broken inputs.
    pub fn from_parts(
        a: Mat<T>,
        a_hat: Mat<T>,
        b: Vec<T>,
        b_hat: Vec<T>,
        c: Vec<T>,
    ) -> Result<Self, TableauError> {
        if !a.is_square() || !a_hat.is_square() || a.rows() != a_hat.rows() || a.rows() == 0 {
            return Err(TableauError::Dimension("matrix shapes disagree".into()));
        }
        let s = a.rows();
        if b.len() != s || b_hat.len() != s || c.len() != s {
            return Err(TableauError::Dimension("vector lengths disagree with stage count".into()));
        }
        Ok(Self { s, a, a_hat, b, b_hat, c })
    }

    pub fn stages(&self) -> usize {
        self.s
    }

    pub fn a(&self) -> &Mat<T> {
        &self.a
    }

    pub fn a_hat(&self) -> &Mat<T> {
        &self.a_hat
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn b_hat(&self) -> &[T] {
        &self.b_hat
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    /// Checks every structural invariant with the default row-sum tolerance.
    pub fn validate(&self) -> Vec<Diagnostic> {
        self.validate_with_tol(cast(ROW_SUM_TOL))
    }

    /// Checks every structural invariant; `tol` bounds the row-sum and
    /// stiff-accuracy mismatches (triangularity and the explicit diagonal
    /// are exact).
    pub fn validate_with_tol(&self, tol: T) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let s = self.s;
        for i in 0..s {
            for j in i + 1..s {
                if self.a[(i, j)] != T::zero() {
                    out.push(Diagnostic::NotLowerTriangular { matrix: "A", row: i + 1, col: j + 1 });
                }
                if self.a_hat[(i, j)] != T::zero() {
                    out.push(Diagnostic::NotLowerTriangular {
                        matrix: "Ahat",
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
        }
        for i in 0..s {
            for (matrix, m) in [("A", &self.a), ("Ahat", &self.a_hat)] {
                let sum = m.row_sum(i);
                if (sum - self.c[i]).abs() > tol {
                    out.push(Diagnostic::RowSumMismatch {
                        matrix,
                        row: i + 1,
                        sum: sum.to_f64().unwrap_or(f64::NAN),
                        abscissa: self.c[i].to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        for j in 0..s {
            if (self.b[j] - self.a[(s - 1, j)]).abs() > tol {
                out.push(Diagnostic::NotStifflyAccurate { matrix: "A", col: j + 1 });
            }
            if (self.b_hat[j] - self.a_hat[(s - 1, j)]).abs() > tol {
                out.push(Diagnostic::NotStifflyAccurate { matrix: "Ahat", col: j + 1 });
            }
        }
        for i in 0..s {
            if self.a_hat[(i, i)] == T::zero() {
                out.push(Diagnostic::ZeroExplicitDiagonal { stage: i + 1 });
            }
            if self.a[(i, i)] < T::zero() {
                out.push(Diagnostic::NegativeImplicitDiagonal {
                    stage: i + 1,
                    value: self.a[(i, i)].to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        out
    }

    /// Pads the pair to the sigma form with the leading zero stage.
    pub fn embed_sigma(&self) -> SigmaPair<T> {
        let s = self.s;
        let sigma = s + 1;
        let mut a_sigma = Mat::zeros(sigma, sigma);
        let mut a_hat_sigma = Mat::zeros(sigma, sigma);
        for i in 0..s {
            for j in 0..s {
                a_sigma[(i + 1, j + 1)] = self.a[(i, j)];
                a_hat_sigma[(i + 1, j)] = self.a_hat[(i, j)];
            }
        }
        let mut b_sigma = vec![T::zero(); sigma];
        let mut b_hat_sigma = vec![T::zero(); sigma];
        let mut c_sigma = vec![T::zero(); sigma];
        b_sigma[1..].copy_from_slice(&self.b);
        b_hat_sigma[..s].copy_from_slice(&self.b_hat);
        c_sigma[1..].copy_from_slice(&self.c);
        SigmaPair { sigma, a_sigma, a_hat_sigma, b_sigma, b_hat_sigma, c_sigma }
    }

    /// Maximum absolute residual over the order-`p` conditions, evaluated on
    /// the sigma form: the moment conditions `b' c^(j-1) = 1/j` for both
    /// weight vectors and the coupled conditions `b' M_1 .. M_(j-1) e = 1/j!`
    /// over every word in the two coefficient matrices, `1 <= j <= p`.
    pub fn verify_order(&self, p: usize) -> Result<T, TableauError> {
        if p == 0 || p > 3 {
            return Err(TableauError::UnsupportedOrder(p));
        }
        let sp = self.embed_sigma();
        let sigma = sp.sigma;
        let e = vec![T::one(); sigma];
        let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        let mut resid = T::zero();
        let mut c_pow = vec![T::one(); sigma];
        let mut factorial = 1usize;
        for j in 1..=p {
            factorial *= j;
            let moment = recip_usize::<T>(j);
            resid = resid.max((dot(&sp.b_sigma, &c_pow) - moment).abs());
            resid = resid.max((dot(&sp.b_hat_sigma, &c_pow) - moment).abs());
            let coupled = recip_usize::<T>(factorial);
            for word in 0..(1usize << (j - 1)) {
                let mut v = e.clone();
                for letter in 0..j - 1 {
                    let m = if word >> letter & 1 == 0 { &sp.a_sigma } else { &sp.a_hat_sigma };
                    v = m.matvec(&v);
                }
                resid = resid.max((dot(&sp.b_sigma, &v) - coupled).abs());
                resid = resid.max((dot(&sp.b_hat_sigma, &v) - coupled).abs());
            }
            for (cp, &ci) in c_pow.iter_mut().zip(&sp.c_sigma) {
                *cp = *cp * ci;
            }
        }
        Ok(resid)
    }
}

/// The padded `(s+1)`-stage form with the explicit zeroth stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPair<T> {
    sigma: usize,
    a_sigma: Mat<T>,
    a_hat_sigma: Mat<T>,
    b_sigma: Vec<T>,
    b_hat_sigma: Vec<T>,
    c_sigma: Vec<T>,
}

impl<T: Real> SigmaPair<T> {
    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn a_sigma(&self) -> &Mat<T> {
        &self.a_sigma
    }

    pub fn a_hat_sigma(&self) -> &Mat<T> {
        &self.a_hat_sigma
    }

    pub fn b_sigma(&self) -> &[T] {
        &self.b_sigma
    }

    pub fn b_hat_sigma(&self) -> &[T] {
        &self.b_hat_sigma
    }

    pub fn c_sigma(&self) -> &[T] {
        &self.c_sigma
    }

    /// Recovers the reduced pair: drop the first row and column of the
    /// implicit matrix, the first row and last column of the explicit one.
    pub fn strip(&self) -> ButcherPair<T> {
        let s = self.sigma - 1;
        let mut a = Mat::zeros(s, s);
        let mut a_hat = Mat::zeros(s, s);
        for i in 0..s {
            for j in 0..s {
                a[(i, j)] = self.a_sigma[(i + 1, j + 1)];
                a_hat[(i, j)] = self.a_hat_sigma[(i + 1, j)];
            }
        }
        ButcherPair {
            s,
            a,
            a_hat,
            b: self.b_sigma[1..].to_vec(),
            b_hat: self.b_hat_sigma[..s].to_vec(),
            c: self.c_sigma[1..].to_vec(),
        }
    }
}

fn parse_entry<T: Real>(tok: &str, line: usize, col: usize) -> Result<T, TableauError> {
    let malformed = || TableauError::MalformedNumber { line, col, text: tok.to_string() };
    if let Some((num, den)) = tok.split_once('/') {
        let p: i64 = num.trim().parse().map_err(|_| malformed())?;
        let q: i64 = den.trim().parse().map_err(|_| malformed())?;
        if q == 0 {
            return Err(malformed());
        }
        return Ok(cast::<T>(p as f64) / cast::<T>(q as f64));
    }
    let v: f64 = tok.parse().map_err(|_| malformed())?;
    if !v.is_finite() {
        return Err(malformed());
    }
    Ok(cast(v))
}

/// Parses the tableau file format: the stage count `s` on the first line,
/// then the `s` implicit rows and the `s` explicit rows, `s` entries each.
/// Entries are decimal literals or `p/q` fractions; `#` starts a comment.
/// The weights are not stored (stiff accuracy makes them the last rows).
pub fn parse_tableau<T: Real>(text: &str) -> Result<ButcherPair<T>, TableauError> {
    // (1-based line number, payload) with comments and blanks removed
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let Some(&(first_line, first)) = lines.first() else {
        return Err(TableauError::TruncatedFile { expected: 1 });
    };
    let s: usize = first
        .parse()
        .ok()
        .filter(|&s| s >= 1)
        .ok_or_else(|| TableauError::BadStageCount { line: first_line, text: first.to_string() })?;
    if lines.len() < 1 + 2 * s {
        return Err(TableauError::TruncatedFile { expected: 1 + 2 * s });
    }
    if lines.len() > 1 + 2 * s {
        return Err(TableauError::TrailingContent { line: lines[1 + 2 * s].0 });
    }
    let read_matrix = |offset: usize| -> Result<Mat<T>, TableauError> {
        let mut m = Mat::zeros(s, s);
        for i in 0..s {
            let (line_no, line) = lines[offset + i];
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != s {
                return Err(TableauError::WrongRowLength {
                    line: line_no,
                    expected: s,
                    found: toks.len(),
                });
            }
            for (j, tok) in toks.iter().enumerate() {
                m[(i, j)] = parse_entry(tok, line_no, j + 1)?;
            }
        }
        Ok(m)
    };
    let a = read_matrix(1)?;
    let a_hat = read_matrix(1 + s)?;
    let pair = ButcherPair::from_matrices(a, a_hat)?;
    if let Some(d) = pair.validate().into_iter().next() {
        return Err(TableauError::Invalid(d));
    }
    Ok(pair)
}

/// Renders a pair in the file format, printing each entry with the shortest
/// form that parses back to the identical scalar.
pub fn render<T: Real>(pair: &ButcherPair<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", pair.stages());
    for m in [pair.a(), pair.a_hat()] {
        for i in 0..pair.stages() {
            let row: Vec<String> = m.row(i).iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}
