//! Bundled tableau pairs.
//!
//! The same five schemes ship as text files under `tableaux/` in the
//! repository root; these constructors are the exact in-code form.

use crate::linalg::Mat;
use crate::scalar::{cast, Real};
use crate::tableau::ButcherPair;

/// One-stage, first-order pair: backward Euler coupled with forward Euler.
pub fn first_order<T: Real>() -> ButcherPair<T> {
    let a = Mat::from_rows(&[&[T::one()]]);
    let a_hat = Mat::from_rows(&[&[T::one()]]);
    ButcherPair::from_matrices(a, a_hat).expect("valid by construction")
}

/// Two-stage, second-order L-stable pair with gamma = 1 - sqrt(2)/2.
pub fn second_order<T: Real>() -> ButcherPair<T> {
    let g = T::one() - T::SQRT_2() / cast::<T>(2.0);
    let d = T::one() - T::one() / (cast::<T>(2.0) * g);
    let a = Mat::from_rows(&[&[g, T::zero()], &[T::one() - g, g]]);
    let a_hat = Mat::from_rows(&[&[g, T::zero()], &[d, T::one() - d]]);
    ButcherPair::from_matrices(a, a_hat).expect("valid by construction")
}

fn frac<T: Real>(p: i64, q: i64) -> T {
    cast::<T>(p as f64) / cast::<T>(q as f64)
}

/// Four-stage, third-order pair from the literature; fails the dissipation
/// certificates (both `Q` and `H0` are indefinite).
pub fn third_order_a<T: Real>() -> ButcherPair<T> {
    let z = T::zero();
    let a = Mat::from_rows(&[
        &[frac(1, 4), z, z, z],
        &[z, frac(1, 4), z, z],
        &[frac(1, 24), frac(11, 24), frac(1, 4), z],
        &[frac(11, 24), frac(1, 6), frac(1, 8), frac(1, 4)],
    ]);
    let a_hat = Mat::from_rows(&[
        &[frac(1, 4), z, z, z],
        &[frac(13, 4), frac(-3, 1), z, z],
        &[frac(1, 4), z, frac(1, 2), z],
        &[z, frac(1, 3), frac(1, 6), frac(1, 2)],
    ]);
    ButcherPair::from_matrices(a, a_hat).expect("valid by construction")
}

/// Another classical four-stage, third-order pair; also fails the
/// dissipation certificates.
pub fn third_order_b<T: Real>() -> ButcherPair<T> {
    let z = T::zero();
    let a = Mat::from_rows(&[
        &[frac(1, 2), z, z, z],
        &[frac(1, 6), frac(1, 2), z, z],
        &[frac(-1, 2), frac(1, 2), frac(1, 2), z],
        &[frac(3, 2), frac(-3, 2), frac(1, 2), frac(1, 2)],
    ]);
    let a_hat = Mat::from_rows(&[
        &[frac(1, 2), z, z, z],
        &[frac(11, 18), frac(1, 18), z, z],
        &[frac(5, 6), frac(-5, 6), frac(1, 2), z],
        &[frac(1, 4), frac(7, 4), frac(3, 4), frac(-7, 4)],
    ]);
    ButcherPair::from_matrices(a, a_hat).expect("valid by construction")
}

/// Four-stage, third-order pair with positive dissipation certificates
/// (lambda_min(Q) = 1, lambda_min(H0) ~ 0.0872), published to six decimal
/// places. See [`crate::constructor::reference_spec`] for the family
/// parameters that regenerate it in full precision.
pub fn third_order_stable<T: Real>() -> ButcherPair<T> {
    let z = T::zero();
    let r = cast::<T>;
    let a = Mat::from_rows(&[
        &[r(0.6), z, z, z],
        &[r(0.46875), r(1.03125), z, z],
        &[r(0.4), r(-0.557813), r(1.107813), z],
        &[r(3.736772), r(-0.781145), r(-27.705628), r(25.75)],
    ]);
    let a_hat = Mat::from_rows(&[
        &[r(0.6), z, z, z],
        &[r(0.796875), r(0.703125), z, z],
        &[r(0.4), r(0.420226), r(0.129774), z],
        &[r(0.301170), r(0.330688), r(-0.087542), r(0.455685)],
    ]);
    ButcherPair::from_matrices(a, a_hat).expect("valid by construction")
}
