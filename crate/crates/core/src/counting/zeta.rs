use crate::error::{domain, Error, Result};
use crate::numeric::hurwitz_with_bound;

/// Tolerance used wherever ζ(d) normalizes branch lengths.
pub const NORMALIZER_TOL: f64 = 1e-12;

/// A value of ζ(s) together with a certified bound on its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEstimate {
    pub value: f64,
    pub error_bound: f64,
    /// Number of terms summed explicitly before the tail correction.
    pub terms: u64,
}

/// ζ(s) for real `s > 1` with `|value - ζ(s)| ≤ error_bound ≤ tol`.
///
/// The head `Σ_{k<K} k^{-s}` is summed directly and the tail `ζ(s, K)` is
/// taken from the Euler-Maclaurin expansion; for real `s` its remainder is
/// dominated by the first omitted term, which is what `error_bound` reports
/// (plus accumulated rounding).
pub fn zeta_truncated(s: f64, tol: f64) -> Result<ZetaEstimate> {
    if !(s > 1.0) {
        return Err(Error::Divergence(format!("ζ(s) diverges for s = {s} ≤ 1")));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let mut terms: u64 = 16;
    loop {
        let (value, em_bound) = hurwitz_with_bound(s, 1.0, terms - 1);
        let rounding = 4.0 * f64::EPSILON * value * (terms as f64).sqrt();
        let error_bound = em_bound + rounding;
        if error_bound <= tol || terms >= 1 << 24 {
            if error_bound > tol {
                return domain(format!("cannot certify ζ({s}) to {tol:e}"));
            }
            return Ok(ZetaEstimate { value, error_bound, terms });
        }
        terms *= 2;
    }
}

/// ζ(d) as used for the affine branch normalization.
pub fn zeta_normalizer(d: f64) -> Result<f64> {
    zeta_truncated(d, NORMALIZER_TOL).map(|z| z.value)
}
