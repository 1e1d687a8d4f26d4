//! Explicit upper bounds for `G` and `Ĝ` and the windows where they apply.

use super::zeta::{zeta_truncated, NORMALIZER_TOL};
use super::{TupleConstraint, TupleShape};
use crate::error::{domain, Error, Result};

/// The constants entering both bounds, for given `a` and `ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c_hat: f64,
    pub zeta_ds: f64,
}

impl BoundConstants {
    pub fn new(a: f64, ds: f64) -> Result<Self> {
        if !(a > 0.0) {
            return domain(format!("a must be > 0, got {a}"));
        }
        if !(ds > 1.0) {
            return domain(format!("bounds need ds > 1, got {ds}"));
        }
        let zeta_ds = zeta_truncated(ds, NORMALIZER_TOL)?.value;
        let c4 = if a >= 1.0 {
            3f64.powf(1.0 - 1.0 / a) / a
        } else {
            (4.0f64 / 3.0).powf(1.0 / a - 1.0) / a
        };
        Ok(Self {
            c1: 2f64.powf((ds + a) / a) * c4,
            c2: 6.0 * 3f64.powf((ds - 1.0) / a) * zeta_ds,
            c3: 1.0 / c4,
            c4,
            c_hat: 2.0 * 3f64.powf(ds) * zeta_ds,
            zeta_ds,
        })
    }
}

/// A bound value, its log, and whether `ε` lies in the validity window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub bound: f64,
    pub log_bound: f64,
    pub valid: bool,
    /// Open window `(lower, 1/3)` for `ε`.
    pub window: (f64, f64),
    pub constants: BoundConstants,
}

const EPS_CEILING: f64 = 1.0 / 3.0;

/// `log(C₁ C₂^{n-1} ε m^{(1-ds)/a})` and its window, for real `m` of any size.
pub fn g_bound_log(a: f64, m: f64, n: usize, eps: f64, ds: f64) -> Result<BoundReport> {
    if n == 0 || !(m > 0.0) {
        return domain("g_bound needs n ≥ 1 and m > 0");
    }
    let k = BoundConstants::new(a, ds)?;
    let log_bound = k.c1.ln() + (n as f64 - 1.0) * k.c2.ln() + eps.ln() + (1.0 - ds) / a * m.ln();
    // C₃ (m 3^{2-n})^{-1/a}
    let lower = (k.c3.ln() - (m.ln() + (2.0 - n as f64) * 3f64.ln()) / a).exp();
    Ok(BoundReport {
        bound: log_bound.exp(),
        log_bound,
        valid: lower < eps && eps < EPS_CEILING,
        window: (lower, EPS_CEILING),
        constants: k,
    })
}

/// Upper bound for `G(m, n, a, ε, s)` and its validity verdict.
pub fn g_bound(c: &TupleConstraint, d: f64, s: f64) -> Result<BoundReport> {
    let TupleShape::PowerLaw { a } = c.shape else {
        return domain("g_bound applies to the power-law shape i^a");
    };
    g_bound_log(a, c.m, c.n, c.eps, d * s)
}

/// Upper bound `6 Ĉ^{n-1} ε e^{(1-ds)(log m)^{1/b}}` for `Ĝ(m, n, b, ε, s)`.
pub fn ghat_bound(c: &TupleConstraint, d: f64, s: f64) -> Result<BoundReport> {
    let TupleShape::LogPower { b } = c.shape else {
        return domain("ghat_bound applies to the log-power shape e^{(log i)^b}");
    };
    let ds = d * s;
    let reduced = c.m.ln() + (2.0 - c.n as f64) * 3f64.ln();
    if !(reduced > 0.0) {
        return Err(Error::WindowUndefined(format!(
            "m·3^(2-n) = {} ≤ 1 for m = {}, n = {}",
            reduced.exp(),
            c.m,
            c.n
        )));
    }
    let k = BoundConstants::new(1.0, ds)?;
    let log_bound =
        6f64.ln() + (c.n as f64 - 1.0) * k.c_hat.ln() + c.eps.ln() + (1.0 - ds) * c.m.ln().powf(1.0 / b);
    let lower = (-reduced.powf(1.0 / b)).exp();
    Ok(BoundReport {
        bound: log_bound.exp(),
        log_bound,
        valid: lower < c.eps && c.eps < EPS_CEILING,
        window: (lower, EPS_CEILING),
        constants: k,
    })
}
