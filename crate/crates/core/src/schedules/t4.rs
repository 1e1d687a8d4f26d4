//! Digits whose potential can carry one growth increment when both `φ` and
//! `Φ` are at least exponential.

use crate::error::{domain, Result};
use crate::potentials::{GrowthRate, Potential};

/// Number of integers `j ≥ 1` with `(1−2ε)e^{n^α} ≤ e^{j^c} ≤ (1+ε)e^{n^α}`.
pub fn t4_window_count(potential: &Potential, growth: &GrowthRate, n: u64, eps: f64) -> Result<u64> {
    let (Potential::StretchedExp { c }, GrowthRate::PolyExp { alpha }) = (*potential, *growth) else {
        return domain("t4_window_count needs φ(j) = e^{j^c} and Φ(n) = e^{n^α}");
    };
    if c < 1.0 || alpha < 1.0 {
        return domain(format!("t4_window_count needs c ≥ 1 and α ≥ 1, got c = {c}, α = {alpha}"));
    }
    if !(eps > 0.0 && eps < 0.25) {
        return domain(format!("ε must lie in (0, 1/4), got {eps}"));
    }
    let base = (n as f64).powf(alpha);
    let lo = (base + (1.0 - 2.0 * eps).ln()).max(0.0).powf(1.0 / c);
    let hi = (base + eps.ln_1p()).powf(1.0 / c);
    let first = lo.ceil().max(1.0);
    let last = hi.floor();
    Ok(if last >= first { (last - first) as u64 + 1 } else { 0 })
}
