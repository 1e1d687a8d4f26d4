//! Log-domain arithmetic and power sums shared by the other modules.

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Number of Euler-Maclaurin correction terms used (the eighth Bernoulli
/// number is kept for the remainder bound).
const EM_TERMS: usize = 7;

/// Windows with at most this many digits are summed term by term.
pub const DIRECT_SUM_LIMIT: u64 = 4096;

/// Smallest index at which the Euler-Maclaurin tail takes over.
const EM_START: f64 = 32.0;

/// `log(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(1 - e^x)` for `x < 0`, accurate near both ends.
pub fn log1m_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Numerically stable `log Σ e^{x_i}`. Returns `-inf` for an empty input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `(e^y - 1) / y`, equal to 1 at `y = 0`.
pub fn exprel(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 + y / 2.0
    } else {
        y.exp_m1() / y
    }
}

/// Rising factorial `σ (σ+1) ... (σ+j-1)`.
fn rising(sigma: f64, j: usize) -> f64 {
    (0..j).map(|i| sigma + i as f64).product()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// How a power sum was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMethod {
    /// Term-by-term summation.
    Direct,
    /// Direct head plus an Euler-Maclaurin tail (agrees with direct summation
    /// to rounding).
    EulerMaclaurin,
}

/// `Σ_{a=lo}^{hi} a^{-σ}` for integers `1 ≤ lo ≤ hi`, any real `σ`.
pub fn power_sum(sigma: f64, lo: u64, hi: u64) -> (f64, SumMethod) {
    if hi < lo {
        return (0.0, SumMethod::Direct);
    }
    if hi - lo < DIRECT_SUM_LIMIT {
        let s = (lo..=hi).map(|a| (a as f64).powf(-sigma)).sum();
        return (s, SumMethod::Direct);
    }
    let head_end = lo.max(EM_START as u64);
    let head: f64 = (lo..head_end).map(|a| (a as f64).powf(-sigma)).sum();
    let a = head_end as f64;
    let b = hi as f64;
    let f = |x: f64| x.powf(-sigma);
    let span = (b / a).ln();
    let integral = a.powf(1.0 - sigma) * span * exprel((1.0 - sigma) * span);
    let mut tail = integral + 0.5 * (f(a) + f(b));
    for k in 1..=EM_TERMS {
        let j = 2 * k - 1;
        // f^{(j)}(x) = (-1)^j (σ)_j x^{-σ-j}, with j odd.
        let coef = BERNOULLI_EVEN[k - 1] / factorial(2 * k) * -rising(sigma, j);
        tail += coef * (b.powf(-sigma - j as f64) - a.powf(-sigma - j as f64));
    }
    (head + tail, SumMethod::EulerMaclaurin)
}

/// Hurwitz zeta `ζ(σ, q) = Σ_{k≥0} (q+k)^{-σ}` for `σ > 1`, `q ≥ 1`, with a
/// bound on the truncation error. `shift` is the number of leading terms
/// summed directly before the Euler-Maclaurin tail.
pub(crate) fn hurwitz_with_bound(sigma: f64, q: f64, shift: u64) -> (f64, f64) {
    let head: f64 = (0..shift).map(|k| (q + k as f64).powf(-sigma)).sum();
    let x = q + shift as f64;
    let mut tail = x.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * x.powf(-sigma);
    for k in 1..=EM_TERMS {
        let j = 2 * k - 1;
        tail += BERNOULLI_EVEN[k - 1] / factorial(2 * k)
            * rising(sigma, j)
            * x.powf(-sigma - j as f64);
    }
    let k = EM_TERMS + 1;
    let j = 2 * k - 1;
    let bound = (BERNOULLI_EVEN[k - 1] / factorial(2 * k) * rising(sigma, j)
        * x.powf(-sigma - j as f64))
    .abs();
    (head + tail, bound)
}

/// Hurwitz zeta `ζ(σ, q)` for `σ > 1`, `q ≥ 1`, accurate to double rounding.
pub fn hurwitz_zeta(sigma: f64, q: f64) -> f64 {
    let shift = if q >= EM_START { 0 } else { (EM_START - q).ceil() as u64 };
    hurwitz_with_bound(sigma, q, shift).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_exp_handles_extremes() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log1m_exp_matches_naive_in_safe_range() {
        for x in [-1e-10, -0.1, -0.5, -1.0, -5.0, -40.0] {
            let naive = (1.0 - f64::exp(x)).ln();
            assert!((log1m_exp(x) - naive).abs() <= 1e-15 + 1e-6 * naive.abs());
        }
    }

    #[test]
    fn power_sum_methods_agree() {
        for sigma in [0.3, 1.0, 1.2, 2.0, 3.5] {
            let lo = 17;
            let hi = 20_000;
            let direct: f64 = (lo..=hi).map(|a| (a as f64).powf(-sigma)).sum();
            let (em, method) = power_sum(sigma, lo, hi);
            assert_eq!(method, SumMethod::EulerMaclaurin);
            assert!((em - direct).abs() <= 1e-12 * direct, "σ={sigma}: {em} vs {direct}");
        }
    }

    #[test]
    fn hurwitz_reduces_to_riemann_at_q_one() {
        let z2 = hurwitz_zeta(2.0, 1.0);
        assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        let tail = hurwitz_zeta(2.0, 1000.0);
        let direct: f64 = (1000..2_000_000u64).map(|k| (k as f64).powi(-2)).sum::<f64>()
            + 1.0 / 2_000_000.0;
        assert!((tail - direct).abs() < 1e-12);
    }
}
