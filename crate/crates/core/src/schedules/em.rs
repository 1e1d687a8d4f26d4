//! The sparse-position construction: digit `u_k` at positions `n_k`, digits
//! at most `M` elsewhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sample::SamplePoint;
use crate::error::{domain, Error, Result};
use crate::potentials::{GrowthRate, Potential};

/// Slope threshold on `log r_k` vs `log k` for a usef verdict.
pub const USEF_SLOPE_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmSpec {
    pub potential: Potential,
    pub growth: GrowthRate,
    pub m: u64,
    pub eps: f64,
    /// `(1 − ε)/α`, the exponent in `n_k ≈ k^{(1−ε)/α}`.
    pub exponent: f64,
}

/// Positions and digits for `k = 1 … k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmSchedule {
    pub positions: Vec<u64>,
    pub log_u: Vec<f64>,
    /// Indices `k` whose rounded position was bumped forward.
    pub adjustments: Vec<u64>,
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

pub fn em_spec(potential: &Potential, growth: &GrowthRate, m: u64, eps: f64) -> Result<EmSpec> {
    let GrowthRate::PolyExp { alpha } = *growth else {
        return domain("the sparse-position construction needs Φ(n) = e^{n^α}");
    };
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("ε must lie in (0, 1), got {eps}"));
    }
    if m == 0 {
        return domain("digit cap M must be ≥ 1");
    }
    let exponent = (1.0 - eps) / alpha;
    if exponent <= 1.0 {
        let witness = (2..=1_000_000u64)
            .find(|&k| round_half_up((k as f64).powf(exponent)) <= round_half_up(((k - 1) as f64).powf(exponent)))
            .unwrap_or(0);
        return Err(Error::Construction {
            reason: format!(
                "n_k = round(k^{exponent}) is not eventually strictly increasing with n_k/k → ∞ (α = {alpha}, ε = {eps})"
            ),
            witness,
        });
    }
    Ok(EmSpec { potential: *potential, growth: *growth, m, eps, exponent })
}

impl EmSpec {
    /// `n_k` (rounded half-up, bumped to stay strictly increasing) and
    /// `log u_k = log φ^{-1}(Φ(n_k) − Φ(n_{k−1}))` with `Φ(n_0) := 0`,
    /// clamped so that `u_k ≥ 1`.
    pub fn schedule(&self, k_max: usize) -> Result<EmSchedule> {
        let mut positions = Vec::with_capacity(k_max);
        let mut log_u = Vec::with_capacity(k_max);
        let mut adjustments = Vec::new();
        let mut prev = 0u64;
        for k in 1..=k_max as u64 {
            let raw = round_half_up((k as f64).powf(self.exponent));
            let n = if raw <= prev {
                adjustments.push(k);
                prev + 1
            } else {
                raw
            };
            let inc = self.growth.log_growth_difference(n, (prev > 0).then_some(prev))?;
            let mut inc = inc.value;
            if inc.as_log().is_some_and(|v| v < 0.0) {
                inc.value = 0.0;
            }
            let lu = self.potential.log_phi_inverse_scaled(inc)?;
            log_u.push(lu.as_log().ok_or_else(|| Error::ScaleOverflow(format!("log u_{k} is not representable")))?);
            positions.push(n);
            prev = n;
        }
        Ok(EmSchedule { positions, log_u, adjustments })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsefVerdict {
    Vanishing,
    Diverging,
    Inconclusive,
}

impl UsefVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Vanishing => "VANISHING",
            Self::Diverging => "DIVERGING",
            Self::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsefReport {
    /// `r_k = (1/n_k) Σ_{j≤k} log u_j` for `k = 1 … k_max`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log r_k` against `log k` over the last half.
    pub tail_slope: f64,
    pub verdict: UsefVerdict,
}

/// Whether `(1/n_k) Σ log u_j → 0`. The tail (last half) must be strictly
/// monotone with a log-log slope of at least [`USEF_SLOPE_TOL`] in magnitude.
pub fn usef_diagnostic(spec: &EmSpec, k_max: usize) -> Result<UsefReport> {
    if k_max < 2 {
        return domain("usef_diagnostic needs k_max ≥ 2");
    }
    let sched = spec.schedule(k_max)?;
    let mut acc = 0.0;
    let ratios: Vec<f64> = sched
        .log_u
        .iter()
        .zip(&sched.positions)
        .map(|(lu, &n)| {
            acc += lu;
            acc / n as f64
        })
        .collect();
    if k_max < 4 {
        return Ok(UsefReport { ratios, tail_slope: f64::NAN, verdict: UsefVerdict::Inconclusive });
    }
    let start = k_max / 2 - 1;
    let tail = &ratios[start..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0)
        .map(|(i, r)| (((start + i + 1) as f64).ln(), r.ln()))
        .collect();
    let tail_slope = least_squares_slope(&pts);
    let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    let verdict = if pts.len() == tail.len() && decreasing && tail_slope <= -USEF_SLOPE_TOL {
        UsefVerdict::Vanishing
    } else if pts.len() == tail.len() && increasing && tail_slope >= USEF_SLOPE_TOL {
        UsefVerdict::Diverging
    } else {
        UsefVerdict::Inconclusive
    };
    Ok(UsefReport { ratios, tail_slope, verdict })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// A point with digit `u_k` at each `n_k` (`k ≤ k_max`) and uniform digits in
/// `1 … M` elsewhere, up to depth `n_{k_max}`.
pub fn sample_em_point(spec: &EmSpec, sched: &EmSchedule, seed: u64) -> Result<SamplePoint> {
    let Some(&depth) = sched.positions.last() else {
        return domain("empty sparse-position schedule");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_digits = Vec::with_capacity(depth as usize);
    let mut next = sched.positions.iter().zip(&sched.log_u).peekable();
    for n in 1..=depth {
        match next.peek() {
            Some((&p, &lu)) if p == n => {
                log_digits.push(lu);
                next.next();
            }
            _ => log_digits.push((rng.gen_range(1..=spec.m) as f64).ln()),
        }
    }
    Ok(SamplePoint::from_log_digits(log_digits, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_add_exp;
    use crate::potentials::birkhoff_log_sum;
    use approx::assert_relative_eq;

    fn spec(a: f64, alpha: f64, m: u64, eps: f64) -> Result<EmSpec> {
        em_spec(&Potential::power_law(a).unwrap(), &GrowthRate::poly_exp(alpha).unwrap(), m, eps)
    }

    #[test]
    fn positions_and_digits() {
        let s = spec(1.0, 0.4, 10, 0.1).unwrap();
        let sch = s.schedule(20).unwrap();
        for (k, &n) in sch.positions.iter().enumerate() {
            let raw = ((k + 1) as f64).powf(2.25);
            assert!((n as f64 - raw).abs() <= 0.5 + 1e-9 || sch.adjustments.contains(&(k as u64 + 1)));
        }
        assert!(sch.positions.windows(2).all(|w| w[1] > w[0]));
        // u_1 = φ^{-1}(Φ(1)) = e
        assert_relative_eq!(sch.log_u[0], 1.0, epsilon = 1e-14);
        // u_2 = e^{5^0.4} − e (n_2 = round(2^2.25) = 5)
        assert_eq!(sch.positions[1], 5);
        assert_relative_eq!(sch.log_u[1], (5f64.powf(0.4).exp() - 1f64.exp()).ln(), epsilon = 1e-12);
    }

    #[test]
    fn stretched_inverse_round_trips() {
        let pot = Potential::stretched_exp(0.5).unwrap();
        let s = em_spec(&pot, &GrowthRate::poly_exp(0.5).unwrap(), 5, 0.2).unwrap();
        let sch = s.schedule(30).unwrap();
        let g = GrowthRate::poly_exp(0.5).unwrap();
        for k in 1..30 {
            let inc = g.log_growth_difference(sch.positions[k], Some(sch.positions[k - 1])).unwrap();
            assert_relative_eq!(pot.log_phi(sch.log_u[k]).unwrap(), inc.value.value.max(0.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn non_increasing_positions_are_rejected() {
        match spec(1.0, 2.0, 3, 0.5) {
            Err(Error::Construction { witness, .. }) => assert!(witness >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verdicts() {
        let r = usef_diagnostic(&spec(1.0, 0.4, 10, 0.1).unwrap(), 200).unwrap();
        assert_eq!(r.verdict, UsefVerdict::Vanishing);
        let r = usef_diagnostic(&spec(1.0, 0.6, 10, 0.01).unwrap(), 200).unwrap();
        assert_eq!(r.verdict, UsefVerdict::Diverging);
        let r = usef_diagnostic(&spec(1.0, 0.4, 10, 0.1).unwrap(), 2).unwrap();
        assert_eq!(r.ratios.len(), 2);
        assert_eq!(r.verdict, UsefVerdict::Inconclusive);
    }

    #[test]
    fn sandwich() {
        let pot = Potential::power_law(1.0).unwrap();
        let g = GrowthRate::poly_exp(0.4).unwrap();
        let s = em_spec(&pot, &g, 10, 0.1).unwrap();
        let sch = s.schedule(25).unwrap();
        let p = sample_em_point(&s, &sch, 3).unwrap();
        for &n in &sch.positions {
            let sum = birkhoff_log_sum(&pot, &p.log_digits[..n as usize]).unwrap();
            let phi = g.log_growth(n).unwrap().value;
            let upper = log_add_exp(phi, (n as f64).ln() + 10f64.ln());
            assert!(phi <= sum + 1e-12 && sum <= upper + 1e-12, "n = {n}");
        }
    }
}
