//! Seeded points in a digit-window set and the Birkhoff-sum convergence
//! profile along them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DigitSchedule;
use crate::error::{domain, Error, Result};
use crate::potentials::{GrowthRate, LogScaleValue, Potential};

/// A point given by its first digits, in log form.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    /// `log a_n` for `n = 1 … depth`.
    pub log_digits: Vec<f64>,
    /// The longest prefix of digits drawn as exact integers.
    pub exact_prefix: Vec<u64>,
    pub seed: u64,
    /// Positions (1-based) whose window collapsed to a single digit.
    pub collapsed_positions: Vec<u64>,
}

impl SamplePoint {
    pub fn depth(&self) -> usize {
        self.log_digits.len()
    }

    /// Builds a point from real digits given in log form, materializing the
    /// prefix of integral digits below 2^40.
    pub fn from_log_digits(log_digits: Vec<f64>, seed: u64) -> Self {
        let exact_prefix = log_digits
            .iter()
            .map_while(|&l| {
                let v = l.exp().round();
                (v < super::EXACT_DIGIT_LIMIT && (v.ln() - l).abs() <= 1e-12).then_some(v as u64)
            })
            .collect();
        Self { log_digits, exact_prefix, seed, collapsed_positions: Vec::new() }
    }
}

/// Draws the first `depth` digits uniformly from the schedule's windows;
/// positions before the start index get digit 1.
pub fn sample_word(schedule: &DigitSchedule, depth: usize, seed: u64) -> Result<SamplePoint> {
    if depth == 0 {
        return domain("sample depth must be ≥ 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_digits = Vec::with_capacity(depth);
    let mut exact_prefix = Vec::new();
    let mut collapsed_positions = Vec::new();
    let mut exact_run = true;
    for n in 1..=depth as u64 {
        if n < schedule.start_index {
            log_digits.push(0.0);
            if exact_run {
                exact_prefix.push(1);
            }
            continue;
        }
        let w = schedule.window(n);
        if w.collapsed {
            collapsed_positions.push(n);
        }
        match w.exact {
            Some((lo, hi)) => {
                let a = rng.gen_range(lo..=hi);
                log_digits.push((a as f64).ln());
                if exact_run {
                    exact_prefix.push(a);
                }
            }
            None => {
                exact_run = false;
                let u: f64 = rng.gen_range(-1.0..=1.0);
                log_digits.push(schedule.log_s(n) + (u * schedule.log_ratio(n).exp()).ln_1p());
            }
        }
    }
    Ok(SamplePoint { log_digits, exact_prefix, seed, collapsed_positions })
}

/// Real digits `a_1 = φ^{-1}(Φ(1))`, `a_n = φ^{-1}(Φ(n) − Φ(n−1))`, for which
/// `S_nφ = Φ(n)` exactly.
pub fn telescoping_point(potential: &Potential, growth: &GrowthRate, depth: usize) -> Result<SamplePoint> {
    if depth == 0 {
        return domain("depth must be ≥ 1");
    }
    let mut log_digits = Vec::with_capacity(depth);
    for n in 1..=depth as u64 {
        let inc = growth.log_growth_difference(n, (n > 1).then(|| n - 1))?;
        let log_a = potential.log_phi_inverse_scaled(inc.value)?;
        log_digits.push(
            log_a
                .as_log()
                .ok_or_else(|| Error::ScaleOverflow(format!("log a_{n} is not representable")))?,
        );
    }
    Ok(SamplePoint::from_log_digits(log_digits, 0))
}

/// Deviations `δ_n = log S_nφ − log Φ(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceProfile {
    pub deltas: Vec<f64>,
    /// Set where `δ_n` had to be taken between `log log` values.
    pub loglog: Vec<bool>,
    /// `max |δ_n|` over the last quarter of the range.
    pub tail_max: f64,
}

impl ConvergenceProfile {
    /// `|δ_n|` is non-increasing over the last `len` indices.
    pub fn tail_monotone(&self, len: usize) -> bool {
        let start = self.deltas.len().saturating_sub(len);
        self.deltas[start..].windows(2).all(|w| w[1].abs() <= w[0].abs())
    }
}

pub fn convergence_profile(
    potential: &Potential,
    growth: &GrowthRate,
    point: &SamplePoint,
    depth: usize,
) -> Result<ConvergenceProfile> {
    if depth == 0 || point.depth() < depth {
        return domain(format!("point has {} digits, {depth} requested", point.depth()));
    }
    let mut deltas = Vec::with_capacity(depth);
    let mut loglog = Vec::with_capacity(depth);
    let mut sum: Option<LogScaleValue> = None;
    for (i, &l) in point.log_digits[..depth].iter().enumerate() {
        let term = potential.log_phi_scaled(l)?;
        let s = sum.map_or(term, |s| s.add(term));
        sum = Some(s);
        let phi = growth.log_growth(i as u64 + 1)?;
        match (s.as_log(), phi.as_log()) {
            (Some(a), Some(b)) if !s.is_loglog() && !phi.is_loglog() => {
                deltas.push(a - b);
                loglog.push(false);
            }
            _ => {
                deltas.push(s.as_loglog() - phi.as_loglog());
                loglog.push(true);
            }
        }
    }
    let tail = (depth / 4).max(1);
    let tail_max = deltas[depth - tail..].iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(ConvergenceProfile { deltas, loglog, tail_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::{theorem_schedule, EpsilonPolicy, ScheduleCase};
    use approx::assert_relative_eq;

    fn t1_ii(eps: EpsilonPolicy) -> DigitSchedule {
        theorem_schedule(
            &Potential::power_law(1.0).unwrap(),
            &GrowthRate::super_exp(2.0).unwrap(),
            ScheduleCase::T1II,
            eps,
        )
        .unwrap()
    }

    #[test]
    fn sampled_digits_lie_in_windows() {
        let s = t1_ii(EpsilonPolicy::Fixed(0.1));
        let p = sample_word(&s, 8, 7).unwrap();
        let e2 = 2f64.exp();
        assert!((0.7 * e2).ceil() as u64 <= p.exact_prefix[0] && p.exact_prefix[0] <= (1.3 * e2) as u64);
        for (i, &l) in p.log_digits.iter().enumerate() {
            let w = s.window(i as u64 + 1);
            assert!(l >= w.log_lo - 1e-12 && l <= w.log_hi + 1e-12, "position {}", i + 1);
        }
        for (a, l) in p.exact_prefix.iter().zip(&p.log_digits) {
            assert!(((*a as f64).ln() - l).abs() <= 1e-12);
        }
        assert_eq!(p, sample_word(&s, 8, 7).unwrap());
        assert_ne!(p, sample_word(&s, 8, 8).unwrap());
    }

    #[test]
    fn telescoping_digits_give_zero_deviation() {
        let pot = Potential::power_law(2.0).unwrap();
        let g = GrowthRate::super_exp(1.5).unwrap();
        let p = telescoping_point(&pot, &g, 40).unwrap();
        let prof = convergence_profile(&pot, &g, &p, 40).unwrap();
        for d in prof.deltas {
            assert!(d.abs() < 1e-9, "{d}");
        }
    }

    #[test]
    fn bounded_digits_fall_behind() {
        let pot = Potential::power_law(1.0).unwrap();
        let g = GrowthRate::poly_exp(1.0).unwrap();
        let p = SamplePoint::from_log_digits(vec![2f64.ln(); 20], 0);
        assert_eq!(p.exact_prefix, vec![2; 20]);
        let prof = convergence_profile(&pot, &g, &p, 20).unwrap();
        for (i, d) in prof.deltas.iter().enumerate() {
            let n = i as f64 + 1.0;
            assert_relative_eq!(*d, (2.0 * n).ln() - n, epsilon = 1e-12);
        }
        assert!(prof.tail_max > 10.0);
    }
}
