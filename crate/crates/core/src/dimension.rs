//! Regime classification, closed-form dimensions, the liminf formula for
//! digit-window sets, and Moran roots for restricted alphabets.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::ifs::{IfsSystem, SystemKind};
use crate::potentials::{GrowthRate, Potential};
use crate::schedules::DigitSchedule;

/// Parameters within this distance of a critical exponent are classified as
/// critical.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    T1I1,
    T1I2,
    T1II,
    T2I1,
    T2I2,
    T2II,
    T3I1,
    T3I2,
    T3II,
    T3III,
    T4I1,
    T4I2,
    Critical,
    Uncovered,
}

impl RegimeTag {
    pub fn label(&self) -> &'static str {
        match self {
            Self::T1I1 => "T1_I1",
            Self::T1I2 => "T1_I2",
            Self::T1II => "T1_II",
            Self::T2I1 => "T2_I1",
            Self::T2I2 => "T2_I2",
            Self::T2II => "T2_II",
            Self::T3I1 => "T3_I1",
            Self::T3I2 => "T3_I2",
            Self::T3II => "T3_II",
            Self::T3III => "T3_III",
            Self::T4I1 => "T4_I1",
            Self::T4I2 => "T4_I2",
            Self::Critical => "CRITICAL",
            Self::Uncovered => "UNCOVERED",
        }
    }

    pub fn is_full_dimension(&self) -> bool {
        matches!(self, Self::T1I1 | Self::T2I1 | Self::T3I1 | Self::T4I1)
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A regime tag with the critical exponent separating its plateau cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub tag: RegimeTag,
    pub threshold: Option<f64>,
}

/// The critical exponent for `Φ(n) = e^{n^α}` under a potential.
pub fn alpha_threshold(potential: &Potential) -> f64 {
    match *potential {
        Potential::PowerLaw { .. } => 0.5,
        Potential::LogPower { b } => b / (b + 1.0),
        Potential::StretchedExp { .. } => 1.0,
    }
}

pub fn classify_regime(potential: &Potential, growth: &GrowthRate) -> Regime {
    use RegimeTag::*;
    let threshold = alpha_threshold(potential);
    let tag = match (*potential, *growth) {
        (Potential::StretchedExp { c }, GrowthRate::PolyExp { alpha }) if c >= 1.0 => {
            // α = 1 belongs to the zero-dimension case here.
            if alpha < 1.0 - CRITICAL_TOL {
                T4I1
            } else {
                T4I2
            }
        }
        (p, GrowthRate::PolyExp { alpha }) => {
            if (alpha - threshold).abs() <= CRITICAL_TOL {
                Critical
            } else {
                let below = alpha < threshold;
                match (p, below) {
                    (Potential::PowerLaw { .. }, true) => T1I1,
                    (Potential::PowerLaw { .. }, false) => T1I2,
                    (Potential::LogPower { .. }, true) => T2I1,
                    (Potential::LogPower { .. }, false) => T2I2,
                    (Potential::StretchedExp { .. }, true) => T3I1,
                    (Potential::StretchedExp { .. }, false) => T3I2,
                }
            }
        }
        (Potential::PowerLaw { .. }, GrowthRate::SuperExp { .. }) => T1II,
        (Potential::LogPower { .. }, GrowthRate::SuperExp { .. }) => T2II,
        (Potential::StretchedExp { c }, GrowthRate::SuperExp { .. }) if c < 1.0 => T3II,
        (Potential::StretchedExp { c }, GrowthRate::DoubleExp { .. }) if c < 1.0 => T3III,
        _ => Uncovered,
    };
    let threshold = match (tag, growth) {
        (Uncovered, _) | (_, GrowthRate::SuperExp { .. }) | (_, GrowthRate::DoubleExp { .. }) => None,
        _ => Some(threshold),
    };
    Regime { tag, threshold }
}

/// A closed-form dimension, or `None` for critical and uncovered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionResult {
    pub value: Option<f64>,
    pub regime: Regime,
    pub formula_id: &'static str,
    /// The value holds under the bounded distortion property only.
    pub requires_distortion: bool,
}

pub fn closed_form_dimension(potential: &Potential, growth: &GrowthRate, d: f64) -> Result<DimensionResult> {
    if !(d > 1.0 && d.is_finite()) {
        return domain(format!("decay exponent d must be > 1, got {d}"));
    }
    use RegimeTag::*;
    let regime = classify_regime(potential, growth);
    let (value, formula_id) = match (regime.tag, *potential, *growth) {
        (T1I1 | T2I1 | T3I1 | T4I1, _, _) => (Some(1.0), "1"),
        (T1I2 | T2I2, _, _) => (Some(1.0 / d), "1/d"),
        (T1II, _, GrowthRate::SuperExp { beta }) => (Some(1.0 / (d * beta - beta + 1.0)), "1/(d*beta-beta+1)"),
        (T2II, Potential::LogPower { b }, GrowthRate::SuperExp { beta }) => {
            let r = beta.powf(1.0 / b);
            (Some(1.0 / (d * r - r + 1.0)), "1/(d*beta^(1/b)-beta^(1/b)+1)")
        }
        (T3I2 | T3II, Potential::StretchedExp { c }, _) => (Some((1.0 - c) / d), "(1-c)/d"),
        (T3III, Potential::StretchedExp { c }, GrowthRate::DoubleExp { gamma }) => (
            Some((1.0 - c) / (d * gamma - (1.0 - c) * (gamma - 1.0))),
            "(1-c)/(d*gamma-(1-c)*(gamma-1))",
        ),
        (T4I2, _, _) => (Some(0.0), "0"),
        (Critical, _, _) => (None, "critical"),
        _ => (None, "uncovered"),
    };
    Ok(DimensionResult { value, regime, formula_id, requires_distortion: regime.tag.is_full_dimension() })
}

/// Partial ratios of the liminf formula and their tail estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct LiminfEstimate {
    /// `q_1 … q_{n_max}`; `None` where the denominator is not positive.
    pub partials: Vec<Option<f64>>,
    /// Minimum of the defined partials over `n_max/2 ≤ n ≤ n_max`.
    pub estimate: Option<f64>,
}

/// `q_n = Σ_{i≤n} log⁺ t_i / (d Σ_{i≤n+1} log s_i − log⁺ t_{n+1})` from
/// `log s_i`, `log t_i` for `i = 1 … n_max + 1`. Windows narrower than one
/// integer (`log t_i ≤ 0`) contribute nothing.
pub fn lem_a_liminf_from_logs(log_s: &[f64], log_t: &[f64], d: f64) -> Result<LiminfEstimate> {
    if !(d > 1.0) {
        return domain(format!("decay exponent d must be > 1, got {d}"));
    }
    if log_s.len() != log_t.len() || log_s.len() < 2 {
        return domain("need matching log s / log t sequences of length ≥ 2");
    }
    let n_max = log_s.len() - 1;
    let mut partials = Vec::with_capacity(n_max);
    let mut num = 0.0;
    let mut sum_s = log_s[0];
    for n in 1..=n_max {
        num += log_t[n - 1].max(0.0);
        sum_s += log_s[n];
        let den = d * sum_s - log_t[n].max(0.0);
        partials.push((den > 0.0 && den.is_finite() && num.is_finite()).then(|| num / den));
    }
    let estimate = partials[n_max / 2..]
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, q| Some(acc.map_or(q, |a| a.min(q))));
    Ok(LiminfEstimate { partials, estimate })
}

pub fn lem_a_liminf(schedule: &DigitSchedule, d: f64, n_max: usize) -> Result<LiminfEstimate> {
    if n_max < 4 {
        return domain(format!("n_max must be ≥ 4, got {n_max}"));
    }
    let log_s: Vec<f64> = (1..=n_max as u64 + 1).map(|n| schedule.log_s(n)).collect();
    let log_t: Vec<f64> = (1..=n_max as u64 + 1).map(|n| schedule.log_t(n)).collect();
    lem_a_liminf_from_logs(&log_s, &log_t, d)
}

/// Dimension of the set of points with all digits `≤ M`, as an interval.
/// The affine system gives the exact Moran root (`lower == upper`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoranBracket {
    pub lower: f64,
    pub upper: f64,
}

impl MoranBracket {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Root in `s ∈ [0, 1]` of `Σ_i e^{s·log_w_i} = 1`, with 1 when the sum stays
/// ≥ 1 on the whole interval.
fn moran_root(log_w: &[f64], tol: f64) -> f64 {
    let f = |s: f64| log_w.iter().map(|&l| (s * l).exp()).sum::<f64>() - 1.0;
    if f(1.0) >= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= tol && hi - lo <= tol.max(1e-15) {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn moran_dimension(system: &IfsSystem, m: u64, tol: f64) -> Result<MoranBracket> {
    if m < 2 {
        return Err(Error::DegenerateAlphabet(format!(
            "M = {m}: a single branch has dimension 0"
        )));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let bounds = (1..=m).map(|i| system.branch_bounds(i)).collect::<Result<Vec<_>>>()?;
    let log_xi: Vec<f64> = bounds.iter().map(|b| b.0.ln()).collect();
    match system.kind() {
        SystemKind::AffinePowerLaw => {
            let s = moran_root(&log_xi, tol);
            Ok(MoranBracket { lower: s, upper: s })
        }
        SystemKind::MirroredGaussCF => {
            let log_lambda: Vec<f64> = bounds.iter().map(|b| b.1.ln()).collect();
            Ok(MoranBracket { lower: moran_root(&log_xi, tol), upper: moran_root(&log_lambda, tol) })
        }
    }
}

/// `max(0, 2 s(M) − 1)`, using the lower end of the Moran bracket.
pub fn lemdim1_lower_bound(system: &IfsSystem, m: u64, tol: f64) -> Result<f64> {
    let s = moran_dimension(system, m, tol)?.lower;
    Ok((2.0 * s - 1.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pw(a: f64) -> Potential {
        Potential::power_law(a).unwrap()
    }

    #[test]
    fn classification_examples() {
        let g = GrowthRate::poly_exp(0.5).unwrap();
        assert_eq!(classify_regime(&pw(3.0), &g).tag, RegimeTag::Critical);
        let r = classify_regime(&Potential::stretched_exp(2.0).unwrap(), &GrowthRate::super_exp(2.0).unwrap());
        assert_eq!(r.tag, RegimeTag::Uncovered);
        let r = classify_regime(&Potential::stretched_exp(0.5).unwrap(), &GrowthRate::double_exp(3.0).unwrap());
        assert_eq!(r.tag, RegimeTag::T3III);
        let t4 = classify_regime(&Potential::stretched_exp(1.0).unwrap(), &GrowthRate::poly_exp(1.0).unwrap());
        assert_eq!(t4.tag, RegimeTag::T4I2);
        let t3 = classify_regime(&Potential::stretched_exp(0.5).unwrap(), &GrowthRate::poly_exp(1.0).unwrap());
        assert_eq!(t3.tag, RegimeTag::Critical);
        let t2 = classify_regime(&Potential::log_power(2.0).unwrap(), &GrowthRate::poly_exp(2.0 / 3.0).unwrap());
        assert_eq!(t2.tag, RegimeTag::Critical);
        assert_eq!(classify_regime(&pw(1.0), &GrowthRate::double_exp(2.0).unwrap()).tag, RegimeTag::Uncovered);
    }

    #[test]
    fn closed_form_examples() {
        let r = closed_form_dimension(&pw(1.0), &GrowthRate::super_exp(2.0).unwrap(), 2.0).unwrap();
        assert_relative_eq!(r.value.unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let r = closed_form_dimension(
            &Potential::stretched_exp(0.5).unwrap(),
            &GrowthRate::double_exp(2.0).unwrap(),
            2.0,
        )
        .unwrap();
        assert_relative_eq!(r.value.unwrap(), 1.0 / 7.0, epsilon = 1e-15);
        let r = closed_form_dimension(&Potential::log_power(2.0).unwrap(), &GrowthRate::super_exp(8.0).unwrap(), 2.0)
            .unwrap();
        assert_relative_eq!(r.value.unwrap(), 1.0 / (8f64.sqrt() + 1.0), epsilon = 1e-15);
        assert_relative_eq!(r.value.unwrap(), 0.261203874, epsilon = 1e-9);
        let r = closed_form_dimension(&pw(1.0), &GrowthRate::poly_exp(0.3).unwrap(), 2.0).unwrap();
        assert_eq!(r.value, Some(1.0));
        assert!(r.requires_distortion);
        let r = closed_form_dimension(&pw(1.0), &GrowthRate::poly_exp(0.5).unwrap(), 2.0).unwrap();
        assert_eq!(r.value, None);
        assert!(closed_form_dimension(&pw(1.0), &GrowthRate::poly_exp(0.3).unwrap(), 1.0).is_err());
    }

    #[test]
    fn liminf_geometric_closed_form() {
        // s_i = 2^i, t_i = 2^{i-1}: q_n = (n(n-1)/2) / (n² + 2n + 2)
        let n_max = 200;
        let ls: Vec<f64> = (1..=n_max + 1).map(|i| i as f64 * 2f64.ln()).collect();
        let lt: Vec<f64> = (1..=n_max + 1).map(|i| (i - 1) as f64 * 2f64.ln()).collect();
        let est = lem_a_liminf_from_logs(&ls, &lt, 2.0).unwrap();
        for (k, q) in est.partials.iter().enumerate() {
            let n = (k + 1) as f64;
            assert_relative_eq!(q.unwrap(), n * (n - 1.0) / 2.0 / (n * n + 2.0 * n + 2.0), max_relative = 1e-12);
        }
        let q = est.partials.iter().map(|q| q.unwrap()).collect::<Vec<_>>();
        assert!(q.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(q[199], 0.4925498737686253, epsilon = 1e-12);
    }

    #[test]
    fn liminf_zero_when_windows_are_unit() {
        let ls: Vec<f64> = (1..=21).map(|i| i as f64).collect();
        let lt = vec![0.0; 21];
        let est = lem_a_liminf_from_logs(&ls, &lt, 2.0).unwrap();
        assert!(est.partials.iter().all(|q| *q == Some(0.0)));
        assert_eq!(est.estimate, Some(0.0));
    }

    #[test]
    fn moran_examples() {
        let sys = IfsSystem::affine_power_law(2.0).unwrap();
        let s2 = moran_dimension(&sys, 2, 1e-10).unwrap();
        assert!(s2.is_exact());
        let p1 = 6.0 / std::f64::consts::PI.powi(2);
        assert!((p1.powf(s2.lower) + (p1 / 4.0).powf(s2.lower) - 1.0).abs() <= 1e-10);
        assert_relative_eq!(s2.lower, 0.669382, epsilon = 1e-6);
        assert!(matches!(moran_dimension(&sys, 1, 1e-10), Err(Error::DegenerateAlphabet(_))));
        let b = lemdim1_lower_bound(&sys, 2, 1e-10).unwrap();
        assert_relative_eq!(b, 2.0 * s2.lower - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_moran_is_a_bracket() {
        let g = IfsSystem::mirrored_gauss();
        let b = moran_dimension(&g, 10, 1e-12).unwrap();
        assert!(b.lower < b.upper);
        assert_eq!(b.upper, 1.0);
    }
}
