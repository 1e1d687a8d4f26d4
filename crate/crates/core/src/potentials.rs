//! Potential families φ and growth rates Φ, evaluated in log scale.
//!
//! Growth rates such as `Φ(n) = e^{e^{γ^n}}` leave the double range almost
//! immediately, so every quantity here is carried as a [`LogScaleValue`]:
//! either `log x` or, once that overflows, `log log x`.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::numeric::{log1m_exp, log_add_exp, log_sum_exp};

/// Largest `log x` we keep at `Scale::Log`. Above this `x` itself is not
/// representable, but `log x` still is; the cut-over is applied only when
/// `log x` overflows.
const LOG_LIMIT: f64 = f64::MAX;

/// Which logarithm a [`LogScaleValue`] stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    /// The stored number is `log x`.
    Log,
    /// The stored number is `log log x`.
    LogLog,
}

/// A positive magnitude stored as `log x` or `log log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaleValue {
    pub value: f64,
    pub scale: Scale,
}

impl LogScaleValue {
    pub fn log(value: f64) -> Self {
        Self { value, scale: Scale::Log }
    }

    pub fn loglog(value: f64) -> Self {
        Self { value, scale: Scale::LogLog }
    }

    /// Builds from `log log x`, dropping to `Scale::Log` when `log x` fits.
    pub fn from_loglog(loglog: f64) -> Self {
        let log = loglog.exp();
        if log.is_finite() {
            Self::log(log)
        } else {
            Self::loglog(loglog)
        }
    }

    /// `log x`, when representable.
    pub fn as_log(&self) -> Option<f64> {
        match self.scale {
            Scale::Log => Some(self.value),
            Scale::LogLog => {
                let v = self.value.exp();
                v.is_finite().then_some(v)
            }
        }
    }

    /// `log log x`; `-inf` when `x ≤ 1`.
    pub fn as_loglog(&self) -> f64 {
        match self.scale {
            Scale::LogLog => self.value,
            Scale::Log if self.value > 0.0 => self.value.ln(),
            Scale::Log => f64::NEG_INFINITY,
        }
    }

    pub fn is_loglog(&self) -> bool {
        self.scale == Scale::LogLog
    }

    /// `log(x + y)`. At log-log scale the larger term is exact to double
    /// precision: the smaller one changes `log log` by less than `e^{-709}`.
    pub fn add(self, other: Self) -> Self {
        match (self.scale, other.scale) {
            (Scale::Log, Scale::Log) => Self::log(log_add_exp(self.value, other.value)),
            _ => Self::loglog(self.as_loglog().max(other.as_loglog())),
        }
    }
}

impl fmt::Display for LogScaleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scale {
            Scale::Log => write!(f, "LOG {}", self.value),
            Scale::LogLog => write!(f, "LOGLOG {}", self.value),
        }
    }
}

/// The potential families `φ(j) = j^a`, `e^{(log j)^b}` and `e^{j^c}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    PowerLaw { a: f64 },
    LogPower { b: f64 },
    StretchedExp { c: f64 },
}

impl Potential {
    pub fn power_law(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return domain(format!("power-law exponent a must be > 0, got {a}"));
        }
        Ok(Self::PowerLaw { a })
    }

    pub fn log_power(b: f64) -> Result<Self> {
        if !(b > 1.0 && b.is_finite()) {
            return domain(format!("log-power exponent b must be > 1, got {b}"));
        }
        Ok(Self::LogPower { b })
    }

    pub fn stretched_exp(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("stretched-exponential exponent c must be > 0, got {c}"));
        }
        Ok(Self::StretchedExp { c })
    }

    /// `log φ(j)` given `log j`.
    pub fn log_phi(&self, log_j: f64) -> Result<f64> {
        let v = self.log_phi_scaled(log_j)?;
        v.as_log()
            .ok_or_else(|| Error::ScaleOverflow(format!("log φ(j) for log j = {log_j}")))
    }

    /// `φ(j)` in log scale, switching to `log log` when `log φ` overflows.
    pub fn log_phi_scaled(&self, log_j: f64) -> Result<LogScaleValue> {
        if !(log_j >= 0.0) {
            return domain(format!("φ is defined for j ≥ 1; got log j = {log_j}"));
        }
        Ok(match *self {
            Self::PowerLaw { a } => LogScaleValue::log(a * log_j),
            Self::LogPower { b } => {
                let v = log_j.powf(b);
                if v.is_finite() {
                    LogScaleValue::log(v)
                } else {
                    LogScaleValue::loglog(b * log_j.ln())
                }
            }
            Self::StretchedExp { c } => LogScaleValue::from_loglog(c * log_j),
        })
    }

    /// `log j` for the real `j` with `φ(j) = y`, given `log y`.
    pub fn log_phi_inverse(&self, log_y: f64) -> Result<f64> {
        if !(log_y >= 0.0) {
            return domain(format!("φ ≥ 1 on integers; got log y = {log_y}"));
        }
        match *self {
            Self::PowerLaw { a } => Ok(log_y / a),
            Self::LogPower { b } => Ok(log_y.powf(1.0 / b)),
            Self::StretchedExp { c } => {
                if log_y == 0.0 {
                    return domain("e^{j^c} = 1 has no solution j > 0");
                }
                Ok(log_y.ln() / c)
            }
        }
    }

    /// Inverse of `φ` on log-scale input, returning `j` in log scale.
    pub fn log_phi_inverse_scaled(&self, y: LogScaleValue) -> Result<LogScaleValue> {
        match y.scale {
            Scale::Log => self.log_phi_inverse(y.value).map(LogScaleValue::log),
            Scale::LogLog => Ok(match *self {
                Self::PowerLaw { a } => LogScaleValue::from_loglog(y.value - a.ln()),
                Self::LogPower { b } => LogScaleValue::from_loglog(y.value / b),
                Self::StretchedExp { c } => LogScaleValue::log(y.value / c),
            }),
        }
    }

    /// Short parameter label, e.g. `power:2`.
    pub fn label(&self) -> String {
        match self {
            Self::PowerLaw { a } => format!("power:{a}"),
            Self::LogPower { b } => format!("logpower:{b}"),
            Self::StretchedExp { c } => format!("stretched:{c}"),
        }
    }
}

/// The growth-rate families `Φ(n) = e^{n^α}`, `e^{β^n}` and `e^{e^{γ^n}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthRate {
    PolyExp { alpha: f64 },
    SuperExp { beta: f64 },
    DoubleExp { gamma: f64 },
}

/// `log(Φ(n) - Φ(m))` and whether it had to be approximated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    pub value: LogScaleValue,
    /// Set when the correction `log(1 - Φ(m)/Φ(n))` is below the resolution
    /// of the stored scale and `log Φ(n)` is returned in its place.
    pub approximate: bool,
}

impl GrowthRate {
    pub fn poly_exp(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("α must be > 0, got {alpha}"));
        }
        Ok(Self::PolyExp { alpha })
    }

    pub fn super_exp(beta: f64) -> Result<Self> {
        if !(beta > 1.0 && beta.is_finite()) {
            return domain(format!("β must be > 1, got {beta}"));
        }
        Ok(Self::SuperExp { beta })
    }

    pub fn double_exp(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return domain(format!("γ must be > 1, got {gamma}"));
        }
        Ok(Self::DoubleExp { gamma })
    }

    /// `Φ(n)` in log scale. `n = 0` is accepted and gives `Φ(0)` by the same
    /// formula.
    pub fn log_growth(&self, n: u64) -> Result<LogScaleValue> {
        let nf = n as f64;
        let v = match *self {
            Self::PolyExp { alpha } => {
                let v = nf.powf(alpha);
                if v <= LOG_LIMIT {
                    LogScaleValue::log(v)
                } else {
                    LogScaleValue::loglog(alpha * nf.ln())
                }
            }
            Self::SuperExp { beta } => {
                let v = beta.powf(nf);
                if v <= LOG_LIMIT {
                    LogScaleValue::log(v)
                } else {
                    LogScaleValue::loglog(nf * beta.ln())
                }
            }
            Self::DoubleExp { gamma } => {
                let inner = gamma.powf(nf);
                if !inner.is_finite() {
                    return Err(Error::ScaleOverflow(format!(
                        "log log Φ({n}) = γ^n overflows for γ = {gamma}"
                    )));
                }
                LogScaleValue::from_loglog(inner)
            }
        };
        Ok(v)
    }

    /// `log(Φ(n) - Φ(n-1))` for `n ≥ 2`.
    pub fn growth_increment_log(&self, n: u64) -> Result<Increment> {
        if n < 2 {
            return domain(format!("increment needs n ≥ 2, got {n}"));
        }
        self.log_growth_difference(n, Some(n - 1))
    }

    /// `log(Φ(hi) - Φ(lo))`, or `log Φ(hi)` when `lo` is `None`.
    pub fn log_growth_difference(&self, hi: u64, lo: Option<u64>) -> Result<Increment> {
        let top = self.log_growth(hi)?;
        let Some(lo) = lo else {
            return Ok(Increment { value: top, approximate: false });
        };
        if lo >= hi {
            return domain(format!("Φ({hi}) - Φ({lo}) is not positive"));
        }
        let bottom = self.log_growth(lo)?;
        match (top.scale, bottom.scale) {
            (Scale::Log, Scale::Log) => {
                let gap = bottom.value - top.value;
                if !(gap < 0.0) {
                    return domain(format!("Φ is not increasing between {lo} and {hi}"));
                }
                Ok(Increment {
                    value: LogScaleValue::log(top.value + log1m_exp(gap)),
                    approximate: false,
                })
            }
            _ => Ok(Increment { value: top, approximate: true }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::PolyExp { alpha } => format!("polyexp:{alpha}"),
            Self::SuperExp { beta } => format!("superexp:{beta}"),
            Self::DoubleExp { gamma } => format!("doubleexp:{gamma}"),
        }
    }
}

/// `log S_nφ = log Σ_j φ(a_j)` given the digits' logs. Real-valued digits are
/// accepted.
pub fn birkhoff_log_sum(potential: &Potential, log_digits: &[f64]) -> Result<f64> {
    if log_digits.is_empty() {
        return domain("Birkhoff sum of an empty digit sequence");
    }
    let terms = log_digits
        .iter()
        .map(|&l| potential.log_phi(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_sum_exp(&terms))
}

/// [`birkhoff_log_sum`] with log-log fallback for astronomically large terms.
pub fn birkhoff_log_sum_scaled(potential: &Potential, log_digits: &[f64]) -> Result<LogScaleValue> {
    if log_digits.is_empty() {
        return domain("Birkhoff sum of an empty digit sequence");
    }
    let terms = log_digits
        .iter()
        .map(|&l| potential.log_phi_scaled(l))
        .collect::<Result<Vec<_>>>()?;
    if terms.iter().all(|t| t.scale == Scale::Log) {
        let logs: Vec<f64> = terms.iter().map(|t| t.value).collect();
        return Ok(LogScaleValue::log(log_sum_exp(&logs)));
    }
    Ok(terms.into_iter().reduce(LogScaleValue::add).expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_phi_examples() {
        let p = Potential::power_law(2.0).unwrap();
        assert_relative_eq!(p.log_phi(3f64.ln()).unwrap(), 9f64.ln(), epsilon = 1e-14);
        let s = Potential::stretched_exp(0.5).unwrap();
        assert_relative_eq!(s.log_phi(4f64.ln()).unwrap(), 2.0, epsilon = 1e-14);
        let l = Potential::log_power(2.0).unwrap();
        assert_relative_eq!(l.log_phi(20f64.ln()).unwrap(), 8.974412, epsilon = 1e-6);
        assert!(p.log_phi(-0.1).is_err());
    }

    #[test]
    fn log_phi_inverse_examples() {
        let p = Potential::power_law(2.0).unwrap();
        assert_relative_eq!(p.log_phi_inverse(9f64.ln()).unwrap(), 3f64.ln(), epsilon = 1e-14);
        let s = Potential::stretched_exp(0.5).unwrap();
        assert_relative_eq!(s.log_phi_inverse(2.0).unwrap(), 4f64.ln(), epsilon = 1e-14);
        let l = Potential::log_power(3.0).unwrap();
        assert_relative_eq!(l.log_phi_inverse(8.0).unwrap(), 2.0, epsilon = 1e-14);
        assert!(p.log_phi_inverse(-1.0).is_err());
        assert!(s.log_phi_inverse(0.0).is_err());
    }

    #[test]
    fn parameter_ranges_are_enforced() {
        assert!(Potential::power_law(0.0).is_err());
        assert!(Potential::log_power(1.0).is_err());
        assert!(Potential::stretched_exp(-1.0).is_err());
        assert!(GrowthRate::poly_exp(0.0).is_err());
        assert!(GrowthRate::super_exp(1.0).is_err());
        assert!(GrowthRate::double_exp(0.9).is_err());
    }

    #[test]
    fn log_growth_examples() {
        let g = GrowthRate::super_exp(2.0).unwrap();
        assert_eq!(g.log_growth(10).unwrap(), LogScaleValue::log(1024.0));
        let h = GrowthRate::double_exp(2.0).unwrap();
        let v = h.log_growth(3).unwrap();
        assert_eq!(v.scale, Scale::Log);
        assert_relative_eq!(v.value, 8f64.exp(), max_relative = 1e-14);
        let w = h.log_growth(50).unwrap();
        assert_eq!(w.scale, Scale::LogLog);
        assert_relative_eq!(w.value, 2f64.powi(50), max_relative = 1e-15);
    }

    #[test]
    fn increment_examples() {
        let g = GrowthRate::poly_exp(1.0).unwrap();
        for n in [2u64, 5, 30] {
            let inc = g.growth_increment_log(n).unwrap();
            assert!(!inc.approximate);
            assert_relative_eq!(inc.value.value, n as f64 - 0.458675145387082, epsilon = 1e-12);
        }
        let s = GrowthRate::super_exp(2.0).unwrap();
        let direct = (16f64.exp() - 8f64.exp()).ln();
        assert_relative_eq!(s.growth_increment_log(4).unwrap().value.value, direct, epsilon = 1e-12);
        assert_relative_eq!(direct, 15.999665, epsilon = 1e-6);
        let h = GrowthRate::poly_exp(0.5).unwrap();
        let v = h.growth_increment_log(100).unwrap().value.value;
        assert_relative_eq!(v, 10.0 + (1.0 - (99f64.sqrt() - 10.0).exp()).ln(), epsilon = 1e-12);
        assert_relative_eq!(v, 6.981819, epsilon = 1e-6);
        assert!(g.growth_increment_log(1).is_err());
    }

    #[test]
    fn increment_in_loglog_regime_is_flagged() {
        let h = GrowthRate::double_exp(2.0).unwrap();
        let inc = h.growth_increment_log(20).unwrap();
        assert!(inc.approximate);
        assert_eq!(inc.value, h.log_growth(20).unwrap());
    }

    #[test]
    fn birkhoff_examples() {
        let p1 = Potential::power_law(1.0).unwrap();
        let logs: Vec<f64> = [1f64, 2.0, 3.0].iter().map(|x| x.ln()).collect();
        assert_relative_eq!(birkhoff_log_sum(&p1, &logs).unwrap(), 6f64.ln(), epsilon = 1e-14);
        let p2 = Potential::power_law(2.0).unwrap();
        let logs: Vec<f64> = [3f64, 4.0].iter().map(|x| x.ln()).collect();
        assert_relative_eq!(birkhoff_log_sum(&p2, &logs).unwrap(), 25f64.ln(), epsilon = 1e-14);
        let s1 = Potential::stretched_exp(1.0).unwrap();
        let logs = [10f64.ln(), 0.0];
        let expect = (10f64.exp() + 1f64.exp()).ln();
        assert_relative_eq!(birkhoff_log_sum(&s1, &logs).unwrap(), expect, epsilon = 1e-13);
        assert_relative_eq!(expect, 10.000123, epsilon = 1e-6);
        assert!(birkhoff_log_sum(&p1, &[]).is_err());
    }

    #[test]
    fn scaled_sum_keeps_the_dominant_loglog_term() {
        let s = Potential::stretched_exp(0.5).unwrap();
        let v = birkhoff_log_sum_scaled(&s, &[2000.0, 1800.0, 3.0]).unwrap();
        assert_eq!(v.scale, Scale::LogLog);
        assert_relative_eq!(v.value, 1000.0, epsilon = 1e-12);
    }
}
