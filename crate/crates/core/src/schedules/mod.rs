//! Digit schedules `(s_n, t_n)`: the digit-window sets built for each
//! theorem case, samplers for points in them, and the sparse-position
//! construction used for the full-dimension cases.

pub mod em;
pub mod sample;
pub mod table;
pub mod t4;

pub use em::{em_spec, sample_em_point, usef_diagnostic, EmSchedule, EmSpec, UsefReport, UsefVerdict};
pub use sample::{
    convergence_profile, sample_word, telescoping_point, ConvergenceProfile, SamplePoint,
};
pub use t4::t4_window_count;

use std::fmt;

use crate::dimension::{classify_regime, RegimeTag};
use crate::error::{domain, Error, Result};
use crate::numeric::log1m_exp;
use crate::potentials::{GrowthRate, Potential};

/// Windows whose right end is below this are handled with exact integers.
pub const EXACT_DIGIT_LIMIT: f64 = 1_099_511_627_776.0; // 2^40

/// Relative slack when rounding window endpoints to integers.
const WINDOW_SLACK: f64 = 1e-12;

/// How many leading indices are scanned for `t_n ≥ s_n` when choosing the
/// start index.
const START_SCAN: u64 = 64;

/// The case-by-case digit windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleCase {
    T1II,
    T1I2a,
    T1I2b,
    T2II,
    T2I2a,
    T2I2b,
    T3I2,
    T3II,
    T3III,
}

impl ScheduleCase {
    pub const ALL: [ScheduleCase; 9] = [
        Self::T1II,
        Self::T1I2a,
        Self::T1I2b,
        Self::T2II,
        Self::T2I2a,
        Self::T2I2b,
        Self::T3I2,
        Self::T3II,
        Self::T3III,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::T1II => "t1-ii",
            Self::T1I2a => "t1-i2a",
            Self::T1I2b => "t1-i2b",
            Self::T2II => "t2-ii",
            Self::T2I2a => "t2-i2a",
            Self::T2I2b => "t2-i2b",
            Self::T3I2 => "t3-i2",
            Self::T3II => "t3-ii",
            Self::T3III => "t3-iii",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.label().eq_ignore_ascii_case(s))
    }

    /// The case matching a potential/growth pair, splitting the `1/d`
    /// plateau at `α = 1`.
    pub fn for_pair(potential: &Potential, growth: &GrowthRate) -> Result<Self> {
        let regime = classify_regime(potential, growth);
        let alpha = match growth {
            GrowthRate::PolyExp { alpha } => *alpha,
            _ => f64::NAN,
        };
        Ok(match regime.tag {
            RegimeTag::T1II => Self::T1II,
            RegimeTag::T1I2 if alpha < 1.0 => Self::T1I2a,
            RegimeTag::T1I2 => Self::T1I2b,
            RegimeTag::T2II => Self::T2II,
            RegimeTag::T2I2 if alpha < 1.0 => Self::T2I2a,
            RegimeTag::T2I2 => Self::T2I2b,
            RegimeTag::T3I2 => Self::T3I2,
            RegimeTag::T3II => Self::T3II,
            RegimeTag::T3III => Self::T3III,
            tag => {
                return Err(Error::UncoveredCase(format!(
                    "{} with {} is in regime {tag}, which has no digit-window schedule",
                    potential.label(),
                    growth.label()
                )))
            }
        })
    }
}

impl fmt::Display for ScheduleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Window width policy: a fixed `ε` gives the covering (upper-bound)
/// windows, a vanishing `ε_n = n^{-power}` the windows of points inside the
/// level set (lower bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    Fixed(f64),
    Vanishing { power: f64 },
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        Self::Vanishing { power: 2.0 }
    }
}

impl EpsilonPolicy {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::Fixed(e) if !(e > 0.0 && e < 1.0) => domain(format!("ε must lie in (0, 1), got {e}")),
            Self::Vanishing { power } if !(power > 0.0) => domain(format!("ε_n decay power must be > 0, got {power}")),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Fixed(e) => format!("fixed:{e}"),
            Self::Vanishing { power } => format!("vanishing:{power}"),
        }
    }
}

/// How `log s_n` and `log t_n` are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleFormula {
    Case { case: ScheduleCase, potential: Potential, growth: GrowthRate, epsilon: EpsilonPolicy },
    /// `s_n = base·ratio^n`, `t_n = base·ratio^{n-1}`.
    Geometric { base: f64, ratio: f64 },
    /// The same window at every position.
    Constant { log_s: f64, log_t: f64 },
    /// Explicit values for `n = 1 … len`.
    Table { log_s: Vec<f64>, log_t: Vec<f64> },
}

/// The digit-window set `{x : a_n(x) ∈ [s_n − t_n, s_n + t_n] for n ≥ N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitSchedule {
    pub formula: ScheduleFormula,
    pub start_index: u64,
}

/// The admissible digits at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigitWindow {
    /// `[lo, hi]` as exact integers when `s_n + t_n < 2^40`.
    pub exact: Option<(u64, u64)>,
    /// `log(s_n − t_n)` and `log(s_n + t_n)`, or the logs of `lo`, `hi`.
    pub log_lo: f64,
    pub log_hi: f64,
    /// The window held no integer or was narrower than 1 and was replaced by
    /// the single digit `max(1, round(s_n))`.
    pub collapsed: bool,
}

impl DigitWindow {
    /// `log` of the number of admissible digits.
    pub fn log_count(&self) -> f64 {
        match self.exact {
            Some((lo, hi)) => ((hi - lo + 1) as f64).ln(),
            // 2t_n digits; log(2t) = log((s+t) − (s−t))
            None => self.log_hi + log1m_exp(self.log_lo - self.log_hi),
        }
    }
}

impl DigitSchedule {
    fn with_formula(formula: ScheduleFormula) -> Result<Self> {
        let mut schedule = Self { formula, start_index: 1 };
        let mut last_bad = 0;
        for n in 1..=START_SCAN {
            if !(schedule.log_ratio(n) < 0.0) || !schedule.log_s(n).is_finite() {
                last_bad = n;
            }
        }
        schedule.start_index = last_bad + 1;
        if let Some(n) = (START_SCAN + 1..=2 * START_SCAN).find(|&n| !(schedule.log_ratio(n) < 0.0)) {
            return domain(format!("t_n ≥ s_n persists (n = {n}); the window width parameter is too large"));
        }
        Ok(schedule)
    }

    pub fn geometric(base: f64, ratio: f64) -> Result<Self> {
        if !(base > 0.0 && ratio > 1.0) {
            return domain(format!("geometric schedule needs base > 0 and ratio > 1, got {base}, {ratio}"));
        }
        Self::with_formula(ScheduleFormula::Geometric { base, ratio })
    }

    pub fn constant(log_s: f64, log_t: f64) -> Result<Self> {
        if !(log_s.is_finite()) {
            return domain("log s must be finite");
        }
        Ok(Self { formula: ScheduleFormula::Constant { log_s, log_t }, start_index: 1 })
    }

    pub fn from_table(log_s: Vec<f64>, log_t: Vec<f64>) -> Result<Self> {
        if log_s.len() != log_t.len() || log_s.is_empty() {
            return domain("schedule table needs matching, nonempty log s / log t columns");
        }
        Ok(Self { formula: ScheduleFormula::Table { log_s, log_t }, start_index: 1 })
    }

    /// Overrides the start index `N`.
    pub fn starting_at(mut self, n: u64) -> Self {
        self.start_index = n.max(1);
        self
    }

    /// Number of defined positions, if finite.
    pub fn len(&self) -> Option<usize> {
        match &self.formula {
            ScheduleFormula::Table { log_s, .. } => Some(log_s.len()),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.formula {
            ScheduleFormula::Case { case, potential, growth, epsilon } => {
                format!("{case}[{},{},{}]", potential.label(), growth.label(), epsilon.label())
            }
            ScheduleFormula::Geometric { base, ratio } => format!("geometric:{base}:{ratio}"),
            ScheduleFormula::Constant { log_s, log_t } => format!("constant:{log_s}:{log_t}"),
            ScheduleFormula::Table { log_s, .. } => format!("table[{}]", log_s.len()),
        }
    }

    /// `log s_n`.
    pub fn log_s(&self, n: u64) -> f64 {
        let nf = n as f64;
        match &self.formula {
            ScheduleFormula::Case { case, potential, growth, .. } => case_log_s(*case, potential, growth, nf),
            ScheduleFormula::Geometric { base, ratio } => base.ln() + nf * ratio.ln(),
            ScheduleFormula::Constant { log_s, .. } => *log_s,
            ScheduleFormula::Table { log_s, .. } => log_s.get(n as usize - 1).copied().unwrap_or(f64::NAN),
        }
    }

    /// `log t_n`.
    pub fn log_t(&self, n: u64) -> f64 {
        self.log_s(n) + self.log_ratio(n)
    }

    /// `log(t_n/s_n)`, computed directly where the formula allows.
    pub fn log_ratio(&self, n: u64) -> f64 {
        match &self.formula {
            ScheduleFormula::Case { case, potential, growth, epsilon } => {
                case_log_ratio(*case, potential, growth, *epsilon, n as f64, self.log_s(n))
            }
            ScheduleFormula::Geometric { ratio, .. } => -ratio.ln(),
            ScheduleFormula::Constant { log_s, log_t } => log_t - log_s,
            ScheduleFormula::Table { log_s, log_t } => {
                let i = n as usize - 1;
                match (log_s.get(i), log_t.get(i)) {
                    (Some(s), Some(t)) => t - s,
                    _ => f64::NAN,
                }
            }
        }
    }

    /// The admissible digit window at position `n` (ignoring the start index).
    pub fn window(&self, n: u64) -> DigitWindow {
        let (ls, lr) = (self.log_s(n), self.log_ratio(n));
        let rel = lr.exp();
        let log_hi = ls + rel.ln_1p();
        if log_hi < EXACT_DIGIT_LIMIT.ln() {
            // Endpoints within WINDOW_SLACK of an integer count as that integer.
            let (s, t) = (ls.exp(), ls.exp() * rel);
            let lo = ((s - t) * (1.0 - WINDOW_SLACK)).ceil().max(1.0);
            let hi = ((s + t) * (1.0 + WINDOW_SLACK)).floor();
            if t < 1.0 || hi < lo {
                let r = s.round().max(1.0) as u64;
                let lr = (r as f64).ln();
                return DigitWindow { exact: Some((r, r)), log_lo: lr, log_hi: lr, collapsed: true };
            }
            return DigitWindow {
                exact: Some((lo as u64, hi as u64)),
                log_lo: lo.ln(),
                log_hi: hi.ln(),
                collapsed: false,
            };
        }
        let log_lo = if rel < 1.0 { ls + log1m_exp(lr) } else { 0.0 };
        DigitWindow { exact: None, log_lo, log_hi, collapsed: false }
    }

    /// `min (1 − t_n/s_n)` over `N ≤ n < N + len`; positive on a healthy
    /// schedule.
    pub fn proportion_floor(&self, len: u64) -> f64 {
        (self.start_index..self.start_index + len)
            .map(|n| -self.log_ratio(n).exp_m1())
            .fold(f64::INFINITY, f64::min)
    }
}

fn growth_params(growth: &GrowthRate) -> (f64, f64, f64) {
    match *growth {
        GrowthRate::PolyExp { alpha } => (alpha, f64::NAN, f64::NAN),
        GrowthRate::SuperExp { beta } => (f64::NAN, beta, f64::NAN),
        GrowthRate::DoubleExp { gamma } => (f64::NAN, f64::NAN, gamma),
    }
}

fn potential_param(potential: &Potential) -> f64 {
    match *potential {
        Potential::PowerLaw { a } => a,
        Potential::LogPower { b } => b,
        Potential::StretchedExp { c } => c,
    }
}

/// `log(α n^{α-1} e^{n^α})`
fn log_increment_density(alpha: f64, n: f64) -> f64 {
    n.powf(alpha) + alpha.ln() + (alpha - 1.0) * n.ln()
}

fn case_log_s(case: ScheduleCase, potential: &Potential, growth: &GrowthRate, n: f64) -> f64 {
    use ScheduleCase::*;
    let p = potential_param(potential);
    let (alpha, beta, gamma) = growth_params(growth);
    match case {
        T1II => beta.powf(n) / p,
        T1I2b => n.powf(alpha) / p,
        T1I2a => log_increment_density(alpha, n) / p,
        T2II => beta.powf(n / p),
        T2I2b => n.powf(alpha / p),
        T2I2a => log_increment_density(alpha, n).max(0.0).powf(1.0 / p),
        T3I2 => alpha / p * n.ln(),
        T3II => n / p * beta.ln(),
        T3III => gamma.powf(n) / p,
    }
}

/// `log(t_n/s_n)`, formed without cancelling against `log s_n`. With a
/// fixed `ε` the width prefactor is `3ε/p`; with vanishing `ε_n` it is `ε_n`
/// (`ε_n/a` and `2ε_n/b` in the sub-threshold lower-bound cases).
fn case_log_ratio(
    case: ScheduleCase,
    potential: &Potential,
    growth: &GrowthRate,
    epsilon: EpsilonPolicy,
    n: f64,
    log_s: f64,
) -> f64 {
    use ScheduleCase::*;
    let p = potential_param(potential);
    let (alpha, beta, gamma) = growth_params(growth);
    let prefactor = match (epsilon, case) {
        (EpsilonPolicy::Fixed(e), _) => (3.0 * e / p).ln(),
        (EpsilonPolicy::Vanishing { power }, T1I2a) => -power * n.ln() - p.ln(),
        (EpsilonPolicy::Vanishing { power }, T2I2a) => -power * n.ln() + (2.0 / p).ln(),
        (EpsilonPolicy::Vanishing { power }, _) => -power * n.ln(),
    };
    prefactor
        + match case {
            T1II | T1I2b | T1I2a => 0.0,
            T2II => n * (1.0 / p - 1.0) * beta.ln(),
            T2I2b | T2I2a => alpha * (1.0 / p - 1.0) * n.ln(),
            T3I2 => alpha * (1.0 / p - 1.0) * n.ln() - log_s,
            T3II => n * (1.0 / p - 1.0) * beta.ln() - log_s,
            T3III => gamma.powf(n) * (1.0 / p - 1.0) - log_s,
        }
}

/// The digit windows for a theorem case. A fixed `ε` gives the covering
/// windows, a vanishing `ε_n` the windows of points inside the level set.
pub fn theorem_schedule(
    potential: &Potential,
    growth: &GrowthRate,
    case: ScheduleCase,
    epsilon: EpsilonPolicy,
) -> Result<DigitSchedule> {
    epsilon.validate()?;
    let expected = ScheduleCase::for_pair(potential, growth)?;
    if expected != case {
        return Err(Error::UncoveredCase(format!(
            "{} with {} is case {expected}, not {case}",
            potential.label(),
            growth.label()
        )));
    }
    if matches!(epsilon, EpsilonPolicy::Fixed(_)) && matches!(case, ScheduleCase::T1I2a | ScheduleCase::T2I2a) {
        return Err(Error::UncoveredCase(format!(
            "case {case} has no covering digit-window schedule; its upper bound comes from the block covering (product_g_diagnostic)"
        )));
    }
    DigitSchedule::with_formula(ScheduleFormula::Case { case, potential: *potential, growth: *growth, epsilon })
}
