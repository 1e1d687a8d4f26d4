//! Covering-sum dimension estimators for digit-window sets: level-`n` cover
//! sums, their bisection roots in `s`, local dimensions of the uniform
//! window measure, and the block-product cover bound for the sub-threshold
//! `1/d` plateau.

use std::fmt;

use crate::counting::bounds::g_bound_log;
use crate::dimension::lem_a_liminf_from_logs;
use crate::error::{domain, Error, Result};
use crate::ifs::{IfsSystem, SystemKind};
use crate::numeric::{exprel, log1m_exp, log_add_exp, power_sum};
use crate::schedules::{sample_word, DigitSchedule, DigitWindow};

/// Window sums whose right end reaches this are completed by an integral.
pub const EXACT_SUM_LIMIT: u64 = 1_000_000;

/// Bisection bracket for covering-sum roots.
pub const ROOT_BRACKET: (f64, f64) = (0.01, 1.5);

/// Which sets cover the level-`n` part of a digit-window set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverKind {
    /// The level-`n` cylinders themselves.
    Cylinders,
    /// Each level-`n` cylinder shrunk to the hull of its admissible
    /// level-`(n+1)` children.
    #[default]
    Refined,
}

impl CoverKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Cylinders => "cylinders",
            Self::Refined => "refined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cylinders" => Some(Self::Cylinders),
            "refined" => Some(Self::Refined),
            _ => None,
        }
    }
}

/// How the per-level window sums were evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMethod {
    /// Every window summed exactly.
    Exact,
    /// At least one window completed by a midpoint integral.
    Integral,
}

impl CoverMethod {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Exact => "EXACT",
            Self::Integral => "INTEGRAL",
        }
    }

    fn join(self, other: Self) -> Self {
        if self == Self::Exact && other == Self::Exact {
            Self::Exact
        } else {
            Self::Integral
        }
    }
}

impl fmt::Display for CoverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `log Σ |I|^s` over the level-`n` cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverReport {
    pub depth: u64,
    pub s: f64,
    pub kind: CoverKind,
    /// The value itself; `None` for systems with only two-sided bounds.
    pub log_sum: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub method: CoverMethod,
}

/// `log ∫_x^y t^{-σ} dt` from `log x < log y`.
fn log_integral(sigma: f64, log_x: f64, log_y: f64) -> f64 {
    let w = log_y - log_x;
    let u = 1.0 - sigma;
    let uw = u * w;
    if uw.abs() < 1e-3 {
        u * log_x + w.ln() + exprel(uw).ln()
    } else if uw > 0.0 {
        u * log_y + log1m_exp(-uw) - u.ln()
    } else {
        u * log_x + log1m_exp(uw) - (-u).ln()
    }
}

/// `log ∫_{L−½}^{U+½} t^{-σ} dt`, the midpoint approximation of
/// `log Σ_{a=L}^{U} a^{-σ}`.
pub fn midpoint_integral_log(sigma: f64, lo: f64, hi: f64) -> f64 {
    log_integral(sigma, (lo - 0.5).ln(), (hi + 0.5).ln())
}

/// `log Σ_{a=L}^{U} (a + shift)^{-σ}` over one digit window.
fn window_log_power_sum(window: &DigitWindow, shift: u64, sigma: f64) -> (f64, CoverMethod) {
    match window.exact {
        Some((lo, hi)) => {
            let (lo, hi) = (lo + shift, hi + shift);
            if hi < EXACT_SUM_LIMIT {
                return (power_sum(sigma, lo, hi).0.ln(), CoverMethod::Exact);
            }
            if lo >= EXACT_SUM_LIMIT {
                return (midpoint_integral_log(sigma, lo as f64, hi as f64), CoverMethod::Integral);
            }
            let head = power_sum(sigma, lo, EXACT_SUM_LIMIT - 1).0.ln();
            let tail = midpoint_integral_log(sigma, EXACT_SUM_LIMIT as f64, hi as f64);
            (log_add_exp(head, tail), CoverMethod::Integral)
        }
        None => {
            // Endpoints beyond 2^40: the ±½ and the shift are below rounding.
            let cut = (EXACT_SUM_LIMIT as f64).ln();
            if window.log_lo >= cut {
                return (log_integral(sigma, window.log_lo, window.log_hi), CoverMethod::Integral);
            }
            let lo = window.log_lo.exp().ceil().max(1.0) as u64 + shift;
            let head = power_sum(sigma, lo, EXACT_SUM_LIMIT - 1).0.ln();
            let tail = log_integral(sigma, (EXACT_SUM_LIMIT as f64 - 0.5).ln(), window.log_hi);
            (log_add_exp(head, tail), CoverMethod::Integral)
        }
    }
}

/// Two-sided `log Σ_{a ∈ W} |f_a([0,1])|^s` for one window.
fn level_log_sum(system: &IfsSystem, window: &DigitWindow, s: f64) -> (f64, f64, CoverMethod) {
    let d = system.d();
    match system.kind() {
        SystemKind::AffinePowerLaw => {
            let (v, m) = window_log_power_sum(window, 0, d * s);
            let v = v - s * system.zeta_d().ln();
            (v, v, m)
        }
        SystemKind::MirroredGaussCF => {
            let (lo, m1) = window_log_power_sum(window, 1, d * s);
            let (hi, m2) = window_log_power_sum(window, 0, d * s);
            (lo, hi, m1.join(m2))
        }
    }
}

/// The window at level `i`, with digit 1 before the start index.
fn level_window(schedule: &DigitSchedule, i: u64) -> DigitWindow {
    if i < schedule.start_index {
        DigitWindow { exact: Some((1, 1)), log_lo: 0.0, log_hi: 0.0, collapsed: false }
    } else {
        schedule.window(i)
    }
}

pub fn covering_log_sum(
    system: &IfsSystem,
    schedule: &DigitSchedule,
    n: u64,
    s: f64,
    kind: CoverKind,
) -> Result<CoverReport> {
    if n == 0 {
        return domain("covering depth must be ≥ 1");
    }
    if !(s > 0.0 && s <= 2.0) {
        return domain(format!("s must lie in (0, 2], got {s}"));
    }
    let (mut lower, mut upper, mut method) = (0.0, 0.0, CoverMethod::Exact);
    for i in 1..=n {
        let (lo, hi, m) = level_log_sum(system, &level_window(schedule, i), s);
        lower += lo;
        upper += hi;
        method = method.join(m);
    }
    if kind == CoverKind::Refined {
        // |D_n| = |I_n| · Σ_{a ∈ W_{n+1}} |f_a([0,1])|
        let (lo, hi, m) = level_log_sum(system, &level_window(schedule, n + 1), 1.0);
        lower += s * lo;
        upper += s * hi;
        method = method.join(m);
    }
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(Error::Divergence(format!("covering sum at depth {n}, s = {s} is not finite")));
    }
    let log_sum = (system.kind() == SystemKind::AffinePowerLaw).then_some(upper);
    Ok(CoverReport { depth: n, s, kind, log_sum, lower, upper, method })
}

/// Per-depth covering roots next to the liminf-formula partials.
#[derive(Debug, Clone, PartialEq)]
pub struct RootTrace {
    /// `s*_k` for `k = 1 … n`; `None` where the bracket has no sign change.
    pub roots: Vec<Option<f64>>,
    /// Final bisection bracket and iteration count per depth.
    pub brackets: Vec<Option<(f64, f64, u32)>>,
    /// `q_k` of the liminf formula for the same schedule.
    pub partials: Vec<Option<f64>>,
    /// Roots above 1, which only occur before the asymptotic regime.
    pub above_one: Vec<bool>,
}

impl RootTrace {
    pub fn root(&self) -> Option<f64> {
        self.roots.last().copied().flatten()
    }

    pub fn gap(&self, k: usize) -> Option<f64> {
        Some(self.roots.get(k)?.as_ref()? - self.partials.get(k)?.as_ref()?)
    }
}

fn bisect_root(system: &IfsSystem, schedule: &DigitSchedule, n: u64, tol: f64) -> Result<std::result::Result<(f64, f64, u32), (f64, f64)>> {
    let f = |s: f64| -> Result<f64> {
        Ok(covering_log_sum(system, schedule, n, s, CoverKind::Refined)?.upper)
    };
    let (mut lo, mut hi) = ROOT_BRACKET;
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Ok(Err((f_lo, f_hi)));
    }
    let mut iters = 0;
    while hi - lo > tol && iters < 200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    Ok(Ok((lo, hi, iters)))
}

/// Bisection roots of the refined covering sum for every depth up to `n`.
/// Errors when depth `n` itself has no sign change on [`ROOT_BRACKET`].
pub fn dimension_root(system: &IfsSystem, schedule: &DigitSchedule, n: u64, tol: f64) -> Result<RootTrace> {
    if system.kind() != SystemKind::AffinePowerLaw {
        return domain("dimension_root needs the affine system; the mirrored system only has two-sided cover bounds");
    }
    if n == 0 || !(tol > 0.0) {
        return domain("dimension_root needs n ≥ 1 and tol > 0");
    }
    let mut trace = RootTrace { roots: vec![], brackets: vec![], partials: vec![], above_one: vec![] };
    for k in 1..=n {
        match bisect_root(system, schedule, k, tol)? {
            Ok((lo, hi, it)) => {
                let r = 0.5 * (lo + hi);
                trace.roots.push(Some(r));
                trace.brackets.push(Some((lo, hi, it)));
                trace.above_one.push(r > 1.0);
            }
            Err((f_lo, f_hi)) if k == n => {
                return Err(Error::Bracket { lo: ROOT_BRACKET.0, hi: ROOT_BRACKET.1, f_lo, f_hi });
            }
            Err(_) => {
                trace.roots.push(None);
                trace.brackets.push(None);
                trace.above_one.push(false);
            }
        }
    }
    let log_s: Vec<f64> = (1..=n + 1).map(|i| schedule.log_s(i)).collect();
    let log_t: Vec<f64> = (1..=n + 1).map(|i| schedule.log_t(i)).collect();
    trace.partials = lem_a_liminf_from_logs(&log_s, &log_t, system.d())?.partials;
    Ok(trace)
}

/// Local scaling of the uniform window measure along one sampled point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDimensionProfile {
    /// `log r_n`, the log diameter of the refined cover set at level `n`.
    pub log_r: Vec<f64>,
    /// `log μ` of the same set.
    pub log_mu: Vec<f64>,
    /// `log μ / log r`; `None` where undefined.
    pub slopes: Vec<Option<f64>>,
    /// Every window holds a single digit, so `μ` is a point mass.
    pub degenerate: bool,
}

/// The profile for a point drawn with `seed`, the schedule's windows applied
/// from position 1.
pub fn local_dimension_profile(
    system: &IfsSystem,
    schedule: &DigitSchedule,
    seed: u64,
    depth: usize,
) -> Result<LocalDimensionProfile> {
    if depth < 4 {
        return domain(format!("profile depth must be ≥ 4, got {depth}"));
    }
    let schedule = schedule.clone().starting_at(1);
    let point = sample_word(&schedule, depth, seed)?;
    let mut log_r = Vec::with_capacity(depth);
    let mut log_mu = Vec::with_capacity(depth);
    let mut mu = 0.0;
    let mut all_single = true;
    for n in 1..=depth {
        let w = schedule.window(n as u64);
        let count = w.log_count();
        all_single &= count == 0.0;
        mu -= count;
        let cyl = system.log_cylinder_diameter_from_logs(&point.log_digits[..n]);
        let (lo, hi, _) = level_log_sum(system, &schedule.window(n as u64 + 1), 1.0);
        log_r.push(0.5 * (cyl.lower + cyl.upper) + 0.5 * (lo + hi));
        log_mu.push(mu);
    }
    let slopes = log_r
        .iter()
        .zip(&log_mu)
        .map(|(r, m)| (!all_single && *r < 0.0).then(|| m / r))
        .collect();
    Ok(LocalDimensionProfile { log_r, log_mu, slopes, degenerate: all_single })
}

/// Verdict of [`product_g_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductGVerdict {
    Decays,
    /// `witness` is the first tail index where the bound does not decrease,
    /// or `0` when the validity window is never reached by `k_max/2`.
    NotDecaying { witness: usize },
}

impl ProductGVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Decays => "DECAYS",
            Self::NotDecaying { .. } => "NOT_DECAYING",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductGReport {
    /// `n_k` for `k = 0 … k_max`.
    pub positions: Vec<u64>,
    /// `log m(k)` for `k = 1 … k_max`.
    pub log_m: Vec<f64>,
    /// `log(K₂^{s n_k} Π_{j≤k} G(m(j), n(j), a, 1/3, s))` for `k = 1 … k_max`.
    pub log_bounds: Vec<f64>,
    /// Whether the `G` bound's lower window end lies below `1/3` at `k`.
    pub valid: Vec<bool>,
    /// Smallest `k` from which every later factor is valid.
    pub valid_from: Option<usize>,
    pub verdict: ProductGVerdict,
}

/// The block-product cover bound for `φ(j) = j^a`, `Φ(n) = e^{n^α}` with
/// `1/2 < α`, on the affine system of exponent `d`: blocks end at
/// `n_k = round(k^{1/α})` and block `k` carries Birkhoff mass
/// `m(k) = (1−ε/5)e^k − (1+ε/5)e^{k−1}`.
pub fn product_g_diagnostic(eps: f64, k_max: usize, a: f64, d: f64, s: f64, alpha: f64) -> Result<ProductGReport> {
    if !(alpha > 0.5) {
        return domain(format!("the block cover needs α > 1/2, got {alpha}"));
    }
    if !(s > 1.0 / d) {
        return domain(format!("the block cover needs s > 1/d = {}, got {s}", 1.0 / d));
    }
    if !(eps > 0.0 && eps < 1.0) || k_max < 2 {
        return domain("need ε ∈ (0, 1) and k_max ≥ 2");
    }
    let system = IfsSystem::affine_power_law(d)?;
    let log_k2 = -system.zeta_d().ln();
    let block_mass = (1.0 - eps / 5.0) * std::f64::consts::E - (1.0 + eps / 5.0);
    if !(block_mass > 0.0) {
        return domain("m(k) is not positive for this ε");
    }
    let third = 1.0 / 3.0;
    let mut positions = vec![1u64];
    let (mut log_m, mut log_bounds, mut valid) = (vec![], vec![], vec![]);
    let mut acc = 0.0;
    for k in 1..=k_max {
        let prev = *positions.last().expect("n_0");
        let n = ((k as f64).powf(1.0 / alpha).round() as u64).max(prev + 1);
        positions.push(n);
        let lm = (k - 1) as f64 + block_mass.ln();
        let g = g_bound_log(a, lm.exp(), (n - prev) as usize, third, d * s)?;
        acc += g.log_bound;
        log_m.push(lm);
        log_bounds.push(s * n as f64 * log_k2 + acc);
        valid.push(g.window.0 < third);
    }
    let valid_from = match valid.iter().rposition(|v| !v) {
        None => Some(1),
        Some(i) if i + 1 < k_max => Some(i + 2),
        Some(_) => None,
    };
    let half = k_max / 2;
    let verdict = match valid_from {
        Some(v) if v <= half => match log_bounds[half - 1..].windows(2).position(|w| w[1] >= w[0]) {
            None => ProductGVerdict::Decays,
            Some(i) => ProductGVerdict::NotDecaying { witness: half + i + 1 },
        },
        _ => ProductGVerdict::NotDecaying { witness: 0 },
    };
    Ok(ProductGReport { positions, log_m, log_bounds, valid, valid_from, verdict })
}
