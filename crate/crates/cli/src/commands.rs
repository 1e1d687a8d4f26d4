//! Command runners. Each turns resolved settings into a [`Report`].

use birkhoff_core::counting::{
    g_bound, g_sum, ghat_bound, ghat_sum, verify_counting_grid, EnumerationMethod, Lemma, TupleConstraint, TupleShape,
};
use birkhoff_core::covering::{midpoint_integral_log, product_g_diagnostic, ProductGVerdict};
use birkhoff_core::ifs::SystemKind;
use birkhoff_core::numeric::power_sum;
use birkhoff_core::report::{format_opt, format_sig};
use birkhoff_core::schedules::table::schedule_rows;
use birkhoff_core::schedules::{
    convergence_profile, em_spec, sample_em_point, sample_word, t4_window_count, telescoping_point, usef_diagnostic,
    UsefVerdict,
};
use birkhoff_core::{
    closed_form_dimension, covering_log_sum, dimension_root, lem_a_liminf, CoverKind, DigitSchedule, Error, GrowthRate,
    Potential, ScheduleCase,
};

use crate::{Failure, Report, Settings, EXIT_UNCOVERED, EXIT_VERIFY_FAILED};

/// Relative tolerance of the liminf-formula check.
pub const LEMA_REL_TOL: f64 = 0.02;
/// Largest allowed gap between the covering root and the liminf partial.
pub const ROOT_GAP_TOL: f64 = 0.02;
/// Agreement required between exact and midpoint-integral power sums.
pub const INTEGRAL_REL_TOL: f64 = 1e-6;
/// Tolerance on reported system constants.
pub const CONSTANT_REL_TOL: f64 = 1e-10;
/// Minimum number of valid grid points per counting lemma.
pub const MIN_VALID_GRID: usize = 100;
/// Sweeps longer than this are rejected.
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

/// Per-command (and per-suite) defaults layered over the global ones.
pub fn command_defaults(command: &str, suite: Option<&str>) -> &'static [(&'static str, &'static str)] {
    match (command, suite) {
        ("sample", _) | ("verify", Some("schedules")) => &[("depth", "30")],
        ("root", _) | ("verify", Some("covering")) => &[("depth", "40"), ("schedule", "geometric:10:2")],
        ("counting", _) => &[("shape", "power:1"), ("cap", "100000000"), ("closed", "false")],
        ("verify", Some("counting")) => &[("cap", "100000000")],
        _ => &[],
    }
}

pub fn dispatch(command: &str, suite: Option<&str>, settings: &mut Settings) -> Result<Report, Failure> {
    match (command, suite) {
        ("dimension", _) => dimension(settings),
        ("sweep", _) => sweep(settings),
        ("verify", Some("axioms")) => verify_axioms(settings),
        ("verify", Some("counting")) => verify_counting(settings),
        ("verify", Some("lemA")) => verify_lema(settings),
        ("verify", Some("covering")) => verify_covering(settings),
        ("verify", Some("schedules")) => verify_schedules(settings),
        ("sample", _) => sample(settings),
        ("counting", _) => counting(settings),
        ("root", _) => root(settings),
        _ => Err(Failure::usage(format!("unknown command `{command}`"))),
    }
}

/// Fills in `schedule` with the theorem case of the (potential, growth)
/// pair when none was given.
fn ensure_schedule(settings: &mut Settings) -> Result<(), Failure> {
    if settings.get("schedule").is_none() {
        let case = ScheduleCase::for_pair(&settings.potential()?, &settings.growth()?)?;
        settings.set("schedule", case.label());
    }
    Ok(())
}

fn depth(settings: &Settings) -> Result<usize, Failure> {
    match settings.u64("depth")? {
        0 => Err(Failure::usage("`depth` must be ≥ 1")),
        n => Ok(n as usize),
    }
}

fn cap(settings: &Settings) -> Result<u64, Failure> {
    let c = settings.f64("cap")?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Failure::usage(format!("`cap` must be ≥ 1, got {c}")));
    }
    Ok(c as u64)
}

fn dimension(settings: &mut Settings) -> Result<Report, Failure> {
    let (p, g, d) = (settings.potential()?, settings.growth()?, settings.f64("d")?);
    let r = closed_form_dimension(&p, &g, d)?;
    let mut report =
        Report::new(vec!["potential", "growth", "d", "regime", "value", "requires_distortion", "formula"]);
    report.push(vec![
        p.label(),
        g.label(),
        format_sig(d),
        r.regime.tag.label().into(),
        format_opt(r.value),
        r.requires_distortion.to_string(),
        r.formula_id.into(),
    ]);
    if r.value.is_none() {
        report.code = EXIT_UNCOVERED;
    }
    Ok(report)
}

/// Grid values `from + i·step`, rounded to the printed precision so that
/// rows and regime boundaries do not depend on accumulated rounding.
pub fn sweep_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0 && to >= from) {
        return Err(Failure::usage(format!("empty sweep range: from {from} to {to} step {step}")));
    }
    let count = ((to - from) / step * (1.0 + 1e-12)).floor() as usize + 1;
    if count > MAX_SWEEP_POINTS {
        return Err(Failure::usage(format!("sweep has {count} points, above {MAX_SWEEP_POINTS}")));
    }
    Ok((0..count).map(|i| format_sig(from + i as f64 * step).parse().expect("format_sig output parses")).collect())
}

fn sweep(settings: &mut Settings) -> Result<Report, Failure> {
    let var = settings.require("var")?.to_string();
    let grid = sweep_grid(settings.f64("from")?, settings.f64("to")?, settings.f64("step")?)?;
    let (base_p, base_g, base_d) = (settings.potential()?, settings.growth()?, settings.f64("d")?);
    let mut report = Report::new(vec!["var", "potential", "growth", "d", "regime", "value"]);
    for v in grid {
        let (mut p, mut g, mut d) = (base_p, base_g, base_d);
        match var.as_str() {
            "alpha" => g = GrowthRate::poly_exp(v)?,
            "beta" => g = GrowthRate::super_exp(v)?,
            "gamma" => g = GrowthRate::double_exp(v)?,
            "a" => p = Potential::power_law(v)?,
            "b" => p = Potential::log_power(v)?,
            "c" => p = Potential::stretched_exp(v)?,
            "d" => d = v,
            _ => return Err(Failure::usage(format!("`var`: expected alpha, beta, gamma, a, b, c or d, got `{var}`"))),
        }
        let r = closed_form_dimension(&p, &g, d)?;
        report.push(vec![
            format_sig(v),
            p.label(),
            g.label(),
            format_sig(d),
            r.regime.tag.label().into(),
            format_opt(r.value),
        ]);
    }
    Ok(report)
}

/// Rows of a verification report.
struct Checks(Report);

impl Checks {
    fn new() -> Self {
        Self(Report::new(vec!["check", "passed", "value", "expected", "detail"]))
    }

    fn add(&mut self, name: &str, passed: bool, value: Option<f64>, expected: Option<f64>, detail: impl Into<String>) {
        self.0.push(vec![name.into(), passed.to_string(), format_opt(value), format_opt(expected), detail.into()]);
        if !passed {
            self.0.code = EXIT_VERIFY_FAILED;
        }
    }

    fn close(&mut self, name: &str, value: f64, expected: f64, rel: f64) {
        let err = (value - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        self.add(name, err <= rel, Some(value), Some(expected), format!("relative error {}", format_sig(err)));
    }

    fn done(self) -> Result<Report, Failure> {
        Ok(self.0)
    }
}

fn verify_axioms(settings: &mut Settings) -> Result<Report, Failure> {
    let sys = settings.system()?;
    let r = sys.check_axioms(100, 11)?;
    let mut checks = Checks::new();
    for c in &r.checks {
        let detail = match &c.witness {
            Some(w) => format!("{}; witness {w}", c.detail),
            None => c.detail.clone(),
        };
        checks.add(&format!("axiom_{}", c.axiom), c.passed, None, None, detail);
    }
    let (k1, k2, m, a) = match sys.kind() {
        SystemKind::AffinePowerLaw => {
            let z = 1.0 / sys.zeta_d();
            (z, z, 1, z)
        }
        SystemKind::MirroredGaussCF => (0.25, 1.0, 2, 0.25),
    };
    checks.close("K1", r.k1, k1, CONSTANT_REL_TOL);
    checks.close("K2", r.k2, k2, CONSTANT_REL_TOL);
    checks.add(
        "contraction_m",
        r.contraction_m == Some(m),
        r.contraction_m.map(f64::from),
        Some(f64::from(m)),
        "shortest uniformly contracting composition length",
    );
    checks.close("contraction_A", r.contraction_a, a, CONSTANT_REL_TOL);
    checks.done()
}

fn verify_counting(settings: &mut Settings) -> Result<Report, Failure> {
    let g = verify_counting_grid(cap(settings)?)?;
    let mut checks = Checks::new();
    for lemma in [Lemma::PowerLaw, Lemma::LogPower] {
        let n = g.valid_count(lemma);
        checks.add(
            &format!("valid_points_{}", lemma.label()),
            n >= MIN_VALID_GRID,
            Some(n as f64),
            Some(MIN_VALID_GRID as f64),
            format!("{} grid rows in total", g.rows.iter().filter(|r| r.lemma == lemma).count()),
        );
    }
    let violations = g.violations();
    let detail = match violations.first() {
        Some(r) => format!(
            "first: {} m={} n={} param={} eps={} s={} sum={} bound={}",
            r.lemma.label(),
            format_sig(r.m),
            r.n,
            format_sig(r.param),
            format_sig(r.eps),
            format_sig(r.s),
            format_sig(r.sum),
            format_sig(r.bound)
        ),
        None => "sum ≤ bound at every valid grid point".into(),
    };
    checks.add("violations", violations.is_empty(), Some(violations.len() as f64), Some(0.0), detail);
    checks.add(
        "nodes",
        (g.nodes as f64) < 1e8,
        Some(g.nodes as f64),
        Some(1e8),
        "enumeration nodes and convolution updates",
    );
    checks.done()
}

fn verify_lema(settings: &mut Settings) -> Result<Report, Failure> {
    ensure_schedule(settings)?;
    let spec = settings.require("schedule")?.to_string();
    let d = settings.f64("d")?;
    let expected = if ScheduleCase::parse(&spec).is_some() {
        let r = closed_form_dimension(&settings.potential()?, &settings.growth()?, d)?;
        r.value.ok_or_else(|| Failure::usage(format!("no closed form for regime {}", r.regime.tag)))?
    } else if spec.starts_with("geometric:") {
        1.0 / d
    } else {
        return Err(Failure::usage("`verify lemA` needs a case label or geometric schedule with a known limit"));
    };
    let schedule = settings.schedule()?;
    let n_max = settings.u64("nmax")? as usize;
    let est = lem_a_liminf(&schedule, d, n_max)?;
    let mut checks = Checks::new();
    match est.estimate {
        Some(v) => checks.close("lemA_vs_closed_form", v, expected, LEMA_REL_TOL),
        None => checks.add("lemA_vs_closed_form", false, None, Some(expected), "no defined partial in the tail"),
    }
    checks.done()
}

fn verify_covering(settings: &mut Settings) -> Result<Report, Failure> {
    let sys = settings.system()?;
    let schedule = settings.schedule()?;
    let depth = depth(settings)?;
    let tol = settings.f64("tol")?;
    let kind = CoverKind::parse(settings.require("cover")?)
        .ok_or_else(|| Failure::usage("`cover`: expected cylinders or refined"))?;
    let mut checks = Checks::new();

    let trace = dimension_root(&sys, &schedule, depth as u64, tol)?;
    let (root, q) = (trace.root(), trace.partials[depth - 1]);
    match (root, q) {
        (Some(r), Some(q)) => checks.add(
            "root_vs_partial",
            (r - q).abs() <= ROOT_GAP_TOL,
            Some(r),
            Some(q),
            format!("gap {} at depth {depth}", format_sig((r - q).abs())),
        ),
        _ => checks.add("root_vs_partial", false, root, q, "root or partial undefined"),
    }

    let level = depth.min(10) as u64;
    let mut prev = f64::INFINITY;
    let mut monotone = None;
    for i in 1..=15 {
        let s = 0.1 * i as f64;
        let v = covering_log_sum(&sys, &schedule, level, s, kind)?.upper;
        if !(v < prev) && monotone.is_none() {
            monotone = Some(s);
        }
        prev = v;
    }
    checks.add(
        "cover_sum_decreasing_in_s",
        monotone.is_none(),
        None,
        None,
        match monotone {
            Some(s) => format!("not decreasing at s = {}", format_sig(s)),
            None => format!("{} cover, depth {level}, s = 0.1 … 1.5", kind.label()),
        },
    );

    let (sigma, lo, hi) = (1.2, 998_000u64, 999_999u64);
    let exact = power_sum(sigma, lo, hi).0.ln();
    let integral = midpoint_integral_log(sigma, lo as f64, hi as f64);
    checks.close("midpoint_integral_vs_exact", integral, exact, INTEGRAL_REL_TOL);

    let d = settings.f64("d")?;
    let k_max = settings.u64("kmax")? as usize;
    let pg = product_g_diagnostic(1.0 / 3.0, k_max, 1.0, d, 0.6, 0.8)?;
    let detail = match pg.verdict {
        ProductGVerdict::Decays => format!("a=1 s=0.6 alpha=0.8, valid from k = {}", pg.valid_from.unwrap_or(0)),
        ProductGVerdict::NotDecaying { witness } => format!("a=1 s=0.6 alpha=0.8, witness k = {witness}"),
    };
    checks.add(
        &format!("product_g_{}", pg.verdict.label().to_lowercase()),
        pg.verdict == ProductGVerdict::Decays,
        pg.log_bounds.last().copied(),
        None,
        detail,
    );
    checks.done()
}

fn verify_schedules(settings: &mut Settings) -> Result<Report, Failure> {
    ensure_schedule(settings)?;
    let schedule = settings.schedule()?;
    let depth = depth(settings)?;
    let seed = settings.u64("seed")?;
    let mut checks = Checks::new();

    let p = sample_word(&schedule, depth, seed)?;
    let outside = p.log_digits.iter().enumerate().find_map(|(i, &l)| {
        let n = i as u64 + 1;
        if n < schedule.start_index {
            return None;
        }
        let w = schedule.window(n);
        let slack = 1e-12 * w.log_hi.abs().max(1.0);
        (l < w.log_lo - slack || l > w.log_hi + slack).then_some(n)
    });
    checks.add(
        "sample_in_windows",
        outside.is_none(),
        None,
        None,
        match outside {
            Some(n) => format!("digit {n} outside its window"),
            None => format!("{} positions, seed {seed}", depth),
        },
    );
    checks.add("sample_deterministic", p == sample_word(&schedule, depth, seed)?, None, None, "same seed, same digits");
    let floor = schedule.proportion_floor(depth as u64);
    checks.add("proportion_floor", floor > 0.0, Some(floor), None, "min t_n/s_n over the sampled positions");

    let mut worst = 0;
    let mut violation = None;
    for c in [1.0, 1.5, 2.0] {
        for alpha in [1.0, 1.5] {
            for n in 2..=40 {
                for eps in [0.01, 0.05, 0.1] {
                    let k = t4_window_count(&Potential::stretched_exp(c)?, &GrowthRate::poly_exp(alpha)?, n, eps)?;
                    worst = worst.max(k);
                    if k > 1 && violation.is_none() {
                        violation = Some(format!("c={c} alpha={alpha} n={n} eps={eps}: {k} digits"));
                    }
                }
            }
        }
    }
    checks.add(
        "t4_window_count_sweep",
        violation.is_none(),
        Some(worst as f64),
        Some(1.0),
        violation.unwrap_or_else(|| "at most one digit per window".into()),
    );

    let k_max = settings.u64("kmax")? as usize;
    let power1 = Potential::power_law(1.0)?;
    for (alpha, eps, want) in [(0.4, 0.1, UsefVerdict::Vanishing), (0.6, 0.01, UsefVerdict::Diverging)] {
        let r = usef_diagnostic(&em_spec(&power1, &GrowthRate::poly_exp(alpha)?, 10, eps)?, k_max)?;
        checks.add(
            &format!("usef_{}", want.label().to_lowercase()),
            r.verdict == want,
            Some(r.tail_slope),
            None,
            format!("a=1 alpha={alpha} eps={eps}: {}", r.verdict.label()),
        );
    }

    let g = GrowthRate::poly_exp(0.4)?;
    let em = em_spec(&power1, &g, 10, 0.1)?;
    let sched = em.schedule(25)?;
    let point = sample_em_point(&em, &sched, seed)?;
    let mut sandwich = None;
    for &n in &sched.positions {
        let sum = birkhoff_core::potentials::birkhoff_log_sum(&power1, &point.log_digits[..n as usize])?;
        let phi = g.log_growth(n)?.value;
        let upper = birkhoff_core::numeric::log_add_exp(phi, (n as f64).ln() + 10f64.ln());
        if !(phi <= sum + 1e-12 && sum <= upper + 1e-12) && sandwich.is_none() {
            sandwich = Some(n);
        }
    }
    checks.add(
        "em_sandwich",
        sandwich.is_none(),
        None,
        None,
        match sandwich {
            Some(n) => format!("Phi(n) <= S_n <= Phi(n) + n*M fails at n = {n}"),
            None => "Phi(n) <= S_n <= Phi(n) + n*M at every block end".into(),
        },
    );

    let (pot, growth) = (settings.potential()?, settings.growth()?);
    let telescoping = telescoping_point(&pot, &growth, depth)
        .and_then(|pt| convergence_profile(&pot, &growth, &pt, depth));
    match telescoping {
        Ok(prof) => {
            let worst = prof.deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            checks.add("telescoping_exact", worst < 1e-9, Some(worst), Some(1e-9), "max |delta_n| on exact increments");
        }
        Err(e) => checks.add("telescoping_exact", false, None, Some(1e-9), e.to_string()),
    }
    checks.done()
}

fn sample(settings: &mut Settings) -> Result<Report, Failure> {
    ensure_schedule(settings)?;
    let schedule = settings.schedule()?;
    let depth = depth(settings)?;
    let point = sample_word(&schedule, depth, settings.u64("seed")?)?;
    let profile = convergence_profile(&settings.potential()?, &settings.growth()?, &point, depth)?;
    let mut report = Report::new(vec!["n", "log_s", "log_t", "log_digit", "delta"]);
    for (row, delta) in schedule_rows(&schedule, Some(&point), depth).iter().zip(&profile.deltas) {
        report.push(vec![
            row.n.to_string(),
            format_sig(row.log_s),
            format_sig(row.log_t),
            format_opt(row.log_digit),
            format_sig(*delta),
        ]);
    }
    Ok(report)
}

fn parse_shape(spec: &str) -> Result<TupleShape, Failure> {
    let bad = || Failure::usage(format!("`shape`: expected power:A or logpower:B, got `{spec}`"));
    let (kind, v) = spec.split_once(':').ok_or_else(bad)?;
    let v: f64 = v.parse().map_err(|_| bad())?;
    match kind {
        "power" => Ok(TupleShape::PowerLaw { a: v }),
        "logpower" => Ok(TupleShape::LogPower { b: v }),
        _ => Err(bad()),
    }
}

fn counting(settings: &mut Settings) -> Result<Report, Failure> {
    let shape = parse_shape(settings.require("shape")?)?;
    let (m, eps, d, s) = (settings.f64("m")?, settings.f64("eps")?, settings.f64("d")?, settings.f64("s")?);
    let n = settings.u64("n")? as usize;
    let mut c = TupleConstraint::new(m, n, shape, eps)?;
    if settings.bool("closed")? {
        c = c.closed();
    }
    let cap = cap(settings)?;
    let (sum, bound) = match shape {
        TupleShape::PowerLaw { .. } => (g_sum(&c, d, s, cap)?, g_bound(&c, d, s)),
        TupleShape::LogPower { .. } => (ghat_sum(&c, d, s, cap)?, ghat_bound(&c, d, s)),
    };
    let (bound, valid) = match bound {
        Ok(b) => (Some(b.bound), b.valid),
        Err(Error::WindowUndefined(_)) => (None, false),
        Err(e) => return Err(e.into()),
    };
    let method = match sum.method {
        EnumerationMethod::DepthFirst => "DFS",
        EnumerationMethod::IntegerConvolution => "CONVOLUTION",
    };
    let mut report = Report::new(vec![
        "shape", "m", "n", "eps", "d", "s", "count", "sum", "bound", "bound_valid", "method", "nodes",
    ]);
    report.push(vec![
        settings.require("shape")?.to_string(),
        format_sig(m),
        n.to_string(),
        format_sig(eps),
        format_sig(d),
        format_sig(s),
        sum.count.to_string(),
        format_sig(sum.weight),
        format_opt(bound),
        valid.to_string(),
        method.into(),
        sum.nodes.to_string(),
    ]);
    Ok(report)
}

fn root(settings: &mut Settings) -> Result<Report, Failure> {
    let sys = settings.system()?;
    let schedule: DigitSchedule = settings.schedule()?;
    let depth = depth(settings)?;
    let trace = dimension_root(&sys, &schedule, depth as u64, settings.f64("tol")?)?;
    let mut report = Report::new(vec!["depth", "root", "lemA_partial", "gap", "above_one"]);
    for k in 0..depth {
        report.push(vec![
            (k + 1).to_string(),
            format_opt(trace.roots[k]),
            format_opt(trace.partials[k]),
            format_opt(trace.gap(k)),
            trace.above_one[k].to_string(),
        ]);
    }
    Ok(report)
}
