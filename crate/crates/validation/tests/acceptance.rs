//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so every line is shown.

use std::path::Path;
use std::time::Instant;

use birkhoff_core::counting::{verify_counting_grid, Lemma, DEFAULT_NODE_CAP};
use birkhoff_core::covering::{product_g_diagnostic, ProductGVerdict};
use birkhoff_core::schedules::{
    convergence_profile, em_spec, sample_word, t4_window_count, usef_diagnostic, UsefVerdict,
};
use birkhoff_core::{
    closed_form_dimension, dimension_root, lem_a_liminf, moran_dimension, theorem_schedule, DigitSchedule,
    EpsilonPolicy, GrowthRate, IfsSystem, Potential, ScheduleCase,
};

const EXACT_TOL: f64 = 1e-12;
const BOUNDARY_TOL: f64 = 1e-5;
const BOUNDARY_STEP: f64 = 1e-6;
const LEMA_REL_TOL: f64 = 0.02;
const LEMA_N_MAX: usize = 200;
const LEMA_RUNTIME_S: f64 = 5.0;
/// Fixed window width for the seven liminf cross-checks (below a/3 = 1/3).
const LEMA_EPS: f64 = 1.0 / 6.0;
const MIN_VALID_GRID: usize = 100;
const NODE_BUDGET: u64 = 100_000_000;
const GEOMETRIC_ROOT_TOL: f64 = 0.02;
const GEOMETRIC_DEPTH: u64 = 40;
const T1_ROOT_TOL: f64 = 0.03;
const T1_ROOT_DEPTH: u64 = 25;
const T1_ROOT_EPS: f64 = 0.1;
const ROOT_BISECTION_TOL: f64 = 1e-10;
const CONVERGENCE_TOL: f64 = 1e-3;
const CONVERGENCE_DEPTH: usize = 30;
const CONVERGENCE_TAIL: usize = 10;
const CONVERGENCE_SEEDS: std::ops::RangeInclusive<u64> = 1..=8;
const USEF_K_MAX: usize = 200;
const MORAN_MIN_S50: f64 = 0.9;
const MORAN_TOL: f64 = 1e-13;
const PRODUCT_G_K_MAX: usize = 200;
const AXIOM_INDEX_LIMIT: u64 = 100;
const AXIOM_GRID: usize = 11;

type Outcome = Result<String, String>;

fn pot(spec: &str) -> Potential {
    let (k, v) = spec.split_once(':').unwrap();
    let v: f64 = v.parse().unwrap();
    match k {
        "power" => Potential::power_law(v),
        "logpower" => Potential::log_power(v),
        "stretched" => Potential::stretched_exp(v),
        _ => unreachable!(),
    }
    .unwrap()
}

fn growth(spec: &str) -> GrowthRate {
    let (k, v) = spec.split_once(':').unwrap();
    let v: f64 = v.parse().unwrap();
    match k {
        "polyexp" => GrowthRate::poly_exp(v),
        "superexp" => GrowthRate::super_exp(v),
        "doubleexp" => GrowthRate::double_exp(v),
        _ => unreachable!(),
    }
    .unwrap()
}

fn dim(p: &str, g: &str, d: f64) -> birkhoff_core::DimensionResult {
    closed_form_dimension(&pot(p), &growth(g), d).unwrap()
}

fn closed_forms() -> Outcome {
    let mut cases: Vec<(String, String, f64, f64, Option<bool>)> = Vec::new();
    for a in [0.5, 1.0, 2.0, 3.0] {
        cases.push((format!("power:{a}"), "superexp:2".into(), 2.0, 1.0 / 3.0, None));
    }
    cases.push(("stretched:0.5".into(), "doubleexp:2".into(), 2.0, 1.0 / 7.0, None));
    for d in [1.5, 2.0, 3.0] {
        cases.push(("power:1".into(), "polyexp:0.8".into(), d, 1.0 / d, None));
        cases.push(("power:2".into(), "polyexp:1.5".into(), d, 1.0 / d, None));
        cases.push(("logpower:2".into(), "polyexp:0.9".into(), d, 1.0 / d, None));
        cases.push(("logpower:3".into(), "polyexp:0.8".into(), d, 1.0 / d, None));
        cases.push(("stretched:0.5".into(), "polyexp:1.3".into(), d, 0.5 / d, None));
    }
    for (p, g) in [
        ("power:1", "polyexp:0.4"),
        ("logpower:2", "polyexp:0.5"),
        ("stretched:0.5", "polyexp:0.9"),
        ("stretched:1.5", "polyexp:0.7"),
    ] {
        cases.push((p.into(), g.into(), 2.0, 1.0, Some(true)));
    }
    for (c, alpha) in [(1.0, 1.0), (1.0, 1.5), (2.0, 1.0), (2.0, 3.0)] {
        cases.push((format!("stretched:{c}"), format!("polyexp:{alpha}"), 2.0, 0.0, Some(false)));
    }
    for (p, g, d, want, distortion) in &cases {
        let r = dim(p, g, *d);
        let v = r.value.ok_or_else(|| format!("{p} {g} d={d}: no value ({})", r.regime.tag))?;
        if (v - want).abs() > EXACT_TOL {
            return Err(format!("{p} {g} d={d}: {v} != {want}"));
        }
        if let Some(flag) = distortion {
            if r.requires_distortion != *flag {
                return Err(format!("{p} {g}: requires_distortion = {}", r.requires_distortion));
            }
        }
    }
    Ok(format!("{} pairs within {EXACT_TOL:e}", cases.len()))
}

fn boundary_continuity() -> Outcome {
    let x = 1.0 + BOUNDARY_STEP;
    let mut worst: f64 = 0.0;
    for d in [1.5, 2.0, 3.0] {
        let checks = [
            (dim("power:1", &format!("superexp:{x}"), d), 1.0 / d),
            (dim("logpower:2", &format!("superexp:{x}"), d), 1.0 / d),
            (dim("stretched:0.5", &format!("doubleexp:{x}"), d), 0.5 / d),
        ];
        for (r, limit) in checks {
            let gap = (r.value.unwrap() - limit).abs();
            if gap > BOUNDARY_TOL {
                return Err(format!("{} at d={d}: gap {gap:e}", r.regime.tag));
            }
            worst = worst.max(gap);
        }
    }
    Ok(format!("max gap {worst:.3e} at beta, gamma = 1+{BOUNDARY_STEP:e}"))
}

fn lema_cross_check() -> Outcome {
    let start = Instant::now();
    let cases = [
        (ScheduleCase::T1II, "power:1", "superexp:2"),
        (ScheduleCase::T1I2b, "power:1", "polyexp:1.3"),
        (ScheduleCase::T2II, "logpower:2", "superexp:2"),
        (ScheduleCase::T2I2b, "logpower:2", "polyexp:1.3"),
        (ScheduleCase::T3I2, "stretched:0.5", "polyexp:1.3"),
        (ScheduleCase::T3II, "stretched:0.5", "superexp:2"),
        (ScheduleCase::T3III, "stretched:0.5", "doubleexp:2"),
    ];
    let mut parts = Vec::new();
    let mut failed = Vec::new();
    for (case, p, g) in cases {
        let s = theorem_schedule(&pot(p), &growth(g), case, EpsilonPolicy::Fixed(LEMA_EPS)).unwrap();
        let est = lem_a_liminf(&s, 2.0, LEMA_N_MAX).unwrap().estimate.unwrap();
        let want = dim(p, g, 2.0).value.unwrap();
        let rel = (est - want).abs() / want;
        parts.push(format!("{}={:.2}%", case.label(), 100.0 * rel));
        if rel > LEMA_REL_TOL {
            failed.push(case.label());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("{} in {secs:.2}s", parts.join(" "));
    if !failed.is_empty() {
        return Err(format!("{} above {}%: {detail}", failed.join(","), 100.0 * LEMA_REL_TOL));
    }
    if secs > LEMA_RUNTIME_S {
        return Err(format!("runtime {secs:.2}s above {LEMA_RUNTIME_S}s: {detail}"));
    }
    Ok(detail)
}

fn counting_bounds() -> Outcome {
    let g = verify_counting_grid(DEFAULT_NODE_CAP).map_err(|e| e.to_string())?;
    let (vg, vh) = (g.valid_count(Lemma::PowerLaw), g.valid_count(Lemma::LogPower));
    let viol = g.violations().len();
    let detail = format!("valid G={vg} Ghat={vh}, violations={viol}, nodes={}", g.nodes);
    if vg >= MIN_VALID_GRID && vh >= MIN_VALID_GRID && viol == 0 && g.nodes < NODE_BUDGET {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn independent_estimator() -> Outcome {
    let sys = IfsSystem::affine_power_law(2.0).unwrap();
    let geo = DigitSchedule::geometric(10.0, 2.0).unwrap();
    let r1 = dimension_root(&sys, &geo, GEOMETRIC_DEPTH, ROOT_BISECTION_TOL).unwrap().root().unwrap();
    let t1 = theorem_schedule(
        &pot("power:1"),
        &growth("superexp:2"),
        ScheduleCase::T1II,
        EpsilonPolicy::Fixed(T1_ROOT_EPS),
    )
    .unwrap();
    let r2 = dimension_root(&sys, &t1, T1_ROOT_DEPTH, ROOT_BISECTION_TOL).unwrap().root().unwrap();
    let detail = format!("geometric s*_{GEOMETRIC_DEPTH}={r1:.6}, t1-ii s*_{T1_ROOT_DEPTH}={r2:.8}");
    if (r1 - 0.5).abs() <= GEOMETRIC_ROOT_TOL && (r2 - 1.0 / 3.0).abs() <= T1_ROOT_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn convergence_of_points() -> Outcome {
    let (p, g) = (pot("power:1"), growth("superexp:2"));
    let s = theorem_schedule(&p, &g, ScheduleCase::T1II, EpsilonPolicy::Vanishing { power: 2.0 }).unwrap();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in CONVERGENCE_SEEDS {
        let pt = sample_word(&s, CONVERGENCE_DEPTH, seed).unwrap();
        let prof = convergence_profile(&p, &g, &pt, CONVERGENCE_DEPTH).unwrap();
        let last = prof.deltas[CONVERGENCE_DEPTH - 1].abs();
        worst = worst.max(last);
        let monotone = prof.tail_monotone(CONVERGENCE_TAIL);
        if last > CONVERGENCE_TOL || !monotone {
            bad.push(format!("seed {seed}: |delta_30|={last:.2e} monotone={monotone}"));
        }
    }
    if bad.is_empty() {
        Ok(format!("max |delta_30| = {worst:.2e} over seeds {CONVERGENCE_SEEDS:?}"))
    } else {
        Err(bad.join("; "))
    }
}

fn regime_transition() -> Outcome {
    let a1 = pot("power:1");
    let low = usef_diagnostic(&em_spec(&a1, &growth("polyexp:0.4"), 10, 0.1).unwrap(), USEF_K_MAX).unwrap();
    let high = usef_diagnostic(&em_spec(&a1, &growth("polyexp:0.6"), 10, 0.01).unwrap(), USEF_K_MAX).unwrap();
    let detail = format!(
        "alpha=0.4: {} (slope {:.3}); alpha=0.6: {} (slope {:.3})",
        low.verdict.label(),
        low.tail_slope,
        high.verdict.label(),
        high.tail_slope
    );
    if low.verdict == UsefVerdict::Vanishing && high.verdict == UsefVerdict::Diverging {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn moran_monotonicity() -> Outcome {
    let sys = IfsSystem::affine_power_law(2.0).unwrap();
    let s: Vec<f64> = (2..=50).map(|m| moran_dimension(&sys, m, MORAN_TOL).unwrap().lower).collect();
    if let Some(i) = s.windows(2).position(|w| w[1] <= w[0]) {
        return Err(format!("s({}) = {} not above s({}) = {}", i + 3, s[i + 1], i + 2, s[i]));
    }
    let (s2, s50) = (s[0], s[48]);
    let detail = format!("s(2)={s2:.7} s(50)={s50:.5}, 2s-1: {:.4} -> {:.4}", 2.0 * s2 - 1.0, 2.0 * s50 - 1.0);
    if s50 >= MORAN_MIN_S50 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn window_mechanism() -> Outcome {
    let mut points = 0;
    for c in [1.0, 1.5, 2.0] {
        for alpha in [1.0, 1.5] {
            for n in 2..=40 {
                for eps in [0.01, 0.05, 0.1] {
                    let k = t4_window_count(&Potential::stretched_exp(c).unwrap(), &growth(&format!("polyexp:{alpha}")), n, eps)
                        .unwrap();
                    if k > 1 {
                        return Err(format!("c={c} alpha={alpha} n={n} eps={eps}: {k} digits"));
                    }
                    points += 1;
                }
            }
        }
    }
    Ok(format!("{points} sweep points, zero violations"))
}

fn block_decay() -> Outcome {
    let r = product_g_diagnostic(1.0 / 3.0, PRODUCT_G_K_MAX, 1.0, 2.0, 0.6, 0.8).unwrap();
    let detail = format!(
        "{} at k_max={PRODUCT_G_K_MAX}, valid from k={:?}, final log bound {:.1}",
        r.verdict.label(),
        r.valid_from,
        r.log_bounds.last().unwrap()
    );
    if r.verdict == ProductGVerdict::Decays {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn system_axioms() -> Outcome {
    let affine = IfsSystem::affine_power_law(2.0).unwrap();
    let gauss = IfsSystem::mirrored_gauss();
    let z = 6.0 / std::f64::consts::PI.powi(2);
    for (sys, k1, k2) in [(&affine, z, z), (&gauss, 0.25, 1.0)] {
        let r = sys.check_axioms(AXIOM_INDEX_LIMIT, AXIOM_GRID).unwrap();
        if !r.all_passed() {
            return Err(format!("{}: {:?}", sys.label(), r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()));
        }
        if (r.k1 - k1).abs() > EXACT_TOL * k1 || (r.k2 - k2).abs() > EXACT_TOL * k2 {
            return Err(format!("{}: K1={} K2={}, expected {k1} {k2}", sys.label(), r.k1, r.k2));
        }
    }
    // Derivative extremes of the mirrored branches, sampled directly.
    for i in 1..=AXIOM_INDEX_LIMIT {
        let fi = i as f64;
        let (xi, lambda) = ((fi + 1.0).powi(-2), fi.powi(-2));
        let ds: Vec<f64> = (0..=100).map(|k| gauss.branch_derivative(i, k as f64 / 100.0).abs()).collect();
        let (lo, hi) = ds.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        if (lo - xi).abs() > 1e-12 * xi || (hi - lambda).abs() > 1e-12 * lambda {
            return Err(format!("branch {i}: |f'| in [{lo}, {hi}], expected [{xi}, {lambda}]"));
        }
    }
    Ok(format!("affine K1=K2={z:.12}; gauss K1=1/4 K2=1, xi_i=1/(i+1)^2 lambda_i=1/i^2 for i <= {AXIOM_INDEX_LIMIT}"))
}

fn run_cli(args: &[&str], out: &Path) -> (i32, Vec<u8>) {
    let argv = ["birkhoff"].iter().chain(args).map(|a| a.into()).chain(["--output".into(), out.as_os_str().to_owned()]);
    let code = birkhoff_cli::run(argv.collect::<Vec<std::ffi::OsString>>(), None);
    (code, std::fs::read(out).unwrap_or_default())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 9] = [
        &["dimension", "--a", "1", "--beta", "2"],
        &["dimension", "--a", "1", "--alpha", "0.5"],
        &["sweep", "--var", "beta", "--from", "1.01", "--to", "4", "--step", "0.01"],
        &["verify", "axioms", "--system", "gauss"],
        &["verify", "schedules", "--seed", "11"],
        &["sample", "--seed", "5", "--epsilon", "fixed:0.1"],
        &["sample", "--schedule", "geometric:10:2", "--seed", "5"],
        &["counting", "--m", "200", "--n", "3", "--eps", "0.25", "--s", "0.6"],
        &["root", "--depth", "12"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let a = run_cli(args, &dir.path().join(format!("{i}a.csv")));
        let b = run_cli(args, &dir.path().join(format!("{i}b.csv")));
        if a.1.is_empty() {
            return Err(format!("`{}` wrote no CSV (exit {})", args.join(" "), a.0));
        }
        if a != b {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
    }
    let s1 = run_cli(&["sample", "--seed", "1"], &dir.path().join("s1.csv")).1;
    let s2 = run_cli(&["sample", "--seed", "2"], &dir.path().join("s2.csv")).1;
    if s1 == s2 {
        return Err("different seeds gave identical samples".into());
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form reproduction", closed_forms),
        ("boundary continuity", boundary_continuity),
        ("liminf formula vs closed form", lema_cross_check),
        ("counting bounds on the full grid", counting_bounds),
        ("covering-root estimator", independent_estimator),
        ("convergence of sampled points", convergence_of_points),
        ("regime-transition diagnostic", regime_transition),
        ("Moran monotonicity", moran_monotonicity),
        ("at most one digit per window", window_mechanism),
        ("block-product decay", block_decay),
        ("system axioms and constants", system_axioms),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("{tag} [{:02}] {name}: {detail} ({secs:.2}s)", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

