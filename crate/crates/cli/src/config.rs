//! Resolved run settings: defaults, then a `key = value` config file, then
//! command-line flags. Every flag has a config-file key of the same name.

use std::collections::BTreeMap;
use std::path::Path;

use birkhoff_core::schedules::table::{read_table, schedule_from_rows};
use birkhoff_core::{DigitSchedule, EpsilonPolicy, GrowthRate, IfsSystem, Potential, ScheduleCase};

use crate::Failure;

/// Keys accepted in config files and as `--key` flags, with their help.
pub const KEYS: &[(&str, &str)] = &[
    ("potential", "potential: power:A, logpower:B or stretched:C [power:1]"),
    ("growth", "growth rate: polyexp:ALPHA, superexp:BETA or doubleexp:GAMMA [superexp:2]"),
    ("a", "shorthand for --potential power:A"),
    ("b", "shorthand for --potential logpower:B"),
    ("c", "shorthand for --potential stretched:C"),
    ("alpha", "shorthand for --growth polyexp:ALPHA"),
    ("beta", "shorthand for --growth superexp:BETA"),
    ("gamma", "shorthand for --growth doubleexp:GAMMA"),
    ("d", "decay exponent of the affine system [2]"),
    ("system", "affine or gauss [affine]"),
    ("schedule", "case label (t1-ii, …), geometric:BASE:RATIO, constant:LOG_S:LOG_T or table:PATH"),
    ("epsilon", "window width: fixed:E, E or vanishing:P [vanishing:2]"),
    ("depth", "number of digit positions [sample 30, root 40]"),
    ("nmax", "depth of the liminf formula [200]"),
    ("kmax", "number of blocks in block diagnostics [200]"),
    ("seed", "random seed [1]"),
    ("tol", "bisection tolerance [1e-10]"),
    ("cover", "cylinders or refined [refined]"),
    ("var", "sweep variable: alpha, beta, gamma, a, b, c or d"),
    ("from", "first sweep value"),
    ("to", "last sweep value (inclusive)"),
    ("step", "sweep step"),
    ("shape", "tuple term: power:A or logpower:B [power:1]"),
    ("m", "left end of the sum window"),
    ("n", "tuple length"),
    ("eps", "relative window width"),
    ("s", "cover exponent"),
    ("closed", "close the right end of the sum window [false]"),
    ("cap", "enumeration node cap [1e8]"),
];

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Defaults shared by every command.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("potential", "power:1"),
    ("growth", "superexp:2"),
    ("d", "2"),
    ("system", "affine"),
    ("epsilon", "vanishing:2"),
    ("nmax", "200"),
    ("kmax", "200"),
    ("seed", "1"),
    ("tol", "1e-10"),
    ("cover", "refined"),
];

/// Flat string settings with typed accessors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

/// Maps `a`/`b`/`c` and `alpha`/`beta`/`gamma` onto `potential`/`growth`.
fn canonical(key: &str, value: &str) -> (String, String) {
    match key {
        "a" => ("potential".into(), format!("power:{value}")),
        "b" => ("potential".into(), format!("logpower:{value}")),
        "c" => ("potential".into(), format!("stretched:{value}")),
        "alpha" => ("growth".into(), format!("polyexp:{value}")),
        "beta" => ("growth".into(), format!("superexp:{value}")),
        "gamma" => ("growth".into(), format!("doubleexp:{value}")),
        _ => (key.into(), value.into()),
    }
}

impl Settings {
    pub fn with_defaults(extra: &[(&str, &str)]) -> Self {
        let mut s = Self::default();
        for (k, v) in DEFAULTS.iter().chain(extra) {
            s.values.insert((*k).into(), (*v).into());
        }
        s
    }

    /// Applies one source of `(key, value)` pairs. Two values for the same
    /// canonical key within one source are a conflict.
    pub fn overlay(&mut self, source: &str, pairs: &[(String, String)]) -> Result<(), Failure> {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in pairs {
            if !known(k) {
                return Err(Failure::usage(format!("{source}: unknown key `{k}`")));
            }
            let (ck, cv) = canonical(k, v);
            if let Some(prev) = seen.insert(ck.clone(), k.clone()) {
                return Err(Failure::usage(format!("{source}: `{prev}` and `{k}` both set `{ck}`")));
            }
            self.values.insert(ck, cv);
        }
        Ok(())
    }

    pub fn from_file_text(text: &str, source: &str) -> Result<Vec<(String, String)>, Failure> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Failure::usage(format!("{source}:{}: expected `key = value`", i + 1)));
            };
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, Failure> {
        self.get(key).ok_or_else(|| Failure::usage(format!("missing required setting `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, Failure> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Failure::usage(format!("`{key}`: expected a number, got `{v}`")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, Failure> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Failure::usage(format!("`{key}`: expected a non-negative integer, got `{v}`")))
    }

    pub fn bool(&self, key: &str) -> Result<bool, Failure> {
        match self.get(key).unwrap_or("false") {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(Failure::usage(format!("`{key}`: expected true/false, got `{v}`"))),
        }
    }

    /// `(key, value)` pairs in key order, for output headers.
    pub fn echo(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn potential(&self) -> Result<Potential, Failure> {
        parse_potential(self.require("potential")?)
    }

    pub fn growth(&self) -> Result<GrowthRate, Failure> {
        parse_growth(self.require("growth")?)
    }

    pub fn epsilon(&self) -> Result<EpsilonPolicy, Failure> {
        parse_epsilon(self.require("epsilon")?)
    }

    pub fn system(&self) -> Result<IfsSystem, Failure> {
        match self.require("system")? {
            "affine" => Ok(IfsSystem::affine_power_law(self.f64("d")?)?),
            "gauss" => Ok(IfsSystem::mirrored_gauss()),
            v => Err(Failure::usage(format!("`system`: expected affine or gauss, got `{v}`"))),
        }
    }

    /// The schedule named by `schedule`: a case label (`t1-ii`, …) built
    /// from `potential`, `growth` and `epsilon`; `geometric:BASE:RATIO`;
    /// `constant:LOG_S:LOG_T`; or `table:PATH`.
    pub fn schedule(&self) -> Result<DigitSchedule, Failure> {
        let spec = self.require("schedule")?;
        if let Some(case) = ScheduleCase::parse(spec) {
            return Ok(birkhoff_core::theorem_schedule(&self.potential()?, &self.growth()?, case, self.epsilon()?)?);
        }
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        match kind {
            "geometric" => {
                let [base, ratio] = numbers::<2>(rest, spec)?;
                Ok(DigitSchedule::geometric(base, ratio)?)
            }
            "constant" => {
                let [ls, lt] = numbers::<2>(rest, spec)?;
                Ok(DigitSchedule::constant(ls, lt)?)
            }
            "table" => {
                let path = Path::new(rest);
                let file = std::fs::File::open(path)
                    .map_err(|e| Failure::usage(format!("cannot open schedule table {}: {e}", path.display())))?;
                let rows = read_table(std::io::BufReader::new(file))?;
                Ok(schedule_from_rows(&rows)?)
            }
            _ => Err(Failure::usage(format!(
                "`schedule`: expected a case label, geometric:BASE:RATIO, constant:LOG_S:LOG_T or table:PATH, got `{spec}`"
            ))),
        }
    }
}

fn numbers<const N: usize>(text: &str, whole: &str) -> Result<[f64; N], Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != N {
        return Err(Failure::usage(format!("`{whole}`: expected {N} numeric fields")));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| Failure::usage(format!("`{whole}`: bad number `{p}`")))?;
    }
    Ok(out)
}

fn split_spec(spec: &str) -> Result<(&str, f64), Failure> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("expected KIND:VALUE, got `{spec}`")))?;
    let v = value.trim().parse().map_err(|_| Failure::usage(format!("bad number in `{spec}`")))?;
    Ok((kind.trim(), v))
}

/// `power:A`, `logpower:B` or `stretched:C`.
pub fn parse_potential(spec: &str) -> Result<Potential, Failure> {
    let (kind, v) = split_spec(spec)?;
    Ok(match kind {
        "power" => Potential::power_law(v)?,
        "logpower" => Potential::log_power(v)?,
        "stretched" => Potential::stretched_exp(v)?,
        _ => return Err(Failure::usage(format!("unknown potential `{kind}` (power, logpower, stretched)"))),
    })
}

/// `polyexp:α`, `superexp:β` or `doubleexp:γ`.
pub fn parse_growth(spec: &str) -> Result<GrowthRate, Failure> {
    let (kind, v) = split_spec(spec)?;
    Ok(match kind {
        "polyexp" => GrowthRate::poly_exp(v)?,
        "superexp" => GrowthRate::super_exp(v)?,
        "doubleexp" => GrowthRate::double_exp(v)?,
        _ => return Err(Failure::usage(format!("unknown growth `{kind}` (polyexp, superexp, doubleexp)"))),
    })
}

/// `fixed:E`, a bare `E`, or `vanishing:P` for `ε_n = n^{-P}`.
pub fn parse_epsilon(spec: &str) -> Result<EpsilonPolicy, Failure> {
    let bad = || Failure::usage(format!("`epsilon`: expected fixed:E, E or vanishing:P, got `{spec}`"));
    let policy = match spec.split_once(':') {
        Some(("fixed", v)) => EpsilonPolicy::Fixed(v.parse().map_err(|_| bad())?),
        Some(("vanishing", v)) => EpsilonPolicy::Vanishing { power: v.parse().map_err(|_| bad())? },
        None => EpsilonPolicy::Fixed(spec.parse().map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    match policy {
        EpsilonPolicy::Fixed(e) if !(e > 0.0 && e < 1.0) => Err(bad()),
        EpsilonPolicy::Vanishing { power } if !(power > 0.0) => Err(bad()),
        p => Ok(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn later_sources_override_earlier() {
        let mut s = Settings::with_defaults(&[]);
        let file = Settings::from_file_text("# comment\nbeta = 3\n d=2.5 \n", "cfg").unwrap();
        s.overlay("cfg", &file).unwrap();
        assert_eq!(s.get("growth"), Some("superexp:3"));
        s.overlay("flags", &pairs(&[("growth", "polyexp:0.4")])).unwrap();
        assert_eq!(s.get("growth"), Some("polyexp:0.4"));
        assert_eq!(s.f64("d").unwrap(), 2.5);
    }

    #[test]
    fn conflicts_and_unknown_keys_are_usage_errors() {
        let mut s = Settings::with_defaults(&[]);
        let e = s.overlay("flags", &pairs(&[("a", "1"), ("potential", "power:2")])).unwrap_err();
        assert_eq!(e.code, 1);
        assert!(s.overlay("cfg", &pairs(&[("colour", "red")])).is_err());
        assert!(Settings::from_file_text("novalue\n", "cfg").is_err());
    }

    #[test]
    fn specs_parse() {
        assert_eq!(parse_potential("stretched:0.5").unwrap(), Potential::StretchedExp { c: 0.5 });
        assert_eq!(parse_growth("doubleexp:2").unwrap(), GrowthRate::DoubleExp { gamma: 2.0 });
        assert_eq!(parse_epsilon("0.1").unwrap(), EpsilonPolicy::Fixed(0.1));
        assert_eq!(parse_epsilon("vanishing:1").unwrap(), EpsilonPolicy::Vanishing { power: 1.0 });
        assert!(parse_epsilon("fixed:2").is_err());
        assert!(parse_potential("power").is_err());
        assert!(parse_growth("superexp:1").is_err());
    }

    #[test]
    fn schedule_specs() {
        let mut s = Settings::with_defaults(&[]);
        s.set("schedule", "geometric:10:2");
        assert_eq!(s.schedule().unwrap().label(), "geometric:10:2");
        s.set("schedule", "t1-ii");
        assert!(s.schedule().unwrap().label().starts_with("t1-ii"));
        s.set("schedule", "t3-ii");
        assert_eq!(s.schedule().unwrap_err().code, 2);
        s.set("schedule", "spiral:1");
        assert_eq!(s.schedule().unwrap_err().code, 1);
    }
}
