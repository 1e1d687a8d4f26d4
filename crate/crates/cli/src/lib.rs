//! Command-line front end for `birkhoff-core`: closed-form dimension
//! queries, parameter sweeps, verification suites, sampled points, counting
//! queries and covering roots, all written as deterministic CSV.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

pub use config::Settings;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BIRKHOFF_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNCOVERED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub const SUITES: [&str; 5] = ["axioms", "counting", "lemA", "covering", "schedules"];

/// A failed run: exit code and message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<birkhoff_core::Error> for Failure {
    fn from(e: birkhoff_core::Error) -> Self {
        let code = match e {
            birkhoff_core::Error::UncoveredCase(_) => EXIT_UNCOVERED,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// A CSV table plus the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub code: i32,
}

impl Report {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new(), code: EXIT_OK }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// `#` metadata lines (version, command, every resolved setting), the
    /// header row and the data rows.
    pub fn render(&self, command: &str, settings: &Settings) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# birkhoff {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# command={command}");
        for (k, v) in settings.echo() {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(f: &str) -> String {
    if f.contains([',', '"', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

pub fn cli() -> Command {
    let mut cmd = Command::new("birkhoff")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Dimensions of Birkhoff-sum level sets for Gauss-like iterated function systems")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help("flat `key = value` settings file; flags override it"),
        )
        .arg(
            Arg::new("output")
                .short('o')
                .long("output")
                .global(true)
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help(format!("CSV destination [${OUT_DIR_ENV}/<command>.csv, else stdout]")),
        );
    for (key, help) in config::KEYS {
        cmd = cmd.arg(
            Arg::new(*key)
                .long(*key)
                .global(true)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .action(ArgAction::Set)
                .help(*help),
        );
    }
    cmd.subcommand(Command::new("dimension").about("closed-form dimension and regime for one (potential, growth, d)"))
        .subcommand(Command::new("sweep").about("closed-form dimension along one parameter (--var, --from, --to, --step)"))
        .subcommand(
            Command::new("verify")
                .about("run a verification suite; exit 3 when a check fails")
                .arg(Arg::new("suite").required(true).value_parser(SUITES)),
        )
        .subcommand(Command::new("sample").about("schedule table with a sampled point and its Birkhoff-sum deviations"))
        .subcommand(Command::new("counting").about("exact tuple sum next to its counting bound"))
        .subcommand(Command::new("root").about("per-depth covering roots next to the liminf partials"))
}

/// Settings for `command`: defaults, then the config file, then flags.
pub fn resolve_settings(command: &str, suite: Option<&str>, matches: &ArgMatches) -> Result<Settings, Failure> {
    let mut settings = Settings::with_defaults(commands::command_defaults(command, suite));
    if let Some(path) = matches.get_one::<PathBuf>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        let source = path.display().to_string();
        settings.overlay(&source, &Settings::from_file_text(&text, &source)?)?;
    }
    let flags: Vec<(String, String)> = config::KEYS
        .iter()
        .filter_map(|(k, _)| matches.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    settings.overlay("command line", &flags)?;
    Ok(settings)
}

/// Where the CSV goes: `--output`, else `$BIRKHOFF_OUT_DIR/<name>.csv`, else
/// stdout (`None`).
pub fn output_path(explicit: Option<&Path>, out_dir: Option<&Path>, name: &str) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| out_dir.map(|d| d.join(format!("{name}.csv"))))
}

/// Parses `args`, runs the command and writes its CSV. Returns the exit code.
pub fn run<I, T>(args: I, out_dir: Option<&Path>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (command, sub) = matches.subcommand().expect("subcommand is required");
    match execute(command, sub, out_dir) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}

fn execute(command: &str, sub: &ArgMatches, out_dir: Option<&Path>) -> Result<i32, Failure> {
    let suite = sub.try_get_one::<String>("suite").ok().flatten().cloned();
    let mut settings = resolve_settings(command, suite.as_deref(), sub)?;
    let name = match &suite {
        Some(s) => format!("{command}-{s}"),
        None => command.to_string(),
    };
    let report = commands::dispatch(command, suite.as_deref(), &mut settings)?;
    let text = report.render(&name, &settings);
    match output_path(sub.get_one::<PathBuf>("output").map(PathBuf::as_path), out_dir, &name) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Failure::usage(format!("cannot create {}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{text}"),
    }
    Ok(report.code)
}
