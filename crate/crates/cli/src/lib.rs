//! Command-line front end: reads system files, runs an analysis and prints
//! a JSON report. The exit code mirrors the reported status.

pub mod commands;
pub mod error;
pub mod report;
pub mod system;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use herdkit::{par, tol, Error};
use serde_json::{json, Value};

pub use commands::{CommandKind, Options};
pub use error::CliError;
pub use report::Report;
pub use system::{parse_system, Format, Mode, SystemDescriptor};

pub const EXIT_ERROR: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "herdkit", version, about = "Decide and certify herdability of linear systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// System file; `-` reads standard input.
    file: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_parser = ["json", "edges"])]
    format: Option<String>,
    /// Process every system file in a directory, in name order.
    #[arg(long, conflicts_with = "file")]
    batch: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact verdict with a certificate or a separating witness.
    Check(InputArgs),
    /// Greedy elimination of unisigned columns.
    Greedy(InputArgs),
    /// Reduced follower pair and its equivalence with the full pair.
    Reduce(InputArgs),
    /// Distance layers from the leaders and the layered sufficient tests.
    Layers(InputArgs),
    /// First tree node that works as a single leader.
    TreeLeader(InputArgs),
    /// Single-leader tree test, chosen by depth.
    TreeCheck(InputArgs),
    /// Input sequence driving the state above a threshold.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        /// Threshold h.
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        /// Initial state, comma separated (defaults to zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
    },
    /// Diagonal state matrix with a single input column.
    Diag(InputArgs),
}

/// What a run printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: String) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: message }
    }
}

/// Core errors use 0-based node indices; reports use 1-based ones.
pub fn describe(err: &CliError) -> String {
    match err {
        CliError::Core(Error::Coverage { node }) => {
            format!("node {} is not reachable from the leader set", node + 1)
        }
        CliError::Core(Error::Symmetry { row, col }) => {
            format!("matrix is not symmetric (entry ({}, {}))", row + 1, col + 1)
        }
        other => other.to_string(),
    }
}

fn env_settings() -> Result<Option<Mode>, String> {
    if let Ok(eps) = std::env::var("HERD_EPS") {
        let value: f64 = eps.trim().parse().map_err(|_| format!("HERD_EPS must be a number, got {eps:?}"))?;
        if !tol::set_zero_tolerance(value) {
            return Err(format!("HERD_EPS must be finite and nonnegative, got {eps:?}"));
        }
    }
    match std::env::var("HERD_MODE") {
        Ok(mode) => Mode::parse(mode.trim())
            .map(Some)
            .ok_or_else(|| format!("HERD_MODE must be \"float\" or \"exact\", got {mode:?}")),
        Err(_) => Ok(None),
    }
}

fn read_system(path: &Path, format: Option<Format>, mode: Option<Mode>) -> Result<SystemDescriptor, CliError> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
    };
    let format = format.or_else(|| Format::from_extension(path)).unwrap_or(Format::Json);
    let mut desc = parse_system(&text, format)?;
    if let Some(m) = mode {
        desc.mode = Some(m);
        desc.validate()?;
    }
    Ok(desc)
}

fn analyze(kind: CommandKind, path: &Path, format: Option<Format>, opts: &Options) -> Result<Report, CliError> {
    let desc = read_system(path, format, opts.mode)?;
    commands::run(kind, &desc, opts)
}

fn batch_files(dir: &Path, format: Option<Format>) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::Io(e.to_string()))?.path();
        if path.is_file() && (format.is_some() || Format::from_extension(&path).is_some()) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn run_batch(kind: CommandKind, dir: &Path, format: Option<Format>, opts: &Options) -> Outcome {
    let files = match batch_files(dir, format) {
        Ok(f) => f,
        Err(e) => return Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {}\n", describe(&e)) },
    };
    let results = par::map(&files, |path| analyze(kind, path, format, opts));
    let mut stdout = String::new();
    let mut failed = false;
    for (path, result) in files.iter().zip(results) {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut value = match result {
            Ok(report) => report.to_value(kind.name()),
            Err(e) => {
                failed = true;
                json!({"schema": report::SCHEMA, "command": kind.name(), "status": "Error", "error": describe(&e)})
            }
        };
        if let Value::Object(obj) = &mut value {
            obj.insert("file".into(), json!(name));
        }
        stdout.push_str(&serde_json::to_string(&value).expect("serializable"));
        stdout.push('\n');
    }
    Outcome { code: if failed { EXIT_ERROR } else { 0 }, stdout, stderr: String::new() }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code and output. Reads `HERD_EPS` and `HERD_MODE`.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome::usage(text),
            };
        }
    };
    let env_mode = match env_settings() {
        Ok(m) => m,
        Err(msg) => return Outcome::usage(format!("error: {msg}\n")),
    };
    let mut opts = Options { mode: env_mode, ..Options::default() };
    let (kind, input) = match cli.command {
        Command::Check(i) => (CommandKind::Check, i),
        Command::Greedy(i) => (CommandKind::Greedy, i),
        Command::Reduce(i) => (CommandKind::Reduce, i),
        Command::Layers(i) => (CommandKind::Layers, i),
        Command::TreeLeader(i) => (CommandKind::TreeLeader, i),
        Command::TreeCheck(i) => (CommandKind::TreeCheck, i),
        Command::Diag(i) => (CommandKind::Diag, i),
        Command::Simulate { input, h, x0 } => {
            if !(h.is_finite() && h > 0.0) {
                return Outcome::usage(format!("error: --h must be positive, got {h}\n"));
            }
            opts.threshold = Some(h);
            opts.x0 = x0;
            (CommandKind::Simulate, input)
        }
    };
    let format = input.format.as_deref().and_then(Format::from_name);
    if let Some(dir) = input.batch {
        return run_batch(kind, &dir, format, &opts);
    }
    let Some(path) = input.file else {
        return Outcome::usage("error: a system file or --batch <dir> is required\n".into());
    };
    match analyze(kind, &path, format, &opts) {
        Ok(report) => {
            let mut stdout = serde_json::to_string_pretty(&report.to_value(kind.name())).expect("serializable");
            stdout.push('\n');
            Outcome { code: report::exit_code(report.status), stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {}\n", describe(&e)) },
    }
}
