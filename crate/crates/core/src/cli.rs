//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a verification check or internal invariant
//! failed, `2` bad flags or input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::controller::{self, Controller, ControllerKind, Flip};
use crate::elg;
use crate::error::Error;
use crate::format;
use crate::simulate::{self, SimConfig};
use crate::uncertainty::UncertaintySet;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "robust-kelly",
    version,
    about = "Robust nonlinear Kelly betting when the heads probability is only known to lie in a set"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the optimal gain table K[k][q].
    Gains(GainsArgs),
    /// Sample ELG*(p), the robust optimum and the static optimum over [0, 1].
    Compare(CompareArgs),
    /// Monte Carlo simulation of the wealth recursion.
    Simulate(SimulateArgs),
    /// Check the closed-form gains against brute-force oracles.
    Verify(VerifyArgs),
    /// Gain to play next after an observed flip history.
    Advise(AdviseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_horizon(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("horizon must be a positive integer, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct GainsArgs {
    /// Uncertainty set, `lo:hi[,lo:hi...]`.
    #[arg(long, value_parser = parse_pset)]
    pub pset: UncertaintySet,
    /// Number of flips.
    #[arg(long, value_parser = parse_horizon)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_pset)]
    pub pset: UncertaintySet,
    #[arg(long, value_parser = parse_horizon)]
    pub n: usize,
    /// Number of grid points on [0, 1], endpoints included.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Required for the robust and static controllers.
    #[arg(long, value_parser = parse_pset)]
    pub pset: Option<UncertaintySet>,
    #[arg(long, value_parser = parse_horizon)]
    pub n: usize,
    /// Heads probability used to draw the flips.
    #[arg(long)]
    pub p_true: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub v0: f64,
    /// `robust`, `static` or `kelly:<p>`.
    #[arg(long, default_value = "robust", value_parser = parse_controller)]
    pub controller: ControllerKind,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    /// Also write per-trial results as CSV to this file.
    #[arg(long)]
    pub dump_trials: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_pset)]
    pub pset: UncertaintySet,
    #[arg(long, default_value_t = 3, value_parser = parse_horizon)]
    pub n: usize,
    /// Golden-section bracket tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for the random starting points of coordinate ascent.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    #[arg(long, value_parser = parse_pset)]
    pub pset: UncertaintySet,
    #[arg(long, value_parser = parse_horizon)]
    pub n: usize,
    /// Flips seen so far, e.g. `HTH`; empty before the first flip.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub history: String,
    #[command(flatten)]
    pub output: Output,
}

fn parse_pset(s: &str) -> Result<UncertaintySet, Error> {
    s.parse()
}

fn parse_controller(s: &str) -> Result<ControllerKind, Error> {
    s.parse()
}

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Check(_) | Failure::Internal(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Check(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

/// Text to emit plus an optional failure that sets the exit code after
/// the text is written.
struct Rendered {
    text: String,
    failure: Option<Failure>,
}

impl From<String> for Rendered {
    fn from(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

pub fn gains(args: &GainsArgs) -> Result<String, Failure> {
    let table = controller::robust_optimal(&args.pset, args.n)?;
    if table
        .entries()
        .any(|(_, _, g)| g.is_nan() || g.abs() >= 1.0)
    {
        return Err(Failure::Internal(
            "optimal gain left the open interval (-1, 1)".into(),
        ));
    }
    Ok(match args.format {
        TableFormat::Csv => table.to_csv(),
        TableFormat::Json => table.to_json() + "\n",
    })
}

pub fn compare(args: &CompareArgs) -> Result<String, Failure> {
    Ok(elg::compare(&args.pset, args.n, args.grid)?.to_csv())
}

pub fn simulate(args: &SimulateArgs) -> Result<String, Failure> {
    let pset = match (args.controller, &args.pset) {
        (ControllerKind::Kelly(_), p) => p.clone().unwrap_or_else(UncertaintySet::unit),
        (_, Some(p)) => p.clone(),
        (_, None) => {
            return Err(Failure::Usage(
                "--pset is required for the robust and static controllers".into(),
            ))
        }
    };
    let c = args.controller.build(&pset, args.n)?;
    let cfg = SimConfig {
        controller: c.clone(),
        n: args.n,
        p_true: args.p_true,
        trials: args.trials,
        v0: args.v0,
        seed: args.seed,
        keep_trials: args.dump_trials.is_some(),
    };
    let report = simulate::run_simulation(&cfg)?;
    if let Some(path) = &args.dump_trials {
        fs::write(path, report.trials_csv())?;
    }
    Ok(match args.format {
        ReportFormat::Json => {
            let mut slim = report;
            slim.outcomes = None;
            if args.pset.is_some() {
                slim.pset = Some(pset);
            }
            slim.to_json() + "\n"
        }
        ReportFormat::Text => {
            let exact = elg::elg_at(&c, args.n, args.p_true)?;
            let mut text = String::new();
            if args.pset.is_some() {
                text.push_str(&format!("# pset={}\n", pset));
            }
            text.push_str(&report.to_text());
            text.push_str(&format!("expected_log_growth: {}\n", format::number(exact)));
            text
        }
    })
}

fn verify_rendered(args: &VerifyArgs) -> Result<Rendered, Failure> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Failure::Usage(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let report = verify::verify(&args.pset, args.n, args.tol, args.seed)?;
    let failure = (!report.passed()).then(|| {
        let names: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        Failure::Check(format!("failed checks: {}", names.join(", ")))
    });
    Ok(Rendered {
        text: report.to_text(),
        failure,
    })
}

/// Text report of [`verify::verify`]; a failing check becomes `Failure::Check`.
pub fn verify(args: &VerifyArgs) -> Result<String, Failure> {
    let r = verify_rendered(args)?;
    match r.failure {
        Some(f) => Err(f),
        None => Ok(r.text),
    }
}

pub fn advise(args: &AdviseArgs) -> Result<String, Failure> {
    let history = Flip::parse_history(args.history.trim())?;
    if history.len() >= args.n {
        return Err(Error::HistoryTooLong {
            len: history.len(),
            horizon: args.n,
        }
        .into());
    }
    let table = controller::robust_optimal(&args.pset, args.n)?;
    let c = Controller::from(table);
    let gain = c.gain_at(&history)?;
    let heads = history.iter().filter(|f| f.is_heads()).count();
    let bet = if gain > 0.0 {
        format!("{} of wealth on heads", format::number(gain))
    } else if gain < 0.0 {
        format!("{} of wealth on tails", format::number(-gain))
    } else {
        "no bet".to_string()
    };
    Ok(format!(
        "# pset={} n={}\nhistory: {}\nstage: {}\nheads: {}\ngain: {}\nbet: {}\n",
        args.pset,
        args.n,
        Flip::history_string(&history),
        history.len(),
        heads,
        format::number(gain),
        bet
    ))
}

fn dispatch(command: &Command) -> (Option<&Output>, Result<Rendered, Failure>) {
    match command {
        Command::Gains(a) => (Some(&a.output), gains(a).map(Rendered::from)),
        Command::Compare(a) => (Some(&a.output), compare(a).map(Rendered::from)),
        Command::Simulate(a) => (Some(&a.output), simulate(a).map(Rendered::from)),
        Command::Verify(a) => (Some(&a.output), verify_rendered(a)),
        Command::Advise(a) => (Some(&a.output), advise(a).map(Rendered::from)),
    }
}

/// Parses `args` (including the program name) and runs the subcommand,
/// writing results to `stdout` and diagnostics to `stderr`. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };

    let (output, result) = dispatch(&cli.command);
    let rendered = match result {
        Ok(r) => r,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            return f.exit_code();
        }
    };
    let written = match output.and_then(|o| o.out.as_ref()) {
        Some(path) => fs::write(path, &rendered.text),
        None => stdout.write_all(rendered.text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILURE;
    }
    match rendered.failure {
        Some(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.exit_code()
        }
        None => EXIT_OK,
    }
}
