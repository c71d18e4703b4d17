//! Command-line driver: argument parsing, run manifests, artifact writing
//! and exit codes.

pub mod commands;
pub mod inputs;
pub mod manifest;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fglab::coloring::Mode;
use fglab::Error;
use serde::Serialize;

pub use manifest::RunManifest;

/// Exit code when a run completes but a verification check fails.
pub const EXIT_VERIFICATION_FAILED: i32 = 10;
/// Exit code for bad command-line usage.
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "fglab", version, about = "Orbit cocycles, marked-word colorings and walk diagnostics")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Paper)]
    pub mode: ModeArg,
    /// Directory for artifacts; created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print this artifact format on stdout instead of the text report.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Tight,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Tight => Mode::Tight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a marked-word coloring of a Cayley ball and verify it.
    Color(ColorArgs),
    /// Re-run the verification suite on a coloring file.
    Verify(VerifyArgs),
    /// Apply a word to a coloring based at a marked copy.
    Witness(WitnessArgs),
    /// List the cocycle of a piecewise element, with defect bounds.
    Cocycle(CocycleArgs),
    /// Measured and closed-form defect bounds.
    Defect(DefectArgs),
    /// Orbit of a point under elements with empty cocycle.
    Orbitprobe(OrbitprobeArgs),
    /// Random-walk return probabilities and decay profile.
    Walk(WalkArgs),
    /// Escape constant K(n) by exhaustive probe.
    Escape(EscapeArgs),
    /// Ball sizes |B_0|, ..., |B_r|.
    Growth(GrowthArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ColorArgs {
    #[arg(long)]
    pub group: String,
    /// Number of words; defaults to the number of ranges in tight mode.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub radius: u32,
    /// Tight-mode ranges `r',r;r',r;...`.
    #[arg(long)]
    pub ranges: Option<String>,
    /// Element paired with the i-th word in tight mode (repeatable).
    #[arg(long = "element")]
    pub elements: Vec<String>,
    /// Escape oracle for paper mode.
    #[arg(long, value_enum, default_value_t = OracleArg::Linear)]
    pub oracle: OracleArg,
    /// Extra probe radius beyond 2n for the probing oracle.
    #[arg(long, default_value_t = 4)]
    pub probe_margin: u32,
    #[arg(long, default_value_t = fglab::cayley::DEFAULT_VERTEX_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleArg {
    Linear,
    Probe,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub coloring: String,
    /// Check P1 for this word at `--range` instead of the plan suite.
    #[arg(long)]
    pub word: Option<String>,
    /// Check P2 for this element at `--range` instead of the plan suite.
    #[arg(long)]
    pub element: Option<String>,
    #[arg(long)]
    pub range: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub coloring: String,
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CocycleArgs {
    /// Model file, or `dinf` / `z2z` with trivial stabilizer.
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub element: String,
    /// Second element for the cocycle identity spot check.
    #[arg(long)]
    pub second: Option<String>,
    /// Window for the measured defect.
    #[arg(long, default_value_t = 50)]
    pub window: i64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DefectArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub element: String,
    #[arg(long, default_value_t = 50)]
    pub window: i64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrbitprobeArgs {
    #[arg(long)]
    pub model: String,
    /// Element file (repeatable).
    #[arg(long = "element", required = true)]
    pub elements: Vec<String>,
    /// Start point `k,line` with 1-based line.
    #[arg(long, default_value = "0,1")]
    pub point: String,
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WalkArgs {
    /// Walk on the Cayley graph of this group.
    #[arg(long, conflicts_with = "model")]
    pub group: Option<String>,
    /// Walk on the Schreier graph of this orbit model.
    #[arg(long)]
    pub model: Option<String>,
    /// Schreier window; defaults to `max_time`.
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long, default_value_t = 64)]
    pub max_time: u32,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EscapeArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 6)]
    pub probe_radius: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GrowthArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 10)]
    pub max_r: u32,
    #[arg(long, default_value_t = fglab::cayley::DEFAULT_VERTEX_CAP)]
    pub cap: usize,
}

/// One emitted file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub format: Format,
    pub content: String,
}

/// Result of a completed command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub artifacts: Vec<Artifact>,
    /// False when a verification check failed.
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            EXIT_VERIFICATION_FAILED
        }
    }

    pub fn artifact(&self, format: Format) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.format == format)
    }

    /// Writes `report.txt` and every artifact into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), Error> {
        let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join("report.txt"), &self.report).map_err(io)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(&a.name), &a.content).map_err(io)?;
        }
        Ok(())
    }
}

/// A failed command with optional guidance.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub error: Error,
    pub hint: Option<String>,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let hint = match &error {
            Error::CapExceeded { .. } => Some(
                "paper-mode ranges need a ball beyond the vertex cap; rerun with --mode tight and --ranges \
                 chosen for the ball you can afford"
                    .to_string(),
            ),
            Error::NoEscape { .. } => Some("the coloring construction needs a group that is not virtually cyclic".into()),
            _ => None,
        };
        Failure { error, hint }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let ctx = commands::Context { seed: cli.seed, mode: cli.mode.into() };
    let outcome = match &cli.command {
        Command::Color(a) => commands::color(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Witness(a) => commands::witness(&ctx, a),
        Command::Cocycle(a) => commands::cocycle(&ctx, a),
        Command::Defect(a) => commands::defect(&ctx, a),
        Command::Orbitprobe(a) => commands::orbitprobe(&ctx, a),
        Command::Walk(a) => commands::walk(&ctx, a),
        Command::Escape(a) => commands::escape(&ctx, a),
        Command::Growth(a) => commands::growth(&ctx, a),
    }?;
    if let Some(dir) = &cli.out {
        outcome.write_to(dir)?;
    }
    Ok(outcome)
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code with everything that would go to stdout and stderr.
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return if e.use_stderr() { (EXIT_USAGE, String::new(), e.to_string()) } else { (0, e.to_string(), String::new()) };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let stdout = match cli.format {
                Some(f) => match outcome.artifact(f) {
                    Some(a) => a.content.clone(),
                    None => {
                        let msg = format!("this command emits no {} artifact\n", f.extension());
                        return (EXIT_USAGE, String::new(), msg);
                    }
                },
                None => outcome.report.clone(),
            };
            (outcome.exit_code(), stdout, String::new())
        }
        Err(f) => {
            let mut err = format!("error: {}\n", f.error);
            if let Some(h) = &f.hint {
                err.push_str(&format!("hint: {h}\n"));
            }
            (f.exit_code(), String::new(), err)
        }
    }
}
