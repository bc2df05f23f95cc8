//! `levelcert`: query words, levels, frames and ideals, run the embedding
//! engines, and emit verification certificates.

mod commands;

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levelcert::constructors::oracles::DEFAULT_ORACLE_BOUND;

#[derive(Parser)]
#[command(
    name = "levelcert",
    version,
    about = "Finite-depth checks for level graphs, frames, ideals and embedding engines"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Construction or verification depth (at least 1).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    depth: Option<u32>,
    /// Default search bound for oracles that do not set their own.
    #[arg(long, global = true, env = "LEVELCERT_ORACLE_BOUND", default_value_t = DEFAULT_ORACLE_BOUND)]
    oracle_bound: u64,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Word enumeration and pairing arithmetic.
    #[command(subcommand)]
    Words(WordsCmd),
    /// Level relations on 2^l, and paths in the acyclic ones.
    Level(LevelArgs),
    /// Build and check frames and their trees.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Membership of eventually periodic points in ideals.
    #[command(subcommand)]
    Ideal(IdealCmd),
    /// Run an embedding engine and verify its output.
    Embed(EmbedArgs),
    /// Run the label engine from a starting pair of the frame tree.
    Labels(LabelsArgs),
    /// Run registered checks and emit a certificate.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
pub enum WordsCmd {
    /// ψ(n), the n-th word in length-then-lexicographic order.
    Psi {
        #[arg(long)]
        n: u64,
    },
    /// ψ⁻¹(s).
    PsiInv {
        #[arg(long)]
        s: String,
    },
    /// s_n = ψ(n) 0^(n − |ψ(n)|).
    Sn {
        #[arg(long)]
        n: u64,
    },
    /// ⟨n, p⟩.
    Pair {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
    /// ((q)_0, (q)_1).
    Unpair {
        #[arg(long)]
        q: u64,
    },
    /// φ(n, p) = ⟨⟨n, (p)_0⟩, (p)_1⟩.
    Phi {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
    /// φ⁻¹(q).
    PhiInv {
        #[arg(long)]
        q: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum LevelKind {
    T,
    B,
    B0,
    T0,
    U0,
    Gsg0,
    H0,
    D,
    Path,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathRelation {
    T,
    B,
}

#[derive(Args)]
pub struct LevelArgs {
    /// Which relation, or `path` for the unique path between two words.
    #[arg(value_enum)]
    kind: LevelKind,
    /// Word length.
    #[arg(long)]
    l: u32,
    /// Frame JSON for `d`; the standard frame when omitted.
    #[arg(long)]
    frame: Option<PathBuf>,
    /// Path start.
    #[arg(long)]
    from: Option<String>,
    /// Path end.
    #[arg(long)]
    to: Option<String>,
    /// Relation whose symmetrization the path runs in.
    #[arg(long, value_enum, default_value_t = PathRelation::T)]
    relation: PathRelation,
}

#[derive(Subcommand)]
pub enum FrameCmd {
    /// Explicit standard frame entries 0..=depth.
    Build,
    /// Check uniqueness and generation, optionally bounded density.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, requires = "density_w")]
        density_pq: Option<u64>,
        #[arg(long, requires = "density_pq")]
        density_w: Option<usize>,
    },
    /// T_l and its acyclicity report.
    Tree {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        frame: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum IdealCmd {
    /// Decide x ∈ 𝒥 for x = prefix · period^ω.
    Member {
        /// `fin`, `i3`, another named ideal such as `I4`, or a JSON expression file.
        #[arg(long)]
        ideal: String,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long)]
        period: String,
        /// Largest section index searched before answering `unknown`.
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
}

#[derive(Args)]
pub struct EmbedArgs {
    /// Engine name: g0-scheme, b0-scheme, tree-interleave or transfer-labels.
    engine: String,
    /// Oracle JSON; the engine's reference oracle when omitted.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Frame JSON for engines that consult a frame.
    #[arg(long)]
    frame: Option<PathBuf>,
}

#[derive(Args)]
pub struct LabelsArgs {
    /// Frame JSON; must agree with the standard frame.
    #[arg(long)]
    frame: Option<PathBuf>,
    #[arg(long, default_value = "")]
    u: String,
    #[arg(long, default_value = "")]
    v: String,
    #[arg(long)]
    oracle: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// `all`, a module name, or a single check id.
    #[arg(default_value = "all")]
    scope: String,
    /// List the check ids in scope instead of running them.
    #[arg(long)]
    list: bool,
}

/// Bad arguments: exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// What a command produced: a JSON artifact, its text rendering, and whether
/// it counts as a pass.
pub struct Report {
    pub json: serde_json::Value,
    pub text: String,
    pub passed: bool,
}

impl Report {
    pub fn ok(json: serde_json::Value, text: impl Into<String>) -> Self {
        Report {
            json,
            text: text.into(),
            passed: true,
        }
    }
}

/// Prints a line, treating a closed pipe as success.
fn print(line: &str) -> anyhow::Result<()> {
    match writeln!(io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(report: &Report, global: &Global) -> anyhow::Result<()> {
    let pretty = serde_json::to_string_pretty(&report.json)?;
    match &global.out {
        Some(path) => {
            std::fs::write(path, pretty + "\n")
                .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?;
            if global.format == Format::Text {
                print(&report.text)?;
            }
        }
        None => match global.format {
            Format::Json => print(&pretty)?,
            Format::Text => print(&report.text)?,
        },
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let g = &cli.global;
    let report = match cli.command {
        Command::Words(c) => commands::words(c)?,
        Command::Level(a) => commands::level(a)?,
        Command::Frame(c) => commands::frame(c, g)?,
        Command::Ideal(c) => commands::ideal(c)?,
        Command::Embed(a) => commands::embed(a, g)?,
        Command::Labels(a) => commands::labels(a, g)?,
        Command::Verify(a) => commands::verify(a, g)?,
    };
    emit(&report, g)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
