use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleinhyp::analysis::ScanLevel;
use kleinhyp::Error;

mod run;

#[derive(Parser, Debug)]
#[command(name = "kleinhyp", version, about = "Hyperovals of the Klein quadric Q+(5,q), q even")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a hyperoval and write it as JSON.
    Construct(ConstructArgs),
    /// Check a hyperoval file; optionally check it against an ovoid.
    Verify(VerifyArgs),
    /// Sweep the classical ovoids and list their isomorphism classes.
    Classify(ClassifyArgs),
    /// Compare the construction routes as point sets.
    Crosscheck(CrosscheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Lambda,
    Eq1,
    Ovoid,
    Q2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OvoidChoice {
    Classical,
    Tits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scan {
    Exhaustive,
    Classes,
    Sample,
}

impl From<Scan> for ScanLevel {
    fn from(s: Scan) -> Self {
        match s {
            Scan::Exhaustive => ScanLevel::Exhaustive,
            Scan::Classes => ScanLevel::Classes,
            Scan::Sample => ScanLevel::Sample,
        }
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    q: usize,
    /// Defaults to `q2` for q = 2 and `lambda` otherwise.
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Nonzero field element in hex.
    #[arg(long)]
    lambda: Option<String>,
    /// Four hex field elements, comma separated.
    #[arg(long)]
    b: Option<String>,
    #[arg(long = "ovoid", value_enum, default_value = "classical")]
    ovoid: OvoidChoice,
    /// Ovoid file to build `H_O` from instead of `--b`/`--ovoid`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Hyperoval file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the ovoid used by the `ovoid` family.
    #[arg(long)]
    ovoid_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Hyperoval file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Ovoid file; enables the checks relating `H` to `O`.
    #[arg(long)]
    ovoid_in: Option<PathBuf>,
    /// Recover `O` from `H` and run the checks relating them.
    #[arg(long)]
    recover: bool,
    #[arg(long, value_enum)]
    scan: Option<Scan>,
    /// Random planes for `--scan sample`.
    #[arg(long, default_value_t = kleinhyp::analysis::kernel::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    q: usize,
    /// Classify this ovoid file instead of sweeping.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CrosscheckArgs {
    #[arg(long)]
    q: usize,
    /// Hex field element or `all`.
    #[arg(long, default_value = "all")]
    lambda: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Io(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Construct(a) => run::construct(a),
        Command::Verify(a) => run::verify(a),
        Command::Classify(a) => run::classify(a),
        Command::Crosscheck(a) => run::crosscheck(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
