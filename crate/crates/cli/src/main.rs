use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twistcalc::commands::{self, Command, Options, SearchMode};
use twistcalc::error::{CliError, CliResult};
use twistcalc::generate::{self, Kind};
use twistcalc::{resolve, witness_io};
use twistcalc_core::exactalg::Field;

#[derive(Parser)]
#[command(name = "twistcalc", version, about = "Check adjunctions, lifts, Postnikov systems and ℙⁿ-functors in a scenario file")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    scenario: PathBuf,
    /// `exhaustive`, or `sample N` for N random pairs.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "N"])]
    mode: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write every witness to this directory and re-verify the written copies.
    #[arg(long, value_name = "DIR")]
    emit_witnesses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every validator on every item.
    Validate(Common),
    /// Check the triangle identities of each adjunction.
    CheckAdjunction(Common),
    /// Dimension and size of each lift space.
    EnumerateLifts(Common),
    /// Compare the convolutions of all (or sampled) lifts.
    VerifyUniqueness(Common),
    /// Check the monad, adjoints and highest-degree conditions.
    CheckPnConditions(Common),
    /// Build the ℙ-twist and check that it does not depend on the lift.
    BuildPtwist(Common),
    /// Convert each three-term complex through both Postnikov systems.
    PostnikovRoundtrip(Common),
    /// Write a scenario to stdout or a file.
    Generate {
        /// uniqueness, three-term, p1-object, pn-object or counterexample.
        kind: String,
        /// A prime, or `rational`.
        #[arg(long, default_value = "2")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `n` for pn-object.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reload a witness file and re-verify it.
    VerifyWitness { files: Vec<PathBuf> },
}

fn parse_mode(words: &[String]) -> CliResult<SearchMode> {
    match words {
        [] => Ok(SearchMode::Auto),
        [m] if m == "exhaustive" => Ok(SearchMode::Exhaustive),
        [m] if m == "sample" => Ok(SearchMode::Sample(8)),
        [m, n] if m == "sample" => n
            .parse()
            .map(SearchMode::Sample)
            .map_err(|_| CliError::Usage(format!("`{n}` is not a sample size"))),
        _ => Err(CliError::Usage("--mode takes `exhaustive` or `sample N`".into())),
    }
}

fn parse_field(s: &str) -> CliResult<Field> {
    if s == "rational" {
        return Ok(Field::Rational);
    }
    let p: u64 = s.parse().map_err(|_| CliError::Usage(format!("`{s}` is neither a prime nor `rational`")))?;
    Ok(Field::prime(p)?)
}

fn check(cmd: Command, c: &Common) -> CliResult<i32> {
    let opts = Options {
        mode: parse_mode(&c.mode)?,
        seed: c.seed,
    };
    let scenario = resolve::load(&c.scenario)?;
    let mut report = commands::run(cmd, &scenario, &c.scenario.display().to_string(), &opts);
    if let Some(dir) = &c.emit_witnesses {
        report.emit_witnesses(dir)?;
    }
    match c.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Structured => println!("{}", report.to_json()),
    }
    Ok(report.exit_code)
}

fn execute(cli: Cli) -> CliResult<i32> {
    let common = |cmd, c| check(cmd, c);
    match &cli.command {
        Cmd::Validate(c) => common(Command::Validate, c),
        Cmd::CheckAdjunction(c) => common(Command::CheckAdjunction, c),
        Cmd::EnumerateLifts(c) => common(Command::EnumerateLifts, c),
        Cmd::VerifyUniqueness(c) => common(Command::VerifyUniqueness, c),
        Cmd::CheckPnConditions(c) => common(Command::CheckPnConditions, c),
        Cmd::BuildPtwist(c) => common(Command::BuildPtwist, c),
        Cmd::PostnikovRoundtrip(c) => common(Command::PostnikovRoundtrip, c),
        Cmd::Generate {
            kind,
            field,
            seed,
            n,
            out,
        } => {
            let file = generate::generate(Kind::parse(kind, *n)?, parse_field(field)?, *seed)?;
            let text = file.to_string();
            match out {
                Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::VerifyWitness { files } => {
            let mut code = 0;
            for f in files {
                let w = witness_io::read(f)?;
                let ok = w.verify();
                println!("{} ({}): {}", w.label(), w.kind(), if ok { "verified" } else { "NOT VERIFIED" });
                if !ok {
                    code = 1;
                }
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
