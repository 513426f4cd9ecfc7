//! `effecta`: generate zoo algebras, run check suites, and emit reports.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on an
//! input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use effecta::io::{
    algebra_from_json, algebra_to_json, observable_from_json, polytope_to_json,
    representation_to_json, spectral_to_json,
};
use effecta::representation::canonical_from_polytope;
use effecta::spectral::spectral_measure;
use effecta::states::{state_polytope_with, PolytopeOptions};
use effecta::suite::{parse_suites, run_suites, run_zoo, smear_report, Report, RunConfig, Suite};
use effecta::{generate, EffectAlgebra, Exec, Family};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "effecta",
    version,
    about = "Finite effect algebras in exact arithmetic"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Seed for mixture-state sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest algebra accepted or generated.
    #[arg(long, global = true, env = "EFFECTA_MAX_SIZE", default_value_t = effecta::zoo::DEFAULT_MAX_SIZE)]
    max_size: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Run without the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write an algebra file, e.g. `generate chain 3` or `generate product chain2 chain3`.
    Generate {
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
    /// Run check suites on an algebra file or on the whole zoo.
    Check {
        #[arg(long, required_unless_present = "zoo", conflicts_with = "zoo")]
        input: Option<PathBuf>,
        #[arg(long)]
        zoo: bool,
        /// Comma-separated: axioms, rdp, sharp, states, representation, smearing, spectral, extension, all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Verify the smearing identity for one observable on every test state.
    Smear {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        observable: PathBuf,
    },
    /// Print the state polytope.
    States {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the canonical representation.
    Represent {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the spectral measure of every element, or of one.
    Spectral {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        element: Option<String>,
    },
}

/// Words after `generate`: either one family expression or a kind followed
/// by its parameters.
fn family_from_words(words: &[String]) -> Result<Family, String> {
    let (head, rest) = words.split_first().expect("clap requires one word");
    if rest.is_empty() {
        return head.parse();
    }
    let nums = || -> Result<Vec<u32>, String> {
        rest.iter()
            .map(|w| {
                w.parse()
                    .map_err(|_| format!("expected a number, got {w:?}"))
            })
            .collect()
    };
    let fams = || -> Result<Vec<Family>, String> { rest.iter().map(|w| w.parse()).collect() };
    let one = |v: Vec<u32>| match v[..] {
        [n] => Ok(n),
        _ => Err(format!("{head} takes one number")),
    };
    match head.as_str() {
        "chain" => Ok(Family::Chain(one(nums()?)?)),
        "boolean" => Ok(Family::Boolean(one(nums()?)?)),
        "interval" => Ok(Family::Interval(nums()?)),
        "product" => Ok(Family::Product(fams()?)),
        "hsum" | "horizontal-sum" => Ok(Family::HorizontalSum(fams()?)),
        _ => Err(format!("unknown family {head:?}")),
    }
}

enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, max_size: usize) -> Result<EffectAlgebra, Failure> {
    Ok(algebra_from_json(&read(path)?, max_size)?)
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn emit(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_value(g: &Global, v: &Value) -> Result<(), Failure> {
    let text = match g.format {
        Format::Jsonl => v.to_string(),
        Format::Text => serde_json::to_string_pretty(v).expect("serializable"),
    };
    emit(g, &(text + "\n"))
}

fn emit_report(g: &Global, r: &Report) -> Result<ExitCode, Failure> {
    let text = match g.format {
        Format::Jsonl => r.to_jsonl(),
        Format::Text => r.to_text(),
    };
    emit(g, &text)?;
    Ok(ExitCode::from(r.exit_code() as u8))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let g = &cli.global;
    let exec = if g.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let cfg = RunConfig {
        seed: g.seed,
        max_size: g.max_size,
        exec,
        ..RunConfig::default()
    };
    let opts = PolytopeOptions {
        max_size: g.max_size,
        exec,
        ..Default::default()
    };
    match &cli.cmd {
        Cmd::Generate { spec } => {
            let f = family_from_words(spec).map_err(Failure::Input)?;
            let m = generate(&f, g.max_size)?;
            emit(
                g,
                &(serde_json::to_string_pretty(&algebra_to_json(&m)).expect("serializable") + "\n"),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { input, zoo, suite } => {
            let suites: Vec<Suite> = parse_suites(suite).map_err(Failure::Input)?;
            let report = if *zoo {
                run_zoo(&suites, cfg)
            } else {
                let path = input.as_ref().expect("clap enforces --input or --zoo");
                let m = load(path, g.max_size)?;
                Report::new(run_suites(&instance_name(path), &m, &suites, cfg))
            };
            emit_report(g, &report)
        }
        Cmd::Smear { input, observable } => {
            let m = load(input, g.max_size)?;
            let x = observable_from_json(&m, &read(observable)?)?;
            emit_report(g, &smear_report(&instance_name(input), &m, &x, cfg)?)
        }
        Cmd::States { input } => {
            let m = load(input, g.max_size)?;
            emit_value(g, &polytope_to_json(&m, &state_polytope_with(&m, opts)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Represent { input } => {
            let m = load(input, g.max_size)?;
            let rep = canonical_from_polytope(&m, &state_polytope_with(&m, opts)?)?;
            emit_value(g, &representation_to_json(&rep))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Spectral { input, element } => {
            let m = load(input, g.max_size)?;
            let rep = canonical_from_polytope(&m, &state_polytope_with(&m, opts)?)?;
            let elems = match element {
                Some(l) => vec![m
                    .elem(l)
                    .ok_or_else(|| Failure::Input(format!("unknown element {l:?}")))?],
                None => m.elements().collect(),
            };
            let mut text = String::new();
            for a in elems {
                let v = spectral_to_json(&m, &spectral_measure(&rep, a)?);
                text += &match g.format {
                    Format::Jsonl => v.to_string(),
                    Format::Text => serde_json::to_string_pretty(&v).expect("serializable"),
                };
                text.push('\n');
            }
            emit(g, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
