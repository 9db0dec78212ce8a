use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use awn::bisimilar;
use awn_aodv::checks::dot;
use awn_aodv::{run_checks, Check, Explorer, Library, Scenario, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "awn", version, about = "Explore and check AWN models of AODV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded random trace.
    Trace {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop after this many steps.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Build the reachable transition system and dump it.
    Explore {
        #[command(flatten)]
        input: Input,
    },
    /// Explore and run a check suite.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "prop1,loopfree,monotonic,ctl")]
        checks: Vec<Check>,
    },
    /// Compare the scenario with and without the non-blocking augmentation,
    /// or against a second scenario.
    Bisim {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        against: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    scenario: PathBuf,
    /// Process library: `aodv`, `toy` or a path to an .awn file.
    #[arg(long)]
    library: Option<String>,
    #[arg(long, default_value = "awn-out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Override the scenario's state bound.
    #[arg(long)]
    max_states: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

const USAGE: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn explorer(input: &Input) -> Result<Explorer> {
    let mut scenario = Scenario::load(&input.scenario)?;
    if let Some(n) = input.max_states {
        scenario.bounds.max_states = n;
    }
    let library = match &input.library {
        Some(name) => Library::from_name(name),
        None => scenario.library(),
    };
    Ok(Explorer::with_library(scenario, library)?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Trace { input, seed, steps } => trace(&input, seed, steps),
        Command::Explore { input } => explore(&input),
        Command::Check { input, checks } => check(&input, &checks),
        Command::Bisim { input, against } => bisim(&input, against.as_deref()),
    }
}

fn trace(input: &Input, seed: u64, steps: usize) -> Result<u8> {
    let ex = explorer(input)?;
    let run = ex.random_trace(seed, steps)?;
    let last = run.last().map_or(&ex.init, |s| &s.state);
    let stuck = ex.within(last) && ex.successors(last)?.is_empty();
    let n = run.len();
    let plural = if n == 1 { "" } else { "s" };
    let end = if stuck {
        format!("deadlock after {n} step{plural}")
    } else {
        format!("stopped after {n} step{plural}")
    };
    let out = match input.format {
        Format::Text => {
            let mut out = String::new();
            for (i, s) in run.iter().enumerate() {
                let _ = writeln!(out, "{:>4}  {}", i + 1, s.label);
            }
            let _ = writeln!(out, "{end}");
            let _ = write!(out, "{}", ex.describe(last).trim_end());
            out.push('\n');
            out
        }
        Format::Machine => {
            let labels: Vec<&str> = run.iter().map(|s| s.label.as_str()).collect();
            let doc = serde_json::json!({
                "seed": seed,
                "deadlock": stuck,
                "steps": run.len(),
                "labels": labels,
                "final": ex.describe(last).trim_end(),
            });
            doc.to_string() + "\n"
        }
    };
    write(&input.out, "trace.txt", &out)?;
    print!("{out}");
    Ok(0)
}

fn explore(input: &Input) -> Result<u8> {
    let ex = explorer(input)?;
    let run = ex.explore(input.workers)?;
    write(&input.out, "lts.txt", &run.lts.dump())?;
    write(&input.out, "lts.dot", &dot(&run.lts))?;
    let report = run_checks(&ex, &run, &[])?;
    let summary = match input.format {
        Format::Text => report.to_text(),
        Format::Machine => report.to_json() + "\n",
    };
    write(&input.out, "summary.txt", &summary)?;
    print!("{summary}");
    Ok(report.verdict().exit_code() as u8)
}

fn check(input: &Input, checks: &[Check]) -> Result<u8> {
    let ex = explorer(input)?;
    let run = ex.explore(input.workers)?;
    let report = run_checks(&ex, &run, checks)?;
    write(&input.out, "report.txt", &report.to_text())?;
    write(&input.out, "report.json", &(report.to_json() + "\n"))?;
    match input.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Machine => println!("{}", report.to_json()),
    }
    Ok(report.verdict().exit_code() as u8)
}

fn bisim(input: &Input, against: Option<&Path>) -> Result<u8> {
    let ex = explorer(input)?;
    let other = match against {
        Some(path) => explorer(&Input {
            scenario: path.to_path_buf(),
            library: input.library.clone(),
            out: input.out.clone(),
            workers: input.workers,
            format: input.format,
            max_states: input.max_states,
        })?,
        None => {
            let mut s = ex.scenario.clone();
            s.options.non_blocking = !s.options.non_blocking;
            Explorer::with_library(s, ex.library.clone())?
        }
    };
    let a = ex.explore(input.workers)?;
    let b = other.explore(input.workers)?;
    let mut out = String::new();
    let _ = writeln!(out, "left:  {} states, {} transitions", a.lts.num_states(), a.lts.num_transitions());
    let _ = writeln!(out, "right: {} states, {} transitions", b.lts.num_states(), b.lts.num_transitions());
    let verdict = match bisimilar(&a.lts, &b.lts) {
        Err(e) => {
            let _ = writeln!(out, "inconclusive: {e}");
            Verdict::Inconclusive
        }
        Ok(r) if r.is_equivalent() => {
            let _ = writeln!(out, "bisimilar");
            Verdict::Pass
        }
        Ok(awn::BisimResult::Distinguished { formula, trace }) => {
            let _ = writeln!(out, "not bisimilar");
            let _ = writeln!(out, "distinguishing formula: {formula}");
            let labels: Vec<String> = trace.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "along: {}", labels.join(" . "));
            Verdict::Violation
        }
        Ok(_) => unreachable!("equivalent handled above"),
    };
    write(&input.out, "bisim.txt", &out)?;
    print!("{out}");
    Ok(verdict.exit_code() as u8)
}
