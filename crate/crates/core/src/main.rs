use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cliffproj::budget::Budget;
use cliffproj::metric::QuadraticSpace;
use cliffproj::projective::classify_scenario;
use cliffproj::runner::{dump_sets, render_records, render_text, run, RunOptions, RunReport};
use cliffproj::scenario::{load_scenarios, Scenario, Suite};
use cliffproj::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cliffproj",
    version,
    about = "Verify Lipschitz groups and projective weak orthogonal groups over small fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites on a scenario file or a single space.
    Verify(VerifyArgs),
    /// Print the theorem clause and table of each space.
    Classify(SourceArgs),
    /// Dump the point sets and groups of one space.
    Enumerate(EnumerateArgs),
    /// Verify and group the scenarios of a suite by table.
    Tables(TablesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Args)]
struct SourceArgs {
    /// Scenario file, or `paper-suite` for the bundled suite.
    source: Option<String>,
    /// A single space such as `gf(3):diag(1,1)`, instead of a file.
    #[arg(long, conflicts_with = "source")]
    space: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Enumeration budget; overrides scenario budgets, `CLIFFPROJ_BUDGET` and
    /// the default of 2000000.
    #[arg(long)]
    budget: Option<u64>,
    /// Scenarios verified concurrently.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Suites to run instead of those listed per scenario.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<String>,
    /// Rescaling constants, added to every scenario.
    #[arg(long = "rescale", allow_hyphen_values = true)]
    rescale: Vec<String>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Scenario id when reading a file.
    #[arg(long)]
    id: Option<String>,
    /// Sets to dump: m, g, h, o, po.
    #[arg(long = "set", value_delimiter = ',', default_values_t = ["m", "g", "h", "o", "po"].map(String::from))]
    sets: Vec<String>,
    /// Enumeration budget.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct TablesArgs {
    /// Scenario file, or `paper-suite` (the default).
    #[arg(default_value = "paper-suite")]
    source: String,
    #[command(flatten)]
    run: RunArgs,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn scenarios_from(args: &SourceArgs) -> Result<Vec<Scenario>> {
    match (&args.source, &args.space) {
        (_, Some(space)) => Ok(vec![Scenario::new("space", space.parse::<QuadraticSpace>()?)]),
        (Some(source), None) => load_scenarios(source),
        (None, None) => Err(Error::validation(
            "source",
            "give a scenario file, `paper-suite`, or --space",
        )),
    }
}

fn emit(report: &RunReport, format: Format) {
    match format {
        Format::Text => print!("{}", render_text(report)),
        Format::Records => print!("{}", render_records(report)),
    }
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut scenarios = scenarios_from(&args.source)?;
    let mut suites: Option<BTreeSet<Suite>> = if args.suites.is_empty() {
        None
    } else {
        Some(args.suites.iter().map(|s| s.parse()).collect::<Result<_>>()?)
    };
    if !args.rescale.is_empty() {
        for s in &mut scenarios {
            for c in &args.rescale {
                let c = s.space.field().parse_scalar(c)?;
                if c.is_zero() {
                    return Err(Error::validation("rescale", "constant must be nonzero"));
                }
                s.rescale.push(c);
            }
        }
        if args.source.space.is_some() && suites.is_none() {
            suites = Some([Suite::Rescale].into());
        }
    }
    let options = RunOptions {
        suites,
        budget: args.run.budget,
        jobs: args.run.jobs,
    };
    let start = Instant::now();
    let report = run(&scenarios, &options)?;
    emit(&report, args.run.format);
    eprintln!("finished in {:.2?}", start.elapsed());
    Ok(report.passed)
}

fn classify(args: SourceArgs) -> Result<bool> {
    let scenarios = scenarios_from(&args)?;
    let single = args.space.is_some();
    for s in scenarios {
        let c = classify_scenario(&s.space);
        if single {
            println!("{}", c.summary());
        } else {
            println!("{}: {}", s.id, c.summary());
        }
    }
    Ok(true)
}

fn enumerate(args: EnumerateArgs) -> Result<bool> {
    let scenarios = scenarios_from(&args.source)?;
    let scenario = match &args.id {
        Some(id) => scenarios
            .iter()
            .find(|s| &s.id == id)
            .ok_or_else(|| Error::validation("id", format!("no scenario `{id}`")))?,
        None if scenarios.len() == 1 => &scenarios[0],
        None => return Err(Error::validation("id", "several scenarios; pick one with --id")),
    };
    let budget = Budget(args.budget.or(scenario.budget).unwrap_or_else(|| Budget::from_env().0));
    let sets = dump_sets(&scenario.space, &args.sets, &budget)?;
    match args.format {
        Format::Text => {
            for (name, items) in sets {
                println!("{name} ({} elements)", items.len());
                for item in items {
                    println!("  {item}");
                }
            }
        }
        Format::Records => {
            for (name, items) in sets {
                println!("{}", json!({ "set": name, "size": items.len(), "elements": items }));
            }
        }
    }
    Ok(true)
}

fn tables(args: TablesArgs) -> Result<bool> {
    let scenarios = load_scenarios(&args.source)?;
    let options = RunOptions {
        suites: Some([Suite::Tables].into()),
        budget: args.run.budget,
        jobs: args.run.jobs,
    };
    let report = run(&scenarios, &options)?;
    match args.run.format {
        Format::Records => emit(&report, Format::Records),
        Format::Text => {
            for table in ["Table 1", "Table 2", "Table 3"] {
                println!("{table}");
                for s in &report.scenarios {
                    let listed = s
                        .suite("tables")
                        .is_some_and(|t| t.checks.iter().any(|c| c.name == table));
                    if listed {
                        let verdict = if s.passed { "pass" } else { "FAIL" };
                        println!("  {:<24} {:<34} {:<9} {}", s.id, s.space, s.clause, verdict);
                    }
                }
            }
            println!("no table");
            for s in report.scenarios.iter().filter(|s| s.table.is_none()) {
                let verdict = if s.passed { "pass" } else { "FAIL" };
                println!("  {:<24} {:<34} {:<9} {}", s.id, s.space, s.clause, verdict);
            }
        }
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Classify(a) => classify(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Tables(a) => tables(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
