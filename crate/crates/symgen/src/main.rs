use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symgen::abstraction::{PrecondMode, SymbolicDomain};
use symgen::pddl::Plan;
use symgen::pipeline::{
    run_abstract, run_collect, run_emit, run_pipeline, run_plan, PipelineConfig,
    DOMAIN_PDDL_FILE, PROBLEM_PDDL_FILE,
};
use symgen::setrep::Representation;
use symgen::Error;

/// Turns low-level skill-execution data into a propositional PDDL planning
/// domain and validates it with a breadth-first planner.
#[derive(Parser)]
#[command(name = "symgen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore a scenario and write the transition log.
    Collect(CollectArgs),
    /// Build the symbolic domain from a previously collected transition log.
    Abstract(CollectArgs),
    /// Write PDDL files for a previously built symbolic domain.
    Emit(EmitArgs),
    /// Search for a plan in a previously built symbolic domain.
    Plan(PlanArgs),
    /// Run collect, abstract, emit, and plan in one go.
    Pipeline(PlanArgs),
}

fn parse_representation(s: &str) -> Result<Representation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_precond_mode(s: &str) -> Result<PrecondMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct CommonArgs {
    /// Builtin scenario (reset, negative, unreachable) or a scenario file path.
    #[arg(long)]
    scenario: String,

    /// Set representation: c45 (decision-tree filters) or intm (interval hulls).
    #[arg(long, visible_alias = "rep", default_value = "c45", value_parser = parse_representation)]
    representation: Representation,

    /// Exploration steps to collect.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,

    /// Seed for the exploration's random choices.
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Directory the pipeline stages read and write artifacts in.
    #[arg(long, env = "SYMGEN_OUT_DIR", default_value = "symgen-out")]
    out_dir: PathBuf,

    /// Longest plan the planner searches for.
    #[arg(long, default_value_t = 100)]
    max_depth: usize,

    /// Precondition synthesis: minimal-union or all-union.
    #[arg(long, default_value = "minimal-union", value_parser = parse_precond_mode)]
    precond_mode: PrecondMode,

    /// Accept classifiers whose decision tree has several true leaves.
    #[arg(long)]
    permissive: bool,
}

impl CommonArgs {
    fn into_config(self) -> PipelineConfig {
        PipelineConfig {
            scenario: self.scenario,
            representation: self.representation,
            budget: self.budget,
            seed: self.seed,
            out_dir: self.out_dir,
            max_depth: self.max_depth,
            precond_mode: self.precond_mode,
            strict: !self.permissive,
        }
    }
}

#[derive(Args)]
struct CollectArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Start state for the problem file: a bitstring like 010001 or
    /// comma-separated values (defaults to all zeros).
    #[arg(long)]
    init: Option<String>,

    /// Goal symbol labels, comma-separated; also emits problem.pddl.
    #[arg(long, value_delimiter = ',')]
    goal: Vec<String>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Start state: a bitstring like 010001 or comma-separated values
    /// (defaults to all zeros).
    #[arg(long)]
    init: Option<String>,

    /// Goal symbol labels, comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    goal: Vec<String>,
}

fn print_domain_summary(domain: &SymbolicDomain) {
    println!(
        "{} ({}): {} factors, {} symbols, {} operators, {} warnings",
        domain.scenario,
        domain.representation,
        domain.factors.len(),
        domain.symbols.len(),
        domain.operators.len(),
        domain.warnings.len()
    );
    for warning in &domain.warnings {
        println!("warning: {warning}");
    }
}

fn print_plan(plan: Option<Plan>) {
    match plan {
        Some(p) if p.actions.is_empty() => println!("empty plan (goal already satisfied)"),
        Some(p) => {
            println!("plan ({} actions):", p.length());
            for action in &p.actions {
                println!("  {action}");
            }
        }
        None => println!("no plan"),
    }
}

fn run(cli: Cli) -> symgen::Result<()> {
    match cli.command {
        Command::Collect(args) => {
            let config = args.common.into_config();
            let out = run_collect(&config)?;
            println!(
                "collected {} transitions from `{}` into {}",
                out.steps,
                config.scenario,
                config.out_dir.display()
            );
            print!("{}", out.summary);
        }
        Command::Abstract(args) => {
            let config = args.common.into_config();
            let domain = run_abstract(&config)?;
            print_domain_summary(&domain);
        }
        Command::Emit(args) => {
            let config = args.common.into_config();
            run_emit(&config, args.init.as_deref(), &args.goal)?;
            println!("wrote {}", config.out_dir.join(DOMAIN_PDDL_FILE).display());
            if !args.goal.is_empty() {
                println!("wrote {}", config.out_dir.join(PROBLEM_PDDL_FILE).display());
            }
        }
        Command::Plan(args) => {
            let config = args.common.into_config();
            let plan = run_plan(&config, args.init.as_deref(), &args.goal)?;
            print_plan(plan);
        }
        Command::Pipeline(args) => {
            let config = args.common.into_config();
            let out = run_pipeline(&config, args.init.as_deref(), &args.goal)?;
            println!("collected {} transitions from `{}`", out.steps, config.scenario);
            print_domain_summary(&out.domain);
            print_plan(out.plan);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not errors.
            let is_error = e.use_stderr();
            let _ = e.print();
            return if is_error { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
