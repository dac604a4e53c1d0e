use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use adaptive_sip::bench::{run_bench, BenchConfig};
use adaptive_sip::io::{self, Algorithm, RunConfig};
use adaptive_sip::problem::derive_eps_star;
use adaptive_sip::schedule::ObjSchedule;

#[derive(Parser)]
#[command(
    name = "adaptive-sip",
    version,
    about = "Adaptive discretization solver for convex semi-infinite programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and print the outcome JSON.
    Solve(SolveArgs),
    /// Validate a problem file and its Slater certificate.
    Check {
        #[arg(long)]
        problem: String,
    },
    /// Compare discretization sizes with and without pruning.
    Bench {
        #[arg(long, default_value = "builtin:instance_A")]
        problem: String,
        #[arg(long, default_value_t = 50)]
        iterations: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        extra_violators: usize,
        #[arg(long, default_value_t = 1e-3)]
        grid_tol: f64,
    },
}

#[derive(clap::Args)]
struct SolveArgs {
    /// JSON problem file or `builtin:NAME`.
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "sequential")]
    algorithm: String,
    #[arg(long, default_value_t = 1e-2)]
    delta: f64,
    /// Pruning radius, a number or `inf`.
    #[arg(long, default_value = "inf")]
    rho: String,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    eps0: f64,
    /// e.g. `geometric(0.5)` or `eventually_zero(3)`.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long)]
    outcome_out: Option<PathBuf>,
}

fn solve(args: SolveArgs) -> Result<i32> {
    let problem =
        io::load_problem(&args.problem).with_context(|| format!("loading {}", args.problem))?;
    let algorithm: Algorithm = args.algorithm.parse()?;
    let schedule = args
        .schedule
        .as_deref()
        .map(str::parse::<ObjSchedule>)
        .transpose()?;
    let cfg = RunConfig {
        algorithm,
        delta: args.delta,
        rho: io::parse_rho(&args.rho)?,
        r: args.r,
        eps0: args.eps0,
        schedule,
        max_iters: args.max_iters,
        trace_out: args.trace_out,
        outcome_out: args.outcome_out,
        ..RunConfig::default()
    };
    let outcome = io::run(&cfg, &problem)?;
    println!("{}", io::outcome_json(&outcome, algorithm));
    Ok(io::exit_code(&outcome))
}

fn check(path: &str) -> Result<i32> {
    let problem = io::load_problem(path).with_context(|| format!("loading {path}"))?;
    println!(
        "ok: x in R^{}, y in R^{}, {} constraint famil{}",
        problem.x_domain().dim(),
        problem.y_domain().dim(),
        problem.constraints().len(),
        if problem.constraints().len() == 1 {
            "y"
        } else {
            "ies"
        }
    );
    match problem.slater_point() {
        Some(s) => {
            let eps_star = derive_eps_star(&problem, 1e-9)?;
            println!("slater point {s:?} certified with margin {eps_star:.6e}");
        }
        None => println!("no slater point given"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Check { problem } => check(&problem),
        Command::Bench {
            problem,
            iterations,
            eps,
            extra_violators,
            grid_tol,
        } => io::load_problem(&problem)
            .with_context(|| format!("loading {problem}"))
            .and_then(|p| {
                let cfg = BenchConfig {
                    eps,
                    iterations,
                    extra_violators,
                    grid_tol,
                };
                Ok(run_bench(&p, &cfg)?)
            })
            .map(|rep| {
                print!("{}", rep.table());
                0
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
