use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use politician_bench::{run_suite, BenchConfig, BenchError, ProblemSpec};

#[derive(Parser)]
#[command(name = "politician-bench", about = "Run method × politician grids and write CSV traces and performance profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite from a JSON config, or a single problem described by flags.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Quadratic,
    Nesterov,
    Hinge,
    Libsvm,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config file. Flags given alongside it override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family; replaces the config's problem list.
    #[arg(long, value_enum)]
    problem: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Condition number for quadratics.
    #[arg(long)]
    kappa: Option<f64>,
    /// LIBSVM data file for the `libsvm` family.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Method name, repeatable (`sd`, `cg`, `gk`, `bfgs`, `empty`, each optionally with `+`).
    #[arg(long = "method")]
    methods: Vec<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Smoothing parameter of the hinge loss.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn problem_from_flags(args: &RunArgs, family: Family) -> Result<ProblemSpec, BenchError> {
    let need = |name: &str| BenchError::Config(format!("--{name} is required for this problem"));
    let n = || args.n.ok_or_else(|| need("n"));
    let seed = args.seed.unwrap_or(0);
    let t = args.t.unwrap_or(0.1);
    let lambda = args.lambda.unwrap_or(1e-4);
    Ok(match family {
        Family::Quadratic => ProblemSpec::Quadratic {
            n: n()?,
            seed,
            kappa: args.kappa,
        },
        Family::Nesterov => ProblemSpec::Nesterov { n: n()? },
        Family::Hinge => ProblemSpec::Hinge { n: n()?, seed, t, lambda },
        Family::Libsvm => ProblemSpec::Libsvm {
            path: args.data.clone().ok_or_else(|| need("data"))?,
            t,
            lambda,
        },
    })
}

fn build_config(args: &RunArgs) -> Result<BenchConfig, BenchError> {
    let mut config = match &args.config {
        Some(path) => BenchConfig::from_file(path)?,
        None => BenchConfig {
            problems: Vec::new(),
            methods: Vec::new(),
            budget: 100,
            tol: 1e-10,
            accuracy: None,
            out: PathBuf::from("results"),
        },
    };
    if let Some(family) = args.problem {
        config.problems = vec![problem_from_flags(args, family)?];
    } else if args.config.is_none() {
        return Err(BenchError::Config("either --config or --problem is required".into()));
    }
    if !args.methods.is_empty() {
        config.methods = args.methods.clone();
    }
    if let Some(b) = args.budget {
        config.budget = b;
    }
    if let Some(t) = args.tol {
        config.tol = t;
    }
    if let Some(o) = &args.out {
        config.out = o.clone();
    }
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let Command::Run(args) = Cli::parse().command;
    let outcome = build_config(&args).and_then(|config| {
        let report = run_suite(&config, Path::new(""))?;
        Ok((config, report))
    });
    match outcome {
        Ok((config, report)) => {
            let solved = report.manifest.runs.iter().filter(|r| r.iterations_to_target.is_some()).count();
            println!(
                "{} runs written to {} ({solved} reached the target)",
                report.manifest.runs.len(),
                config.out.display()
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
