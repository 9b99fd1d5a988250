use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bandit_alignment::harness::{self, verify, ExperimentConfig, HarnessError};
use clap::{Parser, Subcommand};

/// Regret experiments for the beta-Bernoulli bandit alignment problem.
#[derive(Debug, Parser)]
#[command(name = "bandit-align", version)]
struct Cli {
    /// Worker threads for parallel episodes (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write raw traces and aggregate curves.
    Run {
        /// Flat `key = value` config file. Omit to run the default experiment.
        #[arg(long)]
        config: Option<PathBuf>,

        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the oracle checks and print a JSON report.
    Verify,
    /// Least-squares log-log slope of mean cumulative regret.
    Slope {
        /// Aggregate CSV written by `run`.
        #[arg(long)]
        input: PathBuf,

        #[arg(long)]
        tmin: u64,

        #[arg(long)]
        tmax: u64,

        /// Only report this agent.
        #[arg(long)]
        agent: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Run { config, output_dir } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|source| HarnessError::Io { path, source })?;
                    ExperimentConfig::parse(&text)?
                }
                None => ExperimentConfig::default(),
            };
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            run(&cfg)
        }
        Command::Verify => {
            let report = verify::verify()?;
            println!("{}", report.to_json());
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Slope {
            input,
            tmin,
            tmax,
            agent,
        } => {
            let curves = harness::read_aggregate_csv(&input)?;
            let mut printed = 0;
            for curve in curves
                .iter()
                .filter(|c| agent.as_deref().is_none_or(|a| a == c.agent_id))
            {
                let slope = harness::loglog_slope(curve, tmin, tmax)?;
                println!("{}\t{slope:.6}", curve.agent_id);
                printed += 1;
            }
            if printed == 0 {
                return Err(HarnessError::Slope(format!("no matching agent in {}", input.display())));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(cfg: &ExperimentConfig) -> Result<ExitCode, HarnessError> {
    eprintln!(
        "running {} agent(s) x {} seed(s), N = {}, T = {}",
        cfg.agents.len(),
        cfg.seeds,
        cfg.arms,
        cfg.horizon
    );
    let (result, files) = harness::run_experiment(cfg)?;
    println!("agent_id\tfinal_mean_cum_regret\tstderr");
    for curve in &result.curves {
        if let Some(p) = curve.final_point() {
            println!("{}\t{:.3}\t{:.3}", curve.agent_id, p.mean_cum_regret, p.stderr);
        }
    }
    eprintln!(
        "wrote {} trace file(s), {} aggregate curve(s), and {}",
        files.traces.len(),
        files.aggregates.len(),
        files.combined.display()
    );
    Ok(ExitCode::SUCCESS)
}
