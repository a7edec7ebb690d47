use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cbo::harness::{self, PresetJob, Scale};
use cbo::CboError;

/// Consensus-based optimization experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of an experiment config.
    Run { config: PathBuf },
    /// Run a (lambda, sigma) sweep config.
    Sweep { config: PathBuf },
    /// Run a multigrid Allen–Cahn config.
    AllenCahn { config: PathBuf },
    /// Run a named preset.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long, default_value = "desk")]
        scale: String,
    },
}

fn default_root() -> PathBuf {
    std::env::var_os("CBO_OUTPUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("cbo-results"))
}

fn target(explicit: Option<&Path>, name: &str) -> PathBuf {
    explicit.map_or_else(|| default_root().join(name), Path::to_path_buf)
}

fn run_job(job: &PresetJob, dir: &Path) -> cbo::Result<()> {
    match job {
        PresetJob::Experiment(cfg) => {
            let res = harness::run_experiment(cfg)?;
            harness::persist_experiment(dir, &res)?;
            let s = &res.summary;
            println!(
                "{}: {} runs, median final residual {:?}, successes {}/{}",
                cfg.name, s.runs, s.median_final_residual, s.successes, s.runs
            );
        }
        PresetJob::Sweep(cfg) => {
            let res = harness::run_sweep(&cfg.base, &cfg.grid)?;
            harness::persist_sweep(dir, &res)?;
            let converged = res.cells().filter(|c| c.converged).count();
            println!(
                "{}: {converged}/{} cells below ln V(0) = {:.4}",
                cfg.base.name,
                res.lambdas.len() * res.sigmas.len(),
                res.ln_initial
            );
        }
        PresetJob::AllenCahn(cfg) => {
            let res = harness::run_allen_cahn(cfg)?;
            harness::persist_allen_cahn(dir, &res)?;
            for r in &res.runs {
                println!(
                    "{} seed {}: final consensus energy {:.6e}",
                    cfg.name,
                    r.seed,
                    r.outcome.levels.last().map_or(f64::NAN, |l| l.record.last().consensus_energy)
                );
            }
        }
    }
    println!("  -> {}", dir.display());
    Ok(())
}

fn execute(cli: Cli) -> cbo::Result<()> {
    match cli.command {
        Command::Run { config } => {
            let cfg = harness::load_experiment(&config)?;
            let dir = target(cfg.output.as_deref(), &cfg.name);
            run_job(&PresetJob::Experiment(cfg), &dir)
        }
        Command::Sweep { config } => {
            let cfg = harness::load_sweep(&config)?;
            let dir = target(cfg.base.output.as_deref(), &cfg.base.name);
            run_job(&PresetJob::Sweep(cfg), &dir)
        }
        Command::AllenCahn { config } => {
            let cfg = harness::load_allen_cahn(&config)?;
            let dir = target(cfg.output.as_deref(), &cfg.name);
            run_job(&PresetJob::AllenCahn(cfg), &dir)
        }
        Command::Preset {
            name,
            out,
            seeds,
            scale,
        } => {
            let scale: Scale = scale.parse()?;
            let jobs = harness::preset(&name, scale, seeds)?;
            let root = out.unwrap_or_else(|| default_root().join(&name));
            for job in &jobs {
                run_job(job, &root.join(job.name()))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CboError::Config(_) | CboError::Input(_) => ExitCode::from(1),
                CboError::Io { .. } | CboError::Serde { .. } | CboError::Domain(_) | CboError::NonFinite { .. } => {
                    ExitCode::from(2)
                }
            }
        }
    }
}
