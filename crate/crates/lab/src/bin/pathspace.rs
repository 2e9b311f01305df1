//! Batch experiment runner for the path-space verification suite.
//!
//! Exit codes: 0 when every verdict holds (possibly within the confidence
//! band), 2 when any check is violated, 1 on usage or config errors.
//! `RAYON_NUM_THREADS` bounds the worker count.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pathspace_lab::config::ExperimentConfig;
use pathspace_lab::{functions, runner};

#[derive(Parser)]
#[command(
    name = "pathspace",
    about = "Monte Carlo verification lab for path-space calculus"
)]
struct Cli {
    /// Print the catalog of experiments, models, functions, and profiles.
    #[arg(long)]
    list_catalog: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config (JSON file).
    Run {
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the path count.
        #[arg(long)]
        paths: Option<usize>,
        /// Output directory for report.csv and summary.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment once per value of a swept parameter.
    Sweep {
        config: PathBuf,
        /// Parameter to sweep: r, dt, seed, or paths.
        #[arg(long)]
        param: String,
        /// Comma-separated list of values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(
    path: &PathBuf,
    seed: Option<u64>,
    paths: Option<usize>,
    out: Option<&PathBuf>,
) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(n) = paths {
        config.paths = n;
    }
    if let Some(dir) = out {
        config.out_dir = Some(dir.display().to_string());
    }
    Ok(config)
}

fn finish(result: runner::RunResult, out_dir: Option<String>) -> anyhow::Result<ExitCode> {
    print!("{}", result.summary);
    if let Some(dir) = out_dir {
        runner::write_outputs(&result, std::path::Path::new(&dir))?;
        eprintln!("wrote {dir}/report.csv and {dir}/summary.txt");
    } else {
        print!("{}", result.csv);
    }
    Ok(ExitCode::from(result.exit_code as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_catalog {
        print!("{}", functions::catalog_text());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: give a subcommand or --list-catalog (see --help)");
        return ExitCode::from(1);
    };
    let run = || -> anyhow::Result<ExitCode> {
        match command {
            Command::Run {
                config,
                seed,
                paths,
                out,
            } => {
                let cfg = load_config(&config, seed, paths, out.as_ref())?;
                let result = runner::run(&cfg)?;
                finish(result, cfg.out_dir.clone())
            }
            Command::Sweep {
                config,
                param,
                values,
                out,
            } => {
                let cfg = load_config(&config, None, None, out.as_ref())?;
                let result = runner::sweep(&cfg, &param, &values)?;
                finish(result, cfg.out_dir.clone())
            }
        }
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
