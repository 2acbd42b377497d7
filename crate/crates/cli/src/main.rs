//! `cutrun`: run, sweep, audit and plot evader scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use cutrun_core::engine::{self, Outcome, RunLevel, SimConfig, SimResult};
use cutrun_core::oracle::{self, AuditGrid};
use cutrun_core::output;
use cutrun_core::scenario::{ScenarioError, ScenarioFile};

#[derive(Parser)]
#[command(
    name = "cutrun",
    version,
    about = "Safe evader navigation through pursuer reachability regions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and print its summary.
    Run {
        scenario: PathBuf,
        /// Directory for trajectory.csv, pursuer_<k>.csv and summary.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a scenario once per value of one key.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        key: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Directory for sweep.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a run against a grid of pursuer launch times and guidance laws.
    Audit {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = GridArg::Coarse)]
        grid: GridArg,
    },
    /// Write an SVG plot and the raw CSV next to it.
    PlotData {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Coarse,
    Fine,
}

const EXIT_INPUT: u8 = 1;
const EXIT_CAPTURED: u8 = 2;
const EXIT_TIMED_OUT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out } => cmd_run(&scenario, out.as_deref()),
        Command::Sweep {
            scenario,
            key,
            values,
            out,
        } => cmd_sweep(&scenario, &key, &values, out.as_deref()),
        Command::Audit { scenario, grid } => cmd_audit(&scenario, grid),
        Command::PlotData { scenario, out } => cmd_plot(&scenario, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<ScenarioFile> {
    let mut file = ScenarioFile::load(path).map_err(|e| match e {
        ScenarioError::Io { .. } => anyhow!("{e}"),
        _ => anyhow!("{}: {e}", path.display()),
    })?;
    if let Ok(dt) = std::env::var("CUTRUN_DT") {
        file.set("dt", &dt).with_context(|| format!("CUTRUN_DT={dt}"))?;
    }
    Ok(file)
}

fn outcome_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Arrived => 0,
        Outcome::Captured => EXIT_CAPTURED,
        Outcome::TimedOut => EXIT_TIMED_OUT,
    }
}

/// Simulated run plus its improvement over the level-1 path of the same
/// engagement.
struct Summary {
    result: SimResult,
    improvement_pct: Option<f64>,
}

impl Summary {
    fn compute(config: &SimConfig) -> anyhow::Result<Self> {
        let result = engine::run(config)?;
        let improvement_pct = if config.level == RunLevel::L1 {
            None
        } else {
            let baseline = SimConfig {
                level: RunLevel::L1,
                ..*config
            };
            let l1 = engine::run(&baseline)?;
            Some(100.0 * (l1.path_length - result.path_length) / l1.path_length)
        };
        Ok(Summary {
            result,
            improvement_pct,
        })
    }

    fn headline(&self) -> String {
        let r = &self.result;
        let pct = self.improvement_pct.map_or("-".to_string(), |p| format!("{p:.2}%"));
        format!("{} {:.3} {pct}", r.config.level.label(), r.path_length)
    }

    fn details(&self) -> String {
        let r = &self.result;
        format!(
            "outcome: {:?}\nend time: {}\npursuers launched: {}\nmin separation: {}\n",
            r.outcome,
            output::sig6(r.end_time()),
            r.pursuer_tracks.len(),
            output::sig6(r.min_separation)
        )
    }
}

fn cmd_run(path: &Path, out: Option<&Path>) -> anyhow::Result<u8> {
    let config = load(path)?.to_config()?;
    let summary = Summary::compute(&config)?;
    let text = format!("{}\n{}", summary.headline(), summary.details());
    print!("{text}");
    if let Some(dir) = out {
        output::write_csvs(&summary.result, dir).with_context(|| format!("writing {}", dir.display()))?;
        std::fs::write(dir.join("summary.txt"), &text)?;
    }
    Ok(outcome_code(summary.result.outcome))
}

fn cmd_sweep(path: &Path, key: &str, values: &str, out: Option<&Path>) -> anyhow::Result<u8> {
    let base = load(path)?;
    let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        bail!("empty sweep grid");
    }
    // reject unknown keys before doing any work
    base.clone().set(key, values[0]).map_err(|e| anyhow!("{e}"))?;

    let rows: Vec<String> = values
        .par_iter()
        .map(|value| {
            let mut file = base.clone();
            let summary = file
                .set(key, value)
                .map_err(|e| anyhow!("{e}"))
                .and_then(|()| Ok(file.to_config()?))
                .and_then(|cfg| Summary::compute(&cfg));
            match summary {
                Ok(s) => Ok(format!(
                    "{key}={value},{},{},{},{:?}",
                    s.result.config.level.label(),
                    output::sig6(s.result.path_length),
                    s.improvement_pct.map(output::sig6).unwrap_or_default(),
                    s.result.outcome
                )),
                Err(e) => Err(format!("{key}={value},error: {e:#}")),
            }
        })
        .map(|row| row.unwrap_or_else(|e| e))
        .collect();

    let failed = rows.iter().any(|r| r.contains(",error: "));
    let table = format!("point,level,length,improvement_pct,outcome\n{}\n", rows.join("\n"));
    print!("{table}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.csv"), &table)?;
    }
    Ok(if failed { EXIT_INPUT } else { 0 })
}

fn cmd_audit(path: &Path, grid: GridArg) -> anyhow::Result<u8> {
    let config = load(path)?.to_config()?;
    let result = engine::run(&config)?;
    let grid = match grid {
        GridArg::Coarse => AuditGrid::Coarse,
        GridArg::Fine => AuditGrid::Fine,
    };
    let name = path
        .file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    let report = oracle::safety_audit(&result, &name, grid)?;
    print!("{report}");
    Ok(if report.passed() { 0 } else { EXIT_CAPTURED })
}

fn cmd_plot(path: &Path, out: &Path) -> anyhow::Result<u8> {
    let config = load(path)?.to_config()?;
    let result = engine::run(&config)?;
    let dir = out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(out, output::svg(&result)).with_context(|| format!("writing {}", out.display()))?;
    output::write_csvs(&result, dir).with_context(|| format!("writing CSV into {}", dir.display()))?;
    println!("wrote {}", out.display());
    Ok(0)
}
