use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eulgen::sim::{run, verify, SimConfig, Suite};
use eulgen::Error;

#[derive(Parser)]
#[command(name = "eulgen", version, about = "Structure-preserving Eulerian thermo-visco-elastoplasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write diagnostics.csv and snapshots to <dir>.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite (lie, generic, thermo or full) on d = 2 grids.
    Verify {
        #[arg(long)]
        suite: String,
        /// comma-separated grid sizes, at least two
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// also write the report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

const USAGE: u8 = 2;
const FAILURE: u8 = 1;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_usage() { USAGE } else { FAILURE })
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("EULGEN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("EULGEN_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn simulate(config: PathBuf, out: PathBuf) -> ExitCode {
    let cfg = match SimConfig::from_file(&config) {
        Ok(c) => c,
        // an unreadable config file is the caller's mistake too
        Err(e @ Error::Io { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
        Err(e) => return fail(&e),
    };
    let advisory = cfg.initial_state().and_then(|q| cfg.advisory_dt(&q));
    match advisory {
        Ok(bound) => {
            eprintln!("advisory dt bound {bound:.3e} (configured dt {:.3e})", cfg.dt);
            if cfg.dt > bound {
                eprintln!("warning: dt exceeds the advisory bound; the explicit scheme may be unstable");
            }
        }
        Err(e) => return fail(&e),
    }
    match run(&cfg, Some(&out)) {
        Ok(r) => {
            let last = r.diagnostics.last().expect("at least the initial row");
            println!(
                "t = {:.6}  steps = {}  E_drift_rel = {:.3e}  S_total = {:.9e}",
                r.final_time,
                r.diagnostics.len() - 1,
                last.e_drift_rel,
                last.s_total
            );
            println!("wrote {}", out.join("diagnostics.csv").display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn verify_cmd(suite: &str, grid: &[usize], seed: u64, report: Option<PathBuf>) -> ExitCode {
    let suite: Suite = match suite.parse() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let rep = match verify(suite, grid, seed) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    for c in &rep.checks {
        println!("{c}");
    }
    let failed = rep.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", rep.checks.len());
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&rep).expect("report serializes");
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(FAILURE);
        }
    }
    if rep.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(USAGE);
    }
    match cli.command {
        Command::Simulate { config, out } => simulate(config, out),
        Command::Verify {
            suite,
            grid,
            seed,
            report,
        } => verify_cmd(&suite, &grid, seed, report),
    }
}
