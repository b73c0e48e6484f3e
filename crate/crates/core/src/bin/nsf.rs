use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nsf::run::{self, Prepared};
use nsf::{NsfError, Result};

const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_VERDICT: u8 = 4;

#[derive(Parser)]
#[command(name = "nsf", version, about = "Steady compressible Navier-Stokes-Fourier channel flow near a constant axial flow")]
struct Cli {
    /// Directory for the output files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Background, Picard iteration and inequality verdicts.
    Solve { config: PathBuf },
    /// Calibrate the inequality checkers, verify them on a fresh seed and run
    /// the transport and identity oracles.
    Verify { config: PathBuf },
    /// Convergence orders of the manufactured cases.
    Study {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
}

fn init_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("NSF_THREADS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("NSF_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("NSF_THREADS must be a positive integer".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn solve(config: &Path, out: &Path) -> Result<u8> {
    let prep = Prepared::load(config)?;
    let result = run::solve(&prep)?;
    run::write_solve_outputs(out, &prep, &result)?;
    let s = &result.summary;
    eprintln!("status {:?} after {} steps, final delta {:?}", s.status, s.steps, s.final_delta);
    if !result.outcome.report.converged() {
        return Ok(EXIT_DIVERGED);
    }
    Ok(if s.verdicts_pass { 0 } else { EXIT_VERDICT })
}

fn verify(config: &Path, out: &Path) -> Result<u8> {
    let prep = Prepared::load(config)?;
    let (cal, summary) = run::verify(&prep)?;
    run::write_verify_outputs(out, &cal, &summary)?;
    for c in &summary.checkers {
        eprintln!("{:<24} C = {:.4e}  max ratio {:.4e}  {}", c.id, c.constant, c.max_ratio, if c.pass { "pass" } else { "FAIL" });
    }
    eprintln!("trans identity order {:.3}, transport oracle order {:.3}", summary.trans_identity.order, summary.transport_oracle.order);
    Ok(if summary.pass { 0 } else { EXIT_VERDICT })
}

fn study(config: &Path, resolutions: Option<Vec<usize>>, out: &Path) -> Result<u8> {
    let prep = Prepared::load(config)?;
    let resolutions = resolutions.unwrap_or_else(|| prep.config.diagnostics.resolutions.clone());
    if resolutions.len() < 2 {
        return Err(NsfError::Config("a study needs at least two resolutions".into()));
    }
    let st = run::study(&prep, &resolutions)?;
    run::write_study_outputs(out, &st)?;
    for o in &st.orders {
        eprintln!("{:<16} order {:.3}  {}", o.case, o.order, if o.pass { "pass" } else { "FAIL" });
    }
    Ok(if st.pass() { 0 } else { EXIT_VERDICT })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let out = cli.out_dir.as_path();
    let result = match cli.command {
        Command::Solve { config } => solve(&config, out),
        Command::Verify { config } => verify(&config, out),
        Command::Study { config, resolutions } => study(&config, resolutions, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                NsfError::Config(_) => EXIT_CONFIG,
                NsfError::Divergence { .. } => EXIT_DIVERGED,
                _ => 1,
            })
        }
    }
}
