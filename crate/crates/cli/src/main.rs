use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rotor_gpe::GpeError;
use rotor_gpe_cli::error::{CliError, CliResult, EXIT_CONFIG};
use rotor_gpe_cli::output::{ensure_dir, write_csv, Manifest};
use rotor_gpe_cli::run::cmd_run;
use rotor_gpe_cli::studies::{
    self, dispersive_csv_row, StudyScheme, COMPARE_HEADER, CONVERGENCE_HEADER, DISPERSIVE_HEADER,
};
use rotor_gpe_cli::verify::cmd_verify;
use rotor_gpe_cli::RunConfig;
use serde_json::json;

/// Rotating-trap Gross-Pitaevskii simulator and verification tool.
#[derive(Debug, Parser)]
#[command(name = "rotor-gpe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Strang,
    Picard,
    Linear,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve the configured initial state; writes diagnostics, snapshots and a manifest.
    Run { config: PathBuf },
    /// Run the invariant checks and print measured against tolerated values.
    Verify { config: Option<PathBuf> },
    /// Refinement study of a time integrator.
    Convergence {
        config: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// L1 -> L-infinity ratio of S(t) S*(s) on a band-limited point mass.
    DispersiveScan { config: PathBuf },
    /// Fast propagator against the kernel quadrature.
    PropagatorCompare { config: PathBuf },
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("ROTOR_GPE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| GpeError::config("ROTOR_GPE_THREADS", format!("expected a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| GpeError::config("ROTOR_GPE_THREADS", e.to_string()))?;
    Ok(())
}

fn write_with_manifest(
    config: &RunConfig,
    command: &str,
    stem: &str,
    header: &str,
    rows: Vec<String>,
    summary: serde_json::Value,
    start: Instant,
) -> CliResult<PathBuf> {
    let dir = &config.output.dir;
    ensure_dir(dir)?;
    let csv = dir.join(format!("{stem}.csv"));
    write_csv(&csv, header, rows)?;
    let mut manifest = Manifest::new(command, config);
    manifest.outputs = vec![csv.clone()];
    manifest.summary = summary;
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    manifest.write(&dir.join(format!("{stem}.manifest.json")))?;
    Ok(csv)
}

fn load(path: &Path) -> CliResult<RunConfig> {
    Ok(RunConfig::load(path)?)
}

fn execute(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let start = Instant::now();
    match cli.command {
        Command::Run { config } => {
            let config = load(&config)?;
            let s = cmd_run(&config)?;
            println!(
                "{} steps to t = {:.6}; diagnostics in {}, {} snapshots, manifest {}",
                s.steps,
                s.final_t,
                s.diagnostics.display(),
                s.snapshots.len(),
                s.manifest.display()
            );
        }
        Command::Verify { config } => {
            let config = match config {
                Some(p) => load(&p)?,
                None => RunConfig::desk_default(),
            };
            let report = cmd_verify(&config)?;
            print!("{}", report.table());
            if report.failed() > 0 {
                return Err(CliError::Verification {
                    failed: report.failed(),
                    total: report.checks.len(),
                });
            }
        }
        Command::Convergence { config, scheme, levels } => {
            let config = load(&config)?;
            let scheme = match scheme {
                SchemeArg::Strang => StudyScheme::Strang,
                SchemeArg::Picard => StudyScheme::Picard,
                SchemeArg::Linear => StudyScheme::Linear,
            };
            let study = studies::convergence(&config, scheme, levels)?;
            let rows = study.rows.iter().map(|r| r.csv_row()).collect();
            let summary = json!({"fitted_order": study.fitted_order, "monotone": study.monotone});
            let stem = format!("convergence_{}", scheme.name());
            let csv = write_with_manifest(&config, "convergence", &stem, CONVERGENCE_HEADER, rows, summary, start)?;
            println!("{CONVERGENCE_HEADER}");
            for r in &study.rows {
                println!("{}", r.csv_row());
            }
            println!(
                "fitted order {:.3}; errors {}; written to {}",
                study.fitted_order,
                if study.monotone { "decrease monotonically" } else { "are NOT monotone" },
                csv.display()
            );
        }
        Command::DispersiveScan { config } => {
            let config = load(&config)?;
            let study = studies::dispersive(&config)?;
            let rows = study.samples.iter().map(dispersive_csv_row).collect();
            let max_ratio = study.samples.iter().map(|s| s.ratio / s.bound).fold(0.0, f64::max);
            let summary = json!({"slope": study.slope, "max_ratio_over_bound": max_ratio});
            let csv = write_with_manifest(&config, "dispersive-scan", "dispersive_scan", DISPERSIVE_HEADER, rows, summary, start)?;
            match study.slope {
                Some(s) => println!(
                    "fitted exponent {s:.3} over {} pairs; max ratio/bound {max_ratio:.3}; written to {}",
                    study.samples.len(),
                    csv.display()
                ),
                None => println!("{} pairs, no exponent fitted; written to {}", study.samples.len(), csv.display()),
            }
        }
        Command::PropagatorCompare { config } => {
            let config = load(&config)?;
            let study = studies::propagator_compare(&config)?;
            let rows = study.rows.iter().map(|r| r.csv_row()).collect();
            let summary = json!({"worst": study.worst(), "calibrated": study.calibrated});
            let csv = write_with_manifest(&config, "propagator-compare", "propagator_compare", COMPARE_HEADER, rows, summary, start)?;
            println!("{COMPARE_HEADER}");
            for r in &study.rows {
                println!("{}", r.csv_row());
            }
            println!("worst discrepancy {:.3e}; written to {}", study.worst(), csv.display());
            if study.calibrated && study.worst() > config.compare.tolerance {
                return Err(CliError::Verification { failed: 1, total: 1 });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
