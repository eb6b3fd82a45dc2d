//! The `run` command: evolve the configured state and write diagnostics,
//! snapshots and a manifest.

use std::path::PathBuf;
use std::time::Instant;

use rotor_gpe::diagnostics::{drift_report, CSV_HEADER};
use rotor_gpe::snapshot::write_snapshot;
use rotor_gpe::solver::evolve_observed;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{ensure_dir, write_csv, Manifest};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub final_t: f64,
    pub diagnostics: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub manifest: PathBuf,
}

fn snapshot_name(step: usize) -> String {
    format!("snapshot_{step:07}.bin")
}

pub fn cmd_run(config: &RunConfig) -> CliResult<RunSummary> {
    let start = Instant::now();
    let dir = &config.output.dir;
    ensure_dir(dir)?;
    let u0 = config.initial_field()?;
    let params = config.physics;
    let mut snapshots = Vec::new();
    let first = dir.join(snapshot_name(0));
    write_snapshot(&first, &u0, 0.0, &params)?;
    snapshots.push(first);
    let every = config.output.snapshot_every;
    let traj = evolve_observed(&u0, &config.evolve, &params, |state, step| {
        if every > 0 && step > 0 && step % every == 0 {
            let path = dir.join(snapshot_name(step));
            write_snapshot(&path, &state.field, state.t, &params)?;
            snapshots.push(path);
        }
        Ok(())
    })?;
    let last = dir.join(snapshot_name(traj.steps));
    if snapshots.last() != Some(&last) {
        write_snapshot(&last, &traj.final_state.field, traj.final_state.t, &params)?;
        snapshots.push(last);
    }
    let diagnostics = dir.join(DIAGNOSTICS_FILE);
    write_csv(&diagnostics, CSV_HEADER, traj.records.iter().map(|r| r.csv_row()))?;

    let drift = drift_report(&traj.records);
    let mut manifest = Manifest::new("run", config);
    manifest.outputs = std::iter::once(diagnostics.clone()).chain(snapshots.iter().cloned()).collect();
    manifest.summary = json!({
        "steps": traj.steps,
        "final_t": traj.final_state.t,
        "windows": traj.final_state.window_index + 1,
        "drift": drift,
    });
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let manifest_path = dir.join(MANIFEST_FILE);
    manifest.write(&manifest_path)?;
    log::info!(
        "{} steps to t = {:.6}; mass drift {:.2e}, E0 drift {:.2e}, Lz drift {:.2e}",
        traj.steps,
        traj.final_state.t,
        drift.mass,
        drift.e0,
        drift.lz
    );
    Ok(RunSummary {
        steps: traj.steps,
        final_t: traj.final_state.t,
        diagnostics,
        snapshots,
        manifest: manifest_path,
    })
}
