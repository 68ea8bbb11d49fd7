//! Experiment runner behind the `objectivity` binary: JSON configuration
//! with flag overrides, a CSV per sweep and a JSON metadata sidecar.

pub mod args;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use serde_json::{json, Value};

pub use config::{ExperimentConfig, ExperimentKind, Resolved};
pub use error::CliError;

pub const VERSION: &str = env!("OBJECTIVITY_VERSION");

/// Environment variable that sets the number of sweep workers.
pub const WORKERS_ENV: &str = "OBJECTIVITY_WORKERS";

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
    pub rows: usize,
    pub summary: Value,
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV}={v} is not a worker count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}

/// Evaluates the experiment, then writes the CSV and its sidecar. A check
/// that finds a violation still writes both files before returning the
/// error.
pub fn run(r: &Resolved) -> Result<RunOutput, CliError> {
    let pool = worker_pool()?;
    log::info!("running {} with {} workers", r.kind.name(), pool.current_num_threads());
    let eval = pool.install(|| experiments::evaluate(r))?;
    let csv = r.output().to_path_buf();
    let sidecar = output::sidecar_path(&csv);
    output::emit_csv(&eval.table, &csv)?;
    let meta = json!({
        "experiment": r.kind.name(),
        "version": VERSION,
        "config": serde_json::to_value(&r.config)?,
        "derived": experiments::derived_constants(r),
        "csv": csv.file_name().map(|n| n.to_string_lossy().into_owned()),
        "columns": eval.table.columns,
        "rows": eval.table.rows.len(),
        "summary": eval.summary,
    });
    output::emit_json(&meta, &sidecar)?;
    if let Some(v) = eval.violation {
        return Err(CliError::Regime(v));
    }
    Ok(RunOutput {
        csv,
        sidecar,
        rows: eval.table.rows.len(),
        summary: meta["summary"].clone(),
    })
}
