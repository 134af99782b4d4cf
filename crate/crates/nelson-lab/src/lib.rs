//! Experiment runner for `nelson-core`: TOML configuration, a rayon executor,
//! CSV output with a JSON manifest, plotting scripts and manifest replay.

pub mod config;
pub mod dump;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod plots;

use std::fs;
use std::path::Path;

use config::LabConfig;
use error::{LabError, Result};
use exec::RayonExecutor;
use experiments::{run_experiment, Context, Experiment};
use manifest::{unix_now, OutputRecord, RunManifest};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run one experiment and write its CSVs, plot script and manifest to `out`.
///
/// `seed` overrides the config's seed. Checks that fail are recorded in the
/// manifest; the caller decides whether they are fatal.
pub fn run(which: Experiment, config_toml: &str, out: &Path, seed: Option<u64>, threads: usize) -> Result<RunManifest> {
    let config = LabConfig::parse(config_toml)?;
    let seed = seed.unwrap_or(config.seed);
    let exec = RayonExecutor::new(threads);
    let started = unix_now();
    let result = run_experiment(which, &Context { config: &config, seed, exec: &exec })?;
    fs::create_dir_all(out).map_err(|e| LabError::io(out, e))?;
    let mut outputs = Vec::new();
    for t in &result.tables {
        let sha256 = t.write(out)?;
        outputs.push(OutputRecord { file: t.file.clone(), rows: t.rows.len(), sha256 });
    }
    let plot = out.join(plots::PLOT_FILE);
    fs::write(&plot, plots::script(which)).map_err(|e| LabError::io(&plot, e))?;
    let manifest = RunManifest {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        command: which.name().to_string(),
        seed,
        rng_algorithm: nelson_core::rng::ALGORITHM_ID.to_string(),
        threads: exec.threads(),
        started_unix: started,
        finished_unix: unix_now(),
        config_toml: config_toml.to_string(),
        config: serde_json::to_value(&config)?,
        outputs,
        checks: result.checks,
    };
    manifest.write(out)?;
    Ok(manifest)
}

/// Outcome of re-running a manifest.
#[derive(Clone, Debug)]
pub struct Replay {
    pub original: RunManifest,
    pub rerun: RunManifest,
    /// Files whose hash differs, or that one run has and the other lacks.
    pub mismatched: Vec<String>,
}

impl Replay {
    pub fn identical(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Re-run the experiment recorded in `manifest_path` into `out` and compare
/// every output hash.
pub fn replay(manifest_path: &Path, out: &Path, threads: usize) -> Result<Replay> {
    let original = RunManifest::read(manifest_path)?;
    let which = Experiment::from_name(&original.command)
        .ok_or_else(|| LabError::Config(format!("unknown command {} in manifest", original.command)))?;
    let rerun = run(which, &original.config_toml, out, Some(original.seed), threads)?;
    let mut mismatched = Vec::new();
    for o in &original.outputs {
        match rerun.outputs.iter().find(|r| r.file == o.file) {
            Some(r) if r.sha256 == o.sha256 => {}
            _ => mismatched.push(o.file.clone()),
        }
    }
    for r in &rerun.outputs {
        if !original.outputs.iter().any(|o| o.file == r.file) {
            mismatched.push(r.file.clone());
        }
    }
    Ok(Replay { original, rerun, mismatched })
}
