//! Parallel batch conversion with per-file seeding.

use std::path::Path;
use std::time::Instant;

use pseudowhisper_core::pipeline::{convert, Mode, PipelineConfig};
use pseudowhisper_core::rng::fnv1a64;
use pseudowhisper_core::transform::speed_perturb;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::manifest::ManifestEntry;
use crate::wav::{read_wav, write_wav};

/// One line of the conversion report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub input: String,
    pub output: String,
    pub mode: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    /// Scale applied on write to keep the peak below full scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_scale: Option<f64>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// 64-bit FNV-1a of the file name (not the directory) of `path`.
pub fn file_name_hash(path: &Path) -> u64 {
    let name = path.file_name().map_or_else(|| path.as_os_str(), |n| n);
    fnv1a64(name.as_encoded_bytes())
}

pub fn seed_for(global: u64, input: &Path) -> u64 {
    global ^ file_name_hash(input)
}

fn run(entry: &ManifestEntry, mode: Mode, seed: u64, cfg: &PipelineConfig) -> Result<f64> {
    let mut clip = read_wav(&entry.input)?.to_pipeline_rate()?;
    if let Some(factor) = entry.speed {
        clip = speed_perturb(&clip, factor)?;
    }
    let cfg = PipelineConfig { seed, mode, ..cfg.clone() };
    let out = convert(&clip, mode, &cfg)?;
    if let Some(parent) = entry.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_wav(&entry.output, &out)
}

/// Converts one entry. Failures are recorded in the row, not returned.
pub fn process_entry(entry: &ManifestEntry, cfg: &PipelineConfig) -> ReportRow {
    let started = Instant::now();
    let mode = entry.mode.unwrap_or(cfg.mode);
    let seed = seed_for(cfg.seed, &entry.input);
    let result = run(entry, mode, seed, cfg);
    if let Err(e) = &result {
        log::error!("{}: {e}", entry.input.display());
    }
    ReportRow {
        input: entry.input.display().to_string(),
        output: entry.output.display().to_string(),
        mode: mode.to_string(),
        seed,
        speed: entry.speed,
        peak_scale: result.as_ref().ok().copied(),
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        error: result.err().map(|e| e.to_string()),
    }
}

/// Converts all entries on `jobs` workers (0 = one per CPU). Rows come back
/// in manifest order.
pub fn run_batch(entries: &[ManifestEntry], cfg: &PipelineConfig, jobs: usize) -> Vec<ReportRow> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build();
    match pool {
        Ok(pool) => pool.install(|| entries.par_iter().map(|e| process_entry(e, cfg)).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}), converting sequentially");
            entries.iter().map(|e| process_entry(e, cfg)).collect()
        }
    }
}
