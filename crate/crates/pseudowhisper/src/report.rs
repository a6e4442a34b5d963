//! Metric records for the `metrics` command.

use std::path::Path;

use pseudowhisper_core::metrics::report;
use pseudowhisper_core::vocoder::VocoderConfig;
use serde::Serialize;

use crate::error::Result;
use crate::wav::read_wav;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    pub path: String,
    pub mode: Option<String>,
    pub periodicity: f64,
    pub band_energy_ratio_db: f64,
    pub spectral_tilt_db_per_octave: f64,
    pub formant_width_hz: Option<f64>,
    pub lsd_db: Option<f64>,
}

/// Measures `path` at the pipeline rate, with the envelope distance to
/// `reference` when given.
pub fn measure(path: &Path, reference: Option<&Path>, mode: Option<&str>, cfg: &VocoderConfig) -> Result<MetricRecord> {
    let clip = read_wav(path)?.to_pipeline_rate()?;
    let reference = reference.map(|r| read_wav(r).and_then(|c| Ok(c.to_pipeline_rate()?))).transpose()?;
    let m = report(&clip, reference.as_ref(), cfg)?;
    Ok(MetricRecord {
        path: path.display().to_string(),
        mode: mode.map(str::to_owned),
        periodicity: m.periodicity,
        band_energy_ratio_db: m.band_energy_ratio_db,
        spectral_tilt_db_per_octave: m.spectral_tilt_db_per_octave,
        formant_width_hz: m.formant_width_hz,
        lsd_db: m.lsd_db,
    })
}
