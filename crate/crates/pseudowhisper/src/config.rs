//! Plain-text `key = value` pipeline configuration.
//!
//! Every field of [`PipelineConfig`] has a key; unknown keys are errors and
//! `#` starts a comment.

use std::path::Path;
use std::str::FromStr;

use pseudowhisper_core::pipeline::PipelineConfig;

use crate::error::{Error, Result};

/// Environment variable consulted when no config path is given.
pub const CONFIG_ENV: &str = "PSEUDOWHISPER_CONFIG";

pub const KEYS: &[&str] = &[
    "mode",
    "seed",
    "ng_keeps_f0",
    "maf_width_hz",
    "frame_length",
    "hop",
    "fft_size",
    "f0_min",
    "f0_max",
    "voicing_threshold",
    "cepstral_period_fraction",
    "unvoiced_cutoff",
    "vocal_tract_order",
    "glottal_order",
    "highpass_cutoff_hz",
    "highpass_taps",
    "lip_leak",
    "preframe_ms",
];

fn parse<T: FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config { line, message: format!("bad value {value:?} for {key}") })
}

/// Sets one field by key.
pub fn apply(cfg: &mut PipelineConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let v = value;
    match key {
        "mode" => cfg.mode = parse(v, line, key)?,
        "seed" => cfg.seed = parse(v, line, key)?,
        "ng_keeps_f0" => cfg.ng_keeps_f0 = parse(v, line, key)?,
        "maf_width_hz" => cfg.maf.window_width_hz = parse(v, line, key)?,
        "frame_length" => cfg.vocoder.frame_length = parse(v, line, key)?,
        "hop" => cfg.vocoder.hop = parse(v, line, key)?,
        "fft_size" => cfg.vocoder.fft_size = parse(v, line, key)?,
        "f0_min" => cfg.vocoder.f0_min = parse(v, line, key)?,
        "f0_max" => cfg.vocoder.f0_max = parse(v, line, key)?,
        "voicing_threshold" => cfg.vocoder.voicing_threshold = parse(v, line, key)?,
        "cepstral_period_fraction" => cfg.vocoder.cepstral_period_fraction = parse(v, line, key)?,
        "unvoiced_cutoff" => cfg.vocoder.unvoiced_cutoff = parse(v, line, key)?,
        "vocal_tract_order" => cfg.glottal.vocal_tract_order = parse(v, line, key)?,
        "glottal_order" => cfg.glottal.glottal_order = parse(v, line, key)?,
        "highpass_cutoff_hz" => cfg.glottal.highpass_cutoff_hz = parse(v, line, key)?,
        "highpass_taps" => cfg.glottal.highpass_taps = parse(v, line, key)?,
        "lip_leak" => cfg.glottal.lip_leak = parse(v, line, key)?,
        "preframe_ms" => cfg.glottal.preframe_ms = parse(v, line, key)?,
        _ => return Err(Error::Config { line, message: format!("unknown key {key:?}") }),
    }
    Ok(())
}

/// Applies the settings in `text` on top of `base`.
pub fn parse_config(text: &str, base: PipelineConfig) -> Result<PipelineConfig> {
    let mut cfg = base;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Config { line, message: "expected `key = value`".into() })?;
        apply(&mut cfg, key.trim(), value.trim(), line)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<PipelineConfig> {
    parse_config(&std::fs::read_to_string(path)?, PipelineConfig::default())
}

/// Renders a config in the file format, one key per line.
pub fn render_config(cfg: &PipelineConfig) -> String {
    let g = &cfg.glottal;
    let v = &cfg.vocoder;
    let values: [String; 18] = [
        cfg.mode.to_string(),
        cfg.seed.to_string(),
        cfg.ng_keeps_f0.to_string(),
        cfg.maf.window_width_hz.to_string(),
        v.frame_length.to_string(),
        v.hop.to_string(),
        v.fft_size.to_string(),
        v.f0_min.to_string(),
        v.f0_max.to_string(),
        v.voicing_threshold.to_string(),
        v.cepstral_period_fraction.to_string(),
        v.unvoiced_cutoff.to_string(),
        g.vocal_tract_order.to_string(),
        g.glottal_order.to_string(),
        g.highpass_cutoff_hz.to_string(),
        g.highpass_taps.to_string(),
        g.lip_leak.to_string(),
        g.preframe_ms.to_string(),
    ];
    KEYS.iter().zip(values).map(|(k, v)| format!("{k} = {v}\n")).collect()
}
