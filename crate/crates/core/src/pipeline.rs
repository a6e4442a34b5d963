//! End-to-end conversions: full pseudo-whisper (PW), glottal cancellation
//! only (NG), formant widening only (WB), and an unmodified vocoder round trip.

use core::fmt;
use core::str::FromStr;

use crate::audio::{AudioClip, PIPELINE_RATE_HZ};
use crate::error::{Error, Result};
use crate::glottal::{cancel_glottis, GlottalConfig};
use crate::transform::{smooth_envelope_maf, unit_aperiodicity, zero_f0, MafConfig};
use crate::vocoder::{analyze, synthesize, VocoderConfig, VocoderFeatures};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Pw,
    Ng,
    Wb,
    Roundtrip,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Pw, Mode::Ng, Mode::Wb, Mode::Roundtrip];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Pw => "pw",
            Mode::Ng => "ng",
            Mode::Wb => "wb",
            Mode::Roundtrip => "roundtrip",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidConfig("mode must be one of pw, ng, wb, roundtrip"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub glottal: GlottalConfig,
    pub maf: MafConfig,
    pub vocoder: VocoderConfig,
    pub seed: u64,
    pub mode: Mode,
    /// When set, NG keeps the analysed F0 and aperiodicity instead of zeroing them.
    pub ng_keeps_f0: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            glottal: GlottalConfig::for_rate(PIPELINE_RATE_HZ),
            maf: MafConfig::default(),
            vocoder: VocoderConfig::default(),
            seed: 0,
            mode: Mode::Pw,
            ng_keeps_f0: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.glottal.validate()?;
        self.vocoder.validate()?;
        if !(self.maf.window_width_hz > 0.0) {
            return Err(Error::InvalidConfig("MAF width must be positive"));
        }
        Ok(())
    }
}

/// Intermediate products of one conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionTrace {
    /// Input at the pipeline rate.
    pub input: AudioClip,
    /// Glottal-cancelled signal, for modes that cancel the glottis.
    pub cancelled: Option<AudioClip>,
    /// Features as analysed.
    pub analyzed: VocoderFeatures,
    /// Features after the mode's modifications, as passed to synthesis.
    pub modified: VocoderFeatures,
    pub output: AudioClip,
}

/// Runs `mode` on `clip` and keeps every intermediate stage.
pub fn convert_traced(clip: &AudioClip, mode: Mode, cfg: &PipelineConfig) -> Result<ConversionTrace> {
    cfg.validate()?;
    let input = clip.to_pipeline_rate()?;
    let cancelled = match mode {
        Mode::Pw | Mode::Ng => {
            let grid = cfg.vocoder.grid(input.sample_rate_hz, input.len())?;
            Some(cancel_glottis(&input, &cfg.glottal, &grid)?)
        }
        Mode::Wb | Mode::Roundtrip => None,
    };
    let analyzed = analyze(cancelled.as_ref().unwrap_or(&input), &cfg.vocoder)?;
    let modified = match mode {
        Mode::Pw => widen(&remove_source(&analyzed, false), &cfg.maf)?,
        Mode::Ng => remove_source(&analyzed, cfg.ng_keeps_f0),
        Mode::Wb => widen(&analyzed, &cfg.maf)?,
        Mode::Roundtrip => analyzed.clone(),
    };
    let mut output = synthesize(&modified, &cfg.vocoder, cfg.seed)?;
    output.samples.truncate(input.len());
    Ok(ConversionTrace { input, cancelled, analyzed, modified, output })
}

fn remove_source(features: &VocoderFeatures, keep: bool) -> VocoderFeatures {
    if keep {
        features.clone()
    } else {
        unit_aperiodicity(&zero_f0(features))
    }
}

fn widen(features: &VocoderFeatures, maf: &MafConfig) -> Result<VocoderFeatures> {
    let mut out = features.clone();
    out.sp = smooth_envelope_maf(&features.sp, maf)?;
    Ok(out)
}

/// Converts with `mode`, returning audio at the pipeline rate.
pub fn convert(clip: &AudioClip, mode: Mode, cfg: &PipelineConfig) -> Result<AudioClip> {
    convert_traced(clip, mode, cfg).map(|t| t.output)
}

/// Full pseudo-whisper conversion.
pub fn convert_pw(clip: &AudioClip, cfg: &PipelineConfig) -> Result<AudioClip> {
    convert(clip, Mode::Pw, cfg)
}

/// Glottal cancellation with pitch and periodicity removed, no widening.
pub fn convert_ng(clip: &AudioClip, cfg: &PipelineConfig) -> Result<AudioClip> {
    convert(clip, Mode::Ng, cfg)
}

/// Formant widening with the original F0 and aperiodicity.
pub fn convert_wb(clip: &AudioClip, cfg: &PipelineConfig) -> Result<AudioClip> {
    convert(clip, Mode::Wb, cfg)
}

/// Analysis followed by synthesis without modification.
pub fn roundtrip(clip: &AudioClip, cfg: &PipelineConfig) -> Result<AudioClip> {
    convert(clip, Mode::Roundtrip, cfg)
}
