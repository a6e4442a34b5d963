//! GFM-IAIF source-filter decomposition and glottal cancellation.
//!
//! The glottal contribution is constrained to a third-order all-pole model
//! `1 / ((1 - a z^-1)(1 - a* z^-1)(1 - b z^-1))`. Cancellation inverse-filters
//! speech by that cubic, keeping vocal tract and lip radiation.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::audio::{rms, AudioClip};
use crate::error::{Error, Result};
use crate::filter::{fir_filter, highpass, leaky_integrate};
use crate::frame::{hann, overlap_add, segment, FrameGrid, OlaNorm};
use crate::lpc::{autocorrelation, levinson_durbin, poly_mul, LpcModel};

/// Order of the glottal flow model.
pub const GLOTTAL_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GlottalConfig {
    pub vocal_tract_order: usize,
    pub glottal_order: usize,
    pub highpass_cutoff_hz: f64,
    pub highpass_taps: usize,
    pub lip_leak: f64,
    pub preframe_ms: f64,
}

impl GlottalConfig {
    /// Defaults for a sample rate: vocal tract order = rate in kHz + 2.
    pub fn for_rate(sample_rate_hz: u32) -> Self {
        Self {
            vocal_tract_order: (sample_rate_hz / 1000) as usize + 2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vocal_tract_order < 8 {
            return Err(Error::InvalidConfig("vocal tract order must be at least 8"));
        }
        if self.glottal_order != GLOTTAL_ORDER {
            return Err(Error::InvalidConfig("glottal model order must be 3"));
        }
        if !(self.lip_leak > 0.0 && self.lip_leak < 1.0) {
            return Err(Error::InvalidConfig("lip leak must lie in (0, 1)"));
        }
        if !(self.highpass_cutoff_hz >= 0.0) || !(self.preframe_ms >= 0.0) {
            return Err(Error::InvalidConfig("high-pass cutoff and preframe must be nonnegative"));
        }
        Ok(())
    }

    pub fn preframe_samples(&self, sample_rate_hz: u32) -> usize {
        (self.preframe_ms * f64::from(sample_rate_hz) / 1000.0).round() as usize
    }
}

impl Default for GlottalConfig {
    fn default() -> Self {
        Self {
            vocal_tract_order: 18,
            glottal_order: GLOTTAL_ORDER,
            highpass_cutoff_hz: 70.0,
            highpass_taps: 1024,
            lip_leak: 0.99,
            preframe_ms: 10.0,
        }
    }
}

/// Per-frame result of GFM-IAIF.
#[derive(Debug, Clone, PartialEq)]
pub struct GlottalDecomposition {
    pub glottal_model: LpcModel,
    pub vocal_tract_model: LpcModel,
    pub lip_leak: f64,
    /// Glottal flow estimate over the frame (context excluded).
    pub glottal_flow: Vec<f64>,
}

/// Hann-windowed LP fit on the frame part of a context-extended signal.
fn fit(signal: &[f64], context: usize, window: &[f64], order: usize) -> Result<LpcModel> {
    let windowed: Vec<f64> = signal[context..].iter().zip(window).map(|(x, w)| x * w).collect();
    levinson_durbin(&autocorrelation(&windowed, order), order)
}

/// GFM-IAIF on one frame.
///
/// `segment` holds `context` samples of preceding signal followed by the frame;
/// it should already be high-passed. Filters run over the whole segment so that
/// their start-up transient falls inside the context.
pub fn gfm_iaif(segment: &[f64], context: usize, cfg: &GlottalConfig) -> Result<GlottalDecomposition> {
    cfg.validate()?;
    let len = segment.len().saturating_sub(context);
    let min = 4 * cfg.vocal_tract_order;
    if len < min {
        return Err(Error::FrameTooShort { len, min });
    }
    let window = hann(len);
    let nv = cfg.vocal_tract_order;
    let d = cfg.lip_leak;

    // lip radiation is cancelled once up front; every fit below sees the
    // integrated signal (filtering commutes, so this equals integrating after
    // each inverse filter)
    let integrated = leaky_integrate(segment, d);

    // (1) gross glottis: cascade of first-order fits
    let mut gross_glottis = alloc::vec![1.0];
    for _ in 0..cfg.glottal_order {
        let residual = fir_filter(&integrated, &gross_glottis, None);
        let stage = fit(&residual, context, &window, 1)?;
        gross_glottis = poly_mul(&gross_glottis, stage.coefficients());
    }

    // (2) gross vocal tract
    let gross_tract = fit(&fir_filter(&integrated, &gross_glottis, None), context, &window, nv)?;

    // (3) provisional glottal flow, (4) final glottal model
    let flow1 = fir_filter(&integrated, gross_tract.coefficients(), None);
    let glottal_model = fit(&flow1, context, &window, cfg.glottal_order)?;

    // (5) final vocal tract
    let deglottalised = fir_filter(&integrated, glottal_model.coefficients(), None);
    let vocal_tract_model = fit(&deglottalised, context, &window, nv)?;

    // (6) glottal flow
    let flow = fir_filter(&integrated, vocal_tract_model.coefficients(), None);

    Ok(GlottalDecomposition {
        glottal_model,
        vocal_tract_model,
        lip_leak: d,
        glottal_flow: flow[context..].to_vec(),
    })
}

/// One frame of glottal cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct CancelledFrame {
    /// Inverse-filtered frame rescaled to the input RMS, not yet windowed.
    pub samples: Vec<f64>,
    pub glottal_model: LpcModel,
    /// Whether GFM-IAIF failed and the fallback model was used.
    pub fell_back: bool,
}

/// Cancels the glottis on one context-extended segment.
///
/// `target_rms` is the RMS the output is scaled to. On analysis failure the
/// `fallback` model is used instead.
pub fn cancel_segment(
    segment: &[f64],
    context: usize,
    target_rms: f64,
    cfg: &GlottalConfig,
    fallback: &LpcModel,
) -> CancelledFrame {
    let (glottal_model, fell_back) = match gfm_iaif(segment, context, cfg) {
        Ok(dec) => (dec.glottal_model, false),
        Err(_) => (fallback.clone(), true),
    };
    let filtered = fir_filter(segment, glottal_model.coefficients(), None);
    let mut samples = filtered[context..].to_vec();
    let current = rms(&samples);
    let scale = if current > 0.0 { target_rms / current } else { 0.0 };
    for v in samples.iter_mut() {
        *v *= scale;
    }
    CancelledFrame { samples, glottal_model, fell_back }
}

/// Glottal cancellation with the per-frame glottal models returned alongside.
pub fn cancel_glottis_traced(
    clip: &AudioClip,
    cfg: &GlottalConfig,
    grid: &FrameGrid,
) -> Result<(AudioClip, Vec<LpcModel>)> {
    if clip.is_empty() {
        return Err(Error::EmptyAudio);
    }
    cfg.validate()?;
    let grid = grid.with_signal_len(clip.len());
    let rate = f64::from(clip.sample_rate_hz);
    let filtered = highpass(&clip.samples, cfg.highpass_cutoff_hz, rate, cfg.highpass_taps);
    let context = cfg.preframe_samples(clip.sample_rate_hz);
    let window = grid.window();
    let mut fallback = LpcModel::identity(GLOTTAL_ORDER);
    let mut frames = Vec::with_capacity(grid.num_frames);
    let mut models = Vec::with_capacity(grid.num_frames);
    for k in 0..grid.num_frames {
        let start = grid.frame_start(k);
        let seg = segment(&filtered, start - context as i64, context + grid.frame_length);
        let target = rms(&segment(&clip.samples, start, grid.frame_length));
        let out = cancel_segment(&seg, context, target, cfg, &fallback);
        fallback = out.glottal_model.clone();
        frames.push(out.samples.iter().zip(&window).map(|(a, b)| a * b).collect());
        models.push(out.glottal_model);
    }
    let samples = overlap_add(&frames, &grid, clip.len(), OlaNorm::Window)?;
    Ok((AudioClip::new(samples, clip.sample_rate_hz)?, models))
}

/// Speech with the glottal contribution removed by inverse filtering.
pub fn cancel_glottis(clip: &AudioClip, cfg: &GlottalConfig, grid: &FrameGrid) -> Result<AudioClip> {
    cancel_glottis_traced(clip, cfg, grid).map(|(clip, _)| clip)
}
