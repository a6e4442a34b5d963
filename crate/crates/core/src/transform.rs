//! Feature-domain modifications: triangular moving-average smoothing of the
//! envelope, F0 zeroing, aperiodicity unitisation, and speed perturbation.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::audio::{resample, AudioClip};
use crate::error::{Error, Result};
use crate::vocoder::{SpectralEnvelopeTrack, VocoderFeatures};

#[derive(Debug, Clone, PartialEq)]
pub struct MafConfig {
    /// Full width of the triangular kernel in Hz.
    pub window_width_hz: f64,
}

impl Default for MafConfig {
    fn default() -> Self {
        Self { window_width_hz: 400.0 }
    }
}

impl MafConfig {
    /// Kernel half-width `W` in bins: the full width `2W + 1` is the odd bin
    /// count nearest to `window_width_hz / bin_width_hz`.
    pub fn half_width_bins(&self, bin_width_hz: f64) -> Result<usize> {
        let bins = self.window_width_hz / bin_width_hz;
        if !(bins >= 2.0) || !bins.is_finite() {
            return Err(Error::WindowTooNarrow);
        }
        Ok(((bins - 1.0) / 2.0).round().max(1.0) as usize)
    }
}

/// Unit-sum triangular kernel with weights `W + 1 - |j|` for `|j| <= W`.
pub fn triangular_kernel(half_width: usize) -> Vec<f64> {
    let w = half_width as i64;
    let raw: Vec<f64> = (-w..=w).map(|j| (w + 1 - j.abs()) as f64).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Convolves one power envelope with the kernel; near the band edges the
/// kernel is cut to the available bins and renormalised to unit sum.
pub fn smooth_frame(frame: &[f64], kernel: &[f64]) -> Vec<f64> {
    let half = (kernel.len() / 2) as i64;
    let n = frame.len() as i64;
    (0..n)
        .map(|i| {
            let lo = (i - half).max(0);
            let hi = (i + half).min(n - 1);
            let mut acc = 0.0;
            let mut weight = 0.0;
            for j in lo..=hi {
                let k = kernel[(j - i + half) as usize];
                acc += k * frame[j as usize];
                weight += k;
            }
            acc / weight
        })
        .collect()
}

/// Moving-average filtering of Sp along frequency, giving Sp_maf.
pub fn smooth_envelope_maf(sp: &SpectralEnvelopeTrack, cfg: &MafConfig) -> Result<SpectralEnvelopeTrack> {
    let kernel = triangular_kernel(cfg.half_width_bins(sp.bin_width_hz)?);
    Ok(SpectralEnvelopeTrack {
        frames: sp.frames.iter().map(|f| smooth_frame(f, &kernel)).collect(),
        fft_size: sp.fft_size,
        bin_width_hz: sp.bin_width_hz,
    })
}

/// Sets every F0 value to zero.
pub fn zero_f0(features: &VocoderFeatures) -> VocoderFeatures {
    let mut out = features.clone();
    out.f0.values.iter_mut().for_each(|f| *f = 0.0);
    out
}

/// Sets every aperiodicity value to one.
pub fn unit_aperiodicity(features: &VocoderFeatures) -> VocoderFeatures {
    let mut out = features.clone();
    out.ap.frames.iter_mut().flatten().for_each(|a| *a = 1.0);
    out
}

/// Resample-and-relabel speed change: duration scales by `1 / factor`, pitch
/// and formants by `factor`.
pub fn speed_perturb(clip: &AudioClip, factor: f64) -> Result<AudioClip> {
    if !(0.5..=2.0).contains(&factor) {
        return Err(Error::InvalidFactor(factor));
    }
    if factor == 1.0 {
        return Ok(clip.clone());
    }
    let rate = clip.sample_rate_hz;
    let stretched_rate = (f64::from(rate) / factor).round() as u32;
    let mut out = resample(clip, stretched_rate)?;
    out.sample_rate_hz = rate;
    Ok(out)
}
