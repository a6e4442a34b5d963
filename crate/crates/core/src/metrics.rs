//! Acoustic measurements quantifying how far a clip has moved toward whisper:
//! periodicity, low/high band balance, spectral tilt, formant bandwidth and
//! envelope distance.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::frame::{FrameGrid, DEFAULT_FFT_SIZE};
use crate::pitch::NccfAnalyzer;
use crate::spectral::{stft, FrameSpectrum};
use crate::vocoder::{estimate_envelope, estimate_f0, SpectralEnvelopeTrack, VocoderConfig};

/// Low band of the band-energy ratio, Hz.
pub const LOW_BAND: (f64, f64) = (0.0, 1000.0);
/// High band of the band-energy ratio, Hz.
pub const HIGH_BAND: (f64, f64) = (2000.0, 6000.0);
/// Band over which envelope distance is averaged, Hz.
pub const LSD_BAND: (f64, f64) = (1000.0, 6000.0);
/// Band searched for the formant width measurement, Hz.
pub const FORMANT_SEARCH: (f64, f64) = (200.0, 1500.0);

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub periodicity: f64,
    pub band_energy_ratio_db: f64,
    pub spectral_tilt_db_per_octave: f64,
    pub formant_width_hz: Option<f64>,
    pub lsd_db: Option<f64>,
}

/// Correlation span of the periodicity measurement, in samples at 16 kHz.
pub const PERIODICITY_WINDOW: usize = 1024;
/// Residual bandwidth of the periodicity measurement as a fraction of the rate.
pub const PERIODICITY_RESIDUAL_CUTOFF: f64 = 0.25;

/// Median over frames of the largest NCCF value in the 60-400 Hz lag range,
/// computed on the band-limited LP residual. Frames without energy score zero.
pub fn periodicity(clip: &AudioClip) -> Result<f64> {
    let grid = FrameGrid::standard(clip.sample_rate_hz, clip.len())?;
    if clip.len() < 3 * grid.hop || grid.num_frames < 3 {
        return Err(Error::TooShort(3));
    }
    let span = PERIODICITY_WINDOW * clip.sample_rate_hz as usize / 16_000;
    let mut analyzer = NccfAnalyzer::new(clip.sample_rate_hz, 60.0, 400.0, span);
    analyzer.residual_cutoff = PERIODICITY_RESIDUAL_CUTOFF;
    let mut values: Vec<f64> = analyzer
        .analyze_grid(&clip.samples, &grid)
        .iter()
        .map(|c| c.max_strength)
        .collect();
    Ok(median(&mut values))
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Power spectrum averaged over all STFT frames.
pub fn average_power_spectrum(clip: &AudioClip) -> Result<FrameSpectrum> {
    if clip.is_empty() {
        return Err(Error::EmptyAudio);
    }
    let grid = FrameGrid::standard(clip.sample_rate_hz, clip.len())?;
    let spec = stft(clip, &grid, DEFAULT_FFT_SIZE)?;
    let bins = DEFAULT_FFT_SIZE / 2 + 1;
    let mut avg = alloc::vec![0.0; bins];
    for frame in &spec.frames {
        for (a, m) in avg.iter_mut().zip(&frame.magnitudes) {
            *a += m * m;
        }
    }
    let n = spec.frames.len() as f64;
    avg.iter_mut().for_each(|a| *a /= n);
    FrameSpectrum::new(avg, DEFAULT_FFT_SIZE, f64::from(clip.sample_rate_hz))
}

fn band_sum(power: &FrameSpectrum, band: (f64, f64)) -> f64 {
    power
        .magnitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let f = power.freq_of(*i);
            f >= band.0 && f < band.1
        })
        .map(|(_, p)| p)
        .sum()
}

/// `10 log10(E_high / E_low)` from the average power spectrum.
pub fn band_energy_ratio(clip: &AudioClip, low: (f64, f64), high: (f64, f64)) -> Result<f64> {
    let power = average_power_spectrum(clip)?;
    let (el, eh) = (band_sum(&power, low), band_sum(&power, high));
    if !(el > 0.0) || !(eh > 0.0) {
        return Err(Error::SilentClip);
    }
    Ok(10.0 * (eh / el).log10())
}

/// Least-squares slope of the average power spectrum in dB per octave over 100 Hz - 6 kHz.
pub fn spectral_tilt(clip: &AudioClip) -> Result<f64> {
    let power = average_power_spectrum(clip)?;
    let points: Vec<(f64, f64)> = power
        .magnitudes
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| {
            let f = power.freq_of(i);
            ((100.0..=6000.0).contains(&f) && p > 0.0).then(|| (f.log2(), 10.0 * p.log10()))
        })
        .collect();
    if points.len() < 2 {
        return Err(Error::SilentClip);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Mean over frames of the RMS dB difference across bins in 1-6 kHz.
pub fn log_spectral_distance(a: &SpectralEnvelopeTrack, b: &SpectralEnvelopeTrack) -> Result<f64> {
    if a.frames.len() != b.frames.len() || a.fft_size != b.fft_size {
        return Err(Error::GridMismatch("envelope tracks differ in shape"));
    }
    if a.frames.is_empty() {
        return Err(Error::GridMismatch("envelope tracks are empty"));
    }
    let lo = (LSD_BAND.0 / a.bin_width_hz).ceil() as usize;
    let hi = ((LSD_BAND.1 / a.bin_width_hz).floor() as usize).min(a.fft_size / 2);
    let total: f64 = a
        .frames
        .iter()
        .zip(&b.frames)
        .map(|(fa, fb)| {
            let sq: f64 = (lo..=hi)
                .map(|i| {
                    let d = 10.0 * (fa[i] / fb[i]).log10();
                    d * d
                })
                .sum();
            (sq / (hi - lo + 1) as f64).sqrt()
        })
        .sum();
    Ok(total / a.frames.len() as f64)
}

/// Envelope distance between two clips analysed on the vocoder grid.
///
/// Clips must be at the same rate; lengths may differ by less than one hop, in
/// which case the shared frames are compared.
pub fn clip_log_spectral_distance(a: &AudioClip, b: &AudioClip, cfg: &VocoderConfig) -> Result<f64> {
    if a.sample_rate_hz != b.sample_rate_hz {
        return Err(Error::GridMismatch("clips differ in sample rate"));
    }
    let diff = a.len().abs_diff(b.len());
    if diff >= cfg.hop {
        return Err(Error::GridMismatch("clip lengths differ by a hop or more"));
    }
    let len = a.len().min(b.len());
    let trim = |c: &AudioClip| AudioClip { samples: c.samples[..len].to_vec(), sample_rate_hz: c.sample_rate_hz };
    let (a, b) = (trim(a), trim(b));
    let ea = estimate_envelope(&a, &estimate_f0(&a, cfg)?, cfg)?;
    let eb = estimate_envelope(&b, &estimate_f0(&b, cfg)?, cfg)?;
    log_spectral_distance(&ea, &eb)
}

/// Half-power (-3 dB) width in Hz of the largest peak of a power spectrum
/// inside `search`, with linear interpolation of the crossings.
pub fn formant_width(power: &[f64], bin_width_hz: f64, search: (f64, f64)) -> Result<f64> {
    let n = power.len();
    let lo = ((search.0 / bin_width_hz).ceil() as usize).max(1);
    let hi = ((search.1 / bin_width_hz).floor() as usize).min(n.saturating_sub(2));
    let peak = (lo..=hi)
        .filter(|&i| power[i] > power[i - 1] && power[i] >= power[i + 1])
        .max_by(|&a, &b| power[a].partial_cmp(&power[b]).unwrap_or(core::cmp::Ordering::Equal))
        .ok_or(Error::NoPeakFound)?;
    let half = power[peak] / 2.0;
    let mut left = 0.0;
    let mut i = peak;
    while i > 0 && power[i - 1] > half {
        i -= 1;
    }
    if i > 0 {
        left = (i - 1) as f64 + (half - power[i - 1]) / (power[i] - power[i - 1]);
    }
    let mut right = (n - 1) as f64;
    let mut j = peak;
    while j + 1 < n && power[j + 1] > half {
        j += 1;
    }
    if j + 1 < n {
        right = j as f64 + (power[j] - half) / (power[j] - power[j + 1]);
    }
    Ok((right - left) * bin_width_hz)
}

/// Formant width of a magnitude spectrum (converted to power first).
pub fn formant_width_of(spectrum: &FrameSpectrum, search: (f64, f64)) -> Result<f64> {
    let power: Vec<f64> = spectrum.magnitudes.iter().map(|m| m * m).collect();
    formant_width(&power, spectrum.bin_width_hz, search)
}

/// Frame-averaged envelope of a clip, for single-peak measurements.
pub fn mean_envelope(clip: &AudioClip, cfg: &VocoderConfig) -> Result<Vec<f64>> {
    let sp = estimate_envelope(clip, &estimate_f0(clip, cfg)?, cfg)?;
    Ok(mean_frames(&sp.frames))
}

pub(crate) fn mean_frames(frames: &[Vec<f64>]) -> Vec<f64> {
    let bins = frames.first().map_or(0, |f| f.len());
    let mut avg = alloc::vec![0.0; bins];
    for f in frames {
        for (a, v) in avg.iter_mut().zip(f) {
            *a += v;
        }
    }
    let n = frames.len().max(1) as f64;
    avg.iter_mut().for_each(|a| *a /= n);
    avg
}

/// Full report for one clip; `reference` adds the envelope distance to it.
pub fn report(clip: &AudioClip, reference: Option<&AudioClip>, cfg: &VocoderConfig) -> Result<MetricReport> {
    let envelope = mean_envelope(clip, cfg)?;
    let bin_width = f64::from(clip.sample_rate_hz) / cfg.fft_size as f64;
    Ok(MetricReport {
        periodicity: periodicity(clip)?,
        band_energy_ratio_db: band_energy_ratio(clip, LOW_BAND, HIGH_BAND)?,
        spectral_tilt_db_per_octave: spectral_tilt(clip)?,
        formant_width_hz: formant_width(&envelope, bin_width, FORMANT_SEARCH).ok(),
        lsd_db: reference.map(|r| clip_log_spectral_distance(r, clip, cfg)).transpose()?,
    })
}
