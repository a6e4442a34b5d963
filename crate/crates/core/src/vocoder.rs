//! Pulse/noise vocoder: F0, spectral envelope (Sp) and aperiodicity (Ap)
//! analysis, and minimum-phase overlap-add synthesis.
//!
//! Sp is a power spectral density normalised per sample, so unit-variance
//! white noise analyses to Sp = 1 and synthesis filters by `sqrt(Sp)`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::frame::{frame_signal, hann, overlap_add, FrameGrid, OlaNorm};
use crate::pitch::{NccfAnalyzer, PitchCandidate};
use crate::rng::SplitMix64;
use crate::spectral::minimum_phase_with;

/// Power floor used when a frame carries no energy at all.
pub const ABSOLUTE_POWER_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VocoderConfig {
    pub frame_length: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub f0_min: f64,
    pub f0_max: f64,
    pub voicing_threshold: f64,
    /// Lifter cutoff is this fraction of the pitch period on voiced frames.
    pub cepstral_period_fraction: f64,
    /// Lifter cutoff in samples on unvoiced frames.
    pub unvoiced_cutoff: f64,
}

impl Default for VocoderConfig {
    fn default() -> Self {
        Self {
            frame_length: crate::frame::DEFAULT_FRAME_LENGTH,
            hop: crate::frame::DEFAULT_HOP,
            fft_size: crate::frame::DEFAULT_FFT_SIZE,
            f0_min: 60.0,
            f0_max: 400.0,
            voicing_threshold: 0.35,
            cepstral_period_fraction: 0.7,
            unvoiced_cutoff: 80.0,
        }
    }
}

impl VocoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f0_min > 0.0 && self.f0_max > self.f0_min) {
            return Err(Error::InvalidConfig("F0 range must satisfy 0 < f0_min < f0_max"));
        }
        if !(0.0..=1.0).contains(&self.voicing_threshold) {
            return Err(Error::InvalidConfig("voicing threshold must lie in [0, 1]"));
        }
        if self.fft_size < self.frame_length || !self.fft_size.is_power_of_two() {
            return Err(Error::InvalidConfig("fft size must be a power of two no shorter than the frame"));
        }
        if !(self.cepstral_period_fraction > 0.0 && self.unvoiced_cutoff >= 1.0) {
            return Err(Error::InvalidConfig("cepstral cutoffs must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self, sample_rate_hz: u32, signal_len: usize) -> Result<FrameGrid> {
        FrameGrid::new(self.frame_length, self.hop, sample_rate_hz, signal_len)
    }

    fn pitch_analyzer(&self, sample_rate_hz: u32) -> NccfAnalyzer {
        NccfAnalyzer::new(sample_rate_hz, self.f0_min, self.f0_max, self.frame_length)
    }
}

/// F0 per frame in Hz; zero marks an unvoiced frame.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Contour {
    pub values: Vec<f64>,
}

impl F0Contour {
    pub fn voiced_fraction(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|&&f| f > 0.0).count() as f64 / self.values.len() as f64
    }
}

/// Power envelope per frame over `fft_size/2 + 1` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEnvelopeTrack {
    pub frames: Vec<Vec<f64>>,
    pub fft_size: usize,
    pub bin_width_hz: f64,
}

impl SpectralEnvelopeTrack {
    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }
}

/// Aperiodicity per frame and bin, in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AperiodicityTrack {
    pub frames: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VocoderFeatures {
    pub f0: F0Contour,
    pub sp: SpectralEnvelopeTrack,
    pub ap: AperiodicityTrack,
    pub grid: FrameGrid,
}

impl VocoderFeatures {
    pub fn num_frames(&self) -> usize {
        self.f0.values.len()
    }

    /// Checks that the three tracks agree with each other and the grid.
    pub fn validate(&self) -> Result<()> {
        let n = self.grid.num_frames;
        if self.f0.values.len() != n || self.sp.frames.len() != n || self.ap.frames.len() != n {
            return Err(Error::GridMismatch("feature tracks disagree on frame count"));
        }
        let bins = self.sp.num_bins();
        if self.sp.frames.iter().chain(&self.ap.frames).any(|f| f.len() != bins) {
            return Err(Error::GridMismatch("feature tracks disagree on bin count"));
        }
        Ok(())
    }
}

fn pitch_candidates(clip: &AudioClip, grid: &FrameGrid, cfg: &VocoderConfig) -> Vec<PitchCandidate> {
    cfg.pitch_analyzer(clip.sample_rate_hz).analyze_grid(&clip.samples, grid)
}

fn f0_from_candidates(cands: &[PitchCandidate], fs: f64, cfg: &VocoderConfig) -> F0Contour {
    F0Contour {
        values: cands
            .iter()
            .map(|c| {
                if c.period > 0.0 && c.strength >= cfg.voicing_threshold {
                    (fs / c.period).clamp(cfg.f0_min, cfg.f0_max)
                } else {
                    0.0
                }
            })
            .collect(),
    }
}

/// Autocorrelation F0 tracker on the vocoder grid.
pub fn estimate_f0(clip: &AudioClip, cfg: &VocoderConfig) -> Result<F0Contour> {
    cfg.validate()?;
    let grid = cfg.grid(clip.sample_rate_hz, clip.len())?;
    let cands = pitch_candidates(clip, &grid, cfg);
    Ok(f0_from_candidates(&cands, f64::from(clip.sample_rate_hz), cfg))
}

/// Cepstrally smoothed power envelope.
///
/// Each frame's periodogram is first averaged over a band as wide as the
/// harmonic spacing (`0.7 fs / cutoff` Hz), which turns harmonic line power into
/// spectral density; the log of that is then liftered at the quefrency cutoff
/// (`0.7 fs / F0` samples voiced, 80 unvoiced).
pub fn estimate_envelope(clip: &AudioClip, f0: &F0Contour, cfg: &VocoderConfig) -> Result<SpectralEnvelopeTrack> {
    cfg.validate()?;
    let grid = cfg.grid(clip.sample_rate_hz, clip.len())?;
    if f0.values.len() != grid.num_frames {
        return Err(Error::GridMismatch("F0 contour length differs from grid"));
    }
    let fs = f64::from(clip.sample_rate_hz);
    let fft = Fft::new(cfg.fft_size)?;
    let window_power: f64 = hann(cfg.frame_length).iter().map(|w| w * w).sum();
    let bin_width = fs / cfg.fft_size as f64;
    let frames = frame_signal(&clip.samples, &grid)?
        .iter()
        .zip(&f0.values)
        .map(|(frame, &f)| {
            let power: Vec<f64> = fft.real_forward(frame).iter().map(|c| c.norm_sqr() / window_power).collect();
            let cutoff = if f > 0.0 { cfg.cepstral_period_fraction * fs / f } else { cfg.unvoiced_cutoff };
            let width_bins = cfg.cepstral_period_fraction * fs / cutoff / bin_width;
            let smoothed = band_average(&power, width_bins);
            cepstral_smooth(&fft, &smoothed, cutoff)
        })
        .collect();
    Ok(SpectralEnvelopeTrack { frames, fft_size: cfg.fft_size, bin_width_hz: bin_width })
}

/// Floor for one frame, relative to its peak so that it scales with the
/// signal; all-zero frames get the absolute floor.
pub fn power_floor(frame: &[f64]) -> f64 {
    let peak = frame.iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        peak * crate::spectral::ENVELOPE_FLOOR_RATIO
    } else {
        ABSOLUTE_POWER_FLOOR
    }
}

/// Rectangular average of width `width_bins` centred on each bin, treating the
/// spectrum as even about DC and Nyquist.
fn band_average(power: &[f64], width_bins: f64) -> Vec<f64> {
    let n = power.len();
    if width_bins <= 1.0 {
        return power.to_vec();
    }
    let last = (n - 1) as i64;
    let at = |i: i64| -> f64 {
        let period = 2 * last;
        let mut j = i.rem_euclid(period);
        if j > last {
            j = period - j;
        }
        power[j as usize]
    };
    // cumulative sum over [-pad, n + pad) with bin i covering [i - 0.5, i + 0.5)
    let pad = (width_bins / 2.0).ceil() as i64 + 2;
    let mut cumulative = Vec::with_capacity((n as i64 + 2 * pad + 1) as usize);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for i in -pad..n as i64 + pad {
        acc += at(i);
        cumulative.push(acc);
    }
    // integral of the step function up to x (in bin units)
    let integral = |x: f64| -> f64 {
        let pos = x + 0.5 + pad as f64;
        let idx = pos.floor().clamp(0.0, (cumulative.len() - 2) as f64) as usize;
        let frac = pos - idx as f64;
        cumulative[idx] + frac * (cumulative[idx + 1] - cumulative[idx])
    };
    (0..n)
        .map(|i| {
            let c = i as f64;
            (integral(c + width_bins / 2.0) - integral(c - width_bins / 2.0)) / width_bins
        })
        .collect()
}

fn cepstral_smooth(fft: &Fft, power: &[f64], cutoff: f64) -> Vec<f64> {
    let floor = power_floor(power);
    let log_half: Vec<Complex64> = power.iter().map(|&p| Complex64::new(p.max(floor).ln(), 0.0)).collect();
    let mut cep = fft.real_inverse(&log_half);
    let n = cep.len();
    for (q, c) in cep.iter_mut().enumerate() {
        let quefrency = q.min(n - q) as f64;
        if quefrency >= cutoff {
            *c = 0.0;
        }
    }
    let smooth: Vec<f64> = fft.real_forward(&cep).iter().map(|c| c.re.exp()).collect();
    let floor = power_floor(&smooth);
    smooth.into_iter().map(|p| p.max(floor)).collect()
}

/// Frequency-constant aperiodicity `1 - NCCF peak`; unvoiced frames are 1.
pub fn estimate_aperiodicity(clip: &AudioClip, f0: &F0Contour, cfg: &VocoderConfig) -> Result<AperiodicityTrack> {
    cfg.validate()?;
    let grid = cfg.grid(clip.sample_rate_hz, clip.len())?;
    if f0.values.len() != grid.num_frames {
        return Err(Error::GridMismatch("F0 contour length differs from grid"));
    }
    let cands = pitch_candidates(clip, &grid, cfg);
    Ok(aperiodicity_from(&cands, f0, cfg.fft_size / 2 + 1))
}

fn aperiodicity_from(cands: &[PitchCandidate], f0: &F0Contour, bins: usize) -> AperiodicityTrack {
    AperiodicityTrack {
        frames: cands
            .iter()
            .zip(&f0.values)
            .map(|(c, &f)| {
                let alpha = if f > 0.0 { (1.0 - c.strength).clamp(0.0, 1.0) } else { 1.0 };
                vec![alpha; bins]
            })
            .collect(),
    }
}

/// F0, Sp and Ap on one shared grid.
pub fn analyze(clip: &AudioClip, cfg: &VocoderConfig) -> Result<VocoderFeatures> {
    cfg.validate()?;
    if clip.is_empty() {
        return Err(Error::EmptyAudio);
    }
    let grid = cfg.grid(clip.sample_rate_hz, clip.len())?;
    let cands = pitch_candidates(clip, &grid, cfg);
    let f0 = f0_from_candidates(&cands, f64::from(clip.sample_rate_hz), cfg);
    let sp = estimate_envelope(clip, &f0, cfg)?;
    let ap = aperiodicity_from(&cands, &f0, cfg.fft_size / 2 + 1);
    Ok(VocoderFeatures { f0, sp, ap, grid })
}

/// Excitation before envelope filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSignal {
    /// Unit-power pulses at the F0 contour, rounded to the nearest sample.
    pub pulses: Vec<f64>,
    /// Exact pulse instants (fractional sample index) and amplitudes; synthesis
    /// places pulses from these so periods need not be whole samples.
    pub pulse_times: Vec<(f64, f64)>,
    /// Unit-variance Gaussian noise.
    pub noise: Vec<f64>,
    /// Per-frame voicing the pulses were generated from.
    pub voiced: Vec<bool>,
}

/// F0 at sample `n`, interpolated between voiced frame centres.
fn f0_at(f0: &[f64], hop: usize, n: usize) -> f64 {
    let pos = n as f64 / hop as f64;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    let a = f0.get(k).copied().unwrap_or(0.0);
    let b = f0.get(k + 1).copied().unwrap_or(a);
    match (a > 0.0, b > 0.0) {
        (true, true) => a + frac * (b - a),
        _ => {
            if frac < 0.5 {
                a
            } else {
                b
            }
        }
    }
}

/// Phase-accumulator pulse train plus seeded noise covering `len` samples.
pub fn build_excitation(f0: &F0Contour, grid: &FrameGrid, len: usize, seed: u64) -> ExcitationSignal {
    let fs = f64::from(grid.sample_rate_hz);
    let mut pulse_times = Vec::new();
    let mut phase = 0.0;
    let mut was_voiced = false;
    for n in 0..len {
        let f = f0_at(&f0.values, grid.hop, n);
        if f <= 0.0 {
            was_voiced = false;
            continue;
        }
        let step = f / fs;
        if !was_voiced {
            // voicing onset emits a pulse immediately
            phase = 1.0;
            was_voiced = true;
        }
        if phase >= 1.0 {
            phase -= phase.floor();
            // the phase crossed an integer `phase / step` samples ago
            pulse_times.push((n as f64 - phase / step, (fs / f).sqrt()));
        }
        phase += step;
    }
    let mut pulses = vec![0.0; len];
    for &(t, amp) in &pulse_times {
        let idx = t.round().max(0.0) as usize;
        if idx < len {
            pulses[idx] += amp;
        }
    }
    let mut rng = SplitMix64::new(seed);
    let noise = (0..len).map(|_| rng.next_gaussian()).collect();
    ExcitationSignal { pulses, pulse_times, noise, voiced: f0.values.iter().map(|&f| f > 0.0).collect() }
}

/// Spectrum (bins `0..=fft_size/2`) of the Hann-windowed pulses falling in
/// the frame starting at `start`, each a fractional-delay impulse.
fn pulse_spectrum(times: &[(f64, f64)], start: f64, frame_length: usize, fft_size: usize) -> Vec<Complex64> {
    let len = frame_length as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); fft_size / 2 + 1];
    let first = times.partition_point(|&(t, _)| t <= start);
    for &(t, amp) in times[first..].iter().take_while(|&&(t, _)| t < start + len) {
        let offset = t - start;
        let w = 0.5 - 0.5 * (2.0 * core::f64::consts::PI * offset / len).cos();
        let step = Complex64::from_polar(1.0, -2.0 * core::f64::consts::PI * offset / fft_size as f64);
        let mut rot = Complex64::new(amp * w, 0.0);
        for bin in out.iter_mut() {
            *bin += rot;
            rot *= step;
        }
    }
    out
}

/// Mixed-excitation synthesis, `num_frames * hop` samples long.
pub fn synthesize(features: &VocoderFeatures, cfg: &VocoderConfig, seed: u64) -> Result<AudioClip> {
    cfg.validate()?;
    features.validate()?;
    let grid = &features.grid;
    if features.sp.fft_size != cfg.fft_size || grid.frame_length != cfg.frame_length || grid.hop != cfg.hop {
        return Err(Error::GridMismatch("features were analysed with a different grid"));
    }
    let len = grid.covered_len();
    let excitation = build_excitation(&features.f0, grid, len, seed);
    let fft = Fft::new(cfg.fft_size)?;
    let window = grid.window();
    let mut frames = Vec::with_capacity(grid.num_frames);
    for k in 0..grid.num_frames {
        let start = grid.frame_start(k);
        let windowed = |x: &[f64]| -> Vec<f64> {
            segment_zero(x, start, grid.frame_length).iter().zip(&window).map(|(a, b)| a * b).collect()
        };
        let noise = fft.real_forward(&windowed(&excitation.noise));
        let mixed: Vec<Complex64> = if excitation.voiced[k] {
            let pulses = pulse_spectrum(&excitation.pulse_times, start as f64, grid.frame_length, cfg.fft_size);
            pulses
                .iter()
                .zip(&noise)
                .zip(&features.ap.frames[k])
                .map(|((p, e), &a)| {
                    let a = a.clamp(0.0, 1.0);
                    p * (1.0 - a).sqrt() + e * a.sqrt()
                })
                .collect()
        } else {
            noise
        };
        let amplitude: Vec<f64> = features.sp.frames[k].iter().map(|p| p.max(0.0).sqrt()).collect();
        let response = minimum_phase_with(&fft, &amplitude)?;
        let shaped: Vec<Complex64> = mixed.iter().zip(&response).map(|(x, h)| x * h).collect();
        frames.push(fft.real_inverse(&shaped));
    }
    let samples = overlap_add(&frames, grid, len, OlaNorm::Window)?;
    AudioClip::new(samples, grid.sample_rate_hz)
}

/// Like `frame::segment` but zero outside the signal.
fn segment_zero(x: &[f64], start: i64, len: usize) -> Vec<f64> {
    (0..len as i64)
        .map(|i| {
            let idx = start + i;
            if idx >= 0 && (idx as usize) < x.len() {
                x[idx as usize]
            } else {
                0.0
            }
        })
        .collect()
}

