//! Short-time Fourier analysis, overlap-add resynthesis and minimum-phase
//! reconstruction from a magnitude envelope.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;
use num_complex::Complex64;

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::frame::{frame_signal, overlap_add, FrameGrid, OlaNorm};

/// Relative floor applied to an envelope before taking its logarithm.
pub const ENVELOPE_FLOOR_RATIO: f64 = 1e-10;

/// Nonnegative magnitudes over bins `0..=fft_size/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpectrum {
    pub magnitudes: Vec<f64>,
    pub fft_size: usize,
    pub bin_width_hz: f64,
}

impl FrameSpectrum {
    pub fn new(magnitudes: Vec<f64>, fft_size: usize, sample_rate_hz: f64) -> Result<Self> {
        if magnitudes.len() != fft_size / 2 + 1 {
            return Err(Error::GridMismatch("spectrum length must be fft_size/2 + 1"));
        }
        Ok(Self { magnitudes, fft_size, bin_width_hz: sample_rate_hz / fft_size as f64 })
    }

    pub fn bin_of(&self, freq_hz: f64) -> usize {
        ((freq_hz / self.bin_width_hz).round() as usize).min(self.magnitudes.len() - 1)
    }

    pub fn freq_of(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_width_hz
    }
}

/// Magnitude/phase STFT on a frame grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub frames: Vec<FrameSpectrum>,
    pub phases: Vec<Vec<f64>>,
    pub grid: FrameGrid,
    pub fft_size: usize,
}

impl Spectrogram {
    /// Per-frame power `|X|^2`.
    pub fn power(&self) -> Vec<Vec<f64>> {
        self.frames.iter().map(|f| f.magnitudes.iter().map(|m| m * m).collect()).collect()
    }
}

/// Hann-windowed, zero-padded FFT of every grid frame.
pub fn stft(clip: &AudioClip, grid: &FrameGrid, fft_size: usize) -> Result<Spectrogram> {
    if fft_size < grid.frame_length {
        return Err(Error::DegenerateGrid("fft size shorter than frame"));
    }
    let fft = Fft::new(fft_size)?;
    let rate = f64::from(grid.sample_rate_hz);
    let mut frames = Vec::with_capacity(grid.num_frames);
    let mut phases = Vec::with_capacity(grid.num_frames);
    for frame in frame_signal(&clip.samples, grid)? {
        let spec = fft.real_forward(&frame);
        phases.push(spec.iter().map(|c| c.arg()).collect());
        frames.push(FrameSpectrum::new(spec.iter().map(|c| c.norm()).collect(), fft_size, rate)?);
    }
    Ok(Spectrogram { frames, phases, grid: *grid, fft_size })
}

/// Inverse FFT per frame, synthesis window, overlap-add normalised by the
/// summed squared window. Output covers `num_frames * hop` samples.
pub fn istft(spec: &Spectrogram) -> Result<AudioClip> {
    let grid = &spec.grid;
    if spec.frames.len() != grid.num_frames || spec.phases.len() != grid.num_frames {
        return Err(Error::GridMismatch("frame count differs from grid"));
    }
    let fft = Fft::new(spec.fft_size)?;
    let w = grid.window();
    let mut frames = Vec::with_capacity(grid.num_frames);
    for (mags, phases) in spec.frames.iter().zip(&spec.phases) {
        if mags.fft_size != spec.fft_size || mags.magnitudes.len() != phases.len() || phases.len() != spec.fft_size / 2 + 1 {
            return Err(Error::GridMismatch("spectrum size differs from fft size"));
        }
        let half: Vec<Complex64> = mags
            .magnitudes
            .iter()
            .zip(phases)
            .map(|(&m, &p)| Complex64::from_polar(m, p))
            .collect();
        let time = fft.real_inverse(&half);
        frames.push(time[..grid.frame_length].iter().zip(&w).map(|(a, b)| a * b).collect());
    }
    let samples = overlap_add(&frames, grid, grid.covered_len(), OlaNorm::WindowSquared)?;
    AudioClip::new(samples, grid.sample_rate_hz)
}

/// Minimum-phase frequency response whose magnitude equals `envelope`.
///
/// Folds the real cepstrum of the (floored) log magnitude onto positive quefrencies.
pub fn minimum_phase_response(envelope: &FrameSpectrum) -> Result<Vec<Complex64>> {
    let fft = Fft::new(envelope.fft_size)?;
    minimum_phase_with(&fft, &envelope.magnitudes)
}

pub(crate) fn minimum_phase_with(fft: &Fft, magnitudes: &[f64]) -> Result<Vec<Complex64>> {
    let n = fft.size();
    let peak = magnitudes.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() || magnitudes.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonPositiveEnvelope);
    }
    let floor = peak * ENVELOPE_FLOOR_RATIO;
    let log_half: Vec<Complex64> = magnitudes
        .iter()
        .map(|&m| Complex64::new(m.max(floor).ln(), 0.0))
        .collect();
    let cepstrum = fft.real_inverse(&log_half);
    let mut folded = vec![0.0; n];
    folded[0] = cepstrum[0];
    for q in 1..n / 2 {
        folded[q] = 2.0 * cepstrum[q];
    }
    folded[n / 2] = cepstrum[n / 2];
    Ok(fft.real_forward(&folded).into_iter().map(|c| c.exp()).collect())
}
