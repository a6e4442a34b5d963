//! Mono audio clips and band-limited sample-rate conversion.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Rate every pipeline stage works at.
pub const PIPELINE_RATE_HZ: u32 = 16_000;

/// Mono waveform with amplitudes nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidRate(0));
        }
        Ok(Self { samples, sample_rate_hz })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    pub fn rms(&self) -> f64 {
        rms(&self.samples)
    }

    /// Resample to the pipeline rate if needed.
    pub fn to_pipeline_rate(&self) -> Result<AudioClip> {
        resample(self, PIPELINE_RATE_HZ)
    }

    /// Scale factor that keeps the peak at or below full scale: 0.99/peak when
    /// the peak exceeds 1.0, otherwise 1.0.
    pub fn peak_safe_scale(&self) -> f64 {
        let peak = self.peak();
        if peak > 1.0 {
            0.99 / peak
        } else {
            1.0
        }
    }
}

pub(crate) fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Kaiser shape parameter of the interpolation kernel.
pub const KAISER_BETA: f64 = 10.0;
/// Kernel taps per output phase, counted at the lower of the two rates.
pub const TAPS_PER_PHASE: usize = 64;
/// Anti-alias cutoff as a fraction of the lower rate.
pub const CUTOFF_FRACTION: f64 = 0.45;

const MAX_TABLE_PHASES: u64 = 4096;

/// Windowed-sinc resampling to `target_rate_hz`.
///
/// Output length is `round(len * target / source)`; samples outside the clip
/// are treated as zero.
pub fn resample(clip: &AudioClip, target_rate_hz: u32) -> Result<AudioClip> {
    if target_rate_hz == 0 {
        return Err(Error::InvalidRate(target_rate_hz));
    }
    if clip.sample_rate_hz == 0 {
        return Err(Error::InvalidRate(clip.sample_rate_hz));
    }
    if clip.is_empty() {
        return Err(Error::EmptyAudio);
    }
    if target_rate_hz == clip.sample_rate_hz {
        return Ok(clip.clone());
    }
    let src = u64::from(clip.sample_rate_hz);
    let tgt = u64::from(target_rate_hz);
    let out_len = ((clip.len() as u128 * tgt as u128 + src as u128 / 2) / src as u128) as usize;
    let kernel = Kernel::new(src, tgt);
    let g = gcd(src, tgt);
    let (up, down) = (tgt / g, src / g);
    let samples = if up <= MAX_TABLE_PHASES {
        resample_polyphase(&clip.samples, out_len, up, down, &kernel)
    } else {
        resample_direct(&clip.samples, out_len, src, tgt, &kernel)
    };
    AudioClip::new(samples, target_rate_hz)
}

struct Kernel {
    /// Twice the cutoff in cycles per input sample.
    bandwidth: f64,
    half_width: f64,
    reach: usize,
    norm: f64,
}

impl Kernel {
    fn new(src: u64, tgt: u64) -> Self {
        let low = src.min(tgt) as f64;
        let cutoff = CUTOFF_FRACTION * low / src as f64;
        let half_width = (TAPS_PER_PHASE as f64 / 2.0) * (src as f64 / low);
        Self {
            bandwidth: 2.0 * cutoff,
            half_width,
            reach: half_width.ceil() as usize,
            norm: 1.0 / bessel_i0(KAISER_BETA),
        }
    }

    fn eval(&self, tau: f64) -> f64 {
        let ratio = tau / self.half_width;
        if ratio.abs() >= 1.0 {
            return 0.0;
        }
        let window = bessel_i0(KAISER_BETA * (1.0 - ratio * ratio).sqrt()) * self.norm;
        self.bandwidth * sinc(self.bandwidth * tau) * window
    }
}

fn resample_polyphase(x: &[f64], out_len: usize, up: u64, down: u64, kernel: &Kernel) -> Vec<f64> {
    let reach = kernel.reach as i64;
    let taps = 2 * kernel.reach;
    let mut table = vec![0.0; up as usize * taps];
    for phase in 0..up as usize {
        let frac = phase as f64 / up as f64;
        for j in 0..taps {
            // tap j multiplies x[n0 - reach + 1 + j]
            let tau = frac + (reach - 1 - j as i64) as f64;
            table[phase * taps + j] = kernel.eval(tau);
        }
    }
    (0..out_len as u64)
        .map(|m| {
            let pos = m * down;
            let n0 = (pos / up) as i64;
            let phase = (pos % up) as usize;
            let coeffs = &table[phase * taps..(phase + 1) * taps];
            let first = n0 - reach + 1;
            dot_clipped(x, first, coeffs)
        })
        .collect()
}

fn resample_direct(x: &[f64], out_len: usize, src: u64, tgt: u64, kernel: &Kernel) -> Vec<f64> {
    let reach = kernel.reach as i64;
    let mut coeffs = vec![0.0; 2 * kernel.reach];
    (0..out_len as u64)
        .map(|m| {
            let pos = m as u128 * src as u128;
            let n0 = (pos / tgt as u128) as i64;
            let frac = (pos % tgt as u128) as f64 / tgt as f64;
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c = kernel.eval(frac + (reach - 1 - j as i64) as f64);
            }
            dot_clipped(x, n0 - reach + 1, &coeffs)
        })
        .collect()
}

fn dot_clipped(x: &[f64], first: i64, coeffs: &[f64]) -> f64 {
    let lo = (-first).max(0) as usize;
    let hi = ((x.len() as i64 - first).min(coeffs.len() as i64)).max(0) as usize;
    if lo >= hi {
        return 0.0;
    }
    let start = (first + lo as i64) as usize;
    x[start..start + (hi - lo)]
        .iter()
        .zip(&coeffs[lo..hi])
        .map(|(a, b)| a * b)
        .sum()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = core::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= (half / k) * (half / k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
