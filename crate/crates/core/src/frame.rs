//! Frame grids, Hann windows and overlap-add.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Default analysis frame: 32 ms at 16 kHz.
pub const DEFAULT_FRAME_LENGTH: usize = 512;
/// Default hop: 8 ms at 16 kHz.
pub const DEFAULT_HOP: usize = 128;
/// Default FFT size.
pub const DEFAULT_FFT_SIZE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
}

/// Periodic Hann window of length `n`.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * core::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// Frame layout shared by every analysis and synthesis stage.
///
/// Frame `k` is centred on sample `k * hop`: it covers `[k*hop, k*hop + frame_length)`
/// of the signal after `frame_length / 2` samples of reflect padding at the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameGrid {
    pub frame_length: usize,
    pub hop: usize,
    pub window: WindowKind,
    pub num_frames: usize,
    pub sample_rate_hz: u32,
}

impl FrameGrid {
    pub fn new(frame_length: usize, hop: usize, sample_rate_hz: u32, signal_len: usize) -> Result<Self> {
        if hop == 0 {
            return Err(Error::DegenerateGrid("hop must be positive"));
        }
        if frame_length <= 1 {
            return Err(Error::DegenerateGrid("frame length must exceed one sample"));
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidRate(0));
        }
        if cola_ripple(frame_length, hop) > 1e-6 {
            return Err(Error::DegenerateGrid("hop breaks the constant overlap-add condition"));
        }
        Ok(Self {
            frame_length,
            hop,
            window: WindowKind::Hann,
            num_frames: signal_len.div_ceil(hop).max(1),
            sample_rate_hz,
        })
    }

    /// Default 512/128 grid for a signal of `signal_len` samples.
    pub fn standard(sample_rate_hz: u32, signal_len: usize) -> Result<Self> {
        Self::new(DEFAULT_FRAME_LENGTH, DEFAULT_HOP, sample_rate_hz, signal_len)
    }

    /// Same geometry, different length.
    pub fn with_signal_len(&self, signal_len: usize) -> Self {
        Self { num_frames: signal_len.div_ceil(self.hop).max(1), ..*self }
    }

    pub fn window(&self) -> Vec<f64> {
        match self.window {
            WindowKind::Hann => hann(self.frame_length),
        }
    }

    /// Signal index of the first sample of frame `k` (may be negative).
    pub fn frame_start(&self, k: usize) -> i64 {
        (k * self.hop) as i64 - (self.frame_length / 2) as i64
    }

    /// Samples spanned by the whole grid.
    pub fn covered_len(&self) -> usize {
        self.num_frames * self.hop
    }
}

/// Relative ripple of the summed squared window for a Hann/hop pair.
pub fn cola_ripple(frame_length: usize, hop: usize) -> f64 {
    let w = hann(frame_length);
    let mut acc = vec![0.0; hop];
    for (i, v) in w.iter().enumerate() {
        acc[i % hop] += v * v;
    }
    let max = acc.iter().cloned().fold(f64::MIN, f64::max);
    let min = acc.iter().cloned().fold(f64::MAX, f64::min);
    if max <= 0.0 {
        return f64::INFINITY;
    }
    (max - min) / max
}

/// Signal value at any integer index, mirroring at both ends without
/// repeating the edge sample.
pub fn reflect_at(x: &[f64], index: i64) -> f64 {
    let n = x.len() as i64;
    match n {
        0 => 0.0,
        1 => x[0],
        _ => {
            let period = 2 * (n - 1);
            let mut i = index.rem_euclid(period);
            if i >= n {
                i = period - i;
            }
            x[i as usize]
        }
    }
}

/// Unwindowed samples `[start, start + len)` with reflect padding.
pub fn segment(x: &[f64], start: i64, len: usize) -> Vec<f64> {
    (0..len as i64)
        .map(|i| {
            let idx = start + i;
            if idx >= 0 && (idx as usize) < x.len() {
                x[idx as usize]
            } else {
                reflect_at(x, idx)
            }
        })
        .collect()
}

/// Unwindowed frames on the grid.
pub fn raw_frames(x: &[f64], grid: &FrameGrid) -> Vec<Vec<f64>> {
    (0..grid.num_frames)
        .map(|k| segment(x, grid.frame_start(k), grid.frame_length))
        .collect()
}

/// Hann-windowed frames on the grid.
pub fn frame_signal(x: &[f64], grid: &FrameGrid) -> Result<Vec<Vec<f64>>> {
    if grid.hop == 0 || grid.frame_length <= 1 {
        return Err(Error::DegenerateGrid("hop must be positive and frames longer than one sample"));
    }
    let w = grid.window();
    Ok(raw_frames(x, grid)
        .into_iter()
        .map(|f| f.iter().zip(&w).map(|(a, b)| a * b).collect())
        .collect())
}

/// How overlap-added frames are normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OlaNorm {
    /// Frames carry one window factor; divide by the summed window.
    Window,
    /// Frames carry analysis and synthesis windows; divide by the summed squared window.
    WindowSquared,
}

/// Overlap-add frames placed on the grid into `out_len` samples.
///
/// Frames may be longer than the grid frame (filter tails); the normaliser is
/// built from the grid window only.
pub fn overlap_add(frames: &[Vec<f64>], grid: &FrameGrid, out_len: usize, norm: OlaNorm) -> Result<Vec<f64>> {
    if frames.len() != grid.num_frames {
        return Err(Error::GridMismatch("frame count differs from grid"));
    }
    let w = grid.window();
    let mut out = vec![0.0; out_len];
    let mut weight = vec![0.0; out_len];
    for (k, frame) in frames.iter().enumerate() {
        let start = grid.frame_start(k);
        for (j, v) in frame.iter().enumerate() {
            let idx = start + j as i64;
            if idx < 0 || idx as usize >= out_len {
                continue;
            }
            let idx = idx as usize;
            out[idx] += v;
            if j < w.len() {
                weight[idx] += match norm {
                    OlaNorm::Window => w[j],
                    OlaNorm::WindowSquared => w[j] * w[j],
                };
            }
        }
    }
    for (o, s) in out.iter_mut().zip(&weight) {
        if *s > 1e-9 {
            *o /= s;
        } else {
            *o = 0.0;
        }
    }
    Ok(out)
}
