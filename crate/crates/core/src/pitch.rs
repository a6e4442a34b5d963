//! Normalised cross-correlation (NCCF) pitch analysis shared by the F0
//! tracker, the aperiodicity estimator and the periodicity metric.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::filter::{design_lowpass, fir_filter, zero_delay_fir};
use crate::frame::{hann, segment, FrameGrid};
use crate::lpc::{autocorrelation, levinson_durbin};

/// Order of the LP inverse filter applied before correlation, so resonances
/// of the vocal tract do not register as periodicity.
pub const WHITENING_ORDER: usize = 12;
/// Default residual low-pass cutoff as a fraction of the sample rate. Sharp
/// residual pulses only correlate well at fractional periods once smoothed.
pub const RESIDUAL_CUTOFF_FRACTION: f64 = 1.0 / 6.0;
const RESIDUAL_TAPS: usize = 31;

/// Best periodicity candidate of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchCandidate {
    /// Interpolated period in samples; zero when the frame carries no energy.
    pub period: f64,
    /// Interpolated NCCF peak value at the chosen lag, in [0, 1].
    pub strength: f64,
    /// Largest NCCF value anywhere in the lag range, in [0, 1].
    pub max_strength: f64,
}

impl PitchCandidate {
    const NONE: Self = Self { period: 0.0, strength: 0.0, max_strength: 0.0 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NccfAnalyzer {
    pub min_lag: usize,
    pub max_lag: usize,
    pub window: usize,
    /// LP whitening order; zero correlates the raw signal.
    pub whitening_order: usize,
    /// Cutoff of the residual low-pass as a fraction of the sample rate.
    pub residual_cutoff: f64,
}

impl NccfAnalyzer {
    /// Lag range covering `[f0_min, f0_max]` Hz with a `window`-sample correlation span.
    pub fn new(sample_rate_hz: u32, f0_min: f64, f0_max: f64, window: usize) -> Self {
        let fs = f64::from(sample_rate_hz);
        let min_lag = ((fs / f0_max).floor() as usize).max(2);
        let max_lag = ((fs / f0_min).ceil() as usize).max(min_lag + 2);
        Self { min_lag, max_lag, window, whitening_order: WHITENING_ORDER, residual_cutoff: RESIDUAL_CUTOFF_FRACTION }
    }

    /// NCCF values for lags `min_lag - 1 ..= max_lag + 1`.
    pub fn nccf(&self, seg: &[f64]) -> Vec<f64> {
        let n = self.window;
        let energy = |start: usize| seg[start..start + n].iter().map(|v| v * v).sum::<f64>();
        let e0 = energy(0);
        (self.min_lag - 1..=self.max_lag + 1)
            .map(|lag| {
                let el = energy(lag);
                let denom = (e0 * el).sqrt();
                if denom <= 0.0 {
                    return 0.0;
                }
                let num: f64 = seg[..n].iter().zip(&seg[lag..lag + n]).map(|(a, b)| a * b).sum();
                num / denom
            })
            .collect()
    }

    /// Analyses the frame centred on `centre`.
    pub fn analyze_at(&self, x: &[f64], centre: i64) -> PitchCandidate {
        let len = self.window + self.max_lag + 1;
        let lead = self.whitening_order;
        let mut start = centre - (self.window / 2) as i64 - lead as i64;
        // keep the span inside the signal where possible; mirrored padding breaks periodicity
        if x.len() >= len + lead {
            start = start.clamp(0, (x.len() - len - lead) as i64);
        }
        let mut seg = segment(x, start, len + lead);
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        for v in seg.iter_mut() {
            *v -= mean;
        }
        let scale = seg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(scale > 1e-12) {
            return PitchCandidate::NONE;
        }
        let seg = self.whiten(&seg);
        let r = self.nccf(&seg);
        // r[i] is lag min_lag - 1 + i; search i in 1..=len-2
        let inner = 1..r.len() - 1;
        let max_strength = inner.clone().map(|i| r[i]).fold(0.0f64, f64::max);
        if max_strength <= 0.0 {
            return PitchCandidate::NONE;
        }
        // shortest lag whose local maximum is within 10% of the best one
        let pick = inner
            .clone()
            .find(|&i| r[i] >= r[i - 1] && r[i] >= r[i + 1] && r[i] >= 0.9 * max_strength)
            .unwrap_or_else(|| inner.clone().max_by(|&a, &b| r[a].partial_cmp(&r[b]).unwrap()).unwrap());
        let (a, b, c) = (r[pick - 1], r[pick], r[pick + 1]);
        let curvature = a - 2.0 * b + c;
        let offset = if curvature < 0.0 { (0.5 * (a - c) / curvature).clamp(-0.5, 0.5) } else { 0.0 };
        PitchCandidate {
            period: (self.min_lag - 1 + pick) as f64 + offset,
            // height of the interpolating parabola, so fractional periods are not penalised
            strength: (b - 0.25 * (a - c) * offset).clamp(0.0, 1.0),
            max_strength: max_strength.clamp(0.0, 1.0),
        }
    }

    /// LP residual of `seg` with the leading `whitening_order` samples used
    /// only as filter history.
    fn whiten(&self, seg: &[f64]) -> Vec<f64> {
        let p = self.whitening_order;
        if p == 0 {
            return seg.to_vec();
        }
        let body = &seg[p..];
        let w = hann(body.len());
        let windowed: Vec<f64> = body.iter().zip(&w).map(|(a, b)| a * b).collect();
        match levinson_durbin(&autocorrelation(&windowed, p), p) {
            Ok(model) => {
                let residual = fir_filter(seg, model.coefficients(), None);
                let h = design_lowpass(self.residual_cutoff, 1.0, RESIDUAL_TAPS);
                zero_delay_fir(&residual[p..], &h)
            }
            Err(_) => body.to_vec(),
        }
    }

    pub fn analyze_grid(&self, x: &[f64], grid: &FrameGrid) -> Vec<PitchCandidate> {
        (0..grid.num_frames)
            .map(|k| self.analyze_at(x, (k * grid.hop) as i64))
            .collect()
    }
}
