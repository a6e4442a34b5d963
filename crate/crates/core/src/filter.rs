//! Time-domain filters: FIR inverse filtering, all-pole synthesis, leaky
//! integration and the linear-phase high-pass used before glottal analysis.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frame::hann;
use crate::lpc::LpcModel;

/// `y[n] = sum_k a[k] x[n-k]`. `state[i]` holds `x[-1-i]`; missing history is zero.
pub fn fir_filter(signal: &[f64], coeffs: &[f64], state: Option<&[f64]>) -> Vec<f64> {
    let past = |i: i64| -> f64 {
        if i >= 0 {
            signal[i as usize]
        } else {
            state.and_then(|s| s.get((-i - 1) as usize)).copied().unwrap_or(0.0)
        }
    };
    (0..signal.len() as i64)
        .map(|n| coeffs.iter().enumerate().map(|(k, a)| a * past(n - k as i64)).sum())
        .collect()
}

/// `y[n] = x[n] - sum_{k>=1} a[k] y[n-k]` (the model gain is not applied).
/// `state[i]` holds `y[-1-i]`.
pub fn allpole_filter(signal: &[f64], model: &LpcModel, state: Option<&[f64]>) -> Result<Vec<f64>> {
    if !model.is_stable() {
        return Err(Error::UnstableModel);
    }
    let a = model.coefficients();
    let mut y: Vec<f64> = Vec::with_capacity(signal.len());
    for (n, &x) in signal.iter().enumerate() {
        let mut acc = x;
        for (k, &ak) in a.iter().enumerate().skip(1) {
            let prev = if n >= k {
                y[n - k]
            } else {
                state.and_then(|s| s.get(k - n - 1)).copied().unwrap_or(0.0)
            };
            acc -= ak * prev;
        }
        y.push(acc);
    }
    Ok(y)
}

/// `y[n] = x[n] + d y[n-1]`: the inverse of the lip-radiation differentiator `1 - d z^-1`.
pub fn leaky_integrate(signal: &[f64], leak: f64) -> Vec<f64> {
    let mut prev = 0.0;
    signal
        .iter()
        .map(|&x| {
            prev = x + leak * prev;
            prev
        })
        .collect()
}

/// Linear-phase Hann-windowed-sinc low-pass with unit DC gain.
/// `taps` is forced odd so the group delay is a whole number of samples.
pub fn design_lowpass(cutoff_hz: f64, sample_rate_hz: f64, taps: usize) -> Vec<f64> {
    let taps = taps | 1;
    let centre = (taps / 2) as f64;
    let fc = cutoff_hz / sample_rate_hz;
    let w = hann(taps + 1);
    let mut h: Vec<f64> = (0..taps)
        .map(|i| {
            let t = i as f64 - centre;
            let sinc = if t == 0.0 {
                2.0 * fc
            } else {
                (2.0 * core::f64::consts::PI * fc * t).sin() / (core::f64::consts::PI * t)
            };
            // periodic Hann of length taps+1 is symmetric over the first taps samples shifted by one
            sinc * w[i + 1]
        })
        .collect();
    let dc: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= dc);
    h
}

/// Linear-phase high-pass by spectral inversion of [`design_lowpass`].
pub fn design_highpass(cutoff_hz: f64, sample_rate_hz: f64, taps: usize) -> Vec<f64> {
    let mut h = design_lowpass(cutoff_hz, sample_rate_hz, taps);
    h.iter_mut().for_each(|v| *v = -*v);
    let centre = h.len() / 2;
    h[centre] += 1.0;
    h
}

/// Applies a symmetric odd-length FIR with its group delay removed; output aligns with input.
pub fn zero_delay_fir(signal: &[f64], h: &[f64]) -> Vec<f64> {
    let delay = (h.len() / 2) as i64;
    let n = signal.len() as i64;
    (0..n)
        .map(|i| {
            let lo = (i + delay - n + 1).max(0);
            let hi = (i + delay).min(h.len() as i64 - 1);
            (lo..=hi).map(|k| h[k as usize] * signal[(i + delay - k) as usize]).sum()
        })
        .collect()
}

/// Convenience high-pass used by glottal analysis.
pub fn highpass(signal: &[f64], cutoff_hz: f64, sample_rate_hz: f64, taps: usize) -> Vec<f64> {
    zero_delay_fir(signal, &design_highpass(cutoff_hz, sample_rate_hz, taps))
}

/// Reversed history vector for `fir_filter`/`allpole_filter` from the samples preceding a block.
pub fn history(preceding: &[f64], order: usize) -> Vec<f64> {
    let mut s = vec![0.0; order];
    for (i, v) in preceding.iter().rev().take(order).enumerate() {
        s[i] = *v;
    }
    s
}
