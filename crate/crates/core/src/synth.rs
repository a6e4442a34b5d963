//! Synthetic test signals: pulse trains, noise and source-filter vowels with
//! known glottal and vocal-tract filters.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::audio::AudioClip;
use crate::error::Result;
use crate::filter::{allpole_filter, fir_filter};
use crate::lpc::{poly_mul, LpcModel};
use crate::rng::SplitMix64;

const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Unit-power impulse train: one pulse of height `sqrt(rate / f0)` per period.
pub fn pulse_train(f0_hz: f64, rate: u32, len: usize) -> Vec<f64> {
    let fs = f64::from(rate);
    let amp = (fs / f0_hz).sqrt();
    let mut out = vec![0.0; len];
    let mut phase = 1.0;
    for v in out.iter_mut() {
        if phase >= 1.0 {
            phase -= 1.0;
            *v = amp;
        }
        phase += f0_hz / fs;
    }
    out
}

/// Unit-power sum of equal-amplitude cosine harmonics below 0.95 x Nyquist.
pub fn bandlimited_pulse_train(f0_hz: f64, rate: u32, len: usize) -> Vec<f64> {
    let fs = f64::from(rate);
    let harmonics = ((0.95 * fs / 2.0) / f0_hz).floor().max(1.0) as usize;
    let amp = (2.0 / harmonics as f64).sqrt();
    (0..len)
        .map(|n| {
            let t = n as f64 / fs;
            (1..=harmonics).map(|h| (TAU * h as f64 * f0_hz * t).cos()).sum::<f64>() * amp
        })
        .collect()
}

/// Unit-variance Gaussian noise.
pub fn white_noise(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..len).map(|_| rng.next_gaussian()).collect()
}

pub fn sine(freq_hz: f64, rate: u32, len: usize) -> Vec<f64> {
    let fs = f64::from(rate);
    (0..len).map(|n| (TAU * freq_hz * n as f64 / fs).sin()).collect()
}

/// Second-order section `1 - 2 r cos(theta) z^-1 + r^2 z^-2` for a resonance.
pub fn resonance_polynomial(freq_hz: f64, bandwidth_hz: f64, rate: f64) -> [f64; 3] {
    let r = (-core::f64::consts::PI * bandwidth_hz / rate).exp();
    let theta = TAU * freq_hz / rate;
    [1.0, -2.0 * r * theta.cos(), r * r]
}

/// All-pole vocal tract built from `(frequency, bandwidth)` pairs.
pub fn formant_model(formants: &[(f64, f64)], rate: f64) -> LpcModel {
    let mut poly = vec![1.0];
    for &(f, b) in formants {
        poly = poly_mul(&poly, &resonance_polynomial(f, b, rate));
    }
    LpcModel::new(poly, 1.0).expect("monic by construction")
}

/// Third-order glottal model with a conjugate pair and one real pole.
pub fn glottal_model(pair_radius: f64, pair_freq_hz: f64, real_pole: f64, rate: f64) -> LpcModel {
    let theta = TAU * pair_freq_hz / rate;
    let pair = [1.0, -2.0 * pair_radius * theta.cos(), pair_radius * pair_radius];
    LpcModel::new(poly_mul(&pair, &[1.0, -real_pole]), 1.0).expect("monic by construction")
}

/// Source-filter vowel: pulses, optional glottal filter, vocal tract, optional lip radiation.
#[derive(Debug, Clone, PartialEq)]
pub struct Vowel {
    pub f0_hz: f64,
    pub formants: Vec<(f64, f64)>,
    pub glottis: Option<LpcModel>,
    pub lip_leak: Option<f64>,
}

impl Vowel {
    /// /a/-like vowel (700/1220/2600 Hz) with no glottal shaping or radiation.
    pub fn plain(f0_hz: f64) -> Self {
        Self {
            f0_hz,
            formants: vec![(700.0, 130.0), (1220.0, 70.0), (2600.0, 160.0)],
            glottis: None,
            lip_leak: None,
        }
    }

    /// /a/-like vowel with the reference glottal filter (pair at 0.98, 60 Hz;
    /// real pole 0.5, about -12 dB/octave overall) and lip radiation `1 - 0.99 z^-1`.
    pub fn voiced(f0_hz: f64, rate: u32) -> Self {
        Self {
            glottis: Some(glottal_model(0.98, 60.0, 0.5, f64::from(rate))),
            lip_leak: Some(0.99),
            ..Self::plain(f0_hz)
        }
    }

    pub fn vocal_tract(&self, rate: u32) -> LpcModel {
        formant_model(&self.formants, f64::from(rate))
    }

    /// Renders from a jitter-free band-limited pulse train at unit power; the
    /// output is not normalised.
    pub fn render_raw(&self, rate: u32, len: usize) -> Result<Vec<f64>> {
        let mut x = bandlimited_pulse_train(self.f0_hz, rate, len);
        if let Some(g) = &self.glottis {
            x = allpole_filter(&x, g, None)?;
        }
        x = allpole_filter(&x, &self.vocal_tract(rate), None)?;
        if let Some(d) = self.lip_leak {
            x = fir_filter(&x, &[1.0, -d], None);
        }
        Ok(x)
    }

    /// Renders and scales to a peak of 0.5.
    pub fn render(&self, rate: u32, len: usize) -> Result<AudioClip> {
        let x = self.render_raw(rate, len)?;
        AudioClip::new(normalize_peak(x, 0.5), rate)
    }
}

pub fn normalize_peak(mut x: Vec<f64>, peak: f64) -> Vec<f64> {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m > 0.0 {
        for v in x.iter_mut() {
            *v *= peak / m;
        }
    }
    x
}
