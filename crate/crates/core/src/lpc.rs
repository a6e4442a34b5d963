//! Linear prediction: autocorrelation, Levinson-Durbin, stability handling.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Pole-radius factor applied per coefficient when a model is (near-)unstable.
pub const BANDWIDTH_EXPANSION: f64 = 0.994;
/// Roots at or beyond `1 - STABILITY_MARGIN` count as unstable.
pub const STABILITY_MARGIN: f64 = 1e-6;

/// All-pole model `gain / A(z)` with monic `A(z) = sum a[k] z^-k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpcModel {
    coefficients: Vec<f64>,
    pub gain: f64,
}

impl LpcModel {
    /// Builds a model from a monic polynomial. `coefficients[0]` must be 1.
    pub fn new(coefficients: Vec<f64>, gain: f64) -> Result<Self> {
        if coefficients.first() != Some(&1.0) {
            return Err(Error::InvalidConfig("LP polynomial must be monic"));
        }
        Ok(Self { coefficients, gain })
    }

    /// Pass-through model of the given order, `A(z) = 1`.
    pub fn identity(order: usize) -> Self {
        let mut coefficients = vec![0.0; order + 1];
        coefficients[0] = 1.0;
        Self { coefficients, gain: 1.0 }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_stable(&self) -> bool {
        is_minimum_phase(&self.coefficients, 1.0 - STABILITY_MARGIN)
    }

    /// Roots of `A(z)` in the z-plane (the model poles).
    pub fn poles(&self) -> Vec<Complex64> {
        polynomial_roots(&self.coefficients)
    }

    /// `A(e^{j 2 pi f / fs})`.
    pub fn polynomial_response(&self, freq_hz: f64, sample_rate_hz: f64) -> Complex64 {
        let w = 2.0 * core::f64::consts::PI * freq_hz / sample_rate_hz;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &a)| Complex64::from_polar(a, -w * k as f64))
            .sum()
    }

    /// `gain^2 / |A(e^{jw})|^2`.
    pub fn power_response(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        self.gain * self.gain / self.polynomial_response(freq_hz, sample_rate_hz).norm_sqr()
    }

    /// Scales `a[k]` by `gamma^k`, moving every pole radius by `gamma`.
    pub fn expand_bandwidth(&mut self, gamma: f64) {
        let mut g = 1.0;
        for a in self.coefficients.iter_mut().skip(1) {
            g *= gamma;
            *a *= g;
        }
    }

    /// Repeats bandwidth expansion until every pole lies inside the margin.
    pub fn stabilize(&mut self) {
        let mut rounds = 0;
        while !self.is_stable() && rounds < 2000 {
            self.expand_bandwidth(BANDWIDTH_EXPANSION);
            rounds += 1;
        }
    }
}

/// `r[k] = sum_n x[n] x[n+k]` for `k = 0..=max_lag`; lags beyond the frame are zero.
pub fn autocorrelation(frame: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| {
            if k >= frame.len() {
                0.0
            } else {
                frame.iter().zip(&frame[k..]).map(|(a, b)| a * b).sum()
            }
        })
        .collect()
}

/// Solves the Toeplitz normal equations for an order-`order` predictor.
///
/// The returned model is stabilised by bandwidth expansion when a pole falls on
/// or outside `1 - STABILITY_MARGIN`. If the prediction error vanishes before the
/// requested order is reached, the remaining coefficients stay zero.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<LpcModel> {
    if order + 1 > r.len() {
        return Err(Error::InvalidConfig("LP order exceeds autocorrelation length"));
    }
    let r0 = r[0];
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::SingularAutocorrelation);
    }
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = r0;
    let mut prev = a.clone();
    for i in 1..=order {
        if err <= r0 * 1e-15 {
            break;
        }
        let acc: f64 = r[i] + (1..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / err;
        if !k.is_finite() {
            return Err(Error::SingularAutocorrelation);
        }
        prev[..i].copy_from_slice(&a[..i]);
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
    }
    let mut model = LpcModel { coefficients: a, gain: err.max(0.0).sqrt() };
    model.stabilize();
    Ok(model)
}

/// Step-down (Schur-Cohn) test: all roots of `A(z)` strictly inside radius `rho`.
pub fn is_minimum_phase(coefficients: &[f64], rho: f64) -> bool {
    // roots of sum a[k] rho^-k z^-k are the original roots divided by rho
    let mut a: Vec<f64> = coefficients
        .iter()
        .enumerate()
        .map(|(k, &c)| c * rho.powi(-(k as i32)))
        .collect();
    if a.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let mut next = a.clone();
    for p in (1..a.len()).rev() {
        let k = a[p] / a[0];
        if k.abs() >= 1.0 || !k.is_finite() {
            return false;
        }
        let denom = 1.0 - k * k;
        for j in 0..p {
            next[j] = (a[j] - k * a[p - j]) / denom;
        }
        a[..p].copy_from_slice(&next[..p]);
    }
    true
}

/// Multiplies two polynomials in `z^-1`.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Roots of `A(z) = sum a[k] z^-k` via Durand-Kerner iteration.
pub fn polynomial_roots(coefficients: &[f64]) -> Vec<Complex64> {
    let lead = coefficients[0];
    let monic: Vec<f64> = coefficients.iter().map(|c| c / lead).collect();
    let degree = monic.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let bound = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let eval = |z: Complex64| monic.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let seed = Complex64::from_polar(0.4 * bound.min(2.0), 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..500 {
        let mut shift = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if i != j {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let delta = eval(zi) / denom;
            roots[i] = zi - delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-14 {
            break;
        }
    }
    roots
}
