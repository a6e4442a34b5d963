//! Radix-2 complex FFT with cached twiddles.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent on std toolchains, needed under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Planned FFT for one power-of-two size.
#[derive(Debug, Clone)]
pub struct Fft {
    size: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::DegenerateGrid("fft size must be a power of two"));
        }
        let bits = size.trailing_zeros();
        let bitrev = (0..size)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..size / 2)
            .map(|k| {
                let phase = -2.0 * core::f64::consts::PI * k as f64 / size as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        Ok(Self { size, twiddles, bitrev })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// In-place forward transform, X[k] = sum x[n] e^{-j 2 pi k n / N}.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// In-place inverse transform including the 1/N scale.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
        let scale = 1.0 / self.size as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.size;
        assert_eq!(buf.len(), n, "buffer length must equal the planned size");
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    /// Spectrum of a real signal zero-padded to the planned size, bins 0..=N/2.
    pub fn real_forward(&self, input: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = (0..self.size)
            .map(|i| Complex64::new(input.get(i).copied().unwrap_or(0.0), 0.0))
            .collect();
        self.forward(&mut buf);
        buf.truncate(self.size / 2 + 1);
        buf
    }

    /// Real signal from a Hermitian half spectrum (bins 0..=N/2).
    pub fn real_inverse(&self, half: &[Complex64]) -> Vec<f64> {
        let n = self.size;
        let mut buf = Vec::with_capacity(n);
        buf.extend_from_slice(&half[..n / 2 + 1]);
        for k in (1..n / 2).rev() {
            buf.push(half[k].conj());
        }
        // imaginary parts of DC and Nyquist carry no information for a real signal
        buf[0].im = 0.0;
        buf[n / 2].im = 0.0;
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}
