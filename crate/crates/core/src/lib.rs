//! Signal-processing core for converting normally phonated speech into
//! pseudo-whispered speech.
//!
//! The conversion cancels the glottal source with GFM-IAIF inverse filtering,
//! removes pitch and periodicity in a pulse/noise vocoder, and widens formant
//! bandwidths by triangular moving-average smoothing of the spectral envelope.
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in the
//! `pseudowhisper` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod audio;
pub mod error;
pub mod fft;
pub mod filter;
pub mod frame;
pub mod glottal;
pub mod lpc;
pub mod metrics;
pub mod pipeline;
pub mod pitch;
pub mod rng;
pub mod spectral;
pub mod synth;
pub mod transform;
pub mod vocoder;

pub use audio::{resample, AudioClip, PIPELINE_RATE_HZ};
pub use error::{Error, Result};
pub use frame::FrameGrid;
pub use lpc::LpcModel;
pub use spectral::FrameSpectrum;
