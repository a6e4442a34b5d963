//! `PWF1` feature dumps.
//!
//! Layout, little endian: 16-byte header (magic `PWF1`, u16 version, u16 hop,
//! u32 frame count, u16 FFT size, u16 sample rate) followed by f32 tracks: F0
//! (one value per frame), then Sp and Ap (frame-major, FFT size / 2 + 1 bins
//! per frame).

use std::io::{Read, Write};

use pseudowhisper_core::vocoder::VocoderFeatures;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PWF1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDump {
    pub hop: u16,
    pub fft_size: u16,
    pub sample_rate_hz: u16,
    pub f0: Vec<f32>,
    pub sp: Vec<Vec<f32>>,
    pub ap: Vec<Vec<f32>>,
}

impl FeatureDump {
    pub fn from_features(features: &VocoderFeatures) -> Result<Self> {
        let narrow = |v: usize, what: &'static str| u16::try_from(v).map_err(|_| Error::FeatureFormat(what));
        let to_f32 = |rows: &[Vec<f64>]| rows.iter().map(|r| r.iter().map(|&v| v as f32).collect()).collect();
        Ok(Self {
            hop: narrow(features.grid.hop, "hop exceeds 16 bits")?,
            fft_size: narrow(features.sp.fft_size, "FFT size exceeds 16 bits")?,
            sample_rate_hz: narrow(features.grid.sample_rate_hz as usize, "sample rate exceeds 16 bits")?,
            f0: features.f0.values.iter().map(|&v| v as f32).collect(),
            sp: to_f32(&features.sp.frames),
            ap: to_f32(&features.ap.frames),
        })
    }

    pub fn num_frames(&self) -> usize {
        self.f0.len()
    }

    fn bins(&self) -> usize {
        usize::from(self.fft_size) / 2 + 1
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let frames = u32::try_from(self.num_frames()).map_err(|_| Error::FeatureFormat("too many frames"))?;
        let bins = self.bins();
        if self.sp.len() != self.num_frames()
            || self.ap.len() != self.num_frames()
            || self.sp.iter().chain(&self.ap).any(|r| r.len() != bins)
        {
            return Err(Error::FeatureFormat("track shapes disagree with header"));
        }
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.hop.to_le_bytes())?;
        w.write_all(&frames.to_le_bytes())?;
        w.write_all(&self.fft_size.to_le_bytes())?;
        w.write_all(&self.sample_rate_hz.to_le_bytes())?;
        for v in self.f0.iter().chain(self.sp.iter().flatten()).chain(self.ap.iter().flatten()) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header).map_err(|_| Error::FeatureFormat("truncated header"))?;
        if &header[..4] != MAGIC {
            return Err(Error::FeatureFormat("bad magic"));
        }
        let u16_at = |i: usize| u16::from_le_bytes([header[i], header[i + 1]]);
        if u16_at(4) != VERSION {
            return Err(Error::FeatureFormat("unsupported version"));
        }
        let hop = u16_at(6);
        let frames = u32::from_le_bytes([header[8], header[9], header[10], header[11]]) as usize;
        let fft_size = u16_at(12);
        let sample_rate_hz = u16_at(14);
        let bins = usize::from(fft_size) / 2 + 1;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != 4 * frames * (1 + 2 * bins) {
            return Err(Error::FeatureFormat("body length disagrees with header"));
        }
        let values: Vec<f32> = body.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        let (f0, rest) = values.split_at(frames);
        let (sp, ap) = rest.split_at(frames * bins);
        let rows = |x: &[f32]| x.chunks(bins).map(<[f32]>::to_vec).collect();
        Ok(Self { hop, fft_size, sample_rate_hz, f0: f0.to_vec(), sp: rows(sp), ap: rows(ap) })
    }
}
