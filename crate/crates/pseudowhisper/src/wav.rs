//! RIFF/WAVE input and output.

use std::io::{Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use pseudowhisper_core::AudioClip;

use crate::error::{Error, Result};

fn convert_error(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(e) => Error::Io(e),
        hound::Error::Unsupported => Error::UnsupportedEncoding("codec not supported".into()),
        other => Error::MalformedContainer(other.to_string()),
    }
}

/// Reads a 16-bit PCM or 32-bit float file, averaging stereo to mono. The
/// file's sample rate is kept.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let reader = WavReader::open(path).map_err(convert_error)?;
    decode(reader)
}

pub fn read_wav_from<R: Read>(reader: R) -> Result<AudioClip> {
    decode(WavReader::new(reader).map_err(convert_error)?)
}

fn decode<R: Read>(mut reader: WavReader<R>) -> Result<AudioClip> {
    let spec = reader.spec();
    let channels = usize::from(spec.channels);
    if !(1..=2).contains(&channels) {
        return Err(Error::UnsupportedEncoding(format!("{channels} channels")));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(convert_error)?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(convert_error)?,
        (format, bits) => return Err(Error::UnsupportedEncoding(format!("{bits}-bit {format:?}"))),
    };
    if interleaved.len() < channels {
        return Err(Error::EmptyAudio);
    }
    let samples = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    Ok(AudioClip::new(samples, spec.sample_rate)?)
}

/// Writes 16-bit mono PCM. A clip peaking above full scale is scaled to a
/// peak of 0.99; the applied scale is returned.
pub fn write_wav(path: impl AsRef<Path>, clip: &AudioClip) -> Result<f64> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_wav_to(file, clip)
}

pub fn write_wav_to<W: Write + Seek>(writer: W, clip: &AudioClip) -> Result<f64> {
    if clip.is_empty() {
        return Err(Error::EmptyAudio);
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate_hz,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let scale = clip.peak_safe_scale();
    let mut w = WavWriter::new(writer, spec).map_err(convert_error)?;
    for &s in &clip.samples {
        let q = (s * scale * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        w.write_sample(q).map_err(convert_error)?;
    }
    w.finalize().map_err(convert_error)?;
    Ok(scale)
}
