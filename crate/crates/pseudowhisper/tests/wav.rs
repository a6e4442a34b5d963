use std::io::Cursor;

use hound::{SampleFormat, WavSpec, WavWriter};
use pseudowhisper::wav::*;
use pseudowhisper::Error;
use pseudowhisper_core::AudioClip;

fn encode<T: hound::Sample + Copy>(spec: WavSpec, samples: &[T]) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::new());
    let mut w = WavWriter::new(&mut buf, spec).unwrap();
    for &s in samples {
        w.write_sample(s).unwrap();
    }
    w.finalize().unwrap();
    buf.into_inner()
}

fn int16(channels: u16, rate: u32) -> WavSpec {
    WavSpec { channels, sample_rate: rate, bits_per_sample: 16, sample_format: SampleFormat::Int }
}

fn float32(channels: u16) -> WavSpec {
    WavSpec { channels, sample_rate: 16_000, bits_per_sample: 32, sample_format: SampleFormat::Float }
}

#[test]
fn full_scale_sample() {
    let clip = read_wav_from(Cursor::new(encode(int16(1, 22_050), &[0x7FFFi16]))).unwrap();
    assert_eq!(clip.sample_rate_hz, 22_050);
    assert_eq!(clip.samples, vec![32767.0 / 32768.0]);
}

#[test]
fn stereo_is_averaged() {
    let clip = read_wav_from(Cursor::new(encode(float32(2), &[1.0f32, -1.0, 0.5, 0.25]))).unwrap();
    assert_eq!(clip.samples, vec![0.0, 0.375]);
    let clip = read_wav_from(Cursor::new(encode(int16(2, 8000), &[16384i16, 0]))).unwrap();
    assert_eq!(clip.samples, vec![0.25]);
}

#[test]
fn length_follows_rate_and_duration() {
    let bytes = encode(int16(1, 44_100), &vec![0i16; 3 * 44_100]);
    let clip = read_wav_from(Cursor::new(bytes)).unwrap();
    assert_eq!((clip.len(), clip.sample_rate_hz), (132_300, 44_100));
}

#[test]
fn rejects_bad_inputs() {
    assert!(matches!(read_wav_from(Cursor::new(b"not a wave file at all, just text".to_vec())), Err(Error::MalformedContainer(_))));
    assert!(matches!(read_wav_from(Cursor::new(encode(int16(1, 8000), &[] as &[i16]))), Err(Error::EmptyAudio)));
    let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 24, sample_format: SampleFormat::Int };
    assert!(matches!(read_wav_from(Cursor::new(encode(spec, &[1i32]))), Err(Error::UnsupportedEncoding(_))));
    assert!(matches!(read_wav_from(Cursor::new(encode(int16(3, 8000), &[1i16, 2, 3]))), Err(Error::UnsupportedEncoding(_))));
    assert!(matches!(read_wav("/definitely/not/here.wav"), Err(Error::Io(_))));
}

#[test]
fn compressed_codec_is_unsupported() {
    // minimal RIFF with an MPEG Layer 3 format tag (0x0055)
    let mut b = Vec::new();
    b.extend_from_slice(b"RIFF");
    b.extend_from_slice(&(4u32 + 8 + 16 + 8 + 4).to_le_bytes());
    b.extend_from_slice(b"WAVEfmt ");
    b.extend_from_slice(&16u32.to_le_bytes());
    for v in [0x0055u16, 1] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b.extend_from_slice(&8000u32.to_le_bytes());
    b.extend_from_slice(&8000u32.to_le_bytes());
    for v in [1u16, 8] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b.extend_from_slice(b"data");
    b.extend_from_slice(&4u32.to_le_bytes());
    b.extend_from_slice(&[0, 0, 0, 0]);
    let r = read_wav_from(Cursor::new(b));
    assert!(matches!(r, Err(Error::UnsupportedEncoding(_))), "{r:?}");
}

fn written(clip: &AudioClip) -> (f64, AudioClip, Vec<u8>) {
    let mut buf = Cursor::new(Vec::new());
    let scale = write_wav_to(&mut buf, clip).unwrap();
    let bytes = buf.into_inner();
    (scale, read_wav_from(Cursor::new(bytes.clone())).unwrap(), bytes)
}

#[test]
fn zeros_write_zero_payload() {
    let (scale, back, bytes) = written(&AudioClip::new(vec![0.0; 100], 16_000).unwrap());
    assert_eq!(scale, 1.0);
    assert!(back.samples.iter().all(|&v| v == 0.0));
    assert!(bytes[bytes.len() - 200..].iter().all(|&b| b == 0));
}

#[test]
fn loud_clips_are_rescaled() {
    let (scale, back, _) = written(&AudioClip::new(vec![0.1, -2.0, 1.5], 16_000).unwrap());
    assert!((scale - 0.495).abs() < 1e-12);
    assert!((back.peak() - 0.99).abs() < 1.0 / 32768.0);
}

#[test]
fn round_trip_within_one_step() {
    let x: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.0123).sin() * 0.999).collect();
    let clip = AudioClip::new(x, 16_000).unwrap();
    let (_, back, _) = written(&clip);
    assert_eq!(back.len(), clip.len());
    for (a, b) in clip.samples.iter().zip(&back.samples) {
        assert!((a - b).abs() <= 1.0 / 32768.0);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.wav");
    write_wav(&path, &clip).unwrap();
    assert_eq!(read_wav(&path).unwrap(), back);
}
