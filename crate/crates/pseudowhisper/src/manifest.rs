//! Tab-separated batch manifests: `input<TAB>output[<TAB>mode[<TAB>factor]]`,
//! with `#` comment lines.

use std::path::{Path, PathBuf};

use pseudowhisper_core::pipeline::Mode;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub input: PathBuf,
    pub output: PathBuf,
    pub mode: Option<Mode>,
    pub speed: Option<f64>,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let fail = |message: String| Error::Manifest { line, message };
        if raw.trim_start().starts_with('#') || raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if !(2..=4).contains(&fields.len()) {
            return Err(fail(format!("expected 2 to 4 tab-separated fields, found {}", fields.len())));
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(fail("input and output paths must be non-empty".into()));
        }
        let mode = match fields.get(2).filter(|m| !m.is_empty()) {
            Some(m) => Some(m.parse::<Mode>().map_err(|e| fail(e.to_string()))?),
            None => None,
        };
        let speed = match fields.get(3).filter(|f| !f.is_empty()) {
            Some(f) => {
                let v: f64 = f.parse().map_err(|_| fail(format!("bad speed factor {f:?}")))?;
                if !(0.5..=2.0).contains(&v) {
                    return Err(fail(format!("speed factor {v} outside [0.5, 2.0]")));
                }
                Some(v)
            }
            None => None,
        };
        entries.push(ManifestEntry { input: fields[0].into(), output: fields[1].into(), mode, speed });
    }
    Ok(entries)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    parse_manifest(&std::fs::read_to_string(path)?)
}
