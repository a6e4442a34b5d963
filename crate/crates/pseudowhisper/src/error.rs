use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O failure: {0}")]
    Io(io::Error),
    #[error("not a RIFF/WAVE file: {0}")]
    MalformedContainer(String),
    #[error("unsupported encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("file contains no audio frames")]
    EmptyAudio,
    #[error(transparent)]
    Core(#[from] pseudowhisper_core::Error),
    #[error("manifest line {line}: {message}")]
    Manifest { line: u64, message: String },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("feature file: {0}")]
    FeatureFormat(&'static str),
}

// not a `source`, so that reports chaining causes do not repeat the message
impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
