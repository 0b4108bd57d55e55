use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::manifest::SourceTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One rejected line of a labels file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn join_lines(errors: &[LineError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid plate label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("font lacks glyph {glyph:?} (U+{:04X})", *glyph as u32)]
    MissingGlyph { glyph: char },

    #[error("cannot load font {path}: {reason}")]
    FontLoad { path: PathBuf, reason: String },

    #[error("invalid render spec: {0}")]
    InvalidRenderSpec(String),

    #[error("{op}: parameter {name} = {value} outside {range}")]
    ParamOutOfRange {
        op: &'static str,
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("expected a {expected}-channel image, got {actual} channels")]
    WrongChannelCount { expected: u8, actual: u8 },

    #[error("invalid image buffer: {0}")]
    InvalidImage(String),

    #[error("cannot decode image {path}: {reason}")]
    ImageDecode { path: PathBuf, reason: String },

    #[error("label errors in {path}: {}", join_lines(errors))]
    LabelParse {
        path: PathBuf,
        errors: Vec<LineError>,
    },

    #[error("manifest {path} line {line}: {reason}")]
    ManifestParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("requested {requested} records but only {available} are available")]
    NotEnoughRecords { requested: usize, available: usize },

    #[error("pool for source {tag} has {available} records, recipe needs {requested}")]
    PoolTooSmall {
        tag: SourceTag,
        requested: usize,
        available: usize,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("ground truth {truth:?} has {len} glyphs, expected 7")]
    BadTruthLength { truth: String, len: usize },

    #[error("no prediction for manifest id {0:?}")]
    MissingPrediction(String),

    #[error("duplicate prediction for id {0:?}")]
    DuplicatePrediction(String),

    #[error("prediction for unknown id {0:?}")]
    UnknownPrediction(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for failures caused by the caller's inputs rather than by the
    /// environment. Input problems can be fixed by changing arguments, config
    /// or data files; everything else is an I/O fault.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
