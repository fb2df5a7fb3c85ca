use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("coefficient {index} requested from a series truncated at order {order}")]
    OutOfWindow { index: usize, order: usize },

    #[error("series constant term is not the unit")]
    NonUnitConstant,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid Lie bracket table: {0}")]
    InvalidLieTable(String),

    #[error("weight bound {requested} exceeds table order {available}")]
    WeightExceedsTables { requested: usize, available: usize },

    #[error("`{0}` is not a generator of the shifted subalgebra")]
    NotShiftedGenerator(String),

    #[error("symbol `{0}` cannot be evaluated here")]
    Unevaluable(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error("cache content hash mismatch (stored {stored}, computed {computed})")]
    HashMismatch { stored: String, computed: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
