use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed at cell (iq={iq}, ip={ip}): {source}")]
    Eval {
        iq: usize,
        ip: usize,
        #[source]
        source: EvalError,
    },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("field is identically zero")]
    ZeroField,
    #[error("field is not nice: {0}")]
    NotNice(String),
    #[error("resolution failure: {0}")]
    Resolution(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("Calabi measure ambiguous at tolerance: area {area} lies within {band} of 1/2")]
    Ambiguous { area: f64, band: f64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
