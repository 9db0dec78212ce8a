use thiserror::Error;

use crate::model::ModelError;
use crate::scenario::ScenarioError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("network term, line {}, column {}: {}", .0.line, .0.col, .0.kind)]
    Network(awn::ParseError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] awn::EvalError),
    #[error("CTL property: {0}")]
    Ctl(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
