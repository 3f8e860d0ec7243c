//! End-to-end experiment runners (seasonal sliding window and two-wave
//! split), R^2/RMSE metrics, and the seeded synthetic-panel generator used
//! as ground truth in benchmarks.

use std::error;
use std::fmt;

mod ari;
mod features;
mod metrics;
mod runner;
mod synth;

pub use ari::adjusted_rand_index;
pub use features::{resolve_feature_set, FeatureSelector, FeatureSetSpec};
pub use metrics::{r2_score, rmse_score};
pub use runner::{
    run_seasonal_eval, run_wave_eval, summarize, EvalCell, EvalReport, EvalSummary, FittedModel,
    HyperSearch, ModelSpec,
};
pub use synth::{generate_synthetic, SynthSpec, SynthTruth};

use crate::models::ModelError;
use crate::timeseries::SeriesError;

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    LengthMismatch { actual: usize, predicted: usize },
    EmptyInput,
    ConstantActual,
    MissingCases,
    UnknownCluster(u32),
    UnknownTerm(String),
    NoClusters,
    BadSpec(String),
    LabelKeyMismatch,
    Series(SeriesError),
    Model(ModelError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { actual, predicted } => {
                write!(f, "length mismatch: {actual} actual vs {predicted} predicted")
            }
            EvalError::EmptyInput => write!(f, "empty input"),
            EvalError::ConstantActual => {
                write!(f, "constant actual values: R^2 undefined (zero variance)")
            }
            EvalError::MissingCases => write!(f, "panel has no cases series"),
            EvalError::UnknownCluster(id) => write!(f, "no cluster with id {id}"),
            EvalError::UnknownTerm(id) => write!(f, "no term '{id}' in panel"),
            EvalError::NoClusters => {
                write!(f, "cluster feature set requested but no clusters provided")
            }
            EvalError::BadSpec(msg) => write!(f, "bad specification: {msg}"),
            EvalError::LabelKeyMismatch => {
                write!(f, "label maps cover different item sets")
            }
            EvalError::Series(e) => write!(f, "{e}"),
            EvalError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl error::Error for EvalError {}

impl From<SeriesError> for EvalError {
    fn from(e: SeriesError) -> Self {
        EvalError::Series(e)
    }
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        EvalError::Model(e)
    }
}
