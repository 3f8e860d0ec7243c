//! Nowcast regressors: ordinary least squares and a seeded random-forest
//! regressor with cross-validated hyperparameter search.

use std::error;
use std::fmt;

mod design;
mod forest;
mod grid;
mod linear;
mod tree;

pub use design::DesignMatrix;
pub use forest::{forest_fit, ForestModel};
pub use grid::{grid_search_cv, CvRecord, ForestGrid};
pub use linear::{ols_fit, ols_predict, LinearModel};
pub use tree::{tree_fit, ForestHyper, MaxFeatures, RegressionTree};

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    EmptyData,
    NonFinite,
    DuplicateFeatureId(String),
    LengthMismatch { expected: usize, got: usize },
    NotEnoughRows { rows: usize, cols: usize },
    CollinearFeatures { column: String },
    DimensionMismatch { expected: usize, got: usize },
    BadHyper(String),
    TooFewRowsForFolds { rows: usize, folds: usize },
    DegenerateCv,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyData => write!(f, "empty training data"),
            ModelError::NonFinite => write!(f, "design matrix contains a non-finite value"),
            ModelError::DuplicateFeatureId(id) => write!(f, "duplicate feature id '{id}'"),
            ModelError::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            ModelError::NotEnoughRows { rows, cols } => write!(
                f,
                "not enough rows to fit: {rows} rows for {cols} features (need rows > features + 1)"
            ),
            ModelError::CollinearFeatures { column } => {
                write!(f, "collinear features: column '{column}' is linearly dependent")
            }
            ModelError::DimensionMismatch { expected, got } => {
                write!(f, "feature count mismatch: model has {expected}, input has {got}")
            }
            ModelError::BadHyper(msg) => write!(f, "bad hyperparameter: {msg}"),
            ModelError::TooFewRowsForFolds { rows, folds } => {
                write!(f, "{rows} rows cannot form {folds} cross-validation folds")
            }
            ModelError::DegenerateCv => {
                write!(f, "every cross-validation fold had a constant validation target")
            }
        }
    }
}

impl error::Error for ModelError {}

/// Deterministic per-index child seed, stable across platforms and thread
/// schedules.
pub(crate) fn child_seed(seed: u64, index: u64) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}
