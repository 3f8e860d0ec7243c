use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IoError;

/// Run configuration as stored in a JSON config file. Keys are flat and every
/// one can be overridden by the matching CLI flag (the flag wins).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub terms: Option<PathBuf>,
    pub media: Option<PathBuf>,
    pub cases: Option<PathBuf>,
    /// `iso` (default) or `sunday`.
    pub week_format: Option<String>,
    pub cluster_k: Option<usize>,
    pub clustering_start: Option<String>,
    pub clustering_end: Option<String>,
    /// `seasonal` or `wave`.
    pub protocol: Option<String>,
    pub season_boundaries: Option<Vec<String>>,
    pub wave_search_start: Option<String>,
    pub wave_search_end: Option<String>,
    /// Any of `linreg`, `rf`.
    pub models: Option<Vec<String>>,
    /// `all`, `cluster:<id>`, or `ids:<a>+<b>`.
    pub feature_sets: Option<Vec<String>>,
    /// Fixed forest hyperparameters `<n_estimators>,<max_features>,<max_depth>`;
    /// when absent the full grid search runs per training set.
    pub rf_hyper: Option<String>,
    pub rf_folds: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| IoError::BadConfig {
        path: Some(path.to_path_buf()),
        message: e.to_string(),
    })
}
