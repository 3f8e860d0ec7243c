use std::collections::BTreeSet;

use super::ModelError;

/// Row-major feature matrix with per-week targets.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    features: Vec<f64>,
    feature_ids: Vec<String>,
    target: Vec<f64>,
}

impl DesignMatrix {
    pub fn new(
        feature_ids: Vec<String>,
        features: Vec<f64>,
        target: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let cols = feature_ids.len();
        let rows = target.len();
        if rows == 0 {
            return Err(ModelError::EmptyData);
        }
        if features.len() != rows * cols {
            return Err(ModelError::LengthMismatch {
                expected: rows * cols,
                got: features.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for id in &feature_ids {
            if !seen.insert(id.clone()) {
                return Err(ModelError::DuplicateFeatureId(id.clone()));
            }
        }
        if features.iter().chain(target.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(DesignMatrix {
            rows,
            cols,
            features,
            feature_ids,
            target,
        })
    }

    /// Builds from per-feature columns of equal length.
    pub fn from_columns(
        feature_ids: Vec<String>,
        columns: &[Vec<f64>],
        target: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let rows = target.len();
        for col in columns {
            if col.len() != rows {
                return Err(ModelError::LengthMismatch {
                    expected: rows,
                    got: col.len(),
                });
            }
        }
        let mut features = Vec::with_capacity(rows * columns.len());
        for r in 0..rows {
            for col in columns {
                features.push(col[r]);
            }
        }
        Self::new(feature_ids, features, target)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.cols..(i + 1) * self.cols]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.features[row * self.cols + col]
    }

    /// New matrix holding the given rows (indices may repeat).
    pub fn select_rows(&self, indices: &[usize]) -> DesignMatrix {
        let mut features = Vec::with_capacity(indices.len() * self.cols);
        let mut target = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            target.push(self.target[i]);
        }
        DesignMatrix {
            rows: indices.len(),
            cols: self.cols,
            features,
            feature_ids: self.feature_ids.clone(),
            target,
        }
    }
}
