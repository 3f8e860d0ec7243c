use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{child_seed, forest_fit, DesignMatrix, ForestHyper, MaxFeatures, ModelError};

/// Candidate hyperparameter values, evaluated as a full cartesian product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForestGrid {
    pub n_estimators: Vec<usize>,
    pub max_features: Vec<MaxFeatures>,
    pub max_depth: Vec<usize>,
}

impl Default for ForestGrid {
    /// The full 7 x 4 x 4 search grid.
    fn default() -> Self {
        ForestGrid {
            n_estimators: vec![10, 20, 50, 100, 200, 500, 1000],
            max_features: vec![
                MaxFeatures::Fraction(0.6),
                MaxFeatures::Fraction(0.8),
                MaxFeatures::All,
                MaxFeatures::Sqrt,
            ],
            max_depth: vec![2, 4, 5, 6],
        }
    }
}

impl ForestGrid {
    fn combos(&self) -> Vec<ForestHyper> {
        let mut out = Vec::new();
        for &n in &self.n_estimators {
            for &mf in &self.max_features {
                for &d in &self.max_depth {
                    out.push(ForestHyper {
                        n_estimators: n,
                        max_features: mf,
                        max_depth: d,
                    });
                }
            }
        }
        out
    }
}

/// One evaluated grid point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvRecord {
    pub hyper: ForestHyper,
    /// Mean validation R^2 over usable folds; NaN when every fold had a
    /// constant validation target.
    pub mean_r2: f64,
    pub folds_used: usize,
}

fn fold_ranges(rows: usize, folds: usize) -> Vec<(usize, usize)> {
    (0..folds)
        .map(|i| (i * rows / folds, (i + 1) * rows / folds))
        .collect()
}

fn validation_r2(actual: &[f64], predicted: &[f64]) -> Option<f64> {
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return None;
    }
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Some(1.0 - ss_res / ss_tot)
}

/// Scores every grid combination by k-fold cross-validation with contiguous
/// blocks over the (time-ordered) rows and returns the best hyperparameters
/// plus the full table.
///
/// Scores are mean validation R^2; ties keep the first combination in grid
/// enumeration order (`n_estimators`, then `max_features`, then `max_depth`).
pub fn grid_search_cv(
    x: &DesignMatrix,
    grid: &ForestGrid,
    folds: usize,
    seed: u64,
) -> Result<(ForestHyper, Vec<CvRecord>), ModelError> {
    if folds < 2 {
        return Err(ModelError::BadHyper("need at least 2 folds".into()));
    }
    if x.rows() < folds {
        return Err(ModelError::TooFewRowsForFolds {
            rows: x.rows(),
            folds,
        });
    }
    let combos = grid.combos();
    if combos.is_empty() {
        return Err(ModelError::BadHyper("empty hyperparameter grid".into()));
    }
    let ranges = fold_ranges(x.rows(), folds);

    let records: Vec<CvRecord> = combos
        .par_iter()
        .enumerate()
        .map(|(ci, hyper)| -> Result<CvRecord, ModelError> {
            hyper.validate()?;
            let mut scores = Vec::with_capacity(folds);
            for (fi, &(lo, hi)) in ranges.iter().enumerate() {
                let train_idx: Vec<usize> =
                    (0..x.rows()).filter(|i| *i < lo || *i >= hi).collect();
                let val_idx: Vec<usize> = (lo..hi).collect();
                if train_idx.len() < 2 || val_idx.is_empty() {
                    continue;
                }
                let train = x.select_rows(&train_idx);
                let val = x.select_rows(&val_idx);
                let model = forest_fit(
                    &train,
                    hyper,
                    child_seed(seed, (ci * folds + fi) as u64),
                )?;
                let pred = model.predict(&val)?;
                if let Some(r2) = validation_r2(val.target(), &pred) {
                    scores.push(r2);
                }
            }
            let mean_r2 = if scores.is_empty() {
                f64::NAN
            } else {
                scores.iter().sum::<f64>() / scores.len() as f64
            };
            Ok(CvRecord {
                hyper: *hyper,
                mean_r2,
                folds_used: scores.len(),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut best: Option<&CvRecord> = None;
    for rec in &records {
        if rec.mean_r2.is_nan() {
            continue;
        }
        if best.map_or(true, |b| rec.mean_r2 > b.mean_r2) {
            best = Some(rec);
        }
    }
    let best = best.ok_or(ModelError::DegenerateCv)?;
    Ok((best.hyper, records))
}
