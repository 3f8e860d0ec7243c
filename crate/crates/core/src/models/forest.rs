use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::tree_fit_on;
use super::{child_seed, DesignMatrix, ForestHyper, ModelError, RegressionTree};

/// Bagged ensemble of regression trees.
///
/// Each tree trains on its own bootstrap resample with an rng seeded by
/// `child_seed(seed, tree_index)`, so the fit is bit-identical for a fixed
/// `(data, hyper, seed)` regardless of how tree fitting is scheduled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
    pub hyper: ForestHyper,
    pub seed: u64,
    pub feature_ids: Vec<String>,
}

impl ForestModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
        sum / self.trees.len() as f64
    }

    pub fn predict(&self, x: &DesignMatrix) -> Result<Vec<f64>, ModelError> {
        if x.cols() != self.feature_ids.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.feature_ids.len(),
                got: x.cols(),
            });
        }
        Ok((0..x.rows()).map(|i| self.predict_row(x.row(i))).collect())
    }
}

/// Trains `hyper.n_estimators` trees, each on a bootstrap resample of the
/// rows (drawn with replacement, same count). Prediction is the mean of the
/// tree predictions.
pub fn forest_fit(
    x: &DesignMatrix,
    hyper: &ForestHyper,
    seed: u64,
) -> Result<ForestModel, ModelError> {
    hyper.validate()?;
    if x.rows() < 2 {
        return Err(ModelError::EmptyData);
    }
    let rows = x.rows();
    let trees: Vec<RegressionTree> = (0..hyper.n_estimators)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, i as u64));
            let samples: Vec<usize> = (0..rows).map(|_| rng.random_range(0..rows)).collect();
            tree_fit_on(x, samples, hyper.max_depth, hyper.max_features, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    Ok(ForestModel {
        trees,
        hyper: *hyper,
        seed,
        feature_ids: x.feature_ids().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MaxFeatures;

    fn sine_design(n: usize) -> DesignMatrix {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / n as f64 * 12.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        DesignMatrix::from_columns(vec!["x".into()], &[xs], ys).unwrap()
    }

    fn hyper(n: usize, depth: usize) -> ForestHyper {
        ForestHyper {
            n_estimators: n,
            max_features: MaxFeatures::All,
            max_depth: depth,
        }
    }

    #[test]
    fn constant_target_predicts_the_constant() {
        let x = DesignMatrix::from_columns(
            vec!["a".into()],
            &[vec![1.0, 2.0, 3.0, 4.0]],
            vec![7.0; 4],
        )
        .unwrap();
        let model = forest_fit(&x, &hyper(25, 3), 1).unwrap();
        for p in model.predict(&x).unwrap() {
            assert_eq!(p, 7.0);
        }
    }

    #[test]
    fn sine_benchmark_training_r2() {
        let x = sine_design(200);
        let model = forest_fit(&x, &hyper(500, 6), 42).unwrap();
        let pred = model.predict(&x).unwrap();
        let mean = x.target().iter().sum::<f64>() / x.rows() as f64;
        let ss_res: f64 = x
            .target()
            .iter()
            .zip(&pred)
            .map(|(y, p)| (y - p) * (y - p))
            .sum();
        let ss_tot: f64 = x.target().iter().map(|y| (y - mean) * (y - mean)).sum();
        let r2 = 1.0 - ss_res / ss_tot;
        assert!(r2 > 0.95, "training R^2 = {r2}");
    }

    #[test]
    fn predictions_stay_within_target_range() {
        let x = sine_design(100);
        let model = forest_fit(&x, &hyper(50, 4), 3).unwrap();
        let lo = x.target().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.target().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for grid in 0..300 {
            let p = model.predict_row(&[grid as f64 / 25.0]);
            assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let x = sine_design(120);
        let h = ForestHyper {
            n_estimators: 64,
            max_features: MaxFeatures::Sqrt,
            max_depth: 5,
        };
        let fit_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| forest_fit(&x, &h, 9).unwrap())
        };
        let one = fit_with(1);
        let four = fit_with(4);
        let eight = fit_with(8);
        assert_eq!(one, four);
        assert_eq!(one, eight);
        let probe = [3.7];
        assert_eq!(one.predict_row(&probe).to_bits(), four.predict_row(&probe).to_bits());
        assert_eq!(one.predict_row(&probe).to_bits(), eight.predict_row(&probe).to_bits());
    }

    #[test]
    fn different_seeds_differ() {
        let x = sine_design(80);
        let a = forest_fit(&x, &hyper(20, 4), 1).unwrap();
        let b = forest_fit(&x, &hyper(20, 4), 2).unwrap();
        assert_ne!(a.trees, b.trees);
    }

    #[test]
    fn single_tree_forest_close_to_cart_on_full_sample() {
        // A one-tree forest still bootstraps, so compare loosely against the
        // plain CART fit.
        let x = sine_design(150);
        let forest = forest_fit(&x, &hyper(1, 6), 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cart = crate::models::tree_fit(&x, 6, MaxFeatures::All, &mut rng).unwrap();
        let mut close = 0;
        for i in 0..x.rows() {
            if (forest.predict_row(x.row(i)) - cart.predict_row(x.row(i))).abs() < 0.5 {
                close += 1;
            }
        }
        assert!(close as f64 > 0.8 * x.rows() as f64);
    }

    #[test]
    fn json_round_trip_preserves_predictions_bit_exactly() {
        let x = sine_design(90);
        let model = forest_fit(
            &x,
            &ForestHyper {
                n_estimators: 30,
                max_features: MaxFeatures::Fraction(0.8),
                max_depth: 5,
            },
            7,
        )
        .unwrap();
        let text = serde_json::to_string(&model).unwrap();
        let back: ForestModel = serde_json::from_str(&text).unwrap();
        for i in 0..x.rows() {
            assert_eq!(
                model.predict_row(x.row(i)).to_bits(),
                back.predict_row(x.row(i)).to_bits()
            );
        }
    }

    #[test]
    fn rejects_bad_hyper() {
        let x = sine_design(10);
        assert!(forest_fit(&x, &hyper(0, 3), 0).is_err());
        assert!(forest_fit(
            &x,
            &ForestHyper {
                n_estimators: 5,
                max_features: MaxFeatures::Fraction(1.4),
                max_depth: 3
            },
            0
        )
        .is_err());
    }
}
