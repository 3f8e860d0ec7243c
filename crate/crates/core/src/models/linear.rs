use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{DesignMatrix, ModelError};
use crate::linalg::lstsq;

/// Fitted linear regression: `y = intercept + sum coefficients[j] * x[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub feature_ids: Vec<String>,
}

/// Least-squares fit with intercept.
///
/// Requires `rows > cols + 1` and a full-rank design; a rank-deficient fit
/// errors with the name of a linearly dependent column.
pub fn ols_fit(x: &DesignMatrix) -> Result<LinearModel, ModelError> {
    let (rows, cols) = (x.rows(), x.cols());
    if rows <= cols + 1 {
        return Err(ModelError::NotEnoughRows { rows, cols });
    }
    let a = DMatrix::from_fn(rows, cols + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            x.value(i, j - 1)
        }
    });
    let b = DVector::from_column_slice(x.target());
    match lstsq(&a, &b) {
        Ok(fit) => Ok(LinearModel {
            intercept: fit.coeffs[0],
            coefficients: fit.coeffs[1..].to_vec(),
            feature_ids: x.feature_ids().to_vec(),
        }),
        Err(col) => {
            let column = if col == 0 {
                "intercept".to_string()
            } else {
                x.feature_ids()[col - 1].clone()
            };
            Err(ModelError::CollinearFeatures { column })
        }
    }
}

/// Applies a fitted linear model to every row of `x`.
pub fn ols_predict(model: &LinearModel, x: &DesignMatrix) -> Result<Vec<f64>, ModelError> {
    if x.cols() != model.coefficients.len() {
        return Err(ModelError::DimensionMismatch {
            expected: model.coefficients.len(),
            got: x.cols(),
        });
    }
    Ok((0..x.rows())
        .map(|i| {
            model.intercept
                + model
                    .coefficients
                    .iter()
                    .zip(x.row(i))
                    .map(|(c, v)| c * v)
                    .sum::<f64>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn design(columns: &[Vec<f64>], target: Vec<f64>) -> DesignMatrix {
        let ids = (0..columns.len()).map(|i| format!("f{i}")).collect();
        DesignMatrix::from_columns(ids, columns, target).unwrap()
    }

    #[test]
    fn recovers_noiseless_line() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let model = ols_fit(&design(&[xs], ys)).unwrap();
        assert!((model.intercept - 1.0).abs() < 1e-10);
        assert!((model.coefficients[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_target_gives_zero_coefficients() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let model = ols_fit(&design(&[xs], vec![5.0; 5])).unwrap();
        assert!((model.intercept - 5.0).abs() < 1e-10);
        assert!(model.coefficients[0].abs() < 1e-10);
    }

    #[test]
    fn recovers_planted_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let beta = [1.5, -2.0, 0.5, 3.0, -0.75];
        let cols: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..60).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let target: Vec<f64> = (0..60)
            .map(|i| 0.25 + beta.iter().zip(&cols).map(|(b, c)| b * c[i]).sum::<f64>())
            .collect();
        let model = ols_fit(&design(&cols, target)).unwrap();
        assert!((model.intercept - 0.25).abs() < 1e-8);
        for (est, truth) in model.coefficients.iter().zip(beta) {
            assert!((est - truth).abs() < 1e-8, "{est} vs {truth}");
        }
    }

    #[test]
    fn residuals_orthogonal_to_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..50).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let target: Vec<f64> = (0..50).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = design(&cols, target);
        let model = ols_fit(&x).unwrap();
        let pred = ols_predict(&model, &x).unwrap();
        for col in &cols {
            let dot: f64 = col
                .iter()
                .zip(x.target().iter().zip(&pred))
                .map(|(c, (y, p))| c * (y - p))
                .sum();
            assert!(dot.abs() < 1e-8 * x.rows() as f64, "X'e = {dot}");
        }
    }

    #[test]
    fn names_a_dependent_column() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect(); // collinear with a
        let err = ols_fit(&design(&[a, b], vec![1.0; 6])).unwrap_err();
        match err {
            ModelError::CollinearFeatures { column } => {
                assert!(column == "f0" || column == "f1", "named '{column}'");
            }
            other => panic!("expected collinearity error, got {other}"),
        }
    }

    #[test]
    fn rejects_too_few_rows() {
        let x = design(&[vec![1.0, 2.0]], vec![1.0, 2.0]);
        assert!(matches!(
            ols_fit(&x),
            Err(ModelError::NotEnoughRows { .. })
        ));
    }

    #[test]
    fn predict_hand_model() {
        let model = LinearModel {
            intercept: 1.0,
            coefficients: vec![2.0],
            feature_ids: vec!["f0".into()],
        };
        let x = design(&[vec![3.0]], vec![0.0]);
        assert_eq!(ols_predict(&model, &x).unwrap(), vec![7.0]);
    }

    #[test]
    fn predict_checks_dimensions() {
        let model = LinearModel {
            intercept: 0.0,
            coefficients: vec![1.0, 1.0],
            feature_ids: vec!["a".into(), "b".into()],
        };
        let x = design(&[vec![1.0]], vec![0.0]);
        assert!(matches!(
            ols_predict(&model, &x),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adding_a_feature_never_raises_training_rss() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let cols: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..40).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let target: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rss = |k: usize| {
                let x = design(&cols[..k], target.clone());
                let m = ols_fit(&x).unwrap();
                let p = ols_predict(&m, &x).unwrap();
                x.target()
                    .iter()
                    .zip(p)
                    .map(|(y, yh)| (y - yh) * (y - yh))
                    .sum::<f64>()
            };
            let mut prev = rss(1);
            for k in 2..=4 {
                let cur = rss(k);
                assert!(cur <= prev * (1.0 + 1e-9) + 1e-12);
                prev = cur;
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_solution() {
        // Finite-difference gradient of the RSS must be ~0 at the fit.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..30).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let target: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = design(&cols, target);
        let model = ols_fit(&x).unwrap();

        let rss_at = |intercept: f64, coeffs: &[f64]| {
            (0..x.rows())
                .map(|i| {
                    let p = intercept
                        + coeffs.iter().zip(x.row(i)).map(|(c, v)| c * v).sum::<f64>();
                    (x.target()[i] - p) * (x.target()[i] - p)
                })
                .sum::<f64>()
        };
        let h = 1e-6;
        let g0 = (rss_at(model.intercept + h, &model.coefficients)
            - rss_at(model.intercept - h, &model.coefficients))
            / (2.0 * h);
        assert!(g0.abs() < 1e-6, "intercept gradient {g0}");
        for j in 0..3 {
            let mut up = model.coefficients.clone();
            let mut down = model.coefficients.clone();
            up[j] += h;
            down[j] -= h;
            let g = (rss_at(model.intercept, &up) - rss_at(model.intercept, &down)) / (2.0 * h);
            assert!(g.abs() < 1e-6, "coefficient {j} gradient {g}");
        }
    }

    #[test]
    fn json_round_trip_preserves_predictions() {
        let model = LinearModel {
            intercept: 0.123456789012345,
            coefficients: vec![1.0 / 3.0, -2.0 / 7.0],
            feature_ids: vec!["a".into(), "b".into()],
        };
        let text = serde_json::to_string(&model).unwrap();
        let back: LinearModel = serde_json::from_str(&text).unwrap();
        assert_eq!(model, back);
    }
}
