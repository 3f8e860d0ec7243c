use serde::{Deserialize, Serialize};

use super::metrics::{r2_score, rmse_score};
use super::{EvalError, FeatureSetSpec};
use crate::models::{
    forest_fit, grid_search_cv, ols_fit, ols_predict, DesignMatrix, ForestGrid, ForestHyper,
    ForestModel, LinearModel,
};
use crate::timeseries::{
    seasons_from_boundaries, standardize, wave_split_plan, Panel, SeriesError, SplitPlan,
    WeekIndex, WeekRange, WeeklySeries,
};

/// How the random-forest hyperparameters are obtained for a training set.
#[derive(Clone, Debug)]
pub enum HyperSearch {
    Fixed(ForestHyper),
    Grid { grid: ForestGrid, folds: usize },
}

/// A model to evaluate.
#[derive(Clone, Debug)]
pub enum ModelSpec {
    Linreg,
    RandomForest(HyperSearch),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Linreg => "linreg",
            ModelSpec::RandomForest(_) => "rf",
        }
    }
}

/// A fitted model, kept for serialization and leakage checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FittedModel {
    Linreg(LinearModel),
    Rf(ForestModel),
}

impl FittedModel {
    fn predict(&self, x: &DesignMatrix) -> Result<Vec<f64>, EvalError> {
        match self {
            FittedModel::Linreg(m) => Ok(ols_predict(m, x)?),
            FittedModel::Rf(m) => Ok(m.predict(x)?),
        }
    }
}

/// Metrics and predictions for one successfully evaluated cell.
#[derive(Clone, Debug)]
pub struct EvalReport {
    pub model: String,
    pub feature_set: FeatureSetSpec,
    pub split: SplitPlan,
    pub r2: f64,
    pub rmse: f64,
    /// Predicted target over exactly the test range, on the standardized
    /// scale the model was fit on.
    pub predictions: WeeklySeries,
    /// The standardized actual target over the test range.
    pub actuals: WeeklySeries,
    pub hyper: Option<ForestHyper>,
    pub fitted: FittedModel,
}

/// One experiment cell: (model, feature set, test period). Failed cells keep
/// their error message instead of aborting the whole grid.
#[derive(Clone, Debug)]
pub struct EvalCell {
    pub model: String,
    pub feature_set: String,
    pub period: String,
    pub outcome: Result<EvalReport, String>,
}

/// Mean metrics over a cell group's successful periods.
#[derive(Clone, Debug)]
pub struct EvalSummary {
    pub model: String,
    pub feature_set: String,
    pub mean_r2: f64,
    pub mean_rmse: f64,
    pub periods: usize,
    pub failed: usize,
}

/// Standardized feature columns and target for one set of week ranges.
struct StandardizedBlock {
    columns: Vec<Vec<f64>>,
    target: Vec<f64>,
}

/// Per-season standardization: every series is standardized within each
/// range independently, then ranges are concatenated in order.
fn per_season_block(
    panel: &Panel,
    ranges: &[WeekRange],
    feature_ids: &[String],
) -> Result<StandardizedBlock, EvalError> {
    let cases = panel.cases().ok_or(EvalError::MissingCases)?;
    let mut columns = vec![Vec::new(); feature_ids.len()];
    let mut target = Vec::new();
    for range in ranges {
        for (j, id) in feature_ids.iter().enumerate() {
            let term = panel
                .term(id)
                .ok_or_else(|| EvalError::UnknownTerm(id.clone()))?;
            let std = standardize(&term.slice(range)?)?;
            columns[j].extend_from_slice(std.values());
        }
        let std_cases = standardize(&cases.slice(range)?)?;
        target.extend_from_slice(std_cases.values());
    }
    Ok(StandardizedBlock { columns, target })
}

fn train_stats(series: &WeeklySeries, range: &WeekRange) -> Result<(f64, f64), EvalError> {
    let slice = series.slice(range)?;
    let n = slice.len() as f64;
    let mean = slice.values().iter().sum::<f64>() / n;
    let sd = (slice.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        return Err(EvalError::Series(SeriesError::ZeroVariance {
            id: series.id().to_string(),
        }));
    }
    Ok((mean, sd))
}

fn apply_stats(series: &WeeklySeries, range: &WeekRange, stats: (f64, f64)) -> Result<Vec<f64>, EvalError> {
    let slice = series.slice(range)?;
    Ok(slice.values().iter().map(|v| (v - stats.0) / stats.1).collect())
}

/// Training-range standardization: statistics come from the training range
/// only and are applied to both ranges.
fn train_scaled_blocks(
    panel: &Panel,
    train: &WeekRange,
    test: &WeekRange,
    feature_ids: &[String],
) -> Result<(StandardizedBlock, StandardizedBlock), EvalError> {
    let cases = panel.cases().ok_or(EvalError::MissingCases)?;
    let mut train_cols = Vec::with_capacity(feature_ids.len());
    let mut test_cols = Vec::with_capacity(feature_ids.len());
    for id in feature_ids {
        let term = panel
            .term(id)
            .ok_or_else(|| EvalError::UnknownTerm(id.clone()))?;
        let stats = train_stats(term, train)?;
        train_cols.push(apply_stats(term, train, stats)?);
        test_cols.push(apply_stats(term, test, stats)?);
    }
    let stats = train_stats(cases, train)?;
    Ok((
        StandardizedBlock {
            columns: train_cols,
            target: apply_stats(cases, train, stats)?,
        },
        StandardizedBlock {
            columns: test_cols,
            target: apply_stats(cases, test, stats)?,
        },
    ))
}

fn fit_model(
    spec: &ModelSpec,
    train: &DesignMatrix,
    seed: u64,
) -> Result<(FittedModel, Option<ForestHyper>), EvalError> {
    match spec {
        ModelSpec::Linreg => Ok((FittedModel::Linreg(ols_fit(train)?), None)),
        ModelSpec::RandomForest(search) => {
            let hyper = match search {
                HyperSearch::Fixed(h) => *h,
                HyperSearch::Grid { grid, folds } => {
                    grid_search_cv(train, grid, *folds, seed)?.0
                }
            };
            let model = forest_fit(train, &hyper, seed)?;
            Ok((FittedModel::Rf(model), Some(hyper)))
        }
    }
}

fn eval_cell(
    panel: &Panel,
    split: &SplitPlan,
    feature_set: &FeatureSetSpec,
    model_spec: &ModelSpec,
    seed: u64,
    per_season: bool,
) -> Result<EvalReport, EvalError> {
    let (train_block, test_block) = if per_season {
        let train = per_season_block(panel, &split.train, &feature_set.resolved_ids)?;
        let test = per_season_block(
            panel,
            std::slice::from_ref(&split.test),
            &feature_set.resolved_ids,
        )?;
        (train, test)
    } else {
        let train_range = split.train[0];
        train_scaled_blocks(panel, &train_range, &split.test, &feature_set.resolved_ids)?
    };

    let train_x = DesignMatrix::from_columns(
        feature_set.resolved_ids.clone(),
        &train_block.columns,
        train_block.target,
    )?;
    let test_x = DesignMatrix::from_columns(
        feature_set.resolved_ids.clone(),
        &test_block.columns,
        test_block.target,
    )?;

    let (fitted, hyper) = fit_model(model_spec, &train_x, seed)?;
    let predicted = fitted.predict(&test_x)?;

    let r2 = r2_score(test_x.target(), &predicted)?;
    let rmse = rmse_score(test_x.target(), &predicted)?;

    let predictions = WeeklySeries::new("predicted", split.test.start, predicted)
        .map_err(EvalError::Series)?;
    let actuals = WeeklySeries::new("actual", split.test.start, test_x.target().to_vec())
        .map_err(EvalError::Series)?;
    Ok(EvalReport {
        model: model_spec.name().to_string(),
        feature_set: feature_set.clone(),
        split: split.clone(),
        r2,
        rmse,
        predictions,
        actuals,
        hyper,
        fitted,
    })
}

const TRAIN_SEASONS: usize = 3;

/// Sliding-window seasonal evaluation: for every test season, fit on the
/// three preceding seasons and predict the test season. Every series is
/// standardized within each season independently. Failed cells become error
/// rows rather than aborting the grid.
pub fn run_seasonal_eval(
    panel: &Panel,
    season_boundaries: &[WeekIndex],
    feature_sets: &[FeatureSetSpec],
    models: &[ModelSpec],
    seed: u64,
) -> Result<Vec<EvalCell>, EvalError> {
    if panel.cases().is_none() {
        return Err(EvalError::MissingCases);
    }
    let seasons = seasons_from_boundaries(season_boundaries)?;
    if seasons.len() < TRAIN_SEASONS + 1 {
        return Err(EvalError::Series(SeriesError::NotEnoughSeasons {
            have: seasons.len(),
            needed: TRAIN_SEASONS + 1,
        }));
    }
    let span = panel.span();
    for s in &seasons {
        if !span.contains_range(s) {
            return Err(EvalError::BadSpec(format!(
                "season {s} falls outside the panel span {span}"
            )));
        }
    }

    let mut cells = Vec::new();
    let mut cell_idx = 0u64;
    for model in models {
        for fs in feature_sets {
            for test_idx in TRAIN_SEASONS..seasons.len() {
                let split = SplitPlan {
                    train: seasons[test_idx - TRAIN_SEASONS..test_idx].to_vec(),
                    test: seasons[test_idx],
                };
                let cell_seed = crate::models::child_seed(seed, cell_idx);
                cell_idx += 1;
                let outcome = eval_cell(panel, &split, fs, model, cell_seed, true)
                    .map_err(|e| e.to_string());
                cells.push(EvalCell {
                    model: model.name().to_string(),
                    feature_set: fs.name.clone(),
                    period: format!("season{test_idx}"),
                    outcome,
                });
            }
        }
    }
    Ok(cells)
}

/// Two-wave evaluation: split at the minimum-case week inside `search_range`,
/// standardize everything with training-wave statistics, fit on the first
/// wave, and predict the second.
pub fn run_wave_eval(
    panel: &Panel,
    search_range: &WeekRange,
    feature_sets: &[FeatureSetSpec],
    models: &[ModelSpec],
    seed: u64,
) -> Result<Vec<EvalCell>, EvalError> {
    let cases = panel.cases().ok_or(EvalError::MissingCases)?;
    let split = wave_split_plan(cases, search_range)?;

    let mut cells = Vec::new();
    let mut cell_idx = 0u64;
    for model in models {
        for fs in feature_sets {
            let cell_seed = crate::models::child_seed(seed, cell_idx);
            cell_idx += 1;
            let outcome =
                eval_cell(panel, &split, fs, model, cell_seed, false).map_err(|e| e.to_string());
            cells.push(EvalCell {
                model: model.name().to_string(),
                feature_set: fs.name.clone(),
                period: "wave".to_string(),
                outcome,
            });
        }
    }
    Ok(cells)
}

/// Collapses cells into one mean row per (model, feature set), in first
/// appearance order.
pub fn summarize(cells: &[EvalCell]) -> Vec<EvalSummary> {
    let mut order: Vec<(String, String)> = Vec::new();
    for cell in cells {
        let key = (cell.model.clone(), cell.feature_set.clone());
        if !order.contains(&key) {
            order.push(key);
        }
    }
    order
        .into_iter()
        .map(|(model, feature_set)| {
            let group: Vec<&EvalCell> = cells
                .iter()
                .filter(|c| c.model == model && c.feature_set == feature_set)
                .collect();
            let ok: Vec<&EvalReport> =
                group.iter().filter_map(|c| c.outcome.as_ref().ok()).collect();
            let n = ok.len() as f64;
            EvalSummary {
                model,
                feature_set,
                mean_r2: ok.iter().map(|r| r.r2).sum::<f64>() / n,
                mean_rmse: ok.iter().map(|r| r.rmse).sum::<f64>() / n,
                periods: ok.len(),
                failed: group.len() - ok.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::timeseries::align_panel;

    fn w(s: &str) -> WeekIndex {
        s.parse().unwrap()
    }

    /// Six 30-week seasons; cases are a noiseless affine function of the
    /// first term series, a relation that survives per-season
    /// standardization exactly.
    fn seasonal_panel() -> (Panel, Vec<WeekIndex>) {
        let start = w("2014-W01");
        let weeks = 180;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t1: Vec<f64> = (0..weeks).map(|_| rng.random_range(0.0..100.0)).collect();
        let t2: Vec<f64> = (0..weeks).map(|_| rng.random_range(0.0..100.0)).collect();
        let cases: Vec<f64> = (0..weeks).map(|i| 3.0 * t1[i] + 50.0).collect();
        let panel = align_panel(
            vec![
                WeeklySeries::new("t1", start, t1).unwrap(),
                WeeklySeries::new("t2", start, t2).unwrap(),
            ],
            None,
            Some(WeeklySeries::new("cases", start, cases).unwrap()),
        )
        .unwrap();
        let boundaries: Vec<WeekIndex> =
            (0..=6).map(|i| start.plus_weeks(i * 30)).collect();
        (panel, boundaries)
    }

    fn all_features(panel: &Panel) -> FeatureSetSpec {
        FeatureSetSpec {
            name: "all".into(),
            resolved_ids: panel.term_ids().iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn linear_target_recovered_across_seasons() {
        let (panel, boundaries) = seasonal_panel();
        let cells = run_seasonal_eval(
            &panel,
            &boundaries,
            &[all_features(&panel)],
            &[ModelSpec::Linreg],
            0,
        )
        .unwrap();
        assert_eq!(cells.len(), 3); // test seasons 3, 4, 5
        let summary = summarize(&cells);
        assert_eq!(summary.len(), 1);
        assert!(summary[0].mean_r2 > 0.99, "mean R^2 = {}", summary[0].mean_r2);
        assert_eq!(summary[0].failed, 0);
    }

    #[test]
    fn constant_term_becomes_error_row() {
        let (panel, boundaries) = seasonal_panel();
        let with_const = {
            let mut terms = panel.terms().to_vec();
            let start = panel.span().start;
            terms.push(WeeklySeries::new("flat", start, vec![4.0; 180]).unwrap());
            align_panel(terms, None, panel.cases().cloned()).unwrap()
        };
        let fs = FeatureSetSpec {
            name: "ids:flat".into(),
            resolved_ids: vec!["flat".into()],
        };
        let cells =
            run_seasonal_eval(&with_const, &boundaries, &[fs], &[ModelSpec::Linreg], 0).unwrap();
        for cell in &cells {
            let err = cell.outcome.as_ref().unwrap_err();
            assert!(err.contains("zero variance"), "got '{err}'");
        }
    }

    #[test]
    fn fitted_parameters_ignore_test_season_values() {
        let (panel, boundaries) = seasonal_panel();
        // Corrupt the final test season's values (features and target).
        let corrupted = {
            let start = panel.span().start;
            let tamper = |s: &WeeklySeries| {
                let mut v = s.values().to_vec();
                for (i, item) in v.iter_mut().enumerate().skip(150) {
                    *item = (i as f64 * 37.0) % 91.0 + 1.0;
                }
                WeeklySeries::new(s.id(), start, v).unwrap()
            };
            let terms = panel.terms().iter().map(&tamper).collect();
            align_panel(terms, None, panel.cases().map(&tamper)).unwrap()
        };
        let run = |p: &Panel| {
            let cells = run_seasonal_eval(
                p,
                &boundaries,
                &[all_features(p)],
                &[ModelSpec::Linreg],
                0,
            )
            .unwrap();
            // Final cell tests season 5 (weeks 150..180).
            match &cells.last().unwrap().outcome {
                Ok(report) => match &report.fitted {
                    FittedModel::Linreg(m) => m.clone(),
                    _ => unreachable!(),
                },
                Err(e) => panic!("cell failed: {e}"),
            }
        };
        let clean_fit = run(&panel);
        let corrupted_fit = run(&corrupted);
        assert_eq!(clean_fit, corrupted_fit);
    }

    /// Two-wave panel where terms track cases exactly (plus noise).
    fn wave_panel(noise: f64, seed: u64) -> Panel {
        let start = w("2020-W01");
        let weeks = 100usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cases: Vec<f64> = (0..weeks)
            .map(|t| {
                let t = t as f64;
                600.0 * (-((t - 25.0) / 6.0).powi(2)).exp()
                    + 900.0 * (-((t - 70.0) / 8.0).powi(2)).exp()
            })
            .collect();
        let terms = (0..4)
            .map(|i| {
                let a = 0.5 + 0.25 * i as f64;
                let values: Vec<f64> = cases
                    .iter()
                    .map(|c| a * c + noise * rng.random_range(-1.0..1.0))
                    .collect();
                WeeklySeries::new(format!("t{i}"), start, values).unwrap()
            })
            .collect();
        align_panel(
            terms,
            None,
            Some(WeeklySeries::new("cases", start, cases).unwrap()),
        )
        .unwrap()
    }

    fn mid_range(panel: &Panel) -> WeekRange {
        let start = panel.span().start;
        WeekRange::new(start.plus_weeks(39), start.plus_weeks(54)).unwrap()
    }

    #[test]
    fn wave_eval_predicts_second_wave() {
        let panel = wave_panel(5.0, 1);
        let range = mid_range(&panel);
        let cells = run_wave_eval(
            &panel,
            &range,
            &[all_features(&panel)],
            &[ModelSpec::Linreg],
            0,
        )
        .unwrap();
        assert_eq!(cells.len(), 1);
        let report = cells[0].outcome.as_ref().unwrap();
        assert!(report.r2 > 0.95, "R^2 = {}", report.r2);
        assert_eq!(report.predictions.start(), report.split.test.start);
        assert_eq!(report.predictions.len(), report.split.test.len());
    }

    #[test]
    fn wave_eval_grid_cardinality() {
        let panel = wave_panel(5.0, 2);
        let range = mid_range(&panel);
        let fixed = HyperSearch::Fixed(ForestHyper {
            n_estimators: 20,
            max_features: crate::models::MaxFeatures::All,
            max_depth: 3,
        });
        let fs_all = all_features(&panel);
        let fs_one = FeatureSetSpec {
            name: "ids:t0".into(),
            resolved_ids: vec!["t0".into()],
        };
        let fs_two = FeatureSetSpec {
            name: "ids:t1".into(),
            resolved_ids: vec!["t1".into()],
        };
        let cells = run_wave_eval(
            &panel,
            &range,
            &[fs_all, fs_one, fs_two],
            &[ModelSpec::Linreg, ModelSpec::RandomForest(fixed)],
            0,
        )
        .unwrap();
        assert_eq!(cells.len(), 6); // 2 models x 3 feature sets
    }
}
