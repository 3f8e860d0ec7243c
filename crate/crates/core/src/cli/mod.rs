//! Command implementations behind the `trendcast` binary. Kept in the
//! library so integration tests and other front-ends can drive them
//! directly.

use std::error;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clustering::{
    cluster_profiles, cut_dendrogram, dendrogram_json, dendrogram_newick, euclidean_distances,
    ward_linkage, ClusterMembers, ClusterProfile,
};
use crate::eval::{
    generate_synthetic, resolve_feature_set, run_seasonal_eval, run_wave_eval, summarize,
    EvalCell, FeatureSelector, FeatureSetSpec, HyperSearch, ModelSpec, SynthSpec,
};
use crate::io::{
    driver_rows, eval_rows, load_config, parse_single_series_csv, parse_terms_csv,
    write_driver_report_csv, write_driver_report_json, write_eval_report_csv,
    write_eval_report_json, write_predictions_csv, write_terms_csv, RunConfig, WeekFormat,
};
use crate::models::{ForestGrid, ForestHyper, MaxFeatures};
use crate::stats::cluster_driver_report_partial;
use crate::timeseries::{align_panel, rescale_0_100, Panel, WeekIndex, WeekRange};

/// Configuration or input problem: the command cannot run. Maps to exit
/// code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl error::Error for CliError {}

macro_rules! cli_error_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError(e.to_string())
            }
        }
    )*};
}

cli_error_from!(
    crate::io::IoError,
    crate::timeseries::SeriesError,
    crate::clustering::ClusterError,
    crate::stats::StatsError,
    crate::eval::EvalError,
    crate::models::ModelError
);

/// Cell counts from a nowcast run; failed > 0 maps to exit code 1.
#[derive(Clone, Copy, Debug)]
pub struct RunStats {
    pub total_cells: usize,
    pub failed_cells: usize,
}

/// `clusters.json` artifact produced by `cluster` and consumed by the other
/// commands.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClustersArtifact {
    pub k: usize,
    pub clusters: Vec<ClusterMembers>,
}

pub fn merge_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn week_format(cfg: &RunConfig) -> Result<WeekFormat, CliError> {
    cfg.week_format
        .as_deref()
        .unwrap_or("iso")
        .parse()
        .map_err(CliError)
}

fn parse_week(label: &str, what: &str) -> Result<WeekIndex, CliError> {
    label
        .parse()
        .map_err(|_| CliError(format!("{what}: bad week label '{label}' (expected YYYY-Www)")))
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError(format!("cannot create output directory {}: {e}", dir.display())))
}

fn load_panel(cfg: &RunConfig) -> Result<Panel, CliError> {
    let fmt = week_format(cfg)?;
    let terms_path = cfg
        .terms
        .as_ref()
        .ok_or_else(|| CliError("no terms CSV given (use --terms or the config file)".into()))?;
    let terms = parse_terms_csv(terms_path, fmt)?;
    let media = cfg
        .media
        .as_ref()
        .map(|p| parse_single_series_csv(p, fmt))
        .transpose()?;
    let cases = cfg
        .cases
        .as_ref()
        .map(|p| parse_single_series_csv(p, fmt))
        .transpose()?;
    Ok(align_panel(terms, media, cases)?)
}

fn clustering_range(cfg: &RunConfig, panel: &Panel) -> Result<WeekRange, CliError> {
    let span = panel.span();
    let start = match &cfg.clustering_start {
        Some(s) => parse_week(s, "clustering_start")?,
        None => span.start,
    };
    let end = match &cfg.clustering_end {
        Some(s) => parse_week(s, "clustering_end")?,
        None => span.end,
    };
    Ok(WeekRange::new(start, end)?)
}

/// Panel restricted to the clustering range with every term rescaled to
/// 0-100. Returns the ids of degenerate (constant) terms.
fn clustering_panel(cfg: &RunConfig) -> Result<(Panel, Vec<String>), CliError> {
    let panel = load_panel(cfg)?;
    let range = clustering_range(cfg, &panel)?;
    let panel = panel.slice(&range)?;
    let mut degenerate = Vec::new();
    let mut rescaled = Vec::new();
    for term in panel.terms() {
        let (series, flag) = rescale_0_100(term)?;
        if flag {
            degenerate.push(term.id().to_string());
        }
        rescaled.push(series);
    }
    Ok((panel.with_terms(rescaled)?, degenerate))
}

fn profiles_from_artifact(
    panel: &Panel,
    artifact: &ClustersArtifact,
) -> Result<Vec<ClusterProfile>, CliError> {
    Ok(cluster_profiles(panel, &artifact.clusters)?)
}

fn read_clusters(out: &Path) -> Result<ClustersArtifact, CliError> {
    let path = out.join("clusters.json");
    if !path.exists() {
        return Err(CliError(format!(
            "missing artifact {}: run `trendcast cluster` first",
            path.display()
        )));
    }
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError(format!("bad clusters artifact {}: {e}", path.display())))
}

/// Generates a synthetic dataset and writes `terms.csv`, `media.csv`,
/// `cases.csv`, and `truth.json` into the output directory.
pub fn cmd_synth(spec: &SynthSpec, out: &Path) -> Result<(), CliError> {
    let (panel, truth) = generate_synthetic(spec)?;
    ensure_dir(out)?;
    let term_refs: Vec<_> = panel.terms().iter().collect();
    write_terms_csv(&out.join("terms.csv"), &term_refs)?;
    write_terms_csv(&out.join("media.csv"), &[panel.media().expect("synthetic media")])?;
    write_terms_csv(&out.join("cases.csv"), &[panel.cases().expect("synthetic cases")])?;
    let truth_text = serde_json::to_string_pretty(&truth).expect("truth serializes");
    fs::write(out.join("truth.json"), truth_text)
        .map_err(|e| CliError(format!("cannot write truth.json: {e}")))?;
    Ok(())
}

/// Rescales terms over the clustering range, clusters them, cuts the tree,
/// and writes `dendrogram.json`, `dendrogram.nwk`, `clusters.json`, and
/// `centroids.csv`. Degenerate (constant) terms are reported on stderr as
/// removal candidates.
pub fn cmd_cluster(cfg: &RunConfig) -> Result<(), CliError> {
    let k = cfg.cluster_k.unwrap_or(3);
    let (panel, degenerate) = clustering_panel(cfg)?;
    for id in &degenerate {
        eprintln!("warning: term '{id}' is constant over the clustering range (rescaled to zeros); consider removing it");
    }

    let distances = euclidean_distances(&panel)?;
    let dendro = ward_linkage(&distances)?;
    let clusters = cut_dendrogram(&dendro, k)?;
    let profiles = cluster_profiles(&panel, &clusters)?;

    let out = out_dir(cfg);
    ensure_dir(&out)?;
    fs::write(
        out.join("dendrogram.json"),
        serde_json::to_string_pretty(&dendrogram_json(&dendro)).expect("serializes"),
    )
    .map_err(|e| CliError(format!("cannot write dendrogram.json: {e}")))?;
    fs::write(out.join("dendrogram.nwk"), dendrogram_newick(&dendro))
        .map_err(|e| CliError(format!("cannot write dendrogram.nwk: {e}")))?;
    let artifact = ClustersArtifact { k, clusters };
    fs::write(
        out.join("clusters.json"),
        serde_json::to_string_pretty(&artifact).expect("serializes"),
    )
    .map_err(|e| CliError(format!("cannot write clusters.json: {e}")))?;

    let mut profile_series = Vec::new();
    for p in &profiles {
        profile_series.push(&p.centroid);
        profile_series.push(&p.dispersion);
    }
    write_terms_csv(&out.join("centroids.csv"), &profile_series)?;
    Ok(())
}

/// Correlation (and optionally Granger) table of every cluster centroid
/// against cases and media, written to `driver_report.csv`/`.json` with the
/// selected disease cluster marked.
pub fn cmd_driver(cfg: &RunConfig, with_granger: bool) -> Result<(), CliError> {
    let out = out_dir(cfg);
    let artifact = read_clusters(&out)?;
    let (panel, _) = clustering_panel(cfg)?;

    if panel.cases().is_none() && panel.media().is_none() {
        return Err(CliError(
            "neither cases nor media series given; nothing to correlate against".into(),
        ));
    }
    if panel.cases().is_none() {
        eprintln!("warning: no cases series; skipping cases columns and disease-cluster selection");
    }
    if panel.media().is_none() {
        eprintln!("warning: no media series; skipping media columns");
    }

    let profiles = profiles_from_artifact(&panel, &artifact)?;
    let report = cluster_driver_report_partial(&panel, &profiles, with_granger)?;
    let rows = driver_rows(&report);

    ensure_dir(&out)?;
    write_driver_report_csv(&out.join("driver_report.csv"), &rows)?;
    write_driver_report_json(&out.join("driver_report.json"), &rows)?;
    Ok(())
}

fn parse_models(cfg: &RunConfig) -> Result<Vec<ModelSpec>, CliError> {
    let names = cfg
        .models
        .clone()
        .unwrap_or_else(|| vec!["linreg".to_string(), "rf".to_string()]);
    let rf_search = match &cfg.rf_hyper {
        Some(text) => HyperSearch::Fixed(parse_rf_hyper(text)?),
        None => HyperSearch::Grid {
            grid: ForestGrid::default(),
            folds: cfg.rf_folds.unwrap_or(5),
        },
    };
    names
        .iter()
        .map(|name| match name.as_str() {
            "linreg" => Ok(ModelSpec::Linreg),
            "rf" => Ok(ModelSpec::RandomForest(rf_search.clone())),
            other => Err(CliError(format!("unknown model '{other}' (use linreg or rf)"))),
        })
        .collect()
}

/// Parses `<n_estimators>,<max_features>,<max_depth>`, e.g. `200,sqrt,4`.
fn parse_rf_hyper(text: &str) -> Result<ForestHyper, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError(format!(
            "rf_hyper '{text}' must be <n_estimators>,<max_features>,<max_depth>"
        )));
    }
    let n_estimators: usize = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError(format!("bad n_estimators '{}'", parts[0])))?;
    let max_features: MaxFeatures = parts[1].trim().parse()?;
    let max_depth: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError(format!("bad max_depth '{}'", parts[2])))?;
    let hyper = ForestHyper {
        n_estimators,
        max_features,
        max_depth,
    };
    hyper.validate()?;
    Ok(hyper)
}

fn parse_feature_sets(
    cfg: &RunConfig,
    panel: &Panel,
    out: &Path,
) -> Result<Vec<FeatureSetSpec>, CliError> {
    let names = cfg
        .feature_sets
        .clone()
        .unwrap_or_else(|| vec!["all".to_string()]);
    let selectors: Vec<FeatureSelector> = names
        .iter()
        .map(|n| n.parse().map_err(|e| CliError(format!("{e}"))))
        .collect::<Result<_, _>>()?;
    let clusters = if selectors
        .iter()
        .any(|s| matches!(s, FeatureSelector::Cluster(_)))
    {
        Some(read_clusters(out)?.clusters)
    } else {
        None
    };
    selectors
        .iter()
        .map(|s| Ok(resolve_feature_set(s, panel, clusters.as_deref())?))
        .collect()
}

fn slug(text: &str) -> String {
    text.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Runs the configured evaluation protocol for every (model, feature set)
/// and writes `eval_report.csv`/`.json`, per-cell predictions, and fitted
/// models. Cell failures become error rows; all files are written only after
/// the whole grid has been computed.
pub fn cmd_nowcast(cfg: &RunConfig) -> Result<RunStats, CliError> {
    let panel = load_panel(cfg)?;
    if panel.cases().is_none() {
        return Err(CliError("nowcast needs a cases series (use --cases)".into()));
    }
    let out = out_dir(cfg);
    let feature_sets = parse_feature_sets(cfg, &panel, &out)?;
    let models = parse_models(cfg)?;
    let seed = cfg.seed.unwrap_or(0);

    let protocol = cfg
        .protocol
        .as_deref()
        .ok_or_else(|| CliError("no protocol given (use --protocol seasonal|wave)".into()))?;
    let (cells, summaries): (Vec<EvalCell>, _) = match protocol {
        "seasonal" => {
            let labels = cfg.season_boundaries.as_ref().ok_or_else(|| {
                CliError("seasonal protocol needs --season-boundaries".into())
            })?;
            let boundaries: Vec<WeekIndex> = labels
                .iter()
                .map(|l| parse_week(l, "season boundary"))
                .collect::<Result<_, _>>()?;
            let cells =
                run_seasonal_eval(&panel, &boundaries, &feature_sets, &models, seed)?;
            let summaries = summarize(&cells);
            (cells, Some(summaries))
        }
        "wave" => {
            let start = cfg.wave_search_start.as_ref().ok_or_else(|| {
                CliError("wave protocol needs --wave-search-start".into())
            })?;
            let end = cfg
                .wave_search_end
                .as_ref()
                .ok_or_else(|| CliError("wave protocol needs --wave-search-end".into()))?;
            let range = WeekRange::new(
                parse_week(start, "wave_search_start")?,
                parse_week(end, "wave_search_end")?,
            )?;
            let cells = run_wave_eval(&panel, &range, &feature_sets, &models, seed)?;
            (cells, None)
        }
        other => {
            return Err(CliError(format!(
                "unknown protocol '{other}' (use seasonal or wave)"
            )))
        }
    };

    ensure_dir(&out)?;
    let rows = eval_rows(&cells, summaries.as_deref());
    write_eval_report_csv(&out.join("eval_report.csv"), &rows)?;
    write_eval_report_json(&out.join("eval_report.json"), &rows)?;

    let predictions_dir = out.join("predictions");
    let models_dir = out.join("models");
    ensure_dir(&predictions_dir)?;
    ensure_dir(&models_dir)?;
    let mut failed = 0usize;
    for cell in &cells {
        match &cell.outcome {
            Ok(report) => {
                let stem = format!(
                    "{}_{}_{}",
                    slug(&cell.model),
                    slug(&cell.feature_set),
                    slug(&cell.period)
                );
                write_predictions_csv(
                    &predictions_dir.join(format!("{stem}.csv")),
                    &report.actuals,
                    &report.predictions,
                )?;
                fs::write(
                    models_dir.join(format!("{stem}.json")),
                    serde_json::to_string(&report.fitted).expect("model serializes"),
                )
                .map_err(|e| CliError(format!("cannot write model json: {e}")))?;
            }
            Err(message) => {
                failed += 1;
                eprintln!(
                    "warning: cell ({}, {}, {}) failed: {message}",
                    cell.model, cell.feature_set, cell.period
                );
            }
        }
    }
    Ok(RunStats {
        total_cells: cells.len(),
        failed_cells: failed,
    })
}
