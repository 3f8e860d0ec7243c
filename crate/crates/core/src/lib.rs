//! Separates media-driven from disease-driven online search signals and
//! nowcasts epidemic case counts.
//!
//! The pipeline: rescale weekly search-term series to 0-100, cluster them
//! hierarchically (Euclidean distance, Ward linkage), identify the cluster
//! whose centroid tracks confirmed cases rather than media coverage
//! (Pearson correlation plus a Granger-precedence test), and feed that
//! cluster's terms into a linear or random-forest nowcast model evaluated on
//! held-out seasons or a held-out epidemic wave.
//!
//! Modules follow the pipeline stages:
//!
//! * [`timeseries`] - week-indexed series, panels, preprocessing transforms,
//!   and train/test split plans.
//! * [`clustering`] - distance matrix, Ward linkage, dendrogram cutting and
//!   export, cluster profiles.
//! * [`stats`] - correlation with significance stars, lag selection, Granger
//!   tests, and the per-cluster driver report.
//! * [`models`] - ordinary least squares and the seeded random-forest
//!   regressor with grid-search cross-validation.
//! * [`eval`] - R^2/RMSE metrics, experiment runners, and the synthetic
//!   benchmark generator.
//! * [`io`] / [`cli`] - file formats, run configuration, and the
//!   subcommands behind the `trendcast` binary.

pub mod cli;
pub mod clustering;
pub mod eval;
pub mod io;
mod linalg;
pub mod models;
pub mod stats;
pub mod timeseries;
