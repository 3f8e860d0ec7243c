//! File formats (weekly CSVs, report tables, run configuration) shared by
//! the CLI and library callers.

use std::error;
use std::fmt;
use std::path::PathBuf;

mod config;
mod csv_io;

pub use config::{load_config, RunConfig};
pub use csv_io::{
    driver_rows, eval_rows, parse_single_series_csv, parse_terms_csv, parse_week_label,
    write_driver_report_csv, write_driver_report_json, write_eval_report_csv,
    write_eval_report_json, write_predictions_csv, write_terms_csv, DriverCsvRow, EvalRow,
    WeekFormat,
};

use crate::timeseries::{SeriesError, WeekIndex};

#[derive(Debug)]
pub enum IoError {
    MissingFile(PathBuf),
    Read { path: PathBuf, message: String },
    Write { path: PathBuf, message: String },
    BadHeader { path: PathBuf, message: String },
    BadWeekLabel { path: PathBuf, row: usize, label: String },
    WeekGap { path: PathBuf, row: usize, expected: WeekIndex, found: WeekIndex },
    BadCell { path: PathBuf, row: usize, column: String, message: String },
    Empty(PathBuf),
    BadConfig { path: Option<PathBuf>, message: String },
    Series(SeriesError),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::MissingFile(path) => write!(f, "missing input file {}", path.display()),
            IoError::Read { path, message } => {
                write!(f, "cannot read {}: {message}", path.display())
            }
            IoError::Write { path, message } => {
                write!(f, "cannot write {}: {message}", path.display())
            }
            IoError::BadHeader { path, message } => {
                write!(f, "bad header in {}: {message}", path.display())
            }
            IoError::BadWeekLabel { path, row, label } => {
                write!(f, "{} row {row}: bad week label '{label}'", path.display())
            }
            IoError::WeekGap { path, row, expected, found } => write!(
                f,
                "{} row {row}: week gap, expected {expected} but found {found}",
                path.display()
            ),
            IoError::BadCell { path, row, column, message } => write!(
                f,
                "{} row {row}, column '{column}': {message}",
                path.display()
            ),
            IoError::Empty(path) => write!(f, "{} has no data rows", path.display()),
            IoError::BadConfig { path, message } => match path {
                Some(p) => write!(f, "bad config {}: {message}", p.display()),
                None => write!(f, "bad config: {message}"),
            },
            IoError::Series(e) => write!(f, "{e}"),
        }
    }
}

impl error::Error for IoError {}

impl From<SeriesError> for IoError {
    fn from(e: SeriesError) -> Self {
        IoError::Series(e)
    }
}
