//! Pearson correlation with significance stars, lag-order selection, and the
//! Granger-precedence test used to tell media-driven clusters from
//! case-driven ones.

use std::error;
use std::fmt;

mod correlation;
pub mod dist;
mod granger;
mod report;

pub use correlation::{correlate, CorrelationResult, Stars};
pub use granger::{granger_test, select_lag, GrangerResult};
pub use report::{
    cluster_driver_report, cluster_driver_report_partial, DriverReport, DriverRow, Role,
};

#[derive(Clone, Debug, PartialEq)]
pub enum StatsError {
    TooShort { len: usize, needed: usize },
    ZeroVariance { id: String },
    Misaligned { a: String, b: String },
    CollinearLags,
    BadOrder { order: usize, max: usize },
    MissingRole(&'static str),
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::TooShort { len, needed } => {
                write!(f, "series too short: {len} observations, need at least {needed}")
            }
            StatsError::ZeroVariance { id } => write!(f, "zero variance in series '{id}'"),
            StatsError::Misaligned { a, b } => {
                write!(f, "series '{a}' and '{b}' cover different weeks")
            }
            StatsError::CollinearLags => write!(f, "collinear lags: singular design matrix"),
            StatsError::BadOrder { order, max } => {
                write!(f, "lag order {order} outside 1..={max}")
            }
            StatsError::MissingRole(role) => write!(f, "panel has no {role} series"),
        }
    }
}

impl error::Error for StatsError {}
