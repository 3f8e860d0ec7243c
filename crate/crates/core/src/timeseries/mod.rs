//! Week-indexed series, panels, and the preprocessing transforms applied
//! before clustering and modeling.

use std::error;
use std::fmt;

mod series;
mod split;
mod transform;
mod week;

pub use series::{align_panel, Panel, WeeklySeries};
pub use split::{seasonal_split_plan, seasons_from_boundaries, wave_split_plan, SplitPlan};
pub use transform::{diff1, normalize_to_max, rescale_0_100, standardize};
pub use week::{WeekIndex, WeekRange};

pub(crate) use transform::{mean, pop_std};

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesError {
    EmptySeries { id: String },
    TooShort { id: String, len: usize, needed: usize },
    ZeroVariance { id: String },
    NonPositiveMax { id: String },
    NonFinite { id: String },
    BadWeek(String),
    EmptyRange { start: WeekIndex, end: WeekIndex },
    NoTerms,
    DuplicateTermId(String),
    NoCommonWeeks,
    RangeOutOfSpan { id: String, range: WeekRange, span: WeekRange },
    BadSeasonBoundaries(String),
    NotEnoughSeasons { have: usize, needed: usize },
    BadTestSeason { test_index: usize, train_count: usize, seasons: usize },
    EmptyTrainRange { split: WeekIndex },
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::EmptySeries { id } => write!(f, "empty series '{id}'"),
            SeriesError::TooShort { id, len, needed } => {
                write!(f, "series '{id}' too short: {len} weeks, need at least {needed}")
            }
            SeriesError::ZeroVariance { id } => write!(f, "zero variance in series '{id}'"),
            SeriesError::NonPositiveMax { id } => {
                write!(f, "non-positive maximum in series '{id}'")
            }
            SeriesError::NonFinite { id } => {
                write!(f, "series '{id}' contains a non-finite value")
            }
            SeriesError::BadWeek(s) => write!(f, "invalid ISO week '{s}' (expected YYYY-Www)"),
            SeriesError::EmptyRange { start, end } => {
                write!(f, "empty week range: {start} is after {end}")
            }
            SeriesError::NoTerms => write!(f, "panel needs at least one term series"),
            SeriesError::DuplicateTermId(id) => write!(f, "duplicate term id '{id}'"),
            SeriesError::NoCommonWeeks => write!(f, "no common weeks across input series"),
            SeriesError::RangeOutOfSpan { id, range, span } => {
                write!(f, "range {range} falls outside span {span} of series '{id}'")
            }
            SeriesError::BadSeasonBoundaries(msg) => write!(f, "bad season boundaries: {msg}"),
            SeriesError::NotEnoughSeasons { have, needed } => {
                write!(f, "not enough seasons: have {have}, need at least {needed}")
            }
            SeriesError::BadTestSeason { test_index, train_count, seasons } => write!(
                f,
                "test season {test_index} invalid: need {train_count} preceding seasons out of {seasons}"
            ),
            SeriesError::EmptyTrainRange { split } => {
                write!(f, "split week {split} leaves an empty training range")
            }
        }
    }
}

impl error::Error for SeriesError {}
