use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, TimeDelta, Weekday};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SeriesError;

/// One ISO-8601 week, written `YYYY-Www` (e.g. `2009-W14`).
///
/// Totally ordered. Arithmetic is exact across 52- and 53-week years
/// (e.g. `2020-W53 + 1 = 2021-W01`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeekIndex {
    year: i32,
    week: u32,
}

impl WeekIndex {
    pub fn new(year: i32, week: u32) -> Result<Self, SeriesError> {
        if NaiveDate::from_isoywd_opt(year, week, Weekday::Mon).is_none() {
            return Err(SeriesError::BadWeek(format!("{year:04}-W{week:02}")));
        }
        Ok(WeekIndex { year, week })
    }

    pub fn iso_year(&self) -> i32 {
        self.year
    }

    pub fn iso_week(&self) -> u32 {
        self.week
    }

    /// Monday of this week.
    pub fn monday(&self) -> NaiveDate {
        NaiveDate::from_isoywd_opt(self.year, self.week, Weekday::Mon)
            .expect("week validated on construction")
    }

    /// The ISO week containing `date`.
    pub fn from_date(date: NaiveDate) -> Self {
        let iso = date.iso_week();
        WeekIndex {
            year: iso.year(),
            week: iso.week(),
        }
    }

    pub fn plus_weeks(&self, n: i64) -> Self {
        Self::from_date(self.monday() + TimeDelta::weeks(n))
    }

    pub fn next(&self) -> Self {
        self.plus_weeks(1)
    }

    pub fn prev(&self) -> Self {
        self.plus_weeks(-1)
    }

    /// Signed number of whole weeks from `self` to `other`.
    pub fn weeks_until(&self, other: &WeekIndex) -> i64 {
        (other.monday() - self.monday()).num_days() / 7
    }
}

impl fmt::Display for WeekIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-W{:02}", self.year, self.week)
    }
}

impl fmt::Debug for WeekIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for WeekIndex {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeriesError::BadWeek(s.to_string());
        let (year, week) = s.split_once("-W").ok_or_else(bad)?;
        let year: i32 = year.parse().map_err(|_| bad())?;
        let week: u32 = week.parse().map_err(|_| bad())?;
        WeekIndex::new(year, week).map_err(|_| bad())
    }
}

impl Serialize for WeekIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeekIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// Inclusive range of weeks.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WeekRange {
    pub start: WeekIndex,
    pub end: WeekIndex,
}

impl WeekRange {
    pub fn new(start: WeekIndex, end: WeekIndex) -> Result<Self, SeriesError> {
        if start > end {
            return Err(SeriesError::EmptyRange { start, end });
        }
        Ok(WeekRange { start, end })
    }

    /// Number of weeks in the range (at least 1).
    pub fn len(&self) -> usize {
        (self.start.weeks_until(&self.end) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // a constructed range always holds at least one week
    }

    pub fn contains(&self, week: &WeekIndex) -> bool {
        self.start <= *week && *week <= self.end
    }

    pub fn contains_range(&self, other: &WeekRange) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersect(&self, other: &WeekRange) -> Option<WeekRange> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(WeekRange { start, end })
    }

    pub fn iter(&self) -> impl Iterator<Item = WeekIndex> + '_ {
        (0..self.len() as i64).map(|k| self.start.plus_weeks(k))
    }
}

impl fmt::Display for WeekRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}
