use std::collections::BTreeSet;

use super::week::{WeekIndex, WeekRange};
use super::SeriesError;

/// One named, week-indexed series of finite reals with no gaps:
/// `values[k]` is the observation for `start + k` weeks.
#[derive(Clone, Debug, PartialEq)]
pub struct WeeklySeries {
    id: String,
    start: WeekIndex,
    values: Vec<f64>,
}

impl WeeklySeries {
    pub fn new(
        id: impl Into<String>,
        start: WeekIndex,
        values: Vec<f64>,
    ) -> Result<Self, SeriesError> {
        let id = id.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite { id });
        }
        Ok(WeeklySeries { id, start, values })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn start(&self) -> WeekIndex {
        self.start
    }

    /// Last covered week. Panics on an empty series.
    pub fn end(&self) -> WeekIndex {
        assert!(!self.values.is_empty(), "empty series has no end week");
        self.start.plus_weeks(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn span(&self) -> Result<WeekRange, SeriesError> {
        if self.values.is_empty() {
            return Err(SeriesError::EmptySeries {
                id: self.id.clone(),
            });
        }
        WeekRange::new(self.start, self.end())
    }

    pub fn week_at(&self, k: usize) -> WeekIndex {
        self.start.plus_weeks(k as i64)
    }

    /// Value for `week`, if covered.
    pub fn get(&self, week: &WeekIndex) -> Option<f64> {
        let offset = self.start.weeks_until(week);
        if offset < 0 {
            return None;
        }
        self.values.get(offset as usize).copied()
    }

    /// Restricts the series to `range` (inclusive).
    pub fn slice(&self, range: &WeekRange) -> Result<WeeklySeries, SeriesError> {
        let span = self.span()?;
        if !span.contains_range(range) {
            return Err(SeriesError::RangeOutOfSpan {
                id: self.id.clone(),
                range: *range,
                span,
            });
        }
        let from = self.start.weeks_until(&range.start) as usize;
        let to = from + range.len();
        Ok(WeeklySeries {
            id: self.id.clone(),
            start: range.start,
            values: self.values[from..to].to_vec(),
        })
    }

    /// Same week axis, new values and id.
    pub(crate) fn with_values(&self, id: impl Into<String>, values: Vec<f64>) -> WeeklySeries {
        debug_assert_eq!(values.len(), self.values.len());
        WeeklySeries {
            id: id.into(),
            start: self.start,
            values,
        }
    }
}

/// Week-aligned collection of term series plus optional media and case series.
///
/// Every contained series covers exactly `span`; term ids are unique.
#[derive(Clone, Debug)]
pub struct Panel {
    terms: Vec<WeeklySeries>,
    media: Option<WeeklySeries>,
    cases: Option<WeeklySeries>,
    span: WeekRange,
}

impl Panel {
    pub fn terms(&self) -> &[WeeklySeries] {
        &self.terms
    }

    pub fn media(&self) -> Option<&WeeklySeries> {
        self.media.as_ref()
    }

    pub fn cases(&self) -> Option<&WeeklySeries> {
        self.cases.as_ref()
    }

    pub fn span(&self) -> WeekRange {
        self.span
    }

    pub fn term_ids(&self) -> Vec<&str> {
        self.terms.iter().map(|s| s.id()).collect()
    }

    pub fn term(&self, id: &str) -> Option<&WeeklySeries> {
        self.terms.iter().find(|s| s.id() == id)
    }

    /// Restricts every contained series to `range`.
    pub fn slice(&self, range: &WeekRange) -> Result<Panel, SeriesError> {
        let terms = self
            .terms
            .iter()
            .map(|s| s.slice(range))
            .collect::<Result<Vec<_>, _>>()?;
        let media = self.media.as_ref().map(|s| s.slice(range)).transpose()?;
        let cases = self.cases.as_ref().map(|s| s.slice(range)).transpose()?;
        Ok(Panel {
            terms,
            media,
            cases,
            span: *range,
        })
    }

    /// Replaces the term list, keeping media/cases. Terms must cover the span.
    pub fn with_terms(&self, terms: Vec<WeeklySeries>) -> Result<Panel, SeriesError> {
        for t in &terms {
            if t.span()? != self.span {
                return Err(SeriesError::RangeOutOfSpan {
                    id: t.id().to_string(),
                    range: t.span()?,
                    span: self.span,
                });
            }
        }
        Ok(Panel {
            terms,
            media: self.media.clone(),
            cases: self.cases.clone(),
            span: self.span,
        })
    }
}

/// Aligns term, media, and case series onto their common week range.
///
/// The panel span is the intersection of all input spans; every series is
/// truncated to it. Errors if the intersection is empty or a term id repeats.
pub fn align_panel(
    terms: Vec<WeeklySeries>,
    media: Option<WeeklySeries>,
    cases: Option<WeeklySeries>,
) -> Result<Panel, SeriesError> {
    if terms.is_empty() {
        return Err(SeriesError::NoTerms);
    }
    let mut seen = BTreeSet::new();
    for t in &terms {
        if !seen.insert(t.id().to_string()) {
            return Err(SeriesError::DuplicateTermId(t.id().to_string()));
        }
    }

    let mut span: Option<WeekRange> = None;
    for s in terms.iter().chain(media.iter()).chain(cases.iter()) {
        let s_span = s.span()?;
        span = Some(match span {
            None => s_span,
            Some(cur) => cur.intersect(&s_span).ok_or(SeriesError::NoCommonWeeks)?,
        });
    }
    let span = span.expect("at least one term series");

    let terms = terms
        .iter()
        .map(|s| s.slice(&span))
        .collect::<Result<Vec<_>, _>>()?;
    let media = media.map(|s| s.slice(&span)).transpose()?;
    let cases = cases.map(|s| s.slice(&span)).transpose()?;
    Ok(Panel {
        terms,
        media,
        cases,
        span,
    })
}
