use serde::{Deserialize, Serialize};

use super::series::WeeklySeries;
use super::week::{WeekIndex, WeekRange};
use super::SeriesError;

/// Disjoint train ranges plus one test range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train: Vec<WeekRange>,
    pub test: WeekRange,
}

/// Seasons derived from an ordered boundary list: `boundaries[i]` starts
/// season `i`, which ends the week before `boundaries[i+1]`. A list of
/// `m + 1` boundaries defines `m` seasons.
pub fn seasons_from_boundaries(boundaries: &[WeekIndex]) -> Result<Vec<WeekRange>, SeriesError> {
    if boundaries.len() < 2 {
        return Err(SeriesError::BadSeasonBoundaries(
            "need at least two boundaries to define a season".to_string(),
        ));
    }
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SeriesError::BadSeasonBoundaries(
            "boundaries must be strictly increasing".to_string(),
        ));
    }
    boundaries
        .windows(2)
        .map(|w| WeekRange::new(w[0], w[1].prev()))
        .collect()
}

/// Sliding-window split: train on the `train_count` seasons immediately
/// preceding the test season.
pub fn seasonal_split_plan(
    season_boundaries: &[WeekIndex],
    train_count: usize,
    test_index: usize,
) -> Result<SplitPlan, SeriesError> {
    let seasons = seasons_from_boundaries(season_boundaries)?;
    if seasons.len() < train_count + 1 {
        return Err(SeriesError::NotEnoughSeasons {
            have: seasons.len(),
            needed: train_count + 1,
        });
    }
    if test_index < train_count || test_index >= seasons.len() {
        return Err(SeriesError::BadTestSeason {
            test_index,
            train_count,
            seasons: seasons.len(),
        });
    }
    Ok(SplitPlan {
        train: seasons[test_index - train_count..test_index].to_vec(),
        test: seasons[test_index],
    })
}

/// Splits a two-wave period at the week with the fewest cases inside
/// `search_range` (earliest week on ties). Train covers everything before the
/// split week, test the split week onward.
pub fn wave_split_plan(
    cases: &WeeklySeries,
    search_range: &WeekRange,
) -> Result<SplitPlan, SeriesError> {
    let span = cases.span()?;
    if !span.contains_range(search_range) {
        return Err(SeriesError::RangeOutOfSpan {
            id: cases.id().to_string(),
            range: *search_range,
            span,
        });
    }
    let mut split = search_range.start;
    let mut min = f64::INFINITY;
    for week in search_range.iter() {
        let v = cases.get(&week).expect("week within span");
        if v < min {
            min = v;
            split = week;
        }
    }
    if split == span.start {
        return Err(SeriesError::EmptyTrainRange { split });
    }
    Ok(SplitPlan {
        train: vec![WeekRange::new(span.start, split.prev())?],
        test: WeekRange::new(split, span.end)?,
    })
}
