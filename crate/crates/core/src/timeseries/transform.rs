use super::series::WeeklySeries;
use super::SeriesError;

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (divide by n).
pub(crate) fn pop_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Affinely maps a series onto [0, 100]: the minimum becomes 0, the maximum 100.
///
/// A constant series maps to all zeros and sets the degenerate flag so callers
/// can report it as a removal candidate instead of silently clustering it.
pub fn rescale_0_100(series: &WeeklySeries) -> Result<(WeeklySeries, bool), SeriesError> {
    if series.is_empty() {
        return Err(SeriesError::EmptySeries {
            id: series.id().to_string(),
        });
    }
    let min = series.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let max = series
        .values()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        let zeros = vec![0.0; series.len()];
        return Ok((series.with_values(series.id(), zeros), true));
    }
    let scale = 100.0 / (max - min);
    let values = series.values().iter().map(|v| (v - min) * scale).collect();
    Ok((series.with_values(series.id(), values), false))
}

/// Shifts and scales to mean 0 and population standard deviation 1.
pub fn standardize(series: &WeeklySeries) -> Result<WeeklySeries, SeriesError> {
    if series.len() < 2 {
        return Err(SeriesError::TooShort {
            id: series.id().to_string(),
            len: series.len(),
            needed: 2,
        });
    }
    let m = mean(series.values());
    let centered: Vec<f64> = series.values().iter().map(|v| v - m).collect();
    let sd = (centered.iter().map(|v| v * v).sum::<f64>() / centered.len() as f64).sqrt();
    if sd == 0.0 {
        return Err(SeriesError::ZeroVariance {
            id: series.id().to_string(),
        });
    }
    let values = centered.iter().map(|v| v / sd).collect();
    Ok(series.with_values(series.id(), values))
}

/// Divides by the series maximum, which must be positive.
pub fn normalize_to_max(series: &WeeklySeries) -> Result<WeeklySeries, SeriesError> {
    if series.is_empty() {
        return Err(SeriesError::EmptySeries {
            id: series.id().to_string(),
        });
    }
    let max = series
        .values()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return Err(SeriesError::NonPositiveMax {
            id: series.id().to_string(),
        });
    }
    let values = series.values().iter().map(|v| v / max).collect();
    Ok(series.with_values(series.id(), values))
}

/// First difference: `out[k] = x[k+1] - x[k]`. The start advances one week.
pub fn diff1(series: &WeeklySeries) -> Result<WeeklySeries, SeriesError> {
    if series.len() < 2 {
        return Err(SeriesError::TooShort {
            id: series.id().to_string(),
            len: series.len(),
            needed: 2,
        });
    }
    let values: Vec<f64> = series.values().windows(2).map(|w| w[1] - w[0]).collect();
    WeeklySeries::new(series.id(), series.start().next(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::WeekIndex;

    fn series(values: Vec<f64>) -> WeeklySeries {
        WeeklySeries::new("s", "2009-W10".parse::<WeekIndex>().unwrap(), values).unwrap()
    }

    #[test]
    fn rescale_affine() {
        let (out, flag) = rescale_0_100(&series(vec![5.0, 10.0, 15.0])).unwrap();
        assert_eq!(out.values(), &[0.0, 50.0, 100.0]);
        assert!(!flag);
    }

    #[test]
    fn rescale_identity_when_already_spanning() {
        let (out, flag) = rescale_0_100(&series(vec![0.0, 40.0, 100.0])).unwrap();
        assert_eq!(out.values(), &[0.0, 40.0, 100.0]);
        assert!(!flag);
    }

    #[test]
    fn rescale_constant_flags_degenerate() {
        let (out, flag) = rescale_0_100(&series(vec![7.0, 7.0, 7.0])).unwrap();
        assert_eq!(out.values(), &[0.0, 0.0, 0.0]);
        assert!(flag);
    }

    #[test]
    fn rescale_empty_errors() {
        assert!(matches!(
            rescale_0_100(&series(vec![])),
            Err(SeriesError::EmptySeries { .. })
        ));
    }

    #[test]
    fn standardize_small_cases() {
        let out = standardize(&series(vec![1.0, 2.0, 3.0])).unwrap();
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (a, b) in out.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let out = standardize(&series(vec![10.0, 20.0])).unwrap();
        assert_eq!(out.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn standardize_moments() {
        let out = standardize(&series(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])).unwrap();
        let n = out.len() as f64;
        let m = out.values().iter().sum::<f64>() / n;
        let sd = (out.values().iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
        assert!(m.abs() < 1e-12 * n);
        assert!((sd - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standardize_is_idempotent() {
        let once = standardize(&series(vec![3.0, 1.0, 4.0, 1.0, 5.0])).unwrap();
        let twice = standardize(&once).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_rejects_constant_and_short() {
        assert!(matches!(
            standardize(&series(vec![2.0, 2.0, 2.0])),
            Err(SeriesError::ZeroVariance { .. })
        ));
        assert!(matches!(
            standardize(&series(vec![1.0])),
            Err(SeriesError::TooShort { .. })
        ));
    }

    #[test]
    fn normalize_to_max_cases() {
        assert_eq!(
            normalize_to_max(&series(vec![2.0, 4.0, 8.0]))
                .unwrap()
                .values(),
            &[0.25, 0.5, 1.0]
        );
        assert_eq!(
            normalize_to_max(&series(vec![1.0, 1.0])).unwrap().values(),
            &[1.0, 1.0]
        );
        assert_eq!(
            normalize_to_max(&series(vec![0.0, 5.0])).unwrap().values(),
            &[0.0, 1.0]
        );
        assert!(matches!(
            normalize_to_max(&series(vec![-1.0, 0.0])),
            Err(SeriesError::NonPositiveMax { .. })
        ));
    }

    #[test]
    fn diff1_cases() {
        let out = diff1(&series(vec![1.0, 3.0, 6.0])).unwrap();
        assert_eq!(out.values(), &[2.0, 3.0]);
        assert_eq!(out.start(), "2009-W11".parse::<WeekIndex>().unwrap());

        assert_eq!(diff1(&series(vec![5.0, 2.0])).unwrap().values(), &[-3.0]);
        assert_eq!(
            diff1(&series(vec![4.0, 4.0, 4.0])).unwrap().values(),
            &[0.0, 0.0]
        );
        assert!(diff1(&series(vec![1.0])).is_err());
    }

    #[test]
    fn diff1_undoes_cumsum() {
        let xs = vec![3.0, -1.5, 2.25, 0.0, 7.5, -4.0];
        let mut acc = 0.0;
        let cumsum: Vec<f64> = xs
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        let out = diff1(&series(cumsum)).unwrap();
        for (a, b) in out.values().iter().zip(&xs[1..]) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
