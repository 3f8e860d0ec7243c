use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::IoError;
use crate::eval::{EvalCell, EvalSummary};
use crate::stats::DriverReport;
use crate::timeseries::{WeekIndex, WeeklySeries};

/// How the `week` column of input CSVs is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeekFormat {
    /// ISO labels `YYYY-Www`.
    Iso,
    /// Calendar dates `YYYY-MM-DD` stamping the Sunday that starts each week
    /// (the usual search-volume export style). Each stamp maps to the ISO
    /// week containing the majority of its days, i.e. the week of `date + 3`.
    Sunday,
}

impl FromStr for WeekFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iso" => Ok(WeekFormat::Iso),
            "sunday" => Ok(WeekFormat::Sunday),
            other => Err(format!("week format '{other}' is not 'iso' or 'sunday'")),
        }
    }
}

/// Parses one week label under the given format.
pub fn parse_week_label(label: &str, format: WeekFormat) -> Result<WeekIndex, String> {
    match format {
        WeekFormat::Iso => label.parse::<WeekIndex>().map_err(|e| e.to_string()),
        WeekFormat::Sunday => {
            let date = NaiveDate::parse_from_str(label, "%Y-%m-%d")
                .map_err(|_| format!("'{label}' is not a YYYY-MM-DD date"))?;
            Ok(WeekIndex::from_date(date + chrono::TimeDelta::days(3)))
        }
    }
}

fn cell_error(path: &Path, row: usize, column: &str, message: String) -> IoError {
    IoError::BadCell {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        message,
    }
}

fn parse_value(path: &Path, row: usize, column: &str, raw: &str) -> Result<f64, IoError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(cell_error(path, row, column, "empty cell (no imputation is performed)".into()));
    }
    if trimmed == "<1" {
        return Err(cell_error(
            path,
            row,
            column,
            "'<1' low-volume markers are not supported; replace them with 0 or drop the term"
                .into(),
        ));
    }
    let value: f64 = trimmed
        .parse()
        .map_err(|_| cell_error(path, row, column, format!("'{trimmed}' is not a number")))?;
    if !value.is_finite() {
        return Err(cell_error(path, row, column, "non-finite value".into()));
    }
    Ok(value)
}

/// Reads a weekly CSV: header `week,<id>,...`, one row per consecutive week.
///
/// Gaps, duplicate ids, empty cells, and non-numeric cells are hard errors
/// that name the offending row (1-based, counting the header).
pub fn parse_terms_csv(path: &Path, format: WeekFormat) -> Result<Vec<WeeklySeries>, IoError> {
    if !path.exists() {
        return Err(IoError::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| IoError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;

    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(rec)) => rec,
        Some(Err(e)) => {
            return Err(IoError::Read {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
        }
        None => return Err(IoError::Empty(path.to_path_buf())),
    };
    let bad_header = |message: String| IoError::BadHeader {
        path: path.to_path_buf(),
        message,
    };
    if header.get(0).map(str::trim) != Some("week") {
        return Err(bad_header("first column must be 'week'".into()));
    }
    let ids: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if ids.is_empty() {
        return Err(bad_header("no series columns after 'week'".into()));
    }
    for (i, id) in ids.iter().enumerate() {
        if id.is_empty() {
            return Err(bad_header(format!("column {} has an empty id", i + 2)));
        }
        if ids[..i].contains(id) {
            return Err(bad_header(format!("duplicate column id '{id}'")));
        }
    }

    let mut start: Option<WeekIndex> = None;
    let mut expected: Option<WeekIndex> = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); ids.len()];
    for (i, record) in records.enumerate() {
        let row = i + 2; // 1-based, header is row 1
        let record = record.map_err(|e| IoError::Read {
            path: path.to_path_buf(),
            message: format!("row {row}: {e}"),
        })?;
        if record.len() != ids.len() + 1 {
            return Err(IoError::Read {
                path: path.to_path_buf(),
                message: format!(
                    "row {row}: expected {} fields, found {}",
                    ids.len() + 1,
                    record.len()
                ),
            });
        }
        let label = record.get(0).unwrap_or("").trim();
        let week = parse_week_label(label, format).map_err(|_| IoError::BadWeekLabel {
            path: path.to_path_buf(),
            row,
            label: label.to_string(),
        })?;
        match expected {
            None => start = Some(week),
            Some(exp) => {
                if week != exp {
                    return Err(IoError::WeekGap {
                        path: path.to_path_buf(),
                        row,
                        expected: exp,
                        found: week,
                    });
                }
            }
        }
        expected = Some(week.next());
        for (j, id) in ids.iter().enumerate() {
            columns[j].push(parse_value(path, row, id, record.get(j + 1).unwrap_or(""))?);
        }
    }
    let start = start.ok_or_else(|| IoError::Empty(path.to_path_buf()))?;

    ids.into_iter()
        .zip(columns)
        .map(|(id, values)| WeeklySeries::new(id, start, values).map_err(IoError::Series))
        .collect()
}

/// Reads a weekly CSV that must contain exactly one value column.
pub fn parse_single_series_csv(path: &Path, format: WeekFormat) -> Result<WeeklySeries, IoError> {
    let mut series = parse_terms_csv(path, format)?;
    if series.len() != 1 {
        return Err(IoError::BadHeader {
            path: path.to_path_buf(),
            message: format!("expected exactly one value column, found {}", series.len()),
        });
    }
    Ok(series.pop().expect("length checked"))
}

fn write_error(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes week-aligned series as a `week,<id>,...` CSV. Values use the
/// shortest round-trip float representation, so parsing the file back
/// reproduces them bit-exactly.
pub fn write_terms_csv(path: &Path, series: &[&WeeklySeries]) -> Result<(), IoError> {
    assert!(!series.is_empty(), "nothing to write");
    let start = series[0].start();
    let len = series[0].len();
    for s in series {
        assert!(s.start() == start && s.len() == len, "series must be aligned");
    }

    let mut writer = csv::Writer::from_path(path).map_err(write_error(path))?;
    let mut header = vec!["week".to_string()];
    header.extend(series.iter().map(|s| s.id().to_string()));
    writer.write_record(&header).map_err(write_error(path))?;
    for k in 0..len {
        let mut record = vec![start.plus_weeks(k as i64).to_string()];
        record.extend(series.iter().map(|s| s.values()[k].to_string()));
        writer.write_record(&record).map_err(write_error(path))?;
    }
    writer.flush().map_err(|e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Flat driver-report row matching the published table layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriverCsvRow {
    pub cluster: u32,
    pub vs: String,
    pub r: f64,
    pub p: f64,
    pub stars: String,
    pub granger_order: Option<usize>,
    #[serde(rename = "G")]
    pub g: Option<f64>,
    pub granger_p: Option<f64>,
    pub disease_cluster: bool,
}

pub fn driver_rows(report: &DriverReport) -> Vec<DriverCsvRow> {
    report
        .rows
        .iter()
        .map(|row| DriverCsvRow {
            cluster: row.cluster_id,
            vs: row.vs.to_string(),
            r: row.correlation.r,
            p: row.correlation.p_value,
            stars: row.correlation.stars.to_string(),
            granger_order: row.granger.as_ref().map(|g| g.order),
            g: row.granger.as_ref().map(|g| g.g_statistic),
            granger_p: row.granger.as_ref().map(|g| g.p_value),
            disease_cluster: report.disease_cluster == Some(row.cluster_id),
        })
        .collect()
}

fn opt_num<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_driver_report_csv(path: &Path, rows: &[DriverCsvRow]) -> Result<(), IoError> {
    let mut writer = csv::Writer::from_path(path).map_err(write_error(path))?;
    writer
        .write_record([
            "cluster",
            "vs",
            "r",
            "p",
            "stars",
            "granger_order",
            "G",
            "granger_p",
            "disease_cluster",
        ])
        .map_err(write_error(path))?;
    for row in rows {
        writer
            .write_record([
                row.cluster.to_string(),
                row.vs.clone(),
                row.r.to_string(),
                row.p.to_string(),
                row.stars.clone(),
                opt_num(&row.granger_order),
                opt_num(&row.g),
                opt_num(&row.granger_p),
                if row.disease_cluster { "yes".into() } else { String::new() },
            ])
            .map_err(write_error(path))?;
    }
    writer.flush().map_err(|e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_driver_report_json(path: &Path, rows: &[DriverCsvRow]) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(rows).expect("rows serialize");
    std::fs::write(path, text).map_err(|e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Flat evaluation row. `one_minus_r2` is emitted alongside RMSE for
/// comparability with tables that report `1 - R^2` in the RMSE column.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalRow {
    pub model: String,
    pub feature_set: String,
    pub period: String,
    pub r2: Option<f64>,
    pub rmse: Option<f64>,
    pub one_minus_r2: Option<f64>,
    pub hyper: Option<String>,
    pub error: Option<String>,
}

/// Flattens per-period cells (plus optional mean summaries) into report rows.
pub fn eval_rows(cells: &[EvalCell], summaries: Option<&[EvalSummary]>) -> Vec<EvalRow> {
    let mut rows: Vec<EvalRow> = cells
        .iter()
        .map(|cell| match &cell.outcome {
            Ok(report) => EvalRow {
                model: cell.model.clone(),
                feature_set: cell.feature_set.clone(),
                period: cell.period.clone(),
                r2: Some(report.r2),
                rmse: Some(report.rmse),
                one_minus_r2: Some(1.0 - report.r2),
                hyper: report.hyper.map(|h| h.to_string()),
                error: None,
            },
            Err(message) => EvalRow {
                model: cell.model.clone(),
                feature_set: cell.feature_set.clone(),
                period: cell.period.clone(),
                r2: None,
                rmse: None,
                one_minus_r2: None,
                hyper: None,
                error: Some(message.clone()),
            },
        })
        .collect();
    if let Some(summaries) = summaries {
        for s in summaries {
            rows.push(EvalRow {
                model: s.model.clone(),
                feature_set: s.feature_set.clone(),
                period: "mean".to_string(),
                r2: Some(s.mean_r2),
                rmse: Some(s.mean_rmse),
                one_minus_r2: Some(1.0 - s.mean_r2),
                hyper: None,
                error: if s.failed > 0 {
                    Some(format!("{} of {} periods failed", s.failed, s.failed + s.periods))
                } else {
                    None
                },
            });
        }
    }
    rows
}

pub fn write_eval_report_csv(path: &Path, rows: &[EvalRow]) -> Result<(), IoError> {
    let mut writer = csv::Writer::from_path(path).map_err(write_error(path))?;
    writer
        .write_record([
            "model",
            "feature_set",
            "period",
            "r2",
            "rmse",
            "one_minus_r2",
            "hyper",
            "error",
        ])
        .map_err(write_error(path))?;
    for row in rows {
        writer
            .write_record([
                row.model.clone(),
                row.feature_set.clone(),
                row.period.clone(),
                opt_num(&row.r2),
                opt_num(&row.rmse),
                opt_num(&row.one_minus_r2),
                row.hyper.clone().unwrap_or_default(),
                row.error.clone().unwrap_or_default(),
            ])
            .map_err(write_error(path))?;
    }
    writer.flush().map_err(|e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_eval_report_json(path: &Path, rows: &[EvalRow]) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(rows).expect("rows serialize");
    std::fs::write(path, text).map_err(|e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Per-week predictions for external plotting: `week,actual,predicted`.
pub fn write_predictions_csv(
    path: &Path,
    actual: &WeeklySeries,
    predicted: &WeeklySeries,
) -> Result<(), IoError> {
    assert_eq!(actual.start(), predicted.start());
    assert_eq!(actual.len(), predicted.len());
    let mut writer = csv::Writer::from_path(path).map_err(write_error(path))?;
    writer
        .write_record(["week", "actual", "predicted"])
        .map_err(write_error(path))?;
    for k in 0..actual.len() {
        writer
            .write_record([
                actual.start().plus_weeks(k as i64).to_string(),
                actual.values()[k].to_string(),
                predicted.values()[k].to_string(),
            ])
            .map_err(write_error(path))?;
    }
    writer.flush().map_err(|e| IoError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_small_file() {
        let f = write_tmp("week,flu\n2020-W01,1.5\n2020-W02,2\n2020-W03,0.25\n");
        let series = parse_terms_csv(f.path(), WeekFormat::Iso).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].id(), "flu");
        assert_eq!(series[0].values(), &[1.5, 2.0, 0.25]);
        assert_eq!(series[0].start().to_string(), "2020-W01");
    }

    #[test]
    fn reports_week_gap_with_row() {
        let f = write_tmp("week,flu\n2020-W10,1\n2020-W12,2\n");
        match parse_terms_csv(f.path(), WeekFormat::Iso) {
            Err(IoError::WeekGap { row, expected, found, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(expected.to_string(), "2020-W11");
                assert_eq!(found.to_string(), "2020-W12");
            }
            other => panic!("expected week gap, got {other:?}"),
        }
    }

    #[test]
    fn reports_bad_cells_with_location() {
        let f = write_tmp("week,flu,vax\n2020-W01,1,2\n2020-W02,,3\n");
        match parse_terms_csv(f.path(), WeekFormat::Iso) {
            Err(IoError::BadCell { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "flu");
            }
            other => panic!("expected bad cell, got {other:?}"),
        }

        let f = write_tmp("week,flu\n2020-W01,<1\n");
        match parse_terms_csv(f.path(), WeekFormat::Iso) {
            Err(IoError::BadCell { message, .. }) => assert!(message.contains("<1")),
            other => panic!("expected bad cell, got {other:?}"),
        }

        let f = write_tmp("week,flu\n2020-W01,abc\n");
        assert!(matches!(
            parse_terms_csv(f.path(), WeekFormat::Iso),
            Err(IoError::BadCell { .. })
        ));
    }

    #[test]
    fn rejects_duplicate_headers() {
        let f = write_tmp("week,flu,flu\n2020-W01,1,2\n");
        assert!(matches!(
            parse_terms_csv(f.path(), WeekFormat::Iso),
            Err(IoError::BadHeader { .. })
        ));
    }

    #[test]
    fn sunday_dates_map_to_iso_weeks() {
        // 2020-03-01 is a Sunday; its Sun..Sat week mostly overlaps ISO week
        // 2020-W10 (Mon 2020-03-02 .. Sun 2020-03-08).
        let f = write_tmp("week,flu\n2020-03-01,1\n2020-03-08,2\n");
        let series = parse_terms_csv(f.path(), WeekFormat::Sunday).unwrap();
        assert_eq!(series[0].start().to_string(), "2020-W10");
        assert_eq!(series[0].len(), 2);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let start: WeekIndex = "2020-W51".parse().unwrap();
        let a = WeeklySeries::new("a", start, vec![0.1, 2.0 / 3.0, 1e-12, 95.125]).unwrap();
        let b = WeeklySeries::new("b term", start, vec![-1.5, 0.0, 3.25, 7.0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("terms.csv");
        write_terms_csv(&path, &[&a, &b]).unwrap();
        let back = parse_terms_csv(&path, WeekFormat::Iso).unwrap();
        assert_eq!(back[0], a);
        assert_eq!(back[1], b);
    }

    #[test]
    fn single_series_requires_one_column() {
        let f = write_tmp("week,a,b\n2020-W01,1,2\n");
        assert!(parse_single_series_csv(f.path(), WeekFormat::Iso).is_err());
        let f = write_tmp("week,cases\n2020-W01,10\n");
        let s = parse_single_series_csv(f.path(), WeekFormat::Iso).unwrap();
        assert_eq!(s.id(), "cases");
    }

    #[test]
    fn missing_file_is_named() {
        let err = parse_terms_csv(Path::new("/nonexistent/x.csv"), WeekFormat::Iso).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.csv"));
    }
}
