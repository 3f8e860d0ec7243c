use std::fmt;

use serde::{Deserialize, Serialize};

use super::{correlate, granger_test, select_lag, CorrelationResult, GrangerResult, StatsError};
use crate::clustering::ClusterProfile;
use crate::timeseries::{diff1, Panel, WeeklySeries};

/// Which external series a cluster centroid is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Cases,
    Media,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Cases => write!(f, "cases"),
            Role::Media => write!(f, "media"),
        }
    }
}

/// One report row: a cluster centroid against one role series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriverRow {
    pub cluster_id: u32,
    pub vs: Role,
    pub correlation: CorrelationResult,
    /// Granger test for role -> centroid, at the order chosen by lag
    /// selection. Absent when the report was built without Granger tests.
    pub granger: Option<GrangerResult>,
}

/// Correlation/Granger table over all clusters, with the disease cluster
/// (centroid most correlated with cases) marked.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriverReport {
    pub rows: Vec<DriverRow>,
    pub disease_cluster: Option<u32>,
}

const MAX_LAG: usize = 4;

fn row_for(
    profile: &ClusterProfile,
    role: Role,
    series: &WeeklySeries,
    with_granger: bool,
) -> Result<DriverRow, StatsError> {
    let correlation = correlate(&profile.centroid, series)?;
    let granger = if with_granger {
        let d_target = diff1(&profile.centroid).map_err(|_| StatsError::TooShort {
            len: profile.centroid.len(),
            needed: 2,
        })?;
        let d_source = diff1(series).map_err(|_| StatsError::TooShort {
            len: series.len(),
            needed: 2,
        })?;
        let order = select_lag(&d_target, &d_source, MAX_LAG)?;
        Some(granger_test(&d_target, &d_source, order)?)
    } else {
        None
    };
    Ok(DriverRow {
        cluster_id: profile.cluster_id,
        vs: role,
        correlation,
        granger,
    })
}

/// Builds rows for whichever of cases/media the panel carries.
///
/// The disease cluster is the one whose centroid maximizes Pearson r against
/// cases (ties keep the lowest cluster id); it is `None` without a cases
/// series. Used by front-ends that tolerate partial panels.
pub fn cluster_driver_report_partial(
    panel: &Panel,
    profiles: &[ClusterProfile],
    with_granger: bool,
) -> Result<DriverReport, StatsError> {
    let mut rows = Vec::new();
    let mut disease: Option<(u32, f64)> = None;

    for profile in profiles {
        if let Some(cases) = panel.cases() {
            let row = row_for(profile, Role::Cases, cases, with_granger)?;
            let r = row.correlation.r;
            // Strictly-greater keeps the lowest cluster id on ties.
            if disease.map_or(true, |(_, best)| r > best) {
                disease = Some((profile.cluster_id, r));
            }
            rows.push(row);
        }
        if let Some(media) = panel.media() {
            rows.push(row_for(profile, Role::Media, media, with_granger)?);
        }
    }

    Ok(DriverReport {
        rows,
        disease_cluster: disease.map(|(id, _)| id),
    })
}

/// Full correlation + Granger table; the panel must carry both cases and
/// media series.
pub fn cluster_driver_report(
    panel: &Panel,
    profiles: &[ClusterProfile],
) -> Result<DriverReport, StatsError> {
    if panel.cases().is_none() {
        return Err(StatsError::MissingRole("cases"));
    }
    if panel.media().is_none() {
        return Err(StatsError::MissingRole("media"));
    }
    cluster_driver_report_partial(panel, profiles, true)
}
