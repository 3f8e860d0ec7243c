use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::clustering::ClusterMembers;
use crate::timeseries::Panel;

/// Which panel terms feed the nowcast model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureSelector {
    /// Every term in the panel.
    All,
    /// Members of one cluster (requires cluster assignments).
    Cluster(u32),
    /// An explicit term list.
    Ids(Vec<String>),
}

impl fmt::Display for FeatureSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSelector::All => write!(f, "all"),
            FeatureSelector::Cluster(id) => write!(f, "cluster:{id}"),
            FeatureSelector::Ids(ids) => write!(f, "ids:{}", ids.join("+")),
        }
    }
}

impl FromStr for FeatureSelector {
    type Err = EvalError;

    /// Accepts `all`, `cluster:<id>`, or `ids:<term>+<term>+...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(FeatureSelector::All);
        }
        if let Some(id) = s.strip_prefix("cluster:") {
            let id: u32 = id
                .parse()
                .map_err(|_| EvalError::BadSpec(format!("bad cluster id in '{s}'")))?;
            return Ok(FeatureSelector::Cluster(id));
        }
        if let Some(list) = s.strip_prefix("ids:") {
            let ids: Vec<String> = list
                .split('+')
                .filter(|t| !t.is_empty())
                .map(|t| t.to_string())
                .collect();
            if ids.is_empty() {
                return Err(EvalError::BadSpec(format!("empty id list in '{s}'")));
            }
            return Ok(FeatureSelector::Ids(ids));
        }
        Err(EvalError::BadSpec(format!(
            "feature set '{s}' is not 'all', 'cluster:<id>', or 'ids:<a>+<b>'"
        )))
    }
}

/// A selector resolved against a concrete panel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSetSpec {
    pub name: String,
    pub resolved_ids: Vec<String>,
}

/// Resolves a selector to concrete term ids, validating that every id exists
/// in the panel.
pub fn resolve_feature_set(
    selector: &FeatureSelector,
    panel: &Panel,
    clusters: Option<&[ClusterMembers]>,
) -> Result<FeatureSetSpec, EvalError> {
    let resolved_ids = match selector {
        FeatureSelector::All => panel.term_ids().iter().map(|s| s.to_string()).collect(),
        FeatureSelector::Cluster(id) => {
            let clusters = clusters.ok_or(EvalError::NoClusters)?;
            let set = clusters
                .iter()
                .find(|c| c.cluster_id == *id)
                .ok_or(EvalError::UnknownCluster(*id))?;
            set.members.iter().cloned().collect()
        }
        FeatureSelector::Ids(ids) => ids.clone(),
    };
    for id in &resolved_ids {
        if panel.term(id).is_none() {
            return Err(EvalError::UnknownTerm(id.clone()));
        }
    }
    Ok(FeatureSetSpec {
        name: selector.to_string(),
        resolved_ids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::{align_panel, WeekIndex, WeeklySeries};

    fn panel() -> Panel {
        let start: WeekIndex = "2020-W01".parse().unwrap();
        let terms = ["a", "b", "c"]
            .iter()
            .map(|id| WeeklySeries::new(*id, start, vec![1.0, 2.0, 3.0]).unwrap())
            .collect();
        align_panel(terms, None, None).unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!("all".parse::<FeatureSelector>().unwrap(), FeatureSelector::All);
        assert_eq!(
            "cluster:2".parse::<FeatureSelector>().unwrap(),
            FeatureSelector::Cluster(2)
        );
        assert_eq!(
            "ids:a+c".parse::<FeatureSelector>().unwrap(),
            FeatureSelector::Ids(vec!["a".into(), "c".into()])
        );
        assert!("cluster:x".parse::<FeatureSelector>().is_err());
        assert!("nothing".parse::<FeatureSelector>().is_err());
    }

    #[test]
    fn resolve_all_and_ids() {
        let p = panel();
        let all = resolve_feature_set(&FeatureSelector::All, &p, None).unwrap();
        assert_eq!(all.resolved_ids, vec!["a", "b", "c"]);
        assert_eq!(all.name, "all");

        let ids = resolve_feature_set(
            &FeatureSelector::Ids(vec!["c".into(), "a".into()]),
            &p,
            None,
        )
        .unwrap();
        assert_eq!(ids.resolved_ids, vec!["c", "a"]);
    }

    #[test]
    fn resolve_cluster_requires_assignments() {
        let p = panel();
        assert!(matches!(
            resolve_feature_set(&FeatureSelector::Cluster(1), &p, None),
            Err(EvalError::NoClusters)
        ));
        let clusters = vec![ClusterMembers {
            cluster_id: 1,
            members: ["a", "b"].iter().map(|s| s.to_string()).collect(),
        }];
        let fs = resolve_feature_set(&FeatureSelector::Cluster(1), &p, Some(&clusters)).unwrap();
        assert_eq!(fs.resolved_ids, vec!["a", "b"]);
        assert!(matches!(
            resolve_feature_set(&FeatureSelector::Cluster(9), &p, Some(&clusters)),
            Err(EvalError::UnknownCluster(9))
        ));
    }

    #[test]
    fn resolve_rejects_unknown_terms() {
        let p = panel();
        assert!(matches!(
            resolve_feature_set(&FeatureSelector::Ids(vec!["zz".into()]), &p, None),
            Err(EvalError::UnknownTerm(id)) if id == "zz"
        ));
    }
}
