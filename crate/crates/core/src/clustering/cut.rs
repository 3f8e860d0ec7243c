use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ClusterError, Dendrogram};
use crate::timeseries::{mean, pop_std, Panel, WeeklySeries};

/// Members of one cluster after cutting a dendrogram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterMembers {
    pub cluster_id: u32,
    pub members: BTreeSet<String>,
}

/// A cluster's members with its per-week centroid and dispersion.
#[derive(Clone, Debug)]
pub struct ClusterProfile {
    pub cluster_id: u32,
    pub members: BTreeSet<String>,
    pub centroid: WeeklySeries,
    /// Per-week population standard deviation across members (zero for
    /// singleton clusters).
    pub dispersion: WeeklySeries,
}

/// Cuts the dendrogram into `k` clusters by undoing the `k-1` highest merges.
///
/// Clusters are numbered 1..k in decreasing size; equal-sized clusters order
/// by their lexicographically smallest member id.
pub fn cut_dendrogram(
    dendro: &Dendrogram,
    k: usize,
) -> Result<Vec<ClusterMembers>, ClusterError> {
    let n = dendro.n_leaves();
    if k < 1 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }

    // Apply the first n-k merges; heights are nondecreasing, so the
    // remaining k-1 steps are the highest ones.
    let mut members: BTreeMap<usize, Vec<usize>> =
        (0..n).map(|i| (i, vec![i])).collect();
    for (step_idx, step) in dendro.steps.iter().take(n - k).enumerate() {
        let left = members.remove(&step.left).expect("node merged twice");
        let mut right = members.remove(&step.right).expect("node merged twice");
        let mut merged = left;
        merged.append(&mut right);
        members.insert(n + step_idx, merged);
    }

    let mut clusters: Vec<BTreeSet<String>> = members
        .into_values()
        .map(|leaf_ids| {
            leaf_ids
                .into_iter()
                .map(|i| dendro.leaves[i].clone())
                .collect()
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.iter().next().cmp(&b.iter().next()))
    });

    Ok(clusters
        .into_iter()
        .enumerate()
        .map(|(i, members)| ClusterMembers {
            cluster_id: (i + 1) as u32,
            members,
        })
        .collect())
}

/// Per-week mean and population standard deviation over each cluster's
/// member series. The member sets must partition the panel's term ids.
pub fn cluster_profiles(
    panel: &Panel,
    member_sets: &[ClusterMembers],
) -> Result<Vec<ClusterProfile>, ClusterError> {
    let mut covered = BTreeSet::new();
    for set in member_sets {
        if set.members.is_empty() {
            return Err(ClusterError::EmptyCluster {
                cluster_id: set.cluster_id,
            });
        }
        for id in &set.members {
            if panel.term(id).is_none() {
                return Err(ClusterError::UnknownMember(id.clone()));
            }
            covered.insert(id.clone());
        }
    }
    for term in panel.terms() {
        if !covered.contains(term.id()) {
            return Err(ClusterError::UncoveredTerm(term.id().to_string()));
        }
    }

    let weeks = panel.span().len();
    member_sets
        .iter()
        .map(|set| {
            let series: Vec<&WeeklySeries> = set
                .members
                .iter()
                .map(|id| panel.term(id).expect("membership validated"))
                .collect();
            let mut centroid = Vec::with_capacity(weeks);
            let mut dispersion = Vec::with_capacity(weeks);
            let mut column = Vec::with_capacity(series.len());
            for t in 0..weeks {
                column.clear();
                column.extend(series.iter().map(|s| s.values()[t]));
                centroid.push(mean(&column));
                dispersion.push(pop_std(&column));
            }
            let id = set.cluster_id;
            let template = series[0];
            Ok(ClusterProfile {
                cluster_id: id,
                members: set.members.clone(),
                centroid: template.with_values(format!("cluster{id}_centroid"), centroid),
                dispersion: template.with_values(format!("cluster{id}_sd"), dispersion),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{euclidean_distances, ward_linkage};
    use crate::timeseries::{align_panel, WeekIndex, WeeklySeries};

    fn panel(rows: &[(&str, Vec<f64>)]) -> Panel {
        let start: WeekIndex = "2009-W10".parse().unwrap();
        let series = rows
            .iter()
            .map(|(id, v)| WeeklySeries::new(*id, start, v.clone()).unwrap())
            .collect();
        align_panel(series, None, None).unwrap()
    }

    fn dendro_012_10() -> Dendrogram {
        let p = panel(&[
            ("a", vec![0.0]),
            ("b", vec![2.0]),
            ("c", vec![10.0]),
        ]);
        ward_linkage(&euclidean_distances(&p).unwrap()).unwrap()
    }

    #[test]
    fn cut_boundaries() {
        let d = dendro_012_10();
        let singletons = cut_dendrogram(&d, 3).unwrap();
        assert_eq!(singletons.len(), 3);
        assert!(singletons.iter().all(|c| c.members.len() == 1));

        let one = cut_dendrogram(&d, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].members.len(), 3);

        assert!(cut_dendrogram(&d, 0).is_err());
        assert!(cut_dendrogram(&d, 4).is_err());
    }

    #[test]
    fn cut_two_splits_off_the_far_point() {
        let clusters = cut_dendrogram(&dendro_012_10(), 2).unwrap();
        // Larger cluster first.
        assert_eq!(clusters[0].cluster_id, 1);
        assert_eq!(
            clusters[0].members,
            ["a", "b"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(
            clusters[1].members,
            ["c"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn cut_partitions_leaves_for_every_k() {
        let d = dendro_012_10();
        for k in 1..=3 {
            let clusters = cut_dendrogram(&d, k).unwrap();
            let mut all: Vec<String> = clusters
                .iter()
                .flat_map(|c| c.members.iter().cloned())
                .collect();
            all.sort();
            assert_eq!(all, vec!["a", "b", "c"]);
        }
    }

    #[test]
    fn profiles_mean_and_sd() {
        let p = panel(&[("a", vec![0.0, 10.0]), ("b", vec![10.0, 0.0])]);
        let sets = vec![ClusterMembers {
            cluster_id: 1,
            members: ["a", "b"].iter().map(|s| s.to_string()).collect(),
        }];
        let profiles = cluster_profiles(&p, &sets).unwrap();
        assert_eq!(profiles[0].centroid.values(), &[5.0, 5.0]);
        assert_eq!(profiles[0].dispersion.values(), &[5.0, 5.0]);
    }

    #[test]
    fn profiles_identical_members_have_zero_dispersion() {
        let p = panel(&[("a", vec![1.0, 2.0]), ("b", vec![1.0, 2.0])]);
        let sets = vec![ClusterMembers {
            cluster_id: 1,
            members: ["a", "b"].iter().map(|s| s.to_string()).collect(),
        }];
        let profiles = cluster_profiles(&p, &sets).unwrap();
        assert_eq!(profiles[0].centroid.values(), &[1.0, 2.0]);
        assert_eq!(profiles[0].dispersion.values(), &[0.0, 0.0]);
    }

    #[test]
    fn profiles_match_naive_loop_on_random_panel() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<(String, Vec<f64>)> = (0..9)
            .map(|i| {
                (
                    format!("s{i}"),
                    (0..20).map(|_| rng.random_range(0.0..100.0)).collect(),
                )
            })
            .collect();
        let borrowed: Vec<(&str, Vec<f64>)> =
            rows.iter().map(|(id, v)| (id.as_str(), v.clone())).collect();
        let p = panel(&borrowed);
        let sets: Vec<ClusterMembers> = (0..3)
            .map(|c| ClusterMembers {
                cluster_id: c as u32 + 1,
                members: (0..3).map(|i| format!("s{}", c * 3 + i)).collect(),
            })
            .collect();
        let profiles = cluster_profiles(&p, &sets).unwrap();
        for (c, profile) in profiles.iter().enumerate() {
            for t in 0..20 {
                let vals: Vec<f64> = (0..3).map(|i| rows[c * 3 + i].1[t]).collect();
                let m = vals.iter().sum::<f64>() / 3.0;
                let sd = (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 3.0).sqrt();
                assert!((profile.centroid.values()[t] - m).abs() < 1e-12);
                assert!((profile.dispersion.values()[t] - sd).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn profiles_reject_unknown_and_uncovered() {
        let p = panel(&[("a", vec![0.0]), ("b", vec![1.0])]);
        let bad = vec![ClusterMembers {
            cluster_id: 1,
            members: ["a", "zz"].iter().map(|s| s.to_string()).collect(),
        }];
        assert!(matches!(
            cluster_profiles(&p, &bad),
            Err(ClusterError::UnknownMember(id)) if id == "zz"
        ));
        let partial = vec![ClusterMembers {
            cluster_id: 1,
            members: ["a"].iter().map(|s| s.to_string()).collect(),
        }];
        assert!(matches!(
            cluster_profiles(&p, &partial),
            Err(ClusterError::UncoveredTerm(id)) if id == "b"
        ));
    }
}
