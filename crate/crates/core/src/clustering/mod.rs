//! Agglomerative hierarchical clustering of term series: pairwise Euclidean
//! distances, Ward linkage via the Lance-Williams recurrence, dendrogram
//! cutting, and per-cluster centroid/dispersion profiles.

use std::error;
use std::fmt;

mod cut;
mod distance;
mod export;
mod linkage;

pub use cut::{cluster_profiles, cut_dendrogram, ClusterMembers, ClusterProfile};
pub use distance::{euclidean_distances, DistanceMatrix};
pub use export::{dendrogram_json, dendrogram_newick};
pub use linkage::{ward_linkage, Dendrogram, MergeStep};

#[derive(Clone, Debug, PartialEq)]
pub enum ClusterError {
    TooFewSeries { n: usize },
    LengthMismatch { a: String, b: String },
    KOutOfRange { k: usize, n: usize },
    UnknownMember(String),
    UncoveredTerm(String),
    EmptyCluster { cluster_id: u32 },
}

impl fmt::Display for ClusterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterError::TooFewSeries { n } => {
                write!(f, "clustering needs at least 2 series, got {n}")
            }
            ClusterError::LengthMismatch { a, b } => {
                write!(f, "series '{a}' and '{b}' have different lengths")
            }
            ClusterError::KOutOfRange { k, n } => {
                write!(f, "cluster count {k} out of range 1..={n}")
            }
            ClusterError::UnknownMember(id) => {
                write!(f, "cluster member '{id}' is not a panel term")
            }
            ClusterError::UncoveredTerm(id) => {
                write!(f, "panel term '{id}' is not assigned to any cluster")
            }
            ClusterError::EmptyCluster { cluster_id } => {
                write!(f, "cluster {cluster_id} has no members")
            }
        }
    }
}

impl error::Error for ClusterError {}
