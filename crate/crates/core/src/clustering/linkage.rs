use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ClusterError, DistanceMatrix};

/// One agglomeration: nodes `left` and `right` merge at `height` into a
/// cluster of `size` members. Node ids 0..n-1 are leaves; id n+k is the
/// cluster formed by step k.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Stepwise dendrogram: ordered leaves plus n-1 merge steps with
/// nondecreasing heights.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub steps: Vec<MergeStep>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    /// Height of the merge that created `node`, 0 for leaves.
    pub(crate) fn node_height(&self, node: usize) -> f64 {
        if node < self.leaves.len() {
            0.0
        } else {
            self.steps[node - self.leaves.len()].height
        }
    }
}

/// Agglomerative clustering with Ward's criterion.
///
/// Repeatedly merges the active pair at minimal Ward distance; distances to
/// the merged cluster follow the Lance-Williams recurrence
///
/// ```text
/// d(A+B, C)^2 = [(nA+nC) d(A,C)^2 + (nB+nC) d(B,C)^2 - nC d(A,B)^2] / (nA+nB+nC)
/// ```
///
/// so the distance between two singletons is their input distance, and merge
/// heights are the Ward distances themselves. Ties select the lowest
/// (left, right) node-id pair, making the output deterministic.
pub fn ward_linkage(d: &DistanceMatrix) -> Result<Dendrogram, ClusterError> {
    let n = d.n();
    if n < 2 {
        return Err(ClusterError::TooFewSeries { n });
    }

    let total = 2 * n - 1;
    // Squared distances between active nodes, indexed by node id.
    let mut sq = vec![0.0; total * total];
    for i in 0..n {
        for j in 0..n {
            sq[i * total + j] = d.get(i, j) * d.get(i, j);
        }
    }
    let mut size = vec![0usize; total];
    size[..n].fill(1);

    let mut active: BTreeSet<usize> = (0..n).collect();
    let mut steps = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        // BTreeSet iteration is ascending, so strict '<' keeps the
        // lexicographically smallest pair on ties.
        let mut best = (usize::MAX, usize::MAX);
        let mut best_sq = f64::INFINITY;
        for &a in &active {
            for &b in active.range(a + 1..) {
                let v = sq[a * total + b];
                if v < best_sq {
                    best_sq = v;
                    best = (a, b);
                }
            }
        }
        let (a, b) = best;
        let merged = n + step;
        let (na, nb) = (size[a] as f64, size[b] as f64);

        active.remove(&a);
        active.remove(&b);
        for &c in &active {
            let nc = size[c] as f64;
            let v = ((na + nc) * sq[a * total + c] + (nb + nc) * sq[b * total + c]
                - nc * best_sq)
                / (na + nb + nc);
            let v = v.max(0.0); // guard fp cancellation
            sq[merged * total + c] = v;
            sq[c * total + merged] = v;
        }
        active.insert(merged);
        size[merged] = size[a] + size[b];
        steps.push(MergeStep {
            left: a,
            right: b,
            height: best_sq.sqrt(),
            size: size[merged],
        });
    }

    Ok(Dendrogram {
        leaves: d.labels().to_vec(),
        steps,
    })
}
