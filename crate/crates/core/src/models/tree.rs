use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DesignMatrix, ModelError};

/// Number of candidate split features examined at each tree node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaxFeatures {
    /// All p features.
    All,
    /// ceil(sqrt(p)) features.
    Sqrt,
    /// ceil(f * p) features, f in (0, 1].
    Fraction(f64),
}

impl MaxFeatures {
    pub fn count(&self, p: usize) -> usize {
        let m = match self {
            MaxFeatures::All => p,
            MaxFeatures::Sqrt => (p as f64).sqrt().ceil() as usize,
            MaxFeatures::Fraction(f) => (f * p as f64).ceil() as usize,
        };
        m.clamp(1, p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if let MaxFeatures::Fraction(f) = self {
            if !(f.is_finite() && *f > 0.0 && *f <= 1.0) {
                return Err(ModelError::BadHyper(format!(
                    "max_features fraction {f} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for MaxFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxFeatures::All => write!(f, "all"),
            MaxFeatures::Sqrt => write!(f, "sqrt"),
            MaxFeatures::Fraction(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for MaxFeatures {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(MaxFeatures::All),
            "sqrt" => Ok(MaxFeatures::Sqrt),
            "auto" => Err(ModelError::BadHyper(
                "'auto' is ambiguous; use 'all' (every feature) or 'sqrt'".to_string(),
            )),
            other => {
                let f: f64 = other.parse().map_err(|_| {
                    ModelError::BadHyper(format!(
                        "max_features '{other}' is not 'all', 'sqrt', or a fraction"
                    ))
                })?;
                let mf = MaxFeatures::Fraction(f);
                mf.validate()?;
                Ok(mf)
            }
        }
    }
}

impl Serialize for MaxFeatures {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MaxFeatures::Fraction(f) => serializer.serialize_f64(*f),
            other => serializer.collect_str(other),
        }
    }
}

impl<'de> Deserialize<'de> for MaxFeatures {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(f) => {
                let mf = MaxFeatures::Fraction(f);
                mf.validate().map_err(serde::de::Error::custom)?;
                Ok(mf)
            }
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Random-forest hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestHyper {
    pub n_estimators: usize,
    pub max_features: MaxFeatures,
    pub max_depth: usize,
}

impl ForestHyper {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_estimators == 0 {
            return Err(ModelError::BadHyper("n_estimators must be positive".into()));
        }
        if self.max_depth == 0 {
            return Err(ModelError::BadHyper("max_depth must be positive".into()));
        }
        self.max_features.validate()
    }
}

impl fmt::Display for ForestHyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n_estimators={};max_features={};max_depth={}",
            self.n_estimators, self.max_features, self.max_depth
        )
    }
}

/// Regression tree stored as flat node arrays; `feature[i] == -1` marks a
/// leaf. `value[i]` holds the node's sample mean for every node, so leaf
/// predictions are finite and internal values are available for inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub feature: Vec<i32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub value: Vec<f64>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = 0usize;
        loop {
            let f = self.feature[node];
            if f < 0 {
                return self.value[node];
            }
            node = if row[f as usize] <= self.threshold[node] {
                self.left[node] as usize
            } else {
                self.right[node] as usize
            };
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(tree: &RegressionTree, node: usize) -> usize {
            if tree.feature[node] < 0 {
                0
            } else {
                1 + walk(tree, tree.left[node] as usize).max(walk(tree, tree.right[node] as usize))
            }
        }
        walk(self, 0)
    }
}

struct TreeBuilder<'a> {
    x: &'a DesignMatrix,
    max_depth: usize,
    max_features: MaxFeatures,
    tree: RegressionTree,
}

/// Best split of `samples` on `feature`: (weighted child SSE, threshold).
fn best_split_on_feature(
    x: &DesignMatrix,
    samples: &[usize],
    feature: usize,
) -> Option<(f64, f64)> {
    let mut order: Vec<usize> = samples.to_vec();
    order.sort_by(|&a, &b| {
        x.value(a, feature)
            .partial_cmp(&x.value(b, feature))
            .expect("finite values")
            .then(a.cmp(&b))
    });

    let n = order.len();
    let mut prefix_sum = vec![0.0; n + 1];
    let mut prefix_sq = vec![0.0; n + 1];
    for (i, &s) in order.iter().enumerate() {
        let y = x.target()[s];
        prefix_sum[i + 1] = prefix_sum[i] + y;
        prefix_sq[i + 1] = prefix_sq[i] + y * y;
    }
    let total_sum = prefix_sum[n];
    let total_sq = prefix_sq[n];

    let mut best: Option<(f64, f64)> = None;
    for k in 1..n {
        let lo = x.value(order[k - 1], feature);
        let hi = x.value(order[k], feature);
        if lo == hi {
            continue;
        }
        let left_sse = prefix_sq[k] - prefix_sum[k] * prefix_sum[k] / k as f64;
        let right_sum = total_sum - prefix_sum[k];
        let right_sse = (total_sq - prefix_sq[k]) - right_sum * right_sum / (n - k) as f64;
        let sse = left_sse + right_sse;
        if best.map_or(true, |(b, _)| sse < b) {
            best = Some((sse, (lo + hi) / 2.0));
        }
    }
    best
}

impl TreeBuilder<'_> {
    fn build(&mut self, samples: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> u32 {
        let node = self.tree.feature.len() as u32;
        let n = samples.len() as f64;
        let mean = samples.iter().map(|&s| self.x.target()[s]).sum::<f64>() / n;
        self.tree.feature.push(-1);
        self.tree.threshold.push(0.0);
        self.tree.left.push(0);
        self.tree.right.push(0);
        self.tree.value.push(mean);

        if depth >= self.max_depth || samples.len() < 2 {
            return node;
        }
        let variance = samples
            .iter()
            .map(|&s| (self.x.target()[s] - mean).powi(2))
            .sum::<f64>();
        if variance == 0.0 {
            return node;
        }

        let p = self.x.cols();
        let m = self.max_features.count(p);
        // Candidate features in sampled order; taking all features skips the
        // shuffle so the rng stream stays comparable across subset sizes.
        let candidates: Vec<usize> = if m == p {
            (0..p).collect()
        } else {
            let mut all: Vec<usize> = (0..p).collect();
            all.partial_shuffle(rng, m);
            all.truncate(m);
            all
        };

        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &candidates {
            if let Some((sse, threshold)) = best_split_on_feature(self.x, &samples, f) {
                if best.map_or(true, |(b, _, _)| sse < b) {
                    best = Some((sse, f, threshold));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return node; // all candidates constant within the node
        };

        let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&s| self.x.value(s, feature) <= threshold);
        debug_assert!(!left_samples.is_empty() && !right_samples.is_empty());

        let left = self.build(left_samples, depth + 1, rng);
        let right = self.build(right_samples, depth + 1, rng);
        self.tree.feature[node as usize] = feature as i32;
        self.tree.threshold[node as usize] = threshold;
        self.tree.left[node as usize] = left;
        self.tree.right[node as usize] = right;
        node
    }
}

/// Greedy CART regression tree on the given sample indices (with repeats
/// allowed, as in a bootstrap resample).
pub(crate) fn tree_fit_on(
    x: &DesignMatrix,
    samples: Vec<usize>,
    max_depth: usize,
    max_features: MaxFeatures,
    rng: &mut ChaCha8Rng,
) -> Result<RegressionTree, ModelError> {
    if samples.is_empty() || x.rows() == 0 {
        return Err(ModelError::EmptyData);
    }
    max_features.validate()?;
    let mut builder = TreeBuilder {
        x,
        max_depth,
        max_features,
        tree: RegressionTree {
            feature: Vec::new(),
            threshold: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            value: Vec::new(),
        },
    };
    builder.build(samples, 0, rng);
    Ok(builder.tree)
}

/// Fits a regression tree on all rows of `x`, splitting greedily by variance
/// reduction. Splits stop at `max_depth`, below 2 samples, or zero variance;
/// thresholds sit midway between adjacent sorted feature values.
pub fn tree_fit(
    x: &DesignMatrix,
    max_depth: usize,
    max_features: MaxFeatures,
    rng: &mut ChaCha8Rng,
) -> Result<RegressionTree, ModelError> {
    if x.rows() < 2 {
        return Err(ModelError::EmptyData);
    }
    tree_fit_on(x, (0..x.rows()).collect(), max_depth, max_features, rng)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    fn one_d(xs: Vec<f64>, ys: Vec<f64>) -> DesignMatrix {
        DesignMatrix::from_columns(vec!["x".into()], &[xs], ys).unwrap()
    }

    #[test]
    fn constant_target_is_single_leaf() {
        let x = one_d(vec![1.0, 2.0, 3.0, 4.0], vec![5.0; 4]);
        let tree = tree_fit(&x, 4, MaxFeatures::All, &mut rng()).unwrap();
        assert_eq!(tree.feature.len(), 1);
        assert_eq!(tree.predict_row(&[99.0]), 5.0);
    }

    #[test]
    fn step_target_splits_once() {
        let xs: Vec<f64> = (-10..10).map(|i| i as f64 / 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| if x < 0.0 { 0.0 } else { 1.0 }).collect();
        let x = one_d(xs.clone(), ys.clone());
        let tree = tree_fit(&x, 1, MaxFeatures::All, &mut rng()).unwrap();
        assert_eq!(tree.depth(), 1);
        // Threshold lands between -0.5 and 0.0.
        assert!((-0.5..0.0).contains(&tree.threshold[0]));
        for (x_val, y) in xs.iter().zip(&ys) {
            assert_eq!(tree.predict_row(&[*x_val]), *y);
        }
    }

    #[test]
    fn checkerboard_needs_depth_two() {
        // XOR-like target on two features.
        let mut cols = vec![Vec::new(), Vec::new()];
        let mut ys = Vec::new();
        for &a in &[0.0, 1.0] {
            for &b in &[0.0, 1.0] {
                for _ in 0..3 {
                    cols[0].push(a);
                    cols[1].push(b);
                    ys.push(if (a == 1.0) ^ (b == 1.0) { 1.0 } else { 0.0 });
                }
            }
        }
        let x = DesignMatrix::from_columns(vec!["a".into(), "b".into()], &cols, ys.clone())
            .unwrap();
        let tree = tree_fit(&x, 2, MaxFeatures::All, &mut rng()).unwrap();
        for i in 0..x.rows() {
            assert_eq!(tree.predict_row(x.row(i)), ys[i]);
        }
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn depth_limit_is_respected() {
        let xs: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x.sin() * 10.0).collect();
        for depth in [1usize, 2, 3, 4] {
            let tree = tree_fit(&one_d(xs.clone(), ys.clone()), depth, MaxFeatures::All, &mut rng())
                .unwrap();
            assert!(tree.depth() <= depth);
        }
    }

    #[test]
    fn split_matches_exhaustive_oracle_on_1d() {
        use rand::Rng;
        let mut r = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let n = r.random_range(5..40);
            let xs: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
            let ys: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
            let x = one_d(xs.clone(), ys.clone());
            let got = best_split_on_feature(&x, &(0..n).collect::<Vec<_>>(), 0);

            // Oracle: try every midpoint between distinct sorted values.
            let mut sorted = xs.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            sorted.dedup();
            let mut best = f64::INFINITY;
            for w in sorted.windows(2) {
                let thr = (w[0] + w[1]) / 2.0;
                let (mut ls, mut lq, mut ln_) = (0.0, 0.0, 0);
                let (mut rs, mut rq, mut rn) = (0.0, 0.0, 0);
                for (xv, yv) in xs.iter().zip(&ys) {
                    if *xv <= thr {
                        ls += yv;
                        lq += yv * yv;
                        ln_ += 1;
                    } else {
                        rs += yv;
                        rq += yv * yv;
                        rn += 1;
                    }
                }
                let sse = (lq - ls * ls / ln_ as f64) + (rq - rs * rs / rn as f64);
                if sse < best {
                    best = sse;
                }
            }
            match got {
                Some((sse, _)) => assert!(
                    (sse - best).abs() < 1e-9 * best.abs().max(1.0),
                    "{sse} vs oracle {best}"
                ),
                None => assert!(best.is_infinite()),
            }
        }
    }

    #[test]
    fn max_features_counts() {
        assert_eq!(MaxFeatures::All.count(10), 10);
        assert_eq!(MaxFeatures::Sqrt.count(10), 4); // ceil(sqrt(10))
        assert_eq!(MaxFeatures::Sqrt.count(9), 3);
        assert_eq!(MaxFeatures::Fraction(0.6).count(10), 6);
        assert_eq!(MaxFeatures::Fraction(0.8).count(10), 8);
        assert_eq!(MaxFeatures::Fraction(0.05).count(10), 1); // floor of 1
    }

    #[test]
    fn max_features_parsing() {
        assert_eq!("all".parse::<MaxFeatures>().unwrap(), MaxFeatures::All);
        assert_eq!("sqrt".parse::<MaxFeatures>().unwrap(), MaxFeatures::Sqrt);
        assert_eq!(
            "0.6".parse::<MaxFeatures>().unwrap(),
            MaxFeatures::Fraction(0.6)
        );
        assert!("auto".parse::<MaxFeatures>().is_err());
        assert!("1.5".parse::<MaxFeatures>().is_err());
        assert!("-0.2".parse::<MaxFeatures>().is_err());
    }

    #[test]
    fn hyper_serde_round_trip() {
        let hyper = ForestHyper {
            n_estimators: 200,
            max_features: MaxFeatures::Fraction(0.6),
            max_depth: 4,
        };
        let text = serde_json::to_string(&hyper).unwrap();
        assert_eq!(text, r#"{"n_estimators":200,"max_features":0.6,"max_depth":4}"#);
        let back: ForestHyper = serde_json::from_str(&text).unwrap();
        assert_eq!(hyper, back);

        let sqrt: ForestHyper =
            serde_json::from_str(r#"{"n_estimators":10,"max_features":"sqrt","max_depth":2}"#)
                .unwrap();
        assert_eq!(sqrt.max_features, MaxFeatures::Sqrt);
    }
}
