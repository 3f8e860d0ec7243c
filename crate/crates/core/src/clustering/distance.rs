use super::ClusterError;
use crate::timeseries::Panel;

/// Symmetric pairwise distance matrix over labeled series.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    labels: Vec<String>,
    values: Vec<f64>, // row-major n x n
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Builds a matrix from the strict upper triangle; symmetry and the zero
    /// diagonal hold by construction.
    pub fn from_upper<F: FnMut(usize, usize) -> f64>(
        labels: Vec<String>,
        mut distance: F,
    ) -> Self {
        let n = labels.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = distance(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix { n, labels, values }
    }
}

/// Pairwise Euclidean distances between the panel's term series.
///
/// Each pair is computed once, so the matrix is exactly symmetric.
pub fn euclidean_distances(panel: &Panel) -> Result<DistanceMatrix, ClusterError> {
    let terms = panel.terms();
    if terms.len() < 2 {
        return Err(ClusterError::TooFewSeries { n: terms.len() });
    }
    for pair in terms.windows(2) {
        if pair[0].len() != pair[1].len() {
            return Err(ClusterError::LengthMismatch {
                a: pair[0].id().to_string(),
                b: pair[1].id().to_string(),
            });
        }
    }
    let labels = terms.iter().map(|s| s.id().to_string()).collect();
    Ok(DistanceMatrix::from_upper(labels, |i, j| {
        terms[i]
            .values()
            .iter()
            .zip(terms[j].values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::{align_panel, WeekIndex, WeeklySeries};

    fn panel(rows: &[(&str, Vec<f64>)]) -> Panel {
        let start: WeekIndex = "2009-W10".parse().unwrap();
        let series = rows
            .iter()
            .map(|(id, v)| WeeklySeries::new(*id, start, v.clone()).unwrap())
            .collect();
        align_panel(series, None, None).unwrap()
    }

    #[test]
    fn three_four_five() {
        let p = panel(&[("a", vec![0.0, 0.0]), ("b", vec![3.0, 4.0])]);
        let d = euclidean_distances(&p).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn identical_series_distance_zero() {
        let p = panel(&[("a", vec![1.0, 2.0, 3.0]), ("b", vec![1.0, 2.0, 3.0])]);
        let d = euclidean_distances(&p).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn matches_naive_double_loop() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<(String, Vec<f64>)> = (0..10)
            .map(|i| {
                (
                    format!("s{i}"),
                    (0..25).map(|_| rng.random_range(0.0..100.0)).collect(),
                )
            })
            .collect();
        let borrowed: Vec<(&str, Vec<f64>)> =
            rows.iter().map(|(id, v)| (id.as_str(), v.clone())).collect();
        let p = panel(&borrowed);
        let d = euclidean_distances(&p).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let mut acc = 0.0;
                for t in 0..25 {
                    let diff = rows[i].1[t] - rows[j].1[t];
                    acc += diff * diff;
                }
                assert!((d.get(i, j) - acc.sqrt()).abs() < 1e-9);
                assert_eq!(d.get(i, j), d.get(j, i));
            }
        }
    }

    #[test]
    fn needs_two_series() {
        let p = panel(&[("a", vec![0.0, 1.0])]);
        assert!(matches!(
            euclidean_distances(&p),
            Err(ClusterError::TooFewSeries { n: 1 })
        ));
    }
}
