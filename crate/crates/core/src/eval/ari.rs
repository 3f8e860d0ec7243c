use std::collections::BTreeMap;

use super::EvalError;

fn comb2(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand Index between two labelings of the same items: 1 for
/// identical partitions, about 0 for chance-level agreement.
pub fn adjusted_rand_index(
    labels_a: &BTreeMap<String, u32>,
    labels_b: &BTreeMap<String, u32>,
) -> Result<f64, EvalError> {
    if labels_a.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if labels_a.len() != labels_b.len()
        || !labels_a.keys().eq(labels_b.keys())
    {
        return Err(EvalError::LabelKeyMismatch);
    }

    let mut contingency: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut rows: BTreeMap<u32, u64> = BTreeMap::new();
    let mut cols: BTreeMap<u32, u64> = BTreeMap::new();
    for (item, &a) in labels_a {
        let b = labels_b[item];
        *contingency.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }

    let n = labels_a.len() as u64;
    let sum_cells: f64 = contingency.values().map(|&c| comb2(c)).sum();
    let sum_rows: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = cols.values().map(|&c| comb2(c)).sum();
    let expected = sum_rows * sum_cols / comb2(n);
    let max_index = (sum_rows + sum_cols) / 2.0;
    if (max_index - expected).abs() < 1e-300 {
        // Both partitions put everything in one cluster (or all singletons).
        return Ok(1.0);
    }
    Ok((sum_cells - expected) / (max_index - expected))
}
