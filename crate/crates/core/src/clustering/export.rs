use super::Dendrogram;

/// JSON form of a dendrogram: a `leaves` array and a `steps` array of
/// `{left, right, height, size}` objects. Node ids 0..n-1 are leaves and
/// n+k is the cluster created by step k; heights are Ward distances.
pub fn dendrogram_json(dendro: &Dendrogram) -> serde_json::Value {
    serde_json::to_value(dendro).expect("dendrogram serializes")
}

/// Newick text with branch lengths equal to height differences between a
/// node and its parent merge.
pub fn dendrogram_newick(dendro: &Dendrogram) -> String {
    let n = dendro.n_leaves();
    if n == 1 {
        return format!("{};", quote_label(&dendro.leaves[0]));
    }
    let root = n + dendro.steps.len() - 1;
    let mut out = String::new();
    write_node(dendro, root, None, &mut out);
    out.push(';');
    out
}

fn write_node(dendro: &Dendrogram, node: usize, parent_height: Option<f64>, out: &mut String) {
    let n = dendro.n_leaves();
    if node < n {
        out.push_str(&quote_label(&dendro.leaves[node]));
    } else {
        let step = &dendro.steps[node - n];
        out.push('(');
        write_node(dendro, step.left, Some(step.height), out);
        out.push(',');
        write_node(dendro, step.right, Some(step.height), out);
        out.push(')');
    }
    if let Some(parent) = parent_height {
        let branch = parent - dendro.node_height(node);
        out.push_str(&format!(":{branch}"));
    }
}

fn quote_label(label: &str) -> String {
    let plain = label
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if plain && !label.is_empty() {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}
