use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CausalityTree, NodeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeMetrics {
    pub nodes: usize,
    pub by_kind: BTreeMap<NodeKind, usize>,
    /// Edges on the longest root-to-leaf path.
    pub depth: usize,
    pub median_depth_by_kind: BTreeMap<NodeKind, f64>,
    pub documents_per_frame: BTreeMap<String, usize>,
}

pub fn tree_metrics(tree: &CausalityTree) -> TreeMetrics {
    let mut depths = vec![0usize; tree.len()];
    for idx in tree.bfs() {
        if let Some(p) = tree.parent(idx) {
            depths[idx.0] = depths[p.0] + 1;
        }
    }

    let mut by_kind = BTreeMap::new();
    let mut depths_by_kind: BTreeMap<NodeKind, Vec<usize>> = BTreeMap::new();
    let mut documents_per_frame = BTreeMap::new();
    for (idx, node) in tree.nodes() {
        *by_kind.entry(node.kind).or_insert(0) += 1;
        depths_by_kind.entry(node.kind).or_default().push(depths[idx.0]);
        if node.kind == NodeKind::Document {
            *documents_per_frame.entry(node.frame_id.clone()).or_insert(0) += 1;
        }
    }
    let median_depth_by_kind = depths_by_kind
        .into_iter()
        .map(|(kind, mut d)| {
            d.sort_unstable();
            let mid = d.len() / 2;
            let median = if d.len() % 2 == 1 {
                d[mid] as f64
            } else {
                (d[mid - 1] + d[mid]) as f64 / 2.0
            };
            (kind, median)
        })
        .collect();

    TreeMetrics {
        nodes: tree.len(),
        by_kind,
        depth: depths.into_iter().max().unwrap_or(0),
        median_depth_by_kind,
        documents_per_frame,
    }
}
