//! Causality trees: which element caused which other element to load.
//!
//! Nodes are snapshots of page elements at a point in time, not DOM nodes; an
//! element whose URL changes shows up once per URL. Edges point from the
//! element that caused a load to the element that was loaded. Trees are built
//! offline from a crawl event log by [`build_tree`].

mod build;
mod dot;
mod duplicates;
pub mod event;
mod inclusion;
mod metrics;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::detection::{Detection, ProbeResult};
use crate::digest::Digest;

pub use build::{build_tree, BuildError, BuildWarnings};
pub use dot::export_dot;
pub use duplicates::{duplicate_inclusions, DocumentDuplicates, DuplicateReport, LibraryDuplicates};
pub use event::{read_event_log, write_event_log, CrawlEvent, EventKind, EventLogError, ResourceType};
pub use inclusion::{classify_inclusion, classify_url, host_of, host_within, InclusionClass};
pub use metrics::{tree_metrics, TreeMetrics};

/// Provenance label from filter-list matching or an explicit hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Ad,
    Tracker,
    Widget,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Ad, Label::Tracker, Label::Widget];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ad => "ad",
            Label::Tracker => "tracker",
            Label::Widget => "widget",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ad" => Ok(Label::Ad),
            "tracker" => Ok(Label::Tracker),
            "widget" => Ok(Label::Widget),
            other => Err(format!("unknown label {other:?} (expected ad, tracker or widget)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Document,
    ScriptInline,
    ScriptUrl,
    Image,
    Stylesheet,
    Other,
}

impl NodeKind {
    pub fn is_script(self) -> bool {
        matches!(self, NodeKind::ScriptInline | NodeKind::ScriptUrl)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Document => "document",
            NodeKind::ScriptInline => "script_inline",
            NodeKind::ScriptUrl => "script_url",
            NodeKind::Image => "image",
            NodeKind::Stylesheet => "stylesheet",
            NodeKind::Other => "other",
        }
    }
}

/// Index of a node inside its [`CausalityTree`]. The root is `NodeIndex(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeIndex(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalityNode {
    pub node_id: String,
    /// Sequence number of the event that created this snapshot.
    pub seq: u64,
    pub timestamp_ms: u64,
    pub kind: NodeKind,
    pub url: Option<String>,
    pub frame_id: String,
    /// Document the element is attached to in the DOM.
    pub attached_document: Option<NodeIndex>,
    pub digest: Option<Digest>,
    pub source_length: Option<u64>,
    /// Labels set on this node itself.
    pub direct_labels: BTreeSet<Label>,
    /// Direct labels plus everything inherited by propagation.
    pub labels: BTreeSet<Label>,
    pub detections: Vec<Detection>,
}

impl CausalityNode {
    pub fn is_labeled(&self) -> bool {
        !self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalityTree {
    pub site_domain: String,
    nodes: Vec<CausalityNode>,
    parents: Vec<Option<NodeIndex>>,
    children: Vec<Vec<NodeIndex>>,
    /// Probe hits from the log, in event order.
    pub probe_results: Vec<ProbeResult>,
    pub warnings: BuildWarnings,
}

impl CausalityTree {
    pub const ROOT: NodeIndex = NodeIndex(0);

    pub fn root(&self) -> &CausalityNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: NodeIndex) -> &CausalityNode {
        &self.nodes[idx.0]
    }

    pub fn node_mut(&mut self, idx: NodeIndex) -> &mut CausalityNode {
        &mut self.nodes[idx.0]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = (NodeIndex, &CausalityNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeIndex(i), n))
    }

    pub fn parent(&self, idx: NodeIndex) -> Option<NodeIndex> {
        self.parents[idx.0]
    }

    pub fn children(&self, idx: NodeIndex) -> &[NodeIndex] {
        &self.children[idx.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeIndex, NodeIndex)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, NodeIndex(i))))
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().filter(|p| p.is_some()).count()
    }

    /// Nodes in breadth-first order from the root.
    pub fn bfs(&self) -> Vec<NodeIndex> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut queue = std::collections::VecDeque::from([Self::ROOT]);
        while let Some(n) = queue.pop_front() {
            order.push(n);
            queue.extend(self.children(n).iter().copied());
        }
        order
    }

    /// Number of edges from the root to `idx`.
    pub fn depth_of(&self, idx: NodeIndex) -> usize {
        let mut depth = 0;
        let mut cur = idx;
        while let Some(p) = self.parent(cur) {
            depth += 1;
            cur = p;
        }
        depth
    }

    /// Latest script snapshot with the given element id.
    pub fn find_script(&self, node_id: &str) -> Option<NodeIndex> {
        self.nodes
            .iter()
            .rposition(|n| n.kind.is_script() && n.node_id == node_id)
            .map(NodeIndex)
    }

    /// Document a node is attached to, defaulting to the root.
    pub fn attached_document_of(&self, idx: NodeIndex) -> NodeIndex {
        if self.node(idx).kind == NodeKind::Document {
            return idx;
        }
        self.node(idx).attached_document.unwrap_or(Self::ROOT)
    }

    /// Adds direct labels and keeps the effective label sets propagated.
    pub fn add_direct_label(&mut self, idx: NodeIndex, label: Label) {
        let node = &mut self.nodes[idx.0];
        node.direct_labels.insert(label);
        node.labels.insert(label);
    }

    /// Makes every node carry the labels of all its ancestors. Idempotent, and
    /// label sets only grow.
    pub fn propagate_labels(&mut self) {
        for idx in self.bfs() {
            if let Some(parent) = self.parent(idx) {
                let inherited = self.nodes[parent.0].labels.clone();
                self.nodes[idx.0].labels.extend(inherited);
            }
        }
    }

    pub(crate) fn from_parts(
        site_domain: String,
        nodes: Vec<CausalityNode>,
        parents: Vec<Option<NodeIndex>>,
        probe_results: Vec<ProbeResult>,
        warnings: BuildWarnings,
    ) -> Self {
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                children[p.0].push(NodeIndex(i));
            }
        }
        CausalityTree {
            site_domain,
            nodes,
            parents,
            children,
            probe_results,
            warnings,
        }
    }
}

/// Free-function form of [`CausalityTree::propagate_labels`].
pub fn propagate_labels(mut tree: CausalityTree) -> CausalityTree {
    tree.propagate_labels();
    tree
}
