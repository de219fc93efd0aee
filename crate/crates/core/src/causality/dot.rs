//! Graphviz rendering of causality trees.
//!
//! Scripts are filled circles, documents squares and other resources open
//! circles. Inline scripts get a dashed outline and ad/tracker/widget nodes a
//! thick one. Fill colour follows the document each node is attached to; the
//! main document's resources are grey.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{CausalityTree, NodeIndex, NodeKind};

const MAIN_COLOUR: &str = "#bdbdbd";
const FRAME_COLOURS: [&str; 8] = [
    "#64b5f6", "#81c784", "#ffb74d", "#e57373", "#ba68c8", "#4db6ac", "#f06292", "#a1887f",
];

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn short_url(url: &str) -> &str {
    let no_query = url.split(['?', '#']).next().unwrap_or(url);
    match no_query.trim_end_matches('/').rsplit_once('/') {
        Some((_, last)) if !last.is_empty() && !no_query.ends_with("//") => last,
        _ => no_query,
    }
}

/// Deterministic DOT text for `tree`.
pub fn export_dot(tree: &CausalityTree) -> String {
    // Document colours in first-seen order.
    let mut colours: BTreeMap<NodeIndex, &str> = BTreeMap::new();
    colours.insert(CausalityTree::ROOT, MAIN_COLOUR);
    for (idx, node) in tree.nodes() {
        if node.kind == NodeKind::Document && idx != CausalityTree::ROOT {
            let next = FRAME_COLOURS[(colours.len() - 1) % FRAME_COLOURS.len()];
            colours.insert(idx, next);
        }
    }
    let colour_of = |idx: NodeIndex| colours.get(&idx).copied().unwrap_or(MAIN_COLOUR);

    let mut out = String::new();
    writeln!(out, "digraph causality {{").unwrap();
    writeln!(out, "  label=\"{}\";", escape(&tree.site_domain)).unwrap();
    writeln!(out, "  node [fontname=\"Helvetica\", fontsize=10];").unwrap();
    for (idx, node) in tree.nodes() {
        let mut label = match &node.url {
            Some(url) => escape(short_url(url)),
            None => node.kind.as_str().to_string(),
        };
        for d in &node.detections {
            write!(label, "\\n{}", escape(&format!("{} {}", d.library_id, d.version))).unwrap();
        }
        let mut styles = Vec::new();
        let (shape, fill) = match node.kind {
            NodeKind::Document => {
                // Own colour inside, DOM-parent colour on the border.
                styles.push("filled");
                ("square", colour_of(idx))
            }
            NodeKind::ScriptInline | NodeKind::ScriptUrl => {
                styles.push("filled");
                ("circle", colour_of(tree.attached_document_of(idx)))
            }
            _ => ("circle", "white"),
        };
        if node.kind == NodeKind::ScriptInline {
            styles.push("dashed");
        }
        let border = match node.kind {
            NodeKind::Document => node.attached_document.map(colour_of).unwrap_or("black"),
            NodeKind::Image | NodeKind::Stylesheet | NodeKind::Other => colour_of(tree.attached_document_of(idx)),
            _ => "black",
        };
        let penwidth = if node.is_labeled() { 4 } else { 1 };
        let mut attrs = format!(
            "shape={shape}, style=\"{}\", fillcolor=\"{fill}\", color=\"{border}\", penwidth={penwidth}, label=\"{}\"",
            styles.join(","),
            label
        );
        if !node.labels.is_empty() {
            let labels: Vec<&str> = node.labels.iter().map(|l| l.as_str()).collect();
            write!(attrs, ", tooltip=\"{}\"", labels.join(",")).unwrap();
        }
        writeln!(out, "  n{} [{attrs}];", idx.0).unwrap();
    }
    for (parent, child) in tree.edges() {
        writeln!(out, "  n{} -> n{};", parent.0, child.0).unwrap();
    }
    out.push_str("}\n");
    out
}
