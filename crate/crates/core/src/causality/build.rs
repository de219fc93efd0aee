use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::event::{CrawlEvent, EventKind, ResourceType};
use super::{CausalityNode, CausalityTree, NodeIndex, NodeKind};
use crate::detection::ProbeResult;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("event log contains no document_committed event")]
    EmptyLog,
    #[error("event seq {seq} does not increase (previous {previous})")]
    OutOfOrder { seq: u64, previous: u64 },
}

/// Events that could not be placed in the tree as stated, by cause.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildWarnings {
    /// Events before the main document was committed.
    pub before_main_document: usize,
    /// Events naming a frame that was never attached.
    pub unknown_frame: usize,
    /// Initiators that do not resolve to a known node; the event was attached
    /// to its containing document instead.
    pub orphan_initiator: usize,
    /// Events missing a field their kind requires.
    pub malformed: usize,
    /// `url_changed` on an element that was never seen.
    pub unknown_node: usize,
    /// `label_hint` on an element that was never seen.
    pub unmatched_label_hint: usize,
}

impl BuildWarnings {
    pub fn total(&self) -> usize {
        self.before_main_document
            + self.unknown_frame
            + self.orphan_initiator
            + self.malformed
            + self.unknown_node
            + self.unmatched_label_hint
    }
}

#[derive(Debug, Default)]
struct FrameState {
    /// Node that created the frame element, if known.
    creator: Option<NodeIndex>,
    /// Document the frame element lives in.
    embedding_document: Option<NodeIndex>,
    current_document: Option<NodeIndex>,
    /// Document snapshot created by a `url_changed` and not yet committed.
    pending_navigation: Option<NodeIndex>,
}

struct Builder {
    site_domain: String,
    nodes: Vec<CausalityNode>,
    parents: Vec<Option<NodeIndex>>,
    frames: HashMap<String, FrameState>,
    frame_owners: HashMap<String, String>,
    /// Latest snapshot per element id.
    current: HashMap<String, NodeIndex>,
    probe_results: Vec<ProbeResult>,
    warnings: BuildWarnings,
}

/// Assembles a causality tree from an ordered event log.
///
/// The first `document_committed` becomes the root. A `url_changed` creates a
/// new snapshot whose parent is the change's initiator, falling back to the
/// previous snapshot's parent. Events whose initiator cannot be resolved hang
/// off their containing document. Every node is created after its parent, so
/// the result is a tree by construction.
pub fn build_tree(events: &[CrawlEvent], site_domain: &str) -> Result<CausalityTree, BuildError> {
    for pair in events.windows(2) {
        if pair[1].seq <= pair[0].seq {
            return Err(BuildError::OutOfOrder {
                seq: pair[1].seq,
                previous: pair[0].seq,
            });
        }
    }
    if !events.iter().any(|e| e.kind == EventKind::DocumentCommitted && e.url.is_some()) {
        return Err(BuildError::EmptyLog);
    }

    let mut b = Builder {
        site_domain: site_domain.to_ascii_lowercase(),
        nodes: Vec::new(),
        parents: Vec::new(),
        frames: HashMap::new(),
        frame_owners: HashMap::new(),
        current: HashMap::new(),
        probe_results: Vec::new(),
        warnings: BuildWarnings::default(),
    };
    for event in events {
        b.apply(event);
    }
    Ok(CausalityTree::from_parts(
        b.site_domain,
        b.nodes,
        b.parents,
        b.probe_results,
        b.warnings,
    ))
}

impl Builder {
    fn push(&mut self, event: &CrawlEvent, kind: NodeKind, url: Option<String>, frame_id: &str, parent: Option<NodeIndex>, attached: Option<NodeIndex>) -> NodeIndex {
        let idx = NodeIndex(self.nodes.len());
        self.nodes.push(CausalityNode {
            node_id: event.node_id.clone(),
            seq: event.seq,
            timestamp_ms: event.timestamp_ms,
            kind,
            url,
            frame_id: frame_id.to_string(),
            attached_document: attached,
            digest: event.source_digest,
            source_length: event.source_length,
            direct_labels: BTreeSet::new(),
            labels: BTreeSet::new(),
            detections: Vec::new(),
        });
        self.parents.push(parent);
        if !event.node_id.is_empty() {
            self.current.insert(event.node_id.clone(), idx);
        }
        idx
    }

    fn resolve(&self, id: Option<&String>) -> Option<NodeIndex> {
        id.and_then(|id| self.current.get(id).copied())
    }

    /// Resolves the initiator, counting an orphan when one was named but is
    /// unknown.
    fn initiator(&mut self, event: &CrawlEvent) -> Option<NodeIndex> {
        let found = self.resolve(event.initiator_node_id.as_ref());
        if found.is_none() && event.initiator_node_id.is_some() {
            self.warnings.orphan_initiator += 1;
        }
        found
    }

    fn apply(&mut self, event: &CrawlEvent) {
        if self.nodes.is_empty() {
            if event.kind == EventKind::DocumentCommitted && event.url.is_some() {
                let root = self.push(event, NodeKind::Document, event.url.clone(), &event.frame_id, None, None);
                self.frames.insert(
                    event.frame_id.clone(),
                    FrameState {
                        current_document: Some(root),
                        ..FrameState::default()
                    },
                );
            } else {
                self.warnings.before_main_document += 1;
            }
            return;
        }

        if event.kind == EventKind::FrameAttached {
            self.frame_attached(event);
            return;
        }
        let Some(frame_doc) = self.frames.get(&event.frame_id).map(|f| f.current_document) else {
            self.warnings.unknown_frame += 1;
            return;
        };
        let containing = frame_doc.unwrap_or(CausalityTree::ROOT);

        match event.kind {
            EventKind::FrameAttached => unreachable!(),
            EventKind::DocumentCommitted => self.document_committed(event),
            EventKind::ScriptCreated => {
                if event.inline == event.url.is_some() {
                    self.warnings.malformed += 1;
                    return;
                }
                let kind = if event.inline { NodeKind::ScriptInline } else { NodeKind::ScriptUrl };
                self.element(event, kind, containing);
            }
            EventKind::ResourceRequested => {
                if event.url.is_none() {
                    self.warnings.malformed += 1;
                    return;
                }
                let kind = match event.resource_type {
                    Some(ResourceType::Image) => NodeKind::Image,
                    Some(ResourceType::Stylesheet) => NodeKind::Stylesheet,
                    Some(ResourceType::Other) | None => NodeKind::Other,
                };
                self.element(event, kind, containing);
            }
            EventKind::UrlChanged => self.url_changed(event),
            EventKind::ProbeDetection => match &event.library_id {
                Some(library_id) => self.probe_results.push(ProbeResult {
                    frame_id: event.frame_id.clone(),
                    library_id: library_id.clone(),
                    raw_version: event.raw_version.clone(),
                    implementing_node_id: event.implementing_node_id.clone(),
                    timestamp_ms: event.timestamp_ms,
                }),
                None => self.warnings.malformed += 1,
            },
            EventKind::LabelHint => {
                let Some(label) = event.label else {
                    self.warnings.malformed += 1;
                    return;
                };
                match self.current.get(&event.node_id).copied() {
                    Some(idx) => {
                        let node = &mut self.nodes[idx.0];
                        node.direct_labels.insert(label);
                        node.labels.insert(label);
                    }
                    None => self.warnings.unmatched_label_hint += 1,
                }
            }
        }
    }

    fn frame_attached(&mut self, event: &CrawlEvent) {
        let creator = self.initiator(event);
        let embedding_document = self
            .resolve(event.attached_document_node_id.as_ref())
            .or_else(|| creator.map(|c| self.document_of(c)))
            .or(Some(CausalityTree::ROOT));
        let state = self.frames.entry(event.frame_id.clone()).or_default();
        state.creator = creator;
        state.embedding_document = embedding_document;
        if !event.node_id.is_empty() {
            self.frame_owners.insert(event.node_id.clone(), event.frame_id.clone());
        }
    }

    fn document_of(&self, idx: NodeIndex) -> NodeIndex {
        let node = &self.nodes[idx.0];
        if node.kind == NodeKind::Document {
            idx
        } else {
            node.attached_document.unwrap_or(CausalityTree::ROOT)
        }
    }

    fn document_committed(&mut self, event: &CrawlEvent) {
        let Some(url) = event.url.clone() else {
            self.warnings.malformed += 1;
            return;
        };
        let frame = &self.frames[&event.frame_id];
        if let Some(pending) = frame.pending_navigation {
            if self.nodes[pending.0].url.as_deref() == Some(url.as_str()) {
                let frame = self.frames.get_mut(&event.frame_id).unwrap();
                frame.pending_navigation = None;
                frame.current_document = Some(pending);
                if !event.node_id.is_empty() {
                    self.current.insert(event.node_id.clone(), pending);
                }
                return;
            }
        }
        let (creator, embedding, previous) = (frame.creator, frame.embedding_document, frame.current_document);
        let parent = self
            .initiator(event)
            .or(creator)
            .or(previous)
            .or(embedding)
            .unwrap_or(CausalityTree::ROOT);
        let idx = self.push(event, NodeKind::Document, Some(url), &event.frame_id.clone(), Some(parent), embedding);
        let frame = self.frames.get_mut(&event.frame_id).unwrap();
        frame.pending_navigation = None;
        frame.current_document = Some(idx);
    }

    fn element(&mut self, event: &CrawlEvent, kind: NodeKind, containing: NodeIndex) {
        let attached = self
            .resolve(event.attached_document_node_id.as_ref())
            .filter(|&d| self.nodes[d.0].kind == NodeKind::Document)
            .unwrap_or(containing);
        let parent = self.initiator(event).unwrap_or(attached);
        let url = if event.inline { None } else { event.url.clone() };
        self.push(event, kind, url, &event.frame_id.clone(), Some(parent), Some(attached));
    }

    fn url_changed(&mut self, event: &CrawlEvent) {
        let Some(url) = event.url.clone() else {
            self.warnings.malformed += 1;
            return;
        };
        let initiator = self.initiator(event);

        // Navigation of a frame element or of a document itself.
        let navigated_frame = self.frame_owners.get(&event.node_id).cloned().or_else(|| {
            self.current
                .get(&event.node_id)
                .filter(|idx| self.nodes[idx.0].kind == NodeKind::Document)
                .map(|idx| self.nodes[idx.0].frame_id.clone())
        });
        if let Some(frame_id) = navigated_frame {
            let frame = &self.frames[&frame_id];
            let prior = frame.current_document;
            let fallback = prior
                .and_then(|p| self.parents[p.0].or(Some(p)))
                .or(frame.creator)
                .or(frame.embedding_document)
                .unwrap_or(CausalityTree::ROOT);
            let embedding = frame.embedding_document;
            let idx = self.push(event, NodeKind::Document, Some(url), &frame_id, Some(initiator.unwrap_or(fallback)), embedding);
            let frame = self.frames.get_mut(&frame_id).unwrap();
            frame.current_document = Some(idx);
            frame.pending_navigation = Some(idx);
            return;
        }

        let Some(prior) = self.current.get(&event.node_id).copied() else {
            self.warnings.unknown_node += 1;
            return;
        };
        let prev = &self.nodes[prior.0];
        let kind = if prev.kind == NodeKind::ScriptInline { NodeKind::ScriptUrl } else { prev.kind };
        let (frame_id, attached) = (prev.frame_id.clone(), prev.attached_document);
        let parent = initiator.or(self.parents[prior.0]).unwrap_or(prior);
        let mut snapshot = event.clone();
        snapshot.source_digest = None;
        snapshot.source_length = None;
        self.push(&snapshot, kind, Some(url), &frame_id, Some(parent), attached);
    }
}
