//! Crawl event log records (one JSON object per line).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Label;
use crate::digest::Digest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    FrameAttached,
    DocumentCommitted,
    ScriptCreated,
    ResourceRequested,
    UrlChanged,
    ProbeDetection,
    LabelHint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceType {
    Image,
    Stylesheet,
    Other,
}

/// One crawl event. Which optional fields are meaningful depends on `kind`;
/// see `docs/event-log-format.md`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrawlEvent {
    pub seq: u64,
    pub timestamp_ms: u64,
    pub kind: EventKind,
    pub frame_id: String,
    #[serde(default)]
    pub node_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initiator_node_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inline: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_digest: Option<Digest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_length: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attached_document_node_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource_type: Option<ResourceType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub library_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implementing_node_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

impl CrawlEvent {
    /// An event with only the mandatory fields set.
    pub fn new(seq: u64, kind: EventKind, frame_id: &str, node_id: &str) -> Self {
        CrawlEvent {
            seq,
            timestamp_ms: seq * 10,
            kind,
            frame_id: frame_id.to_string(),
            node_id: node_id.to_string(),
            initiator_node_id: None,
            url: None,
            inline: false,
            source_digest: None,
            source_length: None,
            attached_document_node_id: None,
            resource_type: None,
            library_id: None,
            raw_version: None,
            implementing_node_id: None,
            label: None,
        }
    }

    pub fn with_url(mut self, url: &str) -> Self {
        self.url = Some(url.to_string());
        self
    }

    pub fn with_initiator(mut self, node_id: &str) -> Self {
        self.initiator_node_id = Some(node_id.to_string());
        self
    }

    pub fn inline(mut self) -> Self {
        self.inline = true;
        self
    }

    pub fn with_source(mut self, digest: Digest, length: u64) -> Self {
        self.source_digest = Some(digest);
        self.source_length = Some(length);
        self
    }

    pub fn attached_to(mut self, document_node_id: &str) -> Self {
        self.attached_document_node_id = Some(document_node_id.to_string());
        self
    }
}

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error("reading event log: {0}")]
    Io(#[from] std::io::Error),
    #[error("event log line {line}: {source}")]
    Syntax {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("event log line {line}: seq {seq} does not increase (previous {previous})")]
    OutOfOrder { line: usize, seq: u64, previous: u64 },
}

/// Reads a line-delimited event log, checking that `seq` strictly increases.
pub fn read_event_log<R: BufRead>(source: R) -> Result<Vec<CrawlEvent>, EventLogError> {
    let mut events: Vec<CrawlEvent> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: CrawlEvent = serde_json::from_str(&line).map_err(|source| EventLogError::Syntax {
            line: idx + 1,
            source,
        })?;
        if let Some(prev) = events.last() {
            if event.seq <= prev.seq {
                return Err(EventLogError::OutOfOrder {
                    line: idx + 1,
                    seq: event.seq,
                    previous: prev.seq,
                });
            }
        }
        events.push(event);
    }
    Ok(events)
}

pub fn write_event_log<W: Write>(events: &[CrawlEvent], mut out: W) -> std::io::Result<()> {
    for event in events {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
