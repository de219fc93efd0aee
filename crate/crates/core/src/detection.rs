//! Library identification for script nodes.
//!
//! Two evidence sources feed detections: exact-hash lookups against the
//! catalogue's reference files ([`static_detect`]) and version strings reported
//! by in-page probes ([`parse_probe_output`]). [`merge_detections`] combines the
//! two per node. The name-in-URL heuristic is only used to compare against real
//! detections, never as a source.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalogue::{parse_version, Catalogue, SemVer, MIN_REFERENCE_BYTES};
use crate::digest::Digest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionMethod {
    Static,
    Dynamic,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Detection {
    pub node_id: String,
    pub library_id: String,
    pub version: SemVer,
    pub method: DetectionMethod,
    /// Set when static and dynamic evidence for the same node disagree on the
    /// version. Both entries are kept.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub conflicting: bool,
}

/// A script as observed during the crawl.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSample {
    pub node_id: String,
    pub bytes_length: u64,
    pub digest: Digest,
    pub url: Option<String>,
    pub inline: bool,
}

impl ScriptSample {
    pub fn from_bytes(node_id: impl Into<String>, bytes: &[u8], url: Option<String>) -> Self {
        ScriptSample {
            node_id: node_id.into(),
            bytes_length: bytes.len() as u64,
            digest: Digest::of(bytes),
            inline: url.is_none(),
            url,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StaticOutcome {
    Matched(Detection),
    BelowSizeFloor,
    NoMatch,
}

/// Hash lookup with the reason for a miss.
pub fn static_lookup(sample: &ScriptSample, cat: &Catalogue) -> StaticOutcome {
    if sample.bytes_length < MIN_REFERENCE_BYTES {
        return StaticOutcome::BelowSizeFloor;
    }
    match cat.lookup_digest(&sample.digest) {
        Some(file) => StaticOutcome::Matched(Detection {
            node_id: sample.node_id.clone(),
            library_id: file.library_id.clone(),
            version: file.version.clone(),
            method: DetectionMethod::Static,
            conflicting: false,
        }),
        None => StaticOutcome::NoMatch,
    }
}

pub fn static_detect(sample: &ScriptSample, cat: &Catalogue) -> Option<Detection> {
    match static_lookup(sample, cat) {
        StaticOutcome::Matched(d) => Some(d),
        _ => None,
    }
}

/// One probe hit as reported by the in-page or offline probe harness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub frame_id: String,
    pub library_id: String,
    #[serde(default)]
    pub raw_version: Option<String>,
    #[serde(default)]
    pub implementing_node_id: Option<String>,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscardReason {
    MissingVersion,
    InvalidVersion,
    UnattributedNode,
}

/// Probe hits that did not become detections, by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardCounter {
    pub missing_version: usize,
    pub invalid_version: usize,
    pub unattributed_node: usize,
}

impl DiscardCounter {
    pub fn record(&mut self, reason: DiscardReason) {
        match reason {
            DiscardReason::MissingVersion => self.missing_version += 1,
            DiscardReason::InvalidVersion => self.invalid_version += 1,
            DiscardReason::UnattributedNode => self.unattributed_node += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.missing_version + self.invalid_version + self.unattributed_node
    }

    pub fn merge(&mut self, other: &DiscardCounter) {
        self.missing_version += other.missing_version;
        self.invalid_version += other.invalid_version;
        self.unattributed_node += other.unattributed_node;
    }
}

/// Checks a probe hit, returning the reason it cannot be used.
pub fn classify_probe_output(raw: &ProbeResult) -> Result<Detection, DiscardReason> {
    let text = raw
        .raw_version
        .as_deref()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or(DiscardReason::MissingVersion)?;
    let version = parse_version(text).map_err(|_| DiscardReason::InvalidVersion)?;
    let node_id = raw
        .implementing_node_id
        .clone()
        .ok_or(DiscardReason::UnattributedNode)?;
    Ok(Detection {
        node_id,
        library_id: raw.library_id.clone(),
        version,
        method: DetectionMethod::Dynamic,
        conflicting: false,
    })
}

pub fn parse_probe_output(raw: &ProbeResult, discards: &mut DiscardCounter) -> Option<Detection> {
    classify_probe_output(raw)
        .map_err(|reason| discards.record(reason))
        .ok()
}

/// Union of static and dynamic detections keyed by `(node_id, library_id)`.
///
/// Agreeing versions collapse into one `Both` entry. When a key carries more
/// than one version every entry for it is kept and marked `conflicting`.
/// Output is sorted by node, library, version.
pub fn merge_detections(static_hits: &[Detection], dynamic_hits: &[Detection]) -> Vec<Detection> {
    let mut grouped: BTreeMap<(&str, &str), BTreeMap<&SemVer, (bool, bool)>> = BTreeMap::new();
    for d in static_hits.iter().chain(dynamic_hits) {
        let seen = grouped
            .entry((d.node_id.as_str(), d.library_id.as_str()))
            .or_default()
            .entry(&d.version)
            .or_default();
        seen.0 |= d.method != DetectionMethod::Dynamic;
        seen.1 |= d.method != DetectionMethod::Static;
    }

    let mut out = Vec::new();
    for ((node_id, library_id), versions) in grouped {
        let conflicting = versions.len() > 1;
        for (version, (s, d)) in versions {
            let method = match (s, d) {
                (true, true) => DetectionMethod::Both,
                (true, false) => DetectionMethod::Static,
                _ => DetectionMethod::Dynamic,
            };
            out.push(Detection {
                node_id: node_id.to_string(),
                library_id: library_id.to_string(),
                version: version.clone(),
                method,
                conflicting,
            });
        }
    }
    out
}

/// Case-insensitive substring test of a library's heuristic token in a URL.
pub fn name_in_url_heuristic(url: &str, token: &str) -> bool {
    !token.is_empty() && url.to_lowercase().contains(&token.to_lowercase())
}

/// Script nodes split by whether the URL heuristic and real detection agree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicPartition {
    pub both: BTreeSet<String>,
    pub heuristic_only: BTreeSet<String>,
    pub detection_only: BTreeSet<String>,
}

/// Compares heuristic hits against detections for `library_id`. Each item is
/// `(node_id, url, detected_as_library)`.
pub fn heuristic_partition<'a>(
    scripts: impl IntoIterator<Item = (&'a str, Option<&'a str>, bool)>,
    token: &str,
) -> HeuristicPartition {
    let mut part = HeuristicPartition::default();
    for (node_id, url, detected) in scripts {
        let heuristic = url.is_some_and(|u| name_in_url_heuristic(u, token));
        let bucket = match (heuristic, detected) {
            (true, true) => &mut part.both,
            (true, false) => &mut part.heuristic_only,
            (false, true) => &mut part.detection_only,
            (false, false) => continue,
        };
        bucket.insert(node_id.to_string());
    }
    part
}

/// Script text run inside a page to report a library's version.
///
/// The probe evaluates to a version string when the library and its version
/// attribute are present, `null` when the library is present without a
/// version, and `false` when the library is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSpec {
    pub library_id: String,
    pub probe_source: String,
}

#[derive(Debug, Error)]
pub enum ProbeSpecError {
    #[error("reading probe specs: {0}")]
    Io(#[from] io::Error),
    #[error("probe {0}: empty source")]
    Empty(String),
    #[error("probe {0}: library not in catalogue")]
    UnknownLibrary(String),
}

/// Loads `<library_id>.js` files from `dir`, sorted by library id.
pub fn load_probe_specs(dir: &Path) -> Result<Vec<ProbeSpec>, ProbeSpecError> {
    let mut specs = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("js") {
            continue;
        }
        let Some(library_id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let probe_source = fs::read_to_string(&path)?;
        if probe_source.trim().is_empty() {
            return Err(ProbeSpecError::Empty(library_id.to_string()));
        }
        specs.push(ProbeSpec {
            library_id: library_id.to_string(),
            probe_source,
        });
    }
    specs.sort_by(|a, b| a.library_id.cmp(&b.library_id));
    Ok(specs)
}

pub fn check_probe_specs(specs: &[ProbeSpec], cat: &Catalogue) -> Result<(), ProbeSpecError> {
    match specs.iter().find(|s| !cat.contains_library(&s.library_id)) {
        Some(s) => Err(ProbeSpecError::UnknownLibrary(s.library_id.clone())),
        None => Ok(()),
    }
}
