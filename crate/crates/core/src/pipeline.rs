//! Per-site processing: event log to labelled tree with detections to report.

use std::collections::BTreeMap;

use crate::analysis::{site_report, DetectionSummary, SiteReport};
use crate::catalogue::{Catalogue, MIN_REFERENCE_BYTES};
use crate::causality::{build_tree, host_of, BuildError, CausalityTree, CrawlEvent, EventKind, NodeIndex};
use crate::detection::{merge_detections, parse_probe_output, static_lookup, Detection, ScriptSample, StaticOutcome};
use crate::filterlist::{label_tree, FilterSet};

/// Host of the first committed document, without a leading `www.`.
pub fn site_domain_from_events(events: &[CrawlEvent]) -> Option<String> {
    let url = events
        .iter()
        .find(|e| e.kind == EventKind::DocumentCommitted)?
        .url
        .as_deref()?;
    let host = host_of(url)?;
    Some(host.strip_prefix("www.").unwrap_or(&host).to_string())
}

/// Runs static and dynamic detection over the tree's script nodes and stores
/// the merged result on each node.
pub fn attach_detections(tree: &mut CausalityTree, cat: &Catalogue) -> DetectionSummary {
    let mut summary = DetectionSummary::default();
    let mut static_hits: BTreeMap<NodeIndex, Vec<Detection>> = BTreeMap::new();
    let mut dynamic_hits: BTreeMap<NodeIndex, Vec<Detection>> = BTreeMap::new();

    for (idx, node) in tree.nodes() {
        if !node.kind.is_script() {
            continue;
        }
        let Some(digest) = node.digest else {
            continue;
        };
        let sample = ScriptSample {
            node_id: node.node_id.clone(),
            // Without a recorded length only an exact reference match can
            // hit, and reference files already honour the floor.
            bytes_length: node.source_length.unwrap_or(MIN_REFERENCE_BYTES),
            digest,
            url: node.url.clone(),
            inline: node.url.is_none(),
        };
        match static_lookup(&sample, cat) {
            StaticOutcome::Matched(d) => {
                summary.static_hits += 1;
                static_hits.entry(idx).or_default().push(d);
            }
            StaticOutcome::BelowSizeFloor => summary.size_filtered += 1,
            StaticOutcome::NoMatch => {}
        }
    }

    for probe in &tree.probe_results {
        let Some(d) = parse_probe_output(probe, &mut summary.probe_discards) else {
            continue;
        };
        match tree.find_script(&d.node_id) {
            Some(idx) => {
                summary.dynamic_hits += 1;
                dynamic_hits.entry(idx).or_default().push(d);
            }
            None => {
                log::debug!("probe hit for {} names unknown script {}", d.library_id, d.node_id);
                summary.unmatched_probes += 1;
            }
        }
    }

    let touched: Vec<NodeIndex> = static_hits.keys().chain(dynamic_hits.keys()).copied().collect();
    for idx in touched {
        let s = static_hits.get(&idx).map(Vec::as_slice).unwrap_or_default();
        let d = dynamic_hits.get(&idx).map(Vec::as_slice).unwrap_or_default();
        tree.node_mut(idx).detections = merge_detections(s, d);
    }
    summary
}

/// Builds, labels and analyses one site. `site_domain` defaults to the host
/// of the main document.
pub fn process_site(
    events: &[CrawlEvent],
    site_domain: Option<&str>,
    cat: &Catalogue,
    filters: &[FilterSet],
) -> Result<(CausalityTree, SiteReport), BuildError> {
    let domain = match site_domain {
        Some(d) => d.to_ascii_lowercase(),
        None => site_domain_from_events(events).unwrap_or_default(),
    };
    let tree = build_tree(events, &domain)?;
    let mut tree = label_tree(tree, filters);
    let summary = attach_detections(&mut tree, cat);
    let mut report = site_report(&tree, cat);
    report.detection = summary;
    Ok((tree, report))
}
