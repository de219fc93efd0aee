//! Ad, tracker and social-widget filter lists (network-rule subset of the
//! EasyList syntax) and labelling of causality nodes that match them.
//!
//! Supported pattern syntax: literals, `*`, `^`, `||` host anchors, `|` start
//! and end anchors, and `@@` exceptions. Supported options: `third-party`
//! (and its negation), the `script`, `image` and `subdocument` types, and
//! `domain=`. Rules with any other option are counted and skipped.

mod parse;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::causality::{host_of, host_within, CausalityTree, Label, NodeIndex, NodeKind};

pub use parse::{parse_filter_list, parse_rule, SkipCounts};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternToken {
    Literal(String),
    /// `*`: any span, possibly empty.
    Wildcard,
    /// `^`: a separator character or the end of the URL.
    Separator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StartAnchor {
    None,
    /// `|`: the URL start.
    Start,
    /// `||`: the start of the host or of any of its subdomain labels.
    Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    Script,
    Image,
    Subdocument,
    Other,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleOptions {
    /// `Some(true)`: only third-party requests; `Some(false)`: only first-party.
    pub third_party: Option<bool>,
    /// Empty means any type.
    pub types: BTreeSet<ResourceKind>,
    pub include_domains: BTreeSet<String>,
    pub exclude_domains: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRule {
    pub raw: String,
    pub start: StartAnchor,
    pub end_anchor: bool,
    /// Lowercased pattern tokens; never empty.
    pub tokens: Vec<PatternToken>,
    pub exception: bool,
    pub options: RuleOptions,
    pub label: Label,
}

/// A request as seen by the matcher.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchContext {
    pub request_url: String,
    pub document_host: String,
    pub resource_kind: ResourceKind,
    pub third_party: bool,
}

impl MatchContext {
    /// A request is first-party when its host and the document host are equal
    /// or one is a dot-boundary subdomain of the other.
    pub fn new(request_url: &str, document_host: &str, resource_kind: ResourceKind) -> Self {
        let document_host = document_host.to_ascii_lowercase();
        let third_party = match host_of(request_url) {
            Some(host) => !(host_within(&host, &document_host) || host_within(&document_host, &host)),
            None => true,
        };
        MatchContext {
            request_url: request_url.to_string(),
            document_host,
            resource_kind,
            third_party,
        }
    }
}

fn is_separator(b: u8) -> bool {
    !(b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.' | b'%'))
}

/// Byte range of the authority part (`scheme://` up to `/`, `?`, `#` or `:`).
fn host_span(url: &[u8]) -> Option<(usize, usize)> {
    let colon = url.iter().position(|&b| matches!(b, b':' | b'/' | b'?' | b'#'))?;
    if colon == 0 || url[colon] != b':' || !url[colon..].starts_with(b"://") {
        return None;
    }
    let start = colon + 3;
    let end = url[start..]
        .iter()
        .position(|&b| matches!(b, b'/' | b'?' | b'#' | b':'))
        .map_or(url.len(), |p| start + p);
    Some((start, end))
}

fn match_tokens(tokens: &[PatternToken], url: &[u8], pos: usize, end_anchor: bool) -> bool {
    match tokens.split_first() {
        None => !end_anchor || pos == url.len(),
        Some((PatternToken::Literal(lit), rest)) => {
            url[pos..].starts_with(lit.as_bytes()) && match_tokens(rest, url, pos + lit.len(), end_anchor)
        }
        Some((PatternToken::Separator, rest)) => {
            if pos == url.len() {
                match_tokens(rest, url, pos, end_anchor)
            } else {
                is_separator(url[pos]) && match_tokens(rest, url, pos + 1, end_anchor)
            }
        }
        Some((PatternToken::Wildcard, rest)) => {
            if rest.is_empty() && !end_anchor {
                return true;
            }
            (pos..=url.len()).any(|p| match_tokens(rest, url, p, end_anchor))
        }
    }
}

impl FilterRule {
    pub fn pattern_matches(&self, url: &str) -> bool {
        let lowered = url.to_ascii_lowercase();
        let url = lowered.as_bytes();
        let tokens = &self.tokens;
        match self.start {
            StartAnchor::Start => match_tokens(tokens, url, 0, self.end_anchor),
            StartAnchor::None => (0..=url.len()).any(|p| match_tokens(tokens, url, p, self.end_anchor)),
            StartAnchor::Domain => {
                let Some((start, end)) = host_span(url) else {
                    return false;
                };
                std::iter::once(start)
                    .chain((start + 1..=end).filter(|&i| url[i - 1] == b'.'))
                    .any(|p| match_tokens(tokens, url, p, self.end_anchor))
            }
        }
    }

    pub fn options_match(&self, ctx: &MatchContext) -> bool {
        let o = &self.options;
        if o.third_party.is_some_and(|tp| tp != ctx.third_party) {
            return false;
        }
        if !o.types.is_empty() && !o.types.contains(&ctx.resource_kind) {
            return false;
        }
        let host = &ctx.document_host;
        if !o.include_domains.is_empty() && !o.include_domains.iter().any(|d| host_within(host, d)) {
            return false;
        }
        !o.exclude_domains.iter().any(|d| host_within(host, d))
    }
}

/// Whether a single rule (blocking or exception) applies to the request.
pub fn url_matches(rule: &FilterRule, ctx: &MatchContext) -> bool {
    rule.options_match(ctx) && rule.pattern_matches(&ctx.request_url)
}

/// Parsed rules of one list, all carrying the list's label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSet {
    pub label: Label,
    pub blocking: Vec<FilterRule>,
    pub exceptions: Vec<FilterRule>,
    pub skipped: SkipCounts,
}

impl FilterSet {
    pub fn rule_count(&self) -> usize {
        self.blocking.len() + self.exceptions.len()
    }

    /// A blocking rule matches and no exception does.
    pub fn matches(&self, ctx: &MatchContext) -> bool {
        self.blocking.iter().any(|r| url_matches(r, ctx)) && !self.exceptions.iter().any(|r| url_matches(r, ctx))
    }
}

fn resource_kind(kind: NodeKind) -> ResourceKind {
    match kind {
        NodeKind::ScriptInline | NodeKind::ScriptUrl => ResourceKind::Script,
        NodeKind::Image => ResourceKind::Image,
        NodeKind::Document => ResourceKind::Subdocument,
        NodeKind::Stylesheet | NodeKind::Other => ResourceKind::Other,
    }
}

/// Labels every non-root node whose own URL a set matches, then lets nodes
/// inherit labels from the chain of documents they are attached to and
/// propagates labels down the causality tree.
pub fn label_tree(mut tree: CausalityTree, sets: &[FilterSet]) -> CausalityTree {
    let mut hits: Vec<(NodeIndex, Label)> = Vec::new();
    for (idx, node) in tree.nodes().skip(1) {
        let Some(url) = node.url.as_deref() else {
            continue;
        };
        let doc = node.attached_document.unwrap_or(CausalityTree::ROOT);
        let doc_host = tree.node(doc).url.as_deref().and_then(host_of).unwrap_or_default();
        let ctx = MatchContext::new(url, &doc_host, resource_kind(node.kind));
        for set in sets {
            if set.matches(&ctx) {
                hits.push((idx, set.label));
            }
        }
    }
    for (idx, label) in hits {
        tree.add_direct_label(idx, label);
    }

    // DOM ancestry approximated by the attached-document chain.
    let mut inherited: Vec<(NodeIndex, BTreeSet<Label>)> = Vec::new();
    for (idx, node) in tree.nodes() {
        let mut labels = BTreeSet::new();
        let mut seen = BTreeSet::from([idx]);
        let mut cur = node.attached_document;
        while let Some(doc) = cur {
            if !seen.insert(doc) {
                break;
            }
            labels.extend(tree.node(doc).direct_labels.iter().copied());
            cur = tree.node(doc).attached_document;
        }
        if !labels.is_empty() {
            inherited.push((idx, labels));
        }
    }
    for (idx, labels) in inherited {
        tree.node_mut(idx).labels.extend(labels);
    }
    tree.propagate_labels();
    tree
}
