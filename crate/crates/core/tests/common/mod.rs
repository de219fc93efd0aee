//! Generators and brute-force oracles shared by the integration tests and the
//! acceptance runner.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use jslibtrace::catalogue::{AffectedRange, Catalogue, ReferenceFile, Variant};
use jslibtrace::causality::{CausalityTree, CrawlEvent, EventKind, Label, NodeIndex, ResourceType};
use jslibtrace::digest::Digest;
use jslibtrace::filterlist::{parse_rule, MatchContext, ResourceKind};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};
use regex::Regex;

/// Draws `n` values from `strategy` with a fixed seed.
pub fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(Config::default(), proptest::test_runner::TestRng::deterministic_rng(
        proptest::test_runner::RngAlgorithm::ChaCha,
    ));
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

// ---------------------------------------------------------------------------
// Random event logs

#[derive(Debug, Clone)]
pub enum Action {
    Script { frame: usize, initiator: Option<usize>, inline: bool, host: u8 },
    Resource { frame: usize, initiator: Option<usize>, kind: u8 },
    Frame { initiator: Option<usize>, attach: Option<usize> },
    Commit { frame: usize, initiator: Option<usize>, host: u8 },
    UrlChange { target: usize, initiator: Option<usize>, host: u8 },
    Hint { target: usize, label: u8 },
    Probe { target: usize, version: Option<u8> },
    Orphan { frame: usize },
    Junk { frame: usize },
}

fn pick() -> impl Strategy<Value = usize> {
    any::<u16>().prop_map(usize::from)
}

fn action() -> impl Strategy<Value = Action> {
    let opt = || proptest::option::weighted(0.8, pick());
    prop_oneof![
        6 => (pick(), opt(), any::<bool>(), 0u8..6).prop_map(|(frame, initiator, inline, host)| Action::Script { frame, initiator, inline, host }),
        2 => (pick(), opt(), 0u8..3).prop_map(|(frame, initiator, kind)| Action::Resource { frame, initiator, kind }),
        1 => (opt(), proptest::option::of(pick())).prop_map(|(initiator, attach)| Action::Frame { initiator, attach }),
        2 => (pick(), proptest::option::of(pick()), 0u8..6).prop_map(|(frame, initiator, host)| Action::Commit { frame, initiator, host }),
        2 => (pick(), proptest::option::of(pick()), 0u8..6).prop_map(|(target, initiator, host)| Action::UrlChange { target, initiator, host }),
        1 => (pick(), 0u8..3).prop_map(|(target, label)| Action::Hint { target, label }),
        1 => (pick(), proptest::option::of(0u8..4)).prop_map(|(target, version)| Action::Probe { target, version }),
        1 => pick().prop_map(|frame| Action::Orphan { frame }),
        1 => pick().prop_map(|frame| Action::Junk { frame }),
    ]
}

const HOSTS: [&str; 6] = ["site.test", "www.site.test", "cdn.site.test", "ads.other.net", "notsite.test", "x.example"];

/// Turns abstract actions into a well-ordered event log that starts with the
/// main document. Node and frame choices index into what exists so far.
pub fn interpret(actions: &[Action], leading_junk: usize) -> Vec<CrawlEvent> {
    let mut events = Vec::new();
    let mut seq = 0u64;
    let mut next = |kind: EventKind, frame: &str, node: &str| {
        seq += 1;
        CrawlEvent::new(seq, kind, frame, node)
    };
    for i in 0..leading_junk {
        events.push(next(EventKind::ScriptCreated, "F0", &format!("early{i}")).with_url("https://site.test/early.js"));
    }
    events.push(next(EventKind::DocumentCommitted, "F0", "D0").with_url("https://site.test/"));
    let mut nodes: Vec<String> = vec!["D0".into()];
    let mut frames: Vec<String> = vec!["F0".into()];
    let node_at = |nodes: &Vec<String>, i: usize| nodes[i % nodes.len()].clone();

    for (n, a) in actions.iter().enumerate() {
        let id = format!("N{n}");
        let ev = match a {
            Action::Script { frame, initiator, inline, host } => {
                let mut e = next(EventKind::ScriptCreated, &frames[frame % frames.len()], &id);
                if *inline {
                    e = e.inline();
                } else {
                    e = e.with_url(&format!("https://{}/s{n}.js", HOSTS[*host as usize]));
                }
                if let Some(i) = initiator {
                    e = e.with_initiator(&node_at(&nodes, *i));
                }
                nodes.push(id);
                e
            }
            Action::Resource { frame, initiator, kind } => {
                let mut e = next(EventKind::ResourceRequested, &frames[frame % frames.len()], &id).with_url(&format!("https://site.test/r{n}"));
                e.resource_type = Some([ResourceType::Image, ResourceType::Stylesheet, ResourceType::Other][*kind as usize]);
                if let Some(i) = initiator {
                    e = e.with_initiator(&node_at(&nodes, *i));
                }
                nodes.push(id);
                e
            }
            Action::Frame { initiator, attach } => {
                let frame = format!("F{}", frames.len());
                let mut e = next(EventKind::FrameAttached, &frame, &format!("IFR{n}"));
                if let Some(i) = initiator {
                    e = e.with_initiator(&node_at(&nodes, *i));
                }
                if let Some(d) = attach {
                    e = e.attached_to(&node_at(&nodes, *d));
                }
                frames.push(frame);
                nodes.push(format!("IFR{n}"));
                e
            }
            Action::Commit { frame, initiator, host } => {
                let mut e = next(EventKind::DocumentCommitted, &frames[frame % frames.len()], &id)
                    .with_url(&format!("https://{}/doc{}", HOSTS[*host as usize], n % 3));
                if let Some(i) = initiator {
                    e = e.with_initiator(&node_at(&nodes, *i));
                }
                nodes.push(id);
                e
            }
            Action::UrlChange { target, initiator, host } => {
                let mut e = next(EventKind::UrlChanged, "F0", &node_at(&nodes, *target))
                    .with_url(&format!("https://{}/doc{}", HOSTS[*host as usize], n % 3));
                if let Some(i) = initiator {
                    e = e.with_initiator(&node_at(&nodes, *i));
                }
                e
            }
            Action::Hint { target, label } => {
                let mut e = next(EventKind::LabelHint, "F0", &node_at(&nodes, *target));
                e.label = Some(Label::ALL[*label as usize]);
                e
            }
            Action::Probe { target, version } => {
                let mut e = next(EventKind::ProbeDetection, "F0", "");
                e.library_id = Some("lib".into());
                e.raw_version = version.map(|v| format!("1.{v}.0"));
                e.implementing_node_id = Some(node_at(&nodes, *target));
                e
            }
            Action::Orphan { frame } => {
                let e = next(EventKind::ScriptCreated, &frames[frame % frames.len()], &id)
                    .with_url("https://site.test/orphan.js")
                    .with_initiator("ghost");
                nodes.push(id);
                e
            }
            Action::Junk { frame } => {
                // Script without url and without the inline flag.
                next(EventKind::ScriptCreated, &frames[frame % frames.len()], &id)
            }
        };
        events.push(ev);
    }
    events
}

pub fn event_log() -> impl Strategy<Value = Vec<CrawlEvent>> {
    (proptest::collection::vec(action(), 0..199), 0usize..2).prop_map(|(actions, junk)| interpret(&actions, junk))
}

/// Longest root-to-leaf path by plain recursion over child lists.
pub fn brute_depth(tree: &CausalityTree) -> usize {
    fn go(tree: &CausalityTree, n: NodeIndex) -> usize {
        tree.children(n).iter().map(|&c| 1 + go(tree, c)).max().unwrap_or(0)
    }
    go(tree, CausalityTree::ROOT)
}

/// Structural tree laws. Returns a description of the first violation.
pub fn check_tree_laws(tree: &CausalityTree) -> Result<(), String> {
    let n = tree.len();
    let roots: Vec<usize> = (0..n).filter(|&i| tree.parent(NodeIndex(i)).is_none()).collect();
    if roots != [0] {
        return Err(format!("roots {roots:?}"));
    }
    if tree.edge_count() != n - 1 {
        return Err(format!("{} edges for {n} nodes", tree.edge_count()));
    }
    for i in 0..n {
        // Walking up must reach the root within n steps.
        let mut cur = NodeIndex(i);
        let mut steps = 0;
        while let Some(p) = tree.parent(cur) {
            if !tree.children(p).contains(&cur) {
                return Err(format!("child list of {} misses {}", p.0, cur.0));
            }
            cur = p;
            steps += 1;
            if steps > n {
                return Err(format!("cycle through {i}"));
            }
        }
    }
    let reachable: BTreeSet<usize> = tree.bfs().into_iter().map(|i| i.0).collect();
    if reachable.len() != n {
        return Err(format!("{} of {n} nodes reachable", reachable.len()));
    }
    Ok(())
}

/// Labels by walking every node's ancestor chain.
pub fn brute_labels(tree: &CausalityTree) -> Vec<BTreeSet<Label>> {
    (0..tree.len())
        .map(|i| {
            let mut labels = BTreeSet::new();
            let mut cur = Some(NodeIndex(i));
            while let Some(c) = cur {
                labels.extend(tree.node(c).direct_labels.iter().copied());
                cur = tree.parent(c);
            }
            labels
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Filter rules and the regex-translation oracle

const PIECES: [&str; 14] = [
    "ads", "ad", "banner", "track", "js", ".js", "/", "?id=", "=", "-", "example.com", "cdn", "a", "1",
];

pub fn rule_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        6 => proptest::sample::select(PIECES.to_vec()).prop_map(str::to_string),
        1 => Just("*".to_string()),
        1 => Just("^".to_string()),
    ];
    let opts = proptest::option::weighted(
        0.3,
        proptest::sample::select(vec!["third-party", "~third-party", "script", "image", "script,third-party", "domain=site.test"]),
    );
    (0u8..3, proptest::collection::vec(piece, 1..5), any::<bool>(), any::<bool>(), opts).prop_filter_map(
        "needs a literal",
        |(anchor, pieces, end, exception, opts)| {
            if !pieces.iter().any(|p| p != "*" && p != "^") {
                return None;
            }
            let body = pieces.concat();
            // `/.../` is regex syntax, which the matcher does not support.
            if anchor == 0 && !end && body.len() > 1 && body.starts_with('/') && body.ends_with('/') {
                return None;
            }
            let mut s = String::new();
            if exception {
                s.push_str("@@");
            }
            s.push_str(["", "|", "||"][anchor as usize]);
            s.push_str(&body);
            if end {
                s.push('|');
            }
            if let Some(o) = opts {
                s.push('$');
                s.push_str(o);
            }
            Some(s)
        },
    )
}

const URL_HOSTS: [&str; 7] = [
    "example.com", "ads.example.com", "nonexample.com", "cdn.track.net", "site.test", "a.site.test", "ad1.net",
];
const URL_PATHS: [&str; 9] = [
    "/", "/ads/banner.js", "/track.js?id=1", "/ad-1.js", "/js/a.js", "/banner", "/cdn/ads", "/x?id=ads", "/a1/",
];

pub fn request() -> impl Strategy<Value = (String, String, ResourceKind)> {
    (
        proptest::sample::select(URL_HOSTS.to_vec()),
        proptest::sample::select(URL_PATHS.to_vec()),
        proptest::sample::select(vec!["site.test", "www.site.test", "example.com"]),
        proptest::sample::select(vec![ResourceKind::Script, ResourceKind::Image, ResourceKind::Other]),
    )
        .prop_map(|(h, p, doc, kind)| (format!("https://{h}{p}"), doc.to_string(), kind))
}

/// Regex for the pattern part of a rule, built directly from its text.
pub fn rule_regex(text: &str) -> Regex {
    let body = text.strip_prefix("@@").unwrap_or(text);
    let pattern = body.split('$').next().unwrap().to_ascii_lowercase();
    let (prefix, mut rest) = if let Some(r) = pattern.strip_prefix("||") {
        (r"^[a-z][a-z0-9+.\-]*://(?:[^/?#:]*\.)?", r)
    } else if let Some(r) = pattern.strip_prefix('|') {
        ("^", r)
    } else {
        ("", pattern.as_str())
    };
    let mut suffix = "";
    if let Some(r) = rest.strip_suffix('|') {
        rest = r;
        suffix = "$";
    }
    let mut re = String::from(prefix);
    for c in rest.chars() {
        match c {
            '*' => re.push_str(".*"),
            '^' => re.push_str(r"(?:[^a-z0-9_\-.%]|$)"),
            c => re.push_str(&regex::escape(&c.to_string())),
        }
    }
    re.push_str(suffix);
    Regex::new(&re).unwrap()
}

fn oracle_host(url: &str) -> String {
    let after = url.split("://").nth(1).unwrap_or("");
    after.split(['/', '?', '#', ':']).next().unwrap_or("").to_string()
}

fn suffix_match(host: &str, domain: &str) -> bool {
    host == domain || host.ends_with(&format!(".{domain}"))
}

/// A rule as the oracle sees it: a regex for the pattern plus the raw option
/// list.
pub struct OracleRule {
    pub text: String,
    regex: Regex,
}

impl OracleRule {
    pub fn new(text: &str) -> Self {
        OracleRule {
            text: text.to_string(),
            regex: rule_regex(text),
        }
    }

    pub fn matches(&self, url: &str, doc_host: &str, kind: ResourceKind) -> bool {
        let url = url.to_ascii_lowercase();
        let opts = self.text.split_once('$').map(|(_, o)| o).unwrap_or("");
        let host = oracle_host(&url);
        let third_party = !(suffix_match(&host, doc_host) || suffix_match(doc_host, &host));
        let mut types = Vec::new();
        for o in opts.split(',').filter(|o| !o.is_empty()) {
            match o {
                "third-party" if !third_party => return false,
                "~third-party" if third_party => return false,
                "script" => types.push(ResourceKind::Script),
                "image" => types.push(ResourceKind::Image),
                o if o.starts_with("domain=") => {
                    if !suffix_match(doc_host, &o["domain=".len()..]) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        if !types.is_empty() && !types.contains(&kind) {
            return false;
        }
        self.regex.is_match(&url)
    }
}

pub fn matcher_agrees(text: &str, url: &str, doc_host: &str, kind: ResourceKind) -> Result<(), String> {
    let rule = parse_rule(text, Label::Ad).ok_or_else(|| format!("rule {text:?} rejected"))?;
    let got = jslibtrace::filterlist::url_matches(&rule, &MatchContext::new(url, doc_host, kind));
    let want = OracleRule::new(text).matches(url, doc_host, kind);
    if got == want {
        Ok(())
    } else {
        Err(format!("{text:?} on {url} (doc {doc_host}, {kind:?}): matcher {got}, oracle {want}"))
    }
}

// ---------------------------------------------------------------------------
// Random sites over a small known catalogue

pub const LIBS: [&str; 2] = ["alpha", "beta"];
pub const VERSIONS: [(u64, u64, u64); 6] = [(1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 5), (2, 0, 0), (2, 0, 3)];

/// Vulnerable versions, written out by hand to match the ranges below.
pub fn oracle_vulnerable(lib: usize, ver: usize) -> bool {
    match lib {
        // alpha: before 1.1.0, at most 1.0.0, and [2.0.0, 2.0.1)
        0 => matches!(ver, 0 | 1 | 4),
        // beta: [1.0.1, 1.1.5)
        _ => matches!(ver, 1 | 2),
    }
}

pub fn version_str(ver: usize) -> String {
    let (a, b, c) = VERSIONS[ver];
    format!("{a}.{b}.{c}")
}

pub fn script_bytes(lib: usize, ver: usize) -> Vec<u8> {
    let head = format!("/* {} {} */\n", LIBS[lib], version_str(ver));
    let mut out = head.into_bytes();
    out.resize(1200, b';');
    out
}

pub fn random_catalogue() -> Catalogue {
    let mut b = Catalogue::builder();
    for (l, lib) in LIBS.iter().enumerate() {
        b = b.library(lib);
        for v in 0..VERSIONS.len() {
            b = b.release(lib, &version_str(v), &format!("201{v}-0{}-01", l + 1));
            let bytes = script_bytes(l, v);
            b = b.reference_file(ReferenceFile {
                library_id: lib.to_string(),
                version: version_str(v).parse().unwrap(),
                variant: Variant::Minified,
                byte_length: bytes.len() as u64,
                digest: Digest::of(&bytes),
            });
        }
    }
    b.vulnerability("alpha", "A-1", AffectedRange::Range { low: None, high: "1.1.0".parse().unwrap() })
        .vulnerability("alpha", "A-2", AffectedRange::AtMost("1.0.0".parse().unwrap()))
        .vulnerability("alpha", "A-3", AffectedRange::Range { low: Some("2.0.0".parse().unwrap()), high: "2.0.1".parse().unwrap() })
        .vulnerability("beta", "B-1", AffectedRange::Range { low: Some("1.0.1".parse().unwrap()), high: "1.1.5".parse().unwrap() })
        .build()
        .unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Inline,
    Internal,
    WordPress,
    External,
}

#[derive(Debug, Clone)]
pub struct ScriptSpec {
    pub lib: usize,
    pub ver: usize,
    pub origin: Origin,
    /// Index of an earlier script that injected this one.
    pub parent: Option<usize>,
    pub labeled: bool,
}

#[derive(Debug, Clone)]
pub struct SiteSpec {
    pub domain: String,
    pub scripts: Vec<ScriptSpec>,
}

pub fn site_spec(id: usize) -> impl Strategy<Value = SiteSpec> {
    let script = (
        0..LIBS.len(),
        0..VERSIONS.len(),
        proptest::sample::select(vec![Origin::Inline, Origin::Internal, Origin::WordPress, Origin::External]),
        proptest::option::of(any::<u16>()),
        proptest::bool::weighted(0.15),
    );
    proptest::collection::vec(script, 0..12).prop_map(move |raw| SiteSpec {
        domain: format!("site{id}.test"),
        scripts: raw
            .into_iter()
            .enumerate()
            .map(|(i, (lib, ver, origin, parent, labeled))| ScriptSpec {
                lib,
                ver,
                origin,
                parent: parent.filter(|_| i > 0).map(|p| p as usize % i),
                labeled,
            })
            .collect(),
    })
}

pub fn corpus_specs(max_sites: usize) -> impl Strategy<Value = Vec<SiteSpec>> {
    (1..=max_sites).prop_flat_map(|n| (0..n).map(site_spec).collect::<Vec<_>>())
}

pub fn script_url(spec: &SiteSpec, i: usize) -> Option<String> {
    let s = &spec.scripts[i];
    let lib = LIBS[s.lib];
    match s.origin {
        Origin::Inline => None,
        Origin::Internal => Some(format!("https://static.{}/js/{lib}-{i}.js", spec.domain)),
        Origin::WordPress => Some(format!("https://{}/wp-content/plugins/{lib}-{i}.js", spec.domain)),
        Origin::External => Some(format!("https://cdn.elsewhere.net/{lib}/{}/{lib}.js", version_str(s.ver))),
    }
}

pub fn site_events(spec: &SiteSpec) -> Vec<CrawlEvent> {
    let mut events = vec![CrawlEvent::new(1, EventKind::DocumentCommitted, "F0", "D0").with_url(&format!("https://www.{}/", spec.domain))];
    for (i, s) in spec.scripts.iter().enumerate() {
        let seq = events.len() as u64 + 1;
        let bytes = script_bytes(s.lib, s.ver);
        let mut e = CrawlEvent::new(seq, EventKind::ScriptCreated, "F0", &format!("S{i}"))
            .with_source(Digest::of(&bytes), bytes.len() as u64);
        e = match script_url(spec, i) {
            Some(u) => e.with_url(&u),
            None => e.inline(),
        };
        if let Some(p) = s.parent {
            e = e.with_initiator(&format!("S{p}"));
        }
        events.push(e);
        if s.labeled {
            let mut hint = CrawlEvent::new(seq + 1, EventKind::LabelHint, "F0", &format!("S{i}"));
            hint.label = Some(Label::Widget);
            events.push(hint);
        }
    }
    events
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleFilter {
    All,
    Internal,
    External,
    Inline,
    InternalParent,
    ExternalParent,
    InlineParent,
    Direct,
    Indirect,
    WordPress,
    Labeled,
}

fn origin_class(o: Origin) -> Origin {
    if o == Origin::WordPress {
        Origin::Internal
    } else {
        o
    }
}

/// (vulnerable, total) distinct per-site pairs for `lib` under `filter`,
/// counted straight from the specs.
pub fn oracle_fraction(specs: &[SiteSpec], lib: usize, filter: OracleFilter) -> (usize, usize) {
    let mut vulnerable = 0;
    let mut total = 0;
    for spec in specs {
        let mut versions: BTreeMap<usize, bool> = BTreeMap::new();
        for (i, s) in spec.scripts.iter().enumerate() {
            if s.lib != lib {
                continue;
            }
            let parent_origin = s.parent.map_or(Origin::Internal, |p| origin_class(spec.scripts[p].origin));
            let mut labeled = false;
            let mut cur = Some(i);
            while let Some(c) = cur {
                labeled |= spec.scripts[c].labeled;
                cur = spec.scripts[c].parent;
            }
            let wp = s.origin == Origin::WordPress || s.parent.is_some_and(|p| spec.scripts[p].origin == Origin::WordPress);
            let ok = match filter {
                OracleFilter::All => true,
                OracleFilter::Internal => origin_class(s.origin) == Origin::Internal,
                OracleFilter::External => s.origin == Origin::External,
                OracleFilter::Inline => s.origin == Origin::Inline,
                OracleFilter::InternalParent => parent_origin == Origin::Internal,
                OracleFilter::ExternalParent => parent_origin == Origin::External,
                OracleFilter::InlineParent => parent_origin == Origin::Inline,
                OracleFilter::Direct => s.parent.is_none(),
                OracleFilter::Indirect => s.parent.is_some(),
                OracleFilter::WordPress => wp,
                OracleFilter::Labeled => labeled,
            };
            if ok {
                versions.insert(s.ver, oracle_vulnerable(lib, s.ver));
            }
        }
        total += versions.len();
        vulnerable += versions.values().filter(|&&v| v).count();
    }
    (vulnerable, total)
}

/// Duplicating one detected script must leave every per-site dedup count and
/// every vulnerable fraction unchanged.
pub fn dedup_law(spec: &SiteSpec, pick: usize) -> Result<(), String> {
    use jslibtrace::analysis::{library_vulnerable_fraction, InclusionFilter};
    use jslibtrace::pipeline::process_site;

    if spec.scripts.is_empty() {
        return Ok(());
    }
    let cat = random_catalogue();
    let mut events = site_events(spec);
    let (_, before) = process_site(&events, None, &cat, &[]).map_err(|e| e.to_string())?;
    let scripts: Vec<&CrawlEvent> = events.iter().filter(|e| e.source_digest.is_some()).collect();
    let mut copy = scripts[pick % scripts.len()].clone();
    copy.node_id = "DUP".into();
    copy.seq = events.last().unwrap().seq + 1;
    events.push(copy);
    let (_, after) = process_site(&events, None, &cat, &[]).map_err(|e| e.to_string())?;

    if after.inclusions.len() != before.inclusions.len() + 1 {
        return Err("duplicate was not detected".into());
    }
    if after.vulnerable_distinct_versions != before.vulnerable_distinct_versions
        || after.distinct_versions != before.distinct_versions
    {
        return Err(format!("distinct counts changed for {spec:?}"));
    }
    let (b, a) = (vec![before], vec![after]);
    for lib in LIBS {
        for filter in InclusionFilter::ALL {
            if library_vulnerable_fraction(&b, lib, filter) != library_vulnerable_fraction(&a, lib, filter) {
                return Err(format!("{lib} {filter:?} fraction changed for {spec:?}"));
            }
        }
    }
    Ok(())
}
