use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalogue::{Catalogue, SemVer};
use crate::causality::{
    classify_url, duplicate_inclusions, host_of, tree_metrics, BuildWarnings, CausalityTree,
    DuplicateReport, InclusionClass, Label, NodeIndex, TreeMetrics,
};
use crate::detection::{heuristic_partition, DetectionMethod, DiscardCounter, HeuristicPartition};

/// URL fragment marking WordPress-hosted code.
pub const WORDPRESS_MARKER: &str = "/wp-content/";

/// One library-bearing script node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inclusion {
    pub node: NodeIndex,
    pub node_id: String,
    pub library_id: String,
    pub version: SemVer,
    pub method: DetectionMethod,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub conflicting: bool,
    pub url: Option<String>,
    pub host: Option<String>,
    pub class: InclusionClass,
    /// Class of the document or script that caused the load.
    pub parent_class: InclusionClass,
    /// The parent is the main document.
    pub direct_in_root: bool,
    pub labels: BTreeSet<Label>,
    pub wordpress: bool,
    /// Document the script is attached to.
    pub document: NodeIndex,
    pub vulnerable: bool,
    pub vulnerability_ids: Vec<String>,
    /// `None` when the version has no release record.
    pub lag_days: Option<u64>,
    /// Newer releases in the same patch branch.
    pub patch_lag: Option<usize>,
    /// The version is the newest release of its patch branch.
    pub latest_in_branch: bool,
}

/// Version requested by prefix from a CDN and resolved to a newer release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasingFinding {
    pub library_id: String,
    pub node_id: String,
    pub url: String,
    /// One or two numeric components, as found in the URL path.
    pub url_version_prefix: String,
    pub resolved_version: SemVer,
    pub avoids_vulnerability: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasingConfig {
    /// Restrict detection to these hosts (dot-boundary match). `None` means
    /// any host.
    pub cdn_hosts: Option<Vec<String>>,
}

/// Counters describing how detections were obtained for a site.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub static_hits: usize,
    pub dynamic_hits: usize,
    /// Script nodes with a digest but below the reference size floor.
    pub size_filtered: usize,
    pub probe_discards: DiscardCounter,
    /// Probe hits naming a node that is not a script in the tree.
    pub unmatched_probes: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptCounts {
    pub inline: usize,
    pub internal: usize,
    pub external: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteReport {
    pub site_domain: String,
    pub inclusions: Vec<Inclusion>,
    /// Distinct `(library, version)` pairs on the site.
    pub distinct_versions: usize,
    pub vulnerable_distinct_versions: usize,
    /// 0 when no included version has a release date.
    pub max_lag_days: u64,
    pub max_patch_lag_versions: usize,
    pub duplicates: DuplicateReport,
    pub aliasing: Vec<AliasingFinding>,
    pub remediable_by_patch: bool,
    pub scripts: ScriptCounts,
    /// Hosts of external `<script>` URLs, each listed once.
    pub external_script_hosts: BTreeSet<String>,
    pub heuristic: BTreeMap<String, HeuristicPartition>,
    pub detection: DetectionSummary,
    pub build_warnings: BuildWarnings,
    pub metrics: TreeMetrics,
}

impl SiteReport {
    /// Distinct `(library, version)` pairs with whether each is vulnerable.
    pub fn library_versions(&self) -> BTreeMap<(&str, &SemVer), bool> {
        let mut out = BTreeMap::new();
        for inc in &self.inclusions {
            *out.entry((inc.library_id.as_str(), &inc.version)).or_insert(false) |= inc.vulnerable;
        }
        out
    }

    pub fn has_lag_data(&self) -> bool {
        self.inclusions.iter().any(|i| i.lag_days.is_some())
    }

    pub fn is_vulnerable(&self) -> bool {
        self.vulnerable_distinct_versions > 0
    }
}

fn is_wordpress(url: Option<&str>) -> bool {
    url.is_some_and(|u| u.to_ascii_lowercase().contains(WORDPRESS_MARKER))
}

/// Builds the per-site report. Expects a labelled tree with merged detections.
pub fn site_report(tree: &CausalityTree, cat: &Catalogue) -> SiteReport {
    let site = tree.site_domain.as_str();
    let mut inclusions = Vec::new();
    let mut scripts = ScriptCounts::default();
    let mut external_script_hosts = BTreeSet::new();

    for (idx, node) in tree.nodes() {
        if !node.kind.is_script() {
            continue;
        }
        let class = classify_url(node.url.as_deref(), site);
        match class {
            InclusionClass::Inline => scripts.inline += 1,
            InclusionClass::Internal => scripts.internal += 1,
            InclusionClass::External => {
                scripts.external += 1;
                if let Some(host) = node.url.as_deref().and_then(host_of) {
                    external_script_hosts.insert(host);
                }
            }
        }
        if node.detections.is_empty() {
            continue;
        }
        let parent = tree.parent(idx).unwrap_or(CausalityTree::ROOT);
        let parent_url = tree.node(parent).url.as_deref();
        let parent_class = classify_url(parent_url, site);
        let wordpress = is_wordpress(node.url.as_deref()) || is_wordpress(parent_url);

        for d in &node.detections {
            let vulns = cat.vulnerabilities_for(&d.library_id, &d.version).unwrap_or_default();
            let latest = cat.latest_in_patch_branch(&d.library_id, &d.version).ok();
            inclusions.push(Inclusion {
                node: idx,
                node_id: node.node_id.clone(),
                library_id: d.library_id.clone(),
                version: d.version.clone(),
                method: d.method,
                conflicting: d.conflicting,
                url: node.url.clone(),
                host: node.url.as_deref().and_then(host_of),
                class,
                parent_class,
                direct_in_root: parent == CausalityTree::ROOT,
                labels: node.labels.clone(),
                wordpress,
                document: tree.attached_document_of(idx),
                vulnerable: !vulns.is_empty(),
                vulnerability_ids: vulns.iter().map(|v| v.vuln_id.clone()).collect(),
                lag_days: cat.lag_days(&d.library_id, &d.version).ok(),
                patch_lag: cat.patch_lag(&d.library_id, &d.version).ok(),
                latest_in_branch: latest.as_ref().is_some_and(|l| *l <= d.version),
            });
        }
    }

    let mut heuristic = BTreeMap::new();
    for lib in cat.libraries() {
        let part = heuristic_partition(
            tree.nodes().filter(|(_, n)| n.kind.is_script()).map(|(_, n)| {
                (
                    n.node_id.as_str(),
                    n.url.as_deref(),
                    n.detections.iter().any(|d| d.library_id == lib.id),
                )
            }),
            &lib.heuristic_token,
        );
        if part != HeuristicPartition::default() {
            heuristic.insert(lib.id.clone(), part);
        }
    }

    let mut report = SiteReport {
        site_domain: tree.site_domain.clone(),
        distinct_versions: 0,
        vulnerable_distinct_versions: 0,
        max_lag_days: inclusions.iter().filter_map(|i| i.lag_days).max().unwrap_or(0),
        max_patch_lag_versions: inclusions.iter().filter_map(|i| i.patch_lag).max().unwrap_or(0),
        inclusions,
        duplicates: duplicate_inclusions(tree),
        aliasing: detect_version_aliasing(tree, cat, &AliasingConfig::default()),
        remediable_by_patch: true,
        scripts,
        external_script_hosts,
        heuristic,
        detection: DetectionSummary::default(),
        build_warnings: tree.warnings,
        metrics: tree_metrics(tree),
    };
    let (distinct, vulnerable) = {
        let versions = report.library_versions();
        (versions.len(), versions.values().filter(|&&v| v).count())
    };
    report.distinct_versions = distinct;
    report.vulnerable_distinct_versions = vulnerable;
    report.remediable_by_patch = remediation_check(&report, cat);
    report
}

/// True iff every vulnerable `(library, version)` on the site has a newer
/// release in its `(major, minor)` branch with no known vulnerability.
pub fn remediation_check(report: &SiteReport, cat: &Catalogue) -> bool {
    report
        .library_versions()
        .into_iter()
        .filter(|(_, vulnerable)| *vulnerable)
        .all(|((lib, version), _)| {
            cat.branch(lib, version).is_ok_and(|branch| {
                branch
                    .into_iter()
                    .any(|r| r > version && !cat.is_vulnerable(lib, r))
            })
        })
}

/// Finds the first path segment that looks like a version and returns it if
/// it has only one or two components.
pub fn url_version_prefix(url: &str) -> Option<(String, SemVer)> {
    let parsed = url::Url::parse(url)
        .or_else(|_| url::Url::parse(&format!("https:{url}")))
        .ok()?;
    let segment = parsed.path_segments()?.find(|seg| {
        let parts: Vec<&str> = seg.split('.').collect();
        (1..=4).contains(&parts.len())
            && parts.iter().all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
    })?;
    let parts: Vec<u64> = segment.split('.').map(|p| p.parse().ok()).collect::<Option<_>>()?;
    match parts.as_slice() {
        [major] => Some((segment.to_string(), SemVer::new(*major, 0, 0))),
        [major, minor] => Some((segment.to_string(), SemVer::new(*major, *minor, 0))),
        _ => None,
    }
}

/// Version aliasing: the URL names a one- or two-component prefix and the
/// detected version is greater than that prefix extended with zeros. At most
/// one finding per library.
pub fn detect_version_aliasing(tree: &CausalityTree, cat: &Catalogue, config: &AliasingConfig) -> Vec<AliasingFinding> {
    let mut findings: BTreeMap<String, AliasingFinding> = BTreeMap::new();
    for (_, node) in tree.nodes() {
        let Some(url) = node.url.as_deref() else {
            continue;
        };
        if !node.kind.is_script() || node.detections.is_empty() {
            continue;
        }
        if let Some(hosts) = &config.cdn_hosts {
            let host = host_of(url).unwrap_or_default();
            if !hosts.iter().any(|h| crate::causality::host_within(&host, h)) {
                continue;
            }
        }
        let Some((prefix, zero_extended)) = url_version_prefix(url) else {
            continue;
        };
        for d in &node.detections {
            if findings.contains_key(&d.library_id) || d.version <= zero_extended {
                continue;
            }
            let branch_vulnerable = cat
                .branch(&d.library_id, &zero_extended)
                .is_ok_and(|b| b.into_iter().any(|r| cat.is_vulnerable(&d.library_id, r)));
            findings.insert(
                d.library_id.clone(),
                AliasingFinding {
                    library_id: d.library_id.clone(),
                    node_id: node.node_id.clone(),
                    url: url.to_string(),
                    url_version_prefix: prefix.clone(),
                    resolved_version: d.version.clone(),
                    avoids_vulnerability: branch_vulnerable && !cat.is_vulnerable(&d.library_id, &d.version),
                },
            );
        }
    }
    findings.into_values().collect()
}
