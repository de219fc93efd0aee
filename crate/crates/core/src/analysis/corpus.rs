use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::site::{DetectionSummary, Inclusion, SiteReport};
use crate::catalogue::SemVer;
use crate::causality::InclusionClass;

/// Subsets of inclusions used for the vulnerability breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionFilter {
    All,
    Internal,
    External,
    Inline,
    InternalParent,
    ExternalParent,
    InlineParent,
    DirectInRoot,
    Indirect,
    WordPress,
    AdWidgetTracker,
}

impl InclusionFilter {
    pub const ALL: [InclusionFilter; 11] = [
        InclusionFilter::All,
        InclusionFilter::Internal,
        InclusionFilter::External,
        InclusionFilter::Inline,
        InclusionFilter::InternalParent,
        InclusionFilter::ExternalParent,
        InclusionFilter::InlineParent,
        InclusionFilter::DirectInRoot,
        InclusionFilter::Indirect,
        InclusionFilter::WordPress,
        InclusionFilter::AdWidgetTracker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InclusionFilter::All => "All",
            InclusionFilter::Internal => "Internal",
            InclusionFilter::External => "External",
            InclusionFilter::Inline => "Inline",
            InclusionFilter::InternalParent => "Internal Parent",
            InclusionFilter::ExternalParent => "External Parent",
            InclusionFilter::InlineParent => "Inline Parent",
            InclusionFilter::DirectInRoot => "Direct Incl.",
            InclusionFilter::Indirect => "Indirect Incl.",
            InclusionFilter::WordPress => "WordPress",
            InclusionFilter::AdWidgetTracker => "Ad/Widget/Tracker",
        }
    }

    pub fn accepts(self, inc: &Inclusion) -> bool {
        match self {
            InclusionFilter::All => true,
            InclusionFilter::Internal => inc.class == InclusionClass::Internal,
            InclusionFilter::External => inc.class == InclusionClass::External,
            InclusionFilter::Inline => inc.class == InclusionClass::Inline,
            InclusionFilter::InternalParent => inc.parent_class == InclusionClass::Internal,
            InclusionFilter::ExternalParent => inc.parent_class == InclusionClass::External,
            InclusionFilter::InlineParent => inc.parent_class == InclusionClass::Inline,
            InclusionFilter::DirectInRoot => inc.direct_in_root,
            InclusionFilter::Indirect => !inc.direct_in_root,
            InclusionFilter::WordPress => inc.wordpress,
            InclusionFilter::AdWidgetTracker => !inc.labels.is_empty(),
        }
    }
}

/// Vulnerable share of distinct `(site, version)` pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VulnerableFraction {
    pub vulnerable: usize,
    pub total: usize,
}

impl VulnerableFraction {
    /// `None` for an empty denominator.
    pub fn fraction(&self) -> Option<f64> {
        (self.total > 0).then(|| self.vulnerable as f64 / self.total as f64)
    }

    fn add(&mut self, other: VulnerableFraction) {
        self.vulnerable += other.vulnerable;
        self.total += other.total;
    }
}

/// Share of `library` versions that are vulnerable among inclusions passing
/// `filter`. A version included several times on one site counts once.
pub fn library_vulnerable_fraction(reports: &[SiteReport], library_id: &str, filter: InclusionFilter) -> VulnerableFraction {
    let mut out = VulnerableFraction::default();
    for report in reports {
        out.add(site_fraction(report, library_id, filter));
    }
    out
}

fn site_fraction(report: &SiteReport, library_id: &str, filter: InclusionFilter) -> VulnerableFraction {
    let mut versions: BTreeMap<&SemVer, bool> = BTreeMap::new();
    for inc in report.inclusions.iter().filter(|i| i.library_id == library_id && filter.accepts(i)) {
        *versions.entry(&inc.version).or_insert(false) |= inc.vulnerable;
    }
    VulnerableFraction {
        vulnerable: versions.values().filter(|&&v| v).count(),
        total: versions.len(),
    }
}

/// How a table cell should be shown given the size of its sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Shown,
    /// Shown, but marked as resting on a small sample.
    LowConfidence,
    Omitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Below this many samples a cell is marked low-confidence.
    pub low_confidence: usize,
    /// Below this many samples a cell is omitted.
    pub omit: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            low_confidence: 100,
            omit: 10,
        }
    }
}

impl Thresholds {
    /// `total` decides omission, `support` decides the low-confidence mark.
    pub fn status(&self, total: usize, support: usize) -> CellStatus {
        if total < self.omit {
            CellStatus::Omitted
        } else if support < self.low_confidence {
            CellStatus::LowConfidence
        } else {
            CellStatus::Shown
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub thresholds: Thresholds,
    /// Number of hosts kept in each market-share list.
    pub host_limit: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            thresholds: Thresholds::default(),
            host_limit: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct LibraryAcc {
    sites: usize,
    /// Distinct `(site, version)` pairs.
    pairs: usize,
    vulnerable_pairs: usize,
    /// Distinct `(site, version, class)` triples, indexed inline/internal/external.
    by_class: [usize; 3],
    labeled_pairs: usize,
    fractions: BTreeMap<InclusionFilter, VulnerableFraction>,
    lag_vulnerable: Vec<u64>,
    lag_safe: Vec<u64>,
    latest_in_branch_vulnerable: usize,
    multi_inclusion_sites: usize,
    same_version_duplicate_sites: usize,
    multi_version_sites: usize,
    aliasing_sites: usize,
    aliasing_avoids_vulnerability: usize,
}

impl LibraryAcc {
    fn merge(&mut self, o: LibraryAcc) {
        self.sites += o.sites;
        self.pairs += o.pairs;
        self.vulnerable_pairs += o.vulnerable_pairs;
        for i in 0..3 {
            self.by_class[i] += o.by_class[i];
        }
        self.labeled_pairs += o.labeled_pairs;
        for (f, v) in o.fractions {
            self.fractions.entry(f).or_default().add(v);
        }
        self.lag_vulnerable.extend(o.lag_vulnerable);
        self.lag_safe.extend(o.lag_safe);
        self.latest_in_branch_vulnerable += o.latest_in_branch_vulnerable;
        self.multi_inclusion_sites += o.multi_inclusion_sites;
        self.same_version_duplicate_sites += o.same_version_duplicate_sites;
        self.multi_version_sites += o.multi_version_sites;
        self.aliasing_sites += o.aliasing_sites;
        self.aliasing_avoids_vulnerability += o.aliasing_avoids_vulnerability;
    }
}

fn class_index(class: InclusionClass) -> usize {
    match class {
        InclusionClass::Inline => 0,
        InclusionClass::Internal => 1,
        InclusionClass::External => 2,
    }
}

/// Associative summary of any number of site reports. `add` one site at a
/// time, `merge` partial results, then `finish`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusAccumulator {
    sites: usize,
    sites_with_library: usize,
    vulnerable_sites: usize,
    multi_vulnerable_sites: usize,
    remediable_sites: usize,
    sites_behind_patch: usize,
    site_max_lags: Vec<u64>,
    script_hosts: BTreeMap<String, usize>,
    library_hosts: BTreeMap<String, usize>,
    scripts: [usize; 3],
    detection: DetectionSummary,
    build_warnings: usize,
    libraries: BTreeMap<String, LibraryAcc>,
}

impl CorpusAccumulator {
    pub fn add(&mut self, report: &SiteReport) {
        self.sites += 1;
        self.scripts[0] += report.scripts.inline;
        self.scripts[1] += report.scripts.internal;
        self.scripts[2] += report.scripts.external;
        self.build_warnings += report.build_warnings.total();
        let d = &report.detection;
        self.detection.static_hits += d.static_hits;
        self.detection.dynamic_hits += d.dynamic_hits;
        self.detection.size_filtered += d.size_filtered;
        self.detection.unmatched_probes += d.unmatched_probes;
        self.detection.probe_discards.merge(&d.probe_discards);
        for host in &report.external_script_hosts {
            *self.script_hosts.entry(host.clone()).or_insert(0) += 1;
        }

        if report.inclusions.is_empty() {
            return;
        }
        self.sites_with_library += 1;
        if report.has_lag_data() {
            self.site_max_lags.push(report.max_lag_days);
        }
        if report.max_patch_lag_versions >= 1 {
            self.sites_behind_patch += 1;
        }
        if report.is_vulnerable() {
            self.vulnerable_sites += 1;
            if report.remediable_by_patch {
                self.remediable_sites += 1;
            }
        }
        let vulnerable_libraries: BTreeSet<&str> = report
            .inclusions
            .iter()
            .filter(|i| i.vulnerable)
            .map(|i| i.library_id.as_str())
            .collect();
        if vulnerable_libraries.len() >= 2 {
            self.multi_vulnerable_sites += 1;
        }
        let library_hosts: BTreeSet<&str> = report
            .inclusions
            .iter()
            .filter(|i| i.class != InclusionClass::Inline)
            .filter_map(|i| i.host.as_deref())
            .collect();
        for host in library_hosts {
            *self.library_hosts.entry(host.to_string()).or_insert(0) += 1;
        }

        let mut by_library: BTreeMap<&str, Vec<&Inclusion>> = BTreeMap::new();
        for inc in &report.inclusions {
            by_library.entry(&inc.library_id).or_default().push(inc);
        }
        for (lib, incs) in by_library {
            let acc = self.libraries.entry(lib.to_string()).or_default();
            acc.sites += 1;
            if incs.len() >= 2 {
                acc.multi_inclusion_sites += 1;
            }
            if report.duplicates.any_same_version_duplicate(lib) {
                acc.same_version_duplicate_sites += 1;
            }
            if report.duplicates.any_multi_version(lib) {
                acc.multi_version_sites += 1;
            }
            if let Some(finding) = report.aliasing.iter().find(|f| f.library_id == lib) {
                acc.aliasing_sites += 1;
                if finding.avoids_vulnerability {
                    acc.aliasing_avoids_vulnerability += 1;
                }
            }

            let mut pairs: BTreeMap<&SemVer, Vec<&Inclusion>> = BTreeMap::new();
            for inc in &incs {
                pairs.entry(&inc.version).or_default().push(inc);
            }
            for group in pairs.values() {
                let first = group[0];
                acc.pairs += 1;
                let mut classes = [false; 3];
                for inc in group {
                    classes[class_index(inc.class)] = true;
                }
                for (i, seen) in classes.iter().enumerate() {
                    acc.by_class[i] += usize::from(*seen);
                }
                if group.iter().any(|i| !i.labels.is_empty()) {
                    acc.labeled_pairs += 1;
                }
                if first.vulnerable {
                    acc.vulnerable_pairs += 1;
                    if first.latest_in_branch {
                        acc.latest_in_branch_vulnerable += 1;
                    }
                }
                if let Some(lag) = first.lag_days {
                    if first.vulnerable {
                        acc.lag_vulnerable.push(lag);
                    } else {
                        acc.lag_safe.push(lag);
                    }
                }
            }
            for filter in InclusionFilter::ALL {
                let f = site_fraction(report, lib, filter);
                if f.total > 0 {
                    acc.fractions.entry(filter).or_default().add(f);
                }
            }
        }
    }

    pub fn merge(mut self, o: CorpusAccumulator) -> CorpusAccumulator {
        self.sites += o.sites;
        self.sites_with_library += o.sites_with_library;
        self.vulnerable_sites += o.vulnerable_sites;
        self.multi_vulnerable_sites += o.multi_vulnerable_sites;
        self.remediable_sites += o.remediable_sites;
        self.sites_behind_patch += o.sites_behind_patch;
        self.site_max_lags.extend(o.site_max_lags);
        for (h, c) in o.script_hosts {
            *self.script_hosts.entry(h).or_insert(0) += c;
        }
        for (h, c) in o.library_hosts {
            *self.library_hosts.entry(h).or_insert(0) += c;
        }
        for i in 0..3 {
            self.scripts[i] += o.scripts[i];
        }
        self.detection.static_hits += o.detection.static_hits;
        self.detection.dynamic_hits += o.detection.dynamic_hits;
        self.detection.size_filtered += o.detection.size_filtered;
        self.detection.unmatched_probes += o.detection.unmatched_probes;
        self.detection.probe_discards.merge(&o.detection.probe_discards);
        self.build_warnings += o.build_warnings;
        for (lib, acc) in o.libraries {
            self.libraries.entry(lib).or_default().merge(acc);
        }
        self
    }

    pub fn finish(self, config: &CorpusConfig) -> CorpusReport {
        let t = config.thresholds;
        let summary = CorpusSummary {
            sites: self.sites,
            sites_with_library: self.sites_with_library,
            vulnerable_sites: self.vulnerable_sites,
            multi_vulnerable_sites: self.multi_vulnerable_sites,
            remediable_vulnerable_sites: self.remediable_sites,
            scripts_inline: self.scripts[0],
            scripts_internal: self.scripts[1],
            scripts_external: self.scripts[2],
            detection: self.detection,
            build_warnings: self.build_warnings,
        };

        let mut libraries = Vec::new();
        let mut origin = Vec::new();
        let mut vulnerable_fractions = Vec::new();
        let mut library_lag = Vec::new();
        for (lib, mut acc) in self.libraries {
            let class_total: usize = acc.by_class.iter().sum();
            let share = |n: usize| ratio(n, class_total);
            origin.push(OriginRow {
                library_id: lib.clone(),
                pairs: acc.pairs,
                inline: share(acc.by_class[0]),
                internal: share(acc.by_class[1]),
                external: share(acc.by_class[2]),
                ad_widget_tracker: ratio(acc.labeled_pairs, acc.pairs),
                status: t.status(acc.pairs, acc.pairs),
            });
            for filter in InclusionFilter::ALL {
                let f = acc.fractions.get(&filter).copied().unwrap_or_default();
                vulnerable_fractions.push(FractionRow {
                    library_id: lib.clone(),
                    filter,
                    vulnerable: f.vulnerable,
                    total: f.total,
                    fraction: f.fraction(),
                    status: t.status(f.total, f.vulnerable),
                });
            }
            library_lag.push(LibraryLag {
                library_id: lib.clone(),
                median_lag_vulnerable: nearest_rank(&mut acc.lag_vulnerable, 50.0),
                median_lag_safe: nearest_rank(&mut acc.lag_safe, 50.0),
                vulnerable_pairs: acc.vulnerable_pairs,
                latest_in_branch_vulnerable: acc.latest_in_branch_vulnerable,
            });
            libraries.push(LibrarySummary {
                library_id: lib,
                sites: acc.sites,
                pairs: acc.pairs,
                vulnerable_pairs: acc.vulnerable_pairs,
                multi_inclusion_sites: acc.multi_inclusion_sites,
                same_version_duplicate_sites: acc.same_version_duplicate_sites,
                multi_version_sites: acc.multi_version_sites,
                aliasing_sites: acc.aliasing_sites,
                aliasing_avoids_vulnerability: acc.aliasing_avoids_vulnerability,
            });
        }

        let mut lags = self.site_max_lags;
        let percentiles = (!lags.is_empty()).then(|| LagPercentiles {
            p5: nearest_rank(&mut lags, 5.0).unwrap_or(0),
            p25: nearest_rank(&mut lags, 25.0).unwrap_or(0),
            p50: nearest_rank(&mut lags, 50.0).unwrap_or(0),
            p75: nearest_rank(&mut lags, 75.0).unwrap_or(0),
            p95: nearest_rank(&mut lags, 95.0).unwrap_or(0),
        });
        let lag = LagReport {
            sites_with_lag_data: lags.len(),
            site_max_lag_days: percentiles,
            sites_behind_patch: self.sites_behind_patch,
            fraction_behind_patch: ratio(self.sites_behind_patch, self.sites_with_library),
            libraries: library_lag,
        };

        CorpusReport {
            summary,
            libraries,
            origin,
            vulnerable_fractions,
            script_hosts: host_shares(self.script_hosts, config.host_limit),
            library_hosts: host_shares(self.library_hosts, config.host_limit),
            lag,
        }
    }
}

fn ratio(n: usize, d: usize) -> Option<f64> {
    (d > 0).then(|| n as f64 / d as f64)
}

/// Nearest-rank percentile: the smallest value with at least `p`% of the
/// sample at or below it.
pub fn nearest_rank(values: &mut [u64], p: f64) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let rank = ((p / 100.0) * values.len() as f64).ceil() as usize;
    Some(values[rank.clamp(1, values.len()) - 1])
}

fn host_shares(counts: BTreeMap<String, usize>, limit: usize) -> HostShares {
    let pairs: usize = counts.values().sum();
    let distinct_hosts = counts.len();
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(limit);
    HostShares {
        pairs,
        distinct_hosts,
        top: ranked
            .into_iter()
            .map(|(host, sites)| HostShare {
                share: sites as f64 / pairs as f64,
                host,
                sites,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub sites: usize,
    /// Sites with at least one detected library.
    pub sites_with_library: usize,
    pub vulnerable_sites: usize,
    /// Sites with two or more distinct vulnerable libraries.
    pub multi_vulnerable_sites: usize,
    /// Vulnerable sites that a patch-level upgrade would fix.
    pub remediable_vulnerable_sites: usize,
    pub scripts_inline: usize,
    pub scripts_internal: usize,
    pub scripts_external: usize,
    pub detection: DetectionSummary,
    pub build_warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibrarySummary {
    pub library_id: String,
    pub sites: usize,
    pub pairs: usize,
    pub vulnerable_pairs: usize,
    /// Sites including the library two or more times.
    pub multi_inclusion_sites: usize,
    /// Sites where one document includes the same version twice.
    pub same_version_duplicate_sites: usize,
    /// Sites where one document includes two or more versions.
    pub multi_version_sites: usize,
    pub aliasing_sites: usize,
    pub aliasing_avoids_vulnerability: usize,
}

/// Where a library is loaded from. Shares are over distinct
/// `(site, version, class)` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginRow {
    pub library_id: String,
    pub pairs: usize,
    pub inline: Option<f64>,
    pub internal: Option<f64>,
    pub external: Option<f64>,
    /// Share of `(site, version)` pairs with an ad, widget or tracker label.
    pub ad_widget_tracker: Option<f64>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionRow {
    pub library_id: String,
    pub filter: InclusionFilter,
    pub vulnerable: usize,
    pub total: usize,
    pub fraction: Option<f64>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostShare {
    pub host: String,
    pub sites: usize,
    /// `sites` over all `(site, host)` pairs.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostShares {
    pub pairs: usize,
    pub distinct_hosts: usize,
    pub top: Vec<HostShare>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagPercentiles {
    pub p5: u64,
    pub p25: u64,
    pub p50: u64,
    pub p75: u64,
    pub p95: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryLag {
    pub library_id: String,
    pub median_lag_vulnerable: Option<u64>,
    pub median_lag_safe: Option<u64>,
    pub vulnerable_pairs: usize,
    /// Vulnerable pairs already on the newest patch release of their branch.
    pub latest_in_branch_vulnerable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagReport {
    pub sites_with_lag_data: usize,
    /// Distribution of each site's largest lag.
    pub site_max_lag_days: Option<LagPercentiles>,
    pub sites_behind_patch: usize,
    /// Over sites with at least one detected library.
    pub fraction_behind_patch: Option<f64>,
    pub libraries: Vec<LibraryLag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub summary: CorpusSummary,
    pub libraries: Vec<LibrarySummary>,
    pub origin: Vec<OriginRow>,
    pub vulnerable_fractions: Vec<FractionRow>,
    pub script_hosts: HostShares,
    pub library_hosts: HostShares,
    pub lag: LagReport,
}

impl CorpusReport {
    pub fn from_sites(reports: &[SiteReport]) -> CorpusReport {
        Self::from_sites_with(reports, &CorpusConfig::default())
    }

    pub fn from_sites_with(reports: &[SiteReport], config: &CorpusConfig) -> CorpusReport {
        crate::parallel::fold_reports(reports).finish(config)
    }

    pub fn fraction(&self, library_id: &str, filter: InclusionFilter) -> Option<&FractionRow> {
        self.vulnerable_fractions
            .iter()
            .find(|r| r.library_id == library_id && r.filter == filter)
    }
}
