//! Per-site reports and their aggregation over a corpus.

mod corpus;
pub mod render;
mod site;

pub use corpus::{
    library_vulnerable_fraction, nearest_rank, CellStatus, CorpusAccumulator, CorpusConfig, CorpusReport,
    CorpusSummary, FractionRow, HostShare, HostShares, InclusionFilter, LagPercentiles, LagReport, LibraryLag,
    LibrarySummary, OriginRow, Thresholds, VulnerableFraction,
};
pub use site::{
    detect_version_aliasing, remediation_check, site_report, url_version_prefix, AliasingConfig,
    AliasingFinding, DetectionSummary, Inclusion, ScriptCounts, SiteReport, WORDPRESS_MARKER,
};
