//! Plain-text tables and line-oriented JSON for corpus reports.

use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::corpus::{CellStatus, CorpusReport, HostShares, InclusionFilter};

/// Marker printed for an undefined ratio.
pub const UNDEFINED: &str = "-";

fn percent(value: Option<f64>, status: CellStatus) -> String {
    match (status, value) {
        (CellStatus::Omitted, _) | (_, None) => UNDEFINED.to_string(),
        (CellStatus::LowConfidence, Some(v)) => format!("({:.1}%)", v * 100.0),
        (CellStatus::Shown, Some(v)) => format!("{:.1}%", v * 100.0),
    }
}

fn write_hosts(out: &mut String, title: &str, hosts: &HostShares) {
    writeln!(out, "{title} ({} site-host pairs, {} hosts)", hosts.pairs, hosts.distinct_hosts).unwrap();
    for h in &hosts.top {
        writeln!(out, "  {:<40} {:>8} {:>7.2}%", h.host, h.sites, h.share * 100.0).unwrap();
    }
    out.push('\n');
}

/// Human-readable tables. Values in parentheses rest on small samples;
/// `-` marks omitted or undefined cells.
pub fn render_tables(report: &CorpusReport) -> String {
    let mut out = String::new();
    let s = &report.summary;
    writeln!(out, "Sites: {}", s.sites).unwrap();
    writeln!(out, "Sites with a detected library: {}", s.sites_with_library).unwrap();
    writeln!(out, "Sites with a vulnerable library: {}", s.vulnerable_sites).unwrap();
    writeln!(out, "Sites with two or more vulnerable libraries: {}", s.multi_vulnerable_sites).unwrap();
    writeln!(out, "Vulnerable sites fixable by a patch upgrade: {}", s.remediable_vulnerable_sites).unwrap();
    writeln!(
        out,
        "Scripts: {} inline, {} internal, {} external",
        s.scripts_inline, s.scripts_internal, s.scripts_external
    )
    .unwrap();
    writeln!(
        out,
        "Detections: {} static, {} dynamic; {} below size floor; {} probe hits discarded, {} unmatched",
        s.detection.static_hits,
        s.detection.dynamic_hits,
        s.detection.size_filtered,
        s.detection.probe_discards.total(),
        s.detection.unmatched_probes
    )
    .unwrap();
    out.push('\n');

    writeln!(out, "Library origin").unwrap();
    writeln!(
        out,
        "  {:<20} {:>8} {:>9} {:>9} {:>9} {:>9}",
        "library", "pairs", "inline", "internal", "external", "ad/w/t"
    )
    .unwrap();
    for row in &report.origin {
        writeln!(
            out,
            "  {:<20} {:>8} {:>9} {:>9} {:>9} {:>9}",
            row.library_id,
            row.pairs,
            percent(row.inline, row.status),
            percent(row.internal, row.status),
            percent(row.external, row.status),
            percent(row.ad_widget_tracker, row.status),
        )
        .unwrap();
    }
    out.push('\n');

    writeln!(out, "Vulnerable share by inclusion type").unwrap();
    let libraries: Vec<&str> = report.libraries.iter().map(|l| l.library_id.as_str()).collect();
    write!(out, "  {:<20}", "").unwrap();
    for lib in &libraries {
        write!(out, " {lib:>12}").unwrap();
    }
    out.push('\n');
    for filter in InclusionFilter::ALL {
        write!(out, "  {:<20}", filter.name()).unwrap();
        for lib in &libraries {
            let cell = report
                .fraction(lib, filter)
                .map(|r| percent(r.fraction, r.status))
                .unwrap_or_else(|| UNDEFINED.to_string());
            write!(out, " {cell:>12}").unwrap();
        }
        out.push('\n');
    }
    out.push('\n');

    write_hosts(&mut out, "External script hosts", &report.script_hosts);
    write_hosts(&mut out, "Library hosts", &report.library_hosts);

    let lag = &report.lag;
    match &lag.site_max_lag_days {
        Some(p) => writeln!(
            out,
            "Site lag in days (n={}): p5 {} p25 {} p50 {} p75 {} p95 {}",
            lag.sites_with_lag_data, p.p5, p.p25, p.p50, p.p75, p.p95
        )
        .unwrap(),
        None => writeln!(out, "Site lag in days: no data").unwrap(),
    }
    writeln!(
        out,
        "Sites at least one patch release behind: {} ({})",
        lag.sites_behind_patch,
        percent(lag.fraction_behind_patch, CellStatus::Shown)
    )
    .unwrap();
    writeln!(
        out,
        "  {:<20} {:>12} {:>12} {:>10} {:>14}",
        "library", "median vuln", "median safe", "vuln pairs", "latest+vuln"
    )
    .unwrap();
    let days = |v: Option<u64>| v.map_or_else(|| UNDEFINED.to_string(), |d| d.to_string());
    for l in &lag.libraries {
        writeln!(
            out,
            "  {:<20} {:>12} {:>12} {:>10} {:>14}",
            l.library_id,
            days(l.median_lag_vulnerable),
            days(l.median_lag_safe),
            l.vulnerable_pairs,
            l.latest_in_branch_vulnerable
        )
        .unwrap();
    }
    out.push('\n');

    writeln!(out, "Duplicates and aliasing").unwrap();
    writeln!(
        out,
        "  {:<20} {:>8} {:>10} {:>10} {:>12} {:>10} {:>10}",
        "library", "sites", "multi-inc", "same-ver", "multi-ver", "aliased", "alias-fix"
    )
    .unwrap();
    for l in &report.libraries {
        writeln!(
            out,
            "  {:<20} {:>8} {:>10} {:>10} {:>12} {:>10} {:>10}",
            l.library_id,
            l.sites,
            l.multi_inclusion_sites,
            l.same_version_duplicate_sites,
            l.multi_version_sites,
            l.aliasing_sites,
            l.aliasing_avoids_vulnerability
        )
        .unwrap();
    }
    out
}

fn tagged<T: Serialize>(record: &str, value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    if let Value::Object(map) = &mut v {
        map.insert("record".to_string(), Value::String(record.to_string()));
    }
    v
}

/// One JSON object per line, each with a `record` field naming its kind.
pub fn corpus_records(report: &CorpusReport) -> Vec<Value> {
    let mut out = vec![tagged("summary", &report.summary)];
    out.extend(report.libraries.iter().map(|l| tagged("library", l)));
    out.extend(report.origin.iter().map(|r| tagged("origin", r)));
    out.extend(report.vulnerable_fractions.iter().map(|r| tagged("vulnerable_fraction", r)));
    for (kind, hosts) in [("script", &report.script_hosts), ("library", &report.library_hosts)] {
        out.push(json!({
            "record": "host_totals",
            "kind": kind,
            "pairs": hosts.pairs,
            "distinct_hosts": hosts.distinct_hosts,
        }));
        for h in &hosts.top {
            let mut v = tagged("host_share", h);
            v["kind"] = Value::String(kind.to_string());
            out.push(v);
        }
    }
    out.push(json!({
        "record": "lag",
        "sites_with_lag_data": report.lag.sites_with_lag_data,
        "site_max_lag_days": report.lag.site_max_lag_days,
        "sites_behind_patch": report.lag.sites_behind_patch,
        "fraction_behind_patch": report.lag.fraction_behind_patch,
    }));
    out.extend(report.lag.libraries.iter().map(|l| tagged("library_lag", l)));
    out
}

pub fn corpus_jsonl(report: &CorpusReport) -> String {
    let mut out = String::new();
    for record in corpus_records(report) {
        out.push_str(&record.to_string());
        out.push('\n');
    }
    out
}
