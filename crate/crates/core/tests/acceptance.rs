//! Acceptance runner. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Time limits are wall-clock on the test profile.

mod common;

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use jslibtrace::analysis::remediation_check;
use jslibtrace::catalogue::{load_catalogue, AffectedRange, Catalogue, LoadWarning, ReferenceFile, Variant};
use jslibtrace::causality::{build_tree, classify_url, InclusionClass, read_event_log, tree_metrics, CrawlEvent, EventKind, Label};
use jslibtrace::digest::Digest;
use jslibtrace::filterlist::{parse_rule, url_matches, MatchContext};
use jslibtrace::pipeline::process_site;
use jslibtrace::SemVer;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn v(s: &str) -> SemVer {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn range_semantics() -> Outcome {
    let cat = Catalogue::builder()
        .library("jquery")
        .release("jquery", "1.6.2", "2011-06-30")
        .release("jquery", "1.6.3", "2011-09-01")
        .vulnerability("jquery", "before-1.6.3", AffectedRange::Range { low: None, high: v("1.6.3") })
        .build()
        .unwrap();
    ensure(!cat.vulnerabilities_for("jquery", &v("1.6.2")).unwrap().is_empty(), "1.6.2 not vulnerable")?;
    ensure(cat.vulnerabilities_for("jquery", &v("1.6.3")).unwrap().is_empty(), "1.6.3 vulnerable")?;

    // 200 releases; each record's bounds are release indices, and the oracle
    // decides membership by index alone.
    let releases: Vec<String> = (0..200).map(|i| format!("{}.{}.{}", i / 50, (i / 10) % 5, i % 10)).collect();
    let records: [(&str, Option<usize>, usize, bool); 6] = [
        ("r0", None, 37, false),
        ("r1", Some(12), 13, false),
        ("r2", Some(50), 120, false),
        ("r3", None, 64, true),
        ("r4", Some(150), 199, false),
        ("r5", None, 0, true),
    ];
    let mut b = Catalogue::builder().library("x");
    for (i, r) in releases.iter().enumerate() {
        b = b.release("x", r, &format!("{}-01-01", 2000 + i % 20));
    }
    for (id, low, high, at_most) in records {
        let affected = if at_most {
            AffectedRange::AtMost(v(&releases[high]))
        } else {
            AffectedRange::Range { low: low.map(|l| v(&releases[l])), high: v(&releases[high]) }
        };
        b = b.vulnerability("x", id, affected);
    }
    let cat = b.build().map_err(|e| e.to_string())?;
    for (i, r) in releases.iter().enumerate() {
        let got: Vec<&str> = cat.vulnerabilities_for("x", &v(r)).unwrap().iter().map(|rec| rec.vuln_id.as_str()).collect();
        let want: Vec<&str> = records
            .iter()
            .filter(|(_, low, high, at_most)| if *at_most { i <= *high } else { low.map_or(true, |l| l <= i) && i < *high })
            .map(|r| r.0)
            .collect();
        ensure(got == want, format!("release {r}: got {got:?}, want {want:?}"))?;
    }
    Ok("exclusive bound at 1.6.3; 200 releases x 6 records agree with index oracle".into())
}

fn angular_five() -> Outcome {
    let cat = load_catalogue(BufReader::new(File::open(fixture("catalogue.jsonl")).unwrap())).map_err(|e| e.to_string())?;
    let recs = cat.vulnerabilities_for("angular", &v("1.2.0")).map_err(|e| e.to_string())?;
    let ids: std::collections::BTreeSet<&str> = recs.iter().map(|r| r.vuln_id.as_str()).collect();
    ensure(recs.len() == 5 && ids.len() == 5, format!("{} records, {} distinct", recs.len(), ids.len()))?;
    Ok("angular 1.2.0 -> 5 distinct records".into())
}

fn size_floor() -> Outcome {
    let build = |bytes: u64| {
        Catalogue::builder()
            .library("s")
            .release("s", "1.9.0", "2010-12-23")
            .reference_file(ReferenceFile {
                library_id: "s".into(),
                version: v("1.9.0"),
                variant: Variant::Full,
                byte_length: bytes,
                digest: Digest::of(&vec![b'x'; bytes as usize]),
            })
            .build()
            .unwrap()
    };
    let small = build(995);
    let ok = build(996);
    ensure(small.reference_files().is_empty(), "995-byte file kept")?;
    ensure(
        matches!(small.warnings(), [LoadWarning::UndersizedReferenceFile { byte_length: 995, .. }]),
        "no warning for 995-byte file",
    )?;
    ensure(ok.reference_files().len() == 1 && ok.warnings().is_empty(), "996-byte file rejected")?;
    Ok("995 rejected with warning, 996 accepted".into())
}

fn ms_gov() -> Outcome {
    let cat = load_catalogue(BufReader::new(File::open(fixture("catalogue.jsonl")).unwrap())).unwrap();
    let events = read_event_log(BufReader::new(File::open(fixture("events/ms_gov.jsonl")).unwrap())).unwrap();
    let (tree, report) = process_site(&events, None, &cat, &[]).map_err(|e| e.to_string())?;
    let detected = tree.nodes().filter(|(_, n)| n.kind.is_script() && !n.detections.is_empty()).count();
    ensure(detected == 13, format!("{detected} detected script nodes"))?;
    let docs = &report.duplicates.documents;
    ensure(docs.len() == 1, format!("{} documents with libraries", docs.len()))?;
    let jq = docs[0].libraries.get("jquery").ok_or("no jquery entry")?;
    let counts: Vec<(String, usize)> = jq.version_counts.iter().map(|(k, c)| (k.to_string(), *c)).collect();
    ensure(
        counts == [("2.2.0".to_string(), 12), ("2.2.2".to_string(), 1)],
        format!("version counts {counts:?}"),
    )?;
    ensure(jq.same_version_duplicate, "same-version flag unset")?;
    ensure(jq.distinct_versions == 2, format!("{} distinct versions", jq.distinct_versions))?;
    let direct = report.inclusions.iter().filter(|i| i.direct_in_root).count();
    ensure(direct == 1, format!("{direct} direct-in-root inclusions"))?;
    Ok("13 nodes, {2.2.0: 12, 2.2.2: 1}, same-version, 2 distinct, 1 direct".into())
}

fn aliasing_site(resolved: &str) -> jslibtrace::analysis::SiteReport {
    let body = |ver: &str| {
        let mut b = format!("/* lib {ver} */").into_bytes();
        b.resize(1500, b' ');
        b
    };
    let mut cat = Catalogue::builder().library("lib");
    for r in ["1.2.0", "1.2.3"] {
        let bytes = body(r);
        cat = cat.release("lib", r, "2014-01-01").reference_file(ReferenceFile {
            library_id: "lib".into(),
            version: v(r),
            variant: Variant::Minified,
            byte_length: bytes.len() as u64,
            digest: Digest::of(&bytes),
        });
    }
    let cat = cat
        .vulnerability("lib", "old", AffectedRange::Range { low: None, high: v("1.2.3") })
        .build()
        .unwrap();
    let bytes = body(resolved);
    let events = [
        CrawlEvent::new(1, EventKind::DocumentCommitted, "F0", "D0").with_url("https://site.test/"),
        CrawlEvent::new(2, EventKind::ScriptCreated, "F0", "S")
            .with_url("https://cdn.example.net/libs/lib/1.2/lib.min.js")
            .with_source(Digest::of(&bytes), bytes.len() as u64),
    ];
    process_site(&events, None, &cat, &[]).unwrap().1
}

fn aliasing() -> Outcome {
    let hit = aliasing_site("1.2.3");
    ensure(hit.aliasing.len() == 1, format!("{} findings for 1.2.3", hit.aliasing.len()))?;
    let f = &hit.aliasing[0];
    ensure(f.url_version_prefix == "1.2" && f.resolved_version == v("1.2.3"), format!("{f:?}"))?;
    ensure(f.avoids_vulnerability, "1.2.3 should avoid the 1.2.0 vulnerability")?;
    let miss = aliasing_site("1.2.0");
    ensure(miss.aliasing.is_empty(), format!("{} findings for 1.2.0", miss.aliasing.len()))?;
    Ok("prefix 1.2: 1.2.3 -> 1 finding, 1.2.0 -> none".into())
}

fn remediation() -> Outcome {
    let bytes = vec![b'z'; 2048];
    let site = |high: &str| {
        let cat = Catalogue::builder()
            .library("lib")
            .release("lib", "1.2.0", "2014-01-01")
            .release("lib", "1.2.3", "2014-06-01")
            .vulnerability("lib", "v", AffectedRange::Range { low: None, high: v(high) })
            .reference_file(ReferenceFile {
                library_id: "lib".into(),
                version: v("1.2.0"),
                variant: Variant::Minified,
                byte_length: 2048,
                digest: Digest::of(&bytes),
            })
            .build()
            .unwrap();
        let log = [
            CrawlEvent::new(1, EventKind::DocumentCommitted, "F0", "D0").with_url("https://site.test/"),
            CrawlEvent::new(2, EventKind::ScriptCreated, "F0", "S")
                .with_url("https://site.test/lib.js")
                .with_source(Digest::of(&bytes), 2048),
        ];
        let (_, report) = process_site(&log, None, &cat, &[]).unwrap();
        (report, cat)
    };
    let (fixable, cat) = site("1.2.3");
    ensure(fixable.is_vulnerable(), "1.2.0 not vulnerable")?;
    ensure(fixable.remediable_by_patch && remediation_check(&fixable, &cat), "clean 1.2.3 not found")?;
    let (stuck, cat) = site("1.3.0");
    ensure(!stuck.remediable_by_patch && !remediation_check(&stuck, &cat), "all-vulnerable branch remediable")?;
    Ok("clean 1.2.3 -> true; all 1.2.x vulnerable -> false".into())
}

fn tree_laws() -> Outcome {
    let logs = common::sample(common::event_log(), 1000);
    let longest = logs.iter().map(Vec::len).max().unwrap_or(0);
    ensure(longest <= 200, format!("log with {longest} events"))?;
    for (i, events) in logs.iter().enumerate() {
        let tree = build_tree(events, "site.test").map_err(|e| format!("log {i}: {e}"))?;
        common::check_tree_laws(&tree).map_err(|e| format!("log {i}: {e}"))?;
        ensure(build_tree(events, "site.test").unwrap() == tree, format!("log {i}: replay differs"))?;
        let (depth, brute) = (tree_metrics(&tree).depth, common::brute_depth(&tree));
        ensure(depth == brute, format!("log {i}: depth {depth} vs {brute}"))?;
    }
    Ok(format!("1000 logs (max {longest} events): single root, acyclic, n-1 edges, replay, depth"))
}

fn filter_matching() -> Outcome {
    let texts = common::sample(common::rule_text(), 500);
    let requests = common::sample(common::request(), 2000);
    let rules: Vec<_> = texts
        .iter()
        .map(|t| parse_rule(t, Label::Ad).ok_or_else(|| format!("rule {t:?} rejected")))
        .collect::<Result<_, _>>()?;
    let oracles: Vec<common::OracleRule> = texts.iter().map(|t| common::OracleRule::new(t)).collect();
    let contexts: Vec<MatchContext> = requests.iter().map(|(u, d, k)| MatchContext::new(u, d, *k)).collect();
    let mut matched = 0usize;
    for (rule, oracle) in rules.iter().zip(&oracles) {
        for (ctx, (url, doc, kind)) in contexts.iter().zip(&requests) {
            let got = url_matches(rule, ctx);
            ensure(got == oracle.matches(url, doc, *kind), format!("{:?} on {url} (doc {doc}): matcher {got}", oracle.text))?;
            matched += usize::from(got);
        }
    }
    let ga = parse_rule("||google-analytics.com^", Label::Tracker).unwrap();
    let ctx = |u: &str| MatchContext::new(u, "example.com", jslibtrace::filterlist::ResourceKind::Script);
    ensure(url_matches(&ga, &ctx("https://www.google-analytics.com/analytics.js")), "ga: www subdomain missed")?;
    ensure(!url_matches(&ga, &ctx("https://nongoogle-analytics.com/x.js")), "ga: nongoogle matched")?;
    Ok(format!("500 rules x 2000 urls agree with regex oracle ({matched} matches); ga examples"))
}

fn dedup_law() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    let strategy = (common::site_spec(0), proptest::prelude::any::<usize>());
    runner
        .run(&strategy, |(spec, pick)| {
            common::dedup_law(&spec, pick).map_err(proptest::test_runner::TestCaseError::fail)
        })
        .map_err(|e| e.to_string())?;
    // Same site with one version included twelve times.
    let spec = common::SiteSpec {
        domain: "twelve.test".into(),
        scripts: (0..12)
            .map(|_| common::ScriptSpec { lib: 0, ver: 0, origin: common::Origin::Internal, parent: None, labeled: false })
            .collect(),
    };
    let (_, report) = process_site(&common::site_events(&spec), None, &common::random_catalogue(), &[]).unwrap();
    ensure(report.vulnerable_distinct_versions == 1, format!("12 copies -> {}", report.vulnerable_distinct_versions))?;
    Ok("256 cases: duplicate inclusion changes no count or fraction; 12 copies -> 1".into())
}

fn internal_external() -> Outcome {
    use InclusionClass::{External, Inline, Internal};
    let sites = [
        "example.com", "ms.gov", "shop.example.org", "bbc.co.uk", "a.b", "mercantil.com", "xn--bcher-kva.de",
        "github.io", "site1.test", "t.co",
    ];
    let templates: [(Option<&str>, InclusionClass); 10] = [
        (Some("https://{s}/app.js"), Internal),
        (Some("https://www.{s}/app.js"), Internal),
        (Some("https://cdn.static.{s}/app.js"), Internal),
        (Some("https://CDN.{S}/APP.js"), Internal),
        (Some("https://{s}:8443/app.js"), Internal),
        (Some("//img.{s}/x.js"), Internal),
        (Some("https://not{s}/app.js"), External),
        (Some("https://{s}.evil.net/app.js"), External),
        (Some("https://{s}-cdn.net/x{s}/app.js"), External),
        (None, Inline),
    ];
    let mut cases = 0;
    for site in sites {
        for (template, want) in &templates {
            let url = template.map(|t| t.replace("{s}", site).replace("{S}", &site.to_uppercase()));
            let got = classify_url(url.as_deref(), site);
            ensure(got == *want, format!("{url:?} on {site}: {got:?}, want {want:?}"))?;
            cases += 1;
        }
    }
    ensure(classify_url(Some("https://notexample.com/a.js"), "example.com") == External, "notexample.com trap")?;
    Ok(format!("{cases}-case table incl. notexample.com"))
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 10] = [
        ("range-semantics", Some(Duration::from_secs(1)), range_semantics),
        ("angular-1.2.0-five", None, angular_five),
        ("size-floor-995-996", None, size_floor),
        ("ms-gov-duplicates", Some(Duration::from_secs(1)), ms_gov),
        ("version-aliasing", None, aliasing),
        ("patch-remediation", None, remediation),
        ("tree-laws-1000-logs", Some(Duration::from_secs(30)), tree_laws),
        ("filter-matching-oracle", Some(Duration::from_secs(10)), filter_matching),
        ("dedup-law", None, dedup_law),
        ("internal-external-table", None, internal_external),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:?}, limit {l:?}")),
            (o, _) => o,
        };
        let limit_text = limit.map_or(String::new(), |l| format!(", limit {l:?}"));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({took:.2?}{limit_text})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} ({took:.2?}{limit_text})");
            }
        }
    }
    println!("{} of {} criteria passed", 10 - failed, 10);
    if failed > 0 {
        std::process::exit(1);
    }
}
