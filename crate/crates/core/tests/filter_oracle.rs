mod common;

use jslibtrace::causality::{build_tree, CrawlEvent, EventKind, Label};
use jslibtrace::filterlist::{label_tree, parse_filter_list, parse_rule, url_matches, MatchContext, ResourceKind};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn matcher_agrees_with_regex_oracle(rule in common::rule_text(), (url, doc, kind) in common::request()) {
        if let Err(e) = common::matcher_agrees(&rule, &url, &doc, kind) {
            return Err(TestCaseError::fail(e));
        }
    }
}

#[test]
fn google_analytics_examples() {
    let rule = parse_rule("||google-analytics.com^", Label::Tracker).unwrap();
    let ctx = |u: &str| MatchContext::new(u, "example.com", ResourceKind::Script);
    assert!(url_matches(&rule, &ctx("https://www.google-analytics.com/analytics.js")));
    assert!(!url_matches(&rule, &ctx("https://nongoogle-analytics.com/x.js")));
    assert!(!url_matches(&rule, &ctx("https://example.com/?u=google-analytics.com")));
}

#[test]
fn exception_leaves_node_unlabelled() {
    let set = parse_filter_list("||goodads.example^\n@@||goodads.example^", Label::Ad);
    let events = [
        CrawlEvent::new(1, EventKind::DocumentCommitted, "F0", "D0").with_url("https://site.test/"),
        CrawlEvent::new(2, EventKind::ScriptCreated, "F0", "S").with_url("https://goodads.example/a.js"),
        CrawlEvent::new(3, EventKind::ScriptCreated, "F0", "T").with_url("https://badads.example/a.js"),
    ];
    let tree = label_tree(build_tree(&events, "site.test").unwrap(), &[set]);
    assert!(tree.nodes().all(|(_, n)| n.labels.is_empty()));
}

#[test]
fn labelling_is_idempotent() {
    let sets = [
        parse_filter_list("||ads.other.net^\n/s1", Label::Ad),
        parse_filter_list("||notsite.test^$third-party", Label::Tracker),
    ];
    for events in common::sample(common::event_log(), 100) {
        let once = label_tree(build_tree(&events, "site.test").unwrap(), &sets);
        let twice = label_tree(once.clone(), &sets);
        assert_eq!(once, twice);
        // Document-chain inheritance can only add to the ancestor walk.
        let expected = common::brute_labels(&once);
        for (idx, node) in once.nodes() {
            assert!(node.labels.is_superset(&expected[idx.0]));
        }
    }
}
