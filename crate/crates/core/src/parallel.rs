//! Corpus-level drivers. With the `parallel` feature (on by default) sites are
//! processed on the rayon pool; without it, or through the `_sequential`
//! variants, everything runs on the calling thread. Results are identical and
//! in input order either way.

use crate::analysis::{CorpusAccumulator, SiteReport};
use crate::catalogue::Catalogue;
use crate::causality::{BuildError, CausalityTree, CrawlEvent};
use crate::detection::{static_lookup, ScriptSample, StaticOutcome};
use crate::filterlist::FilterSet;
use crate::pipeline::process_site;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One crawled site.
#[derive(Debug, Clone)]
pub struct SiteInput {
    /// Where the events came from, for messages.
    pub source: String,
    pub site_domain: Option<String>,
    pub events: Vec<CrawlEvent>,
}

#[derive(Debug, Clone)]
pub struct SiteOutput {
    pub source: String,
    pub tree: CausalityTree,
    pub report: SiteReport,
}

pub type SiteResult = Result<SiteOutput, (String, BuildError)>;

fn run_one(input: &SiteInput, cat: &Catalogue, filters: &[FilterSet]) -> SiteResult {
    process_site(&input.events, input.site_domain.as_deref(), cat, filters)
        .map(|(tree, report)| SiteOutput {
            source: input.source.clone(),
            tree,
            report,
        })
        .map_err(|e| (input.source.clone(), e))
}

pub fn process_sites_sequential(inputs: &[SiteInput], cat: &Catalogue, filters: &[FilterSet]) -> Vec<SiteResult> {
    inputs.iter().map(|i| run_one(i, cat, filters)).collect()
}

#[cfg(feature = "parallel")]
pub fn process_sites(inputs: &[SiteInput], cat: &Catalogue, filters: &[FilterSet]) -> Vec<SiteResult> {
    inputs.par_iter().map(|i| run_one(i, cat, filters)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn process_sites(inputs: &[SiteInput], cat: &Catalogue, filters: &[FilterSet]) -> Vec<SiteResult> {
    process_sites_sequential(inputs, cat, filters)
}

pub fn static_lookup_batch_sequential(samples: &[ScriptSample], cat: &Catalogue) -> Vec<StaticOutcome> {
    samples.iter().map(|s| static_lookup(s, cat)).collect()
}

#[cfg(feature = "parallel")]
pub fn static_lookup_batch(samples: &[ScriptSample], cat: &Catalogue) -> Vec<StaticOutcome> {
    samples.par_iter().map(|s| static_lookup(s, cat)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn static_lookup_batch(samples: &[ScriptSample], cat: &Catalogue) -> Vec<StaticOutcome> {
    static_lookup_batch_sequential(samples, cat)
}

pub fn fold_reports_sequential(reports: &[SiteReport]) -> CorpusAccumulator {
    let mut acc = CorpusAccumulator::default();
    for r in reports {
        acc.add(r);
    }
    acc
}

#[cfg(feature = "parallel")]
pub fn fold_reports(reports: &[SiteReport]) -> CorpusAccumulator {
    reports
        .par_iter()
        .fold(CorpusAccumulator::default, |mut acc, r| {
            acc.add(r);
            acc
        })
        .reduce(CorpusAccumulator::default, CorpusAccumulator::merge)
}

#[cfg(not(feature = "parallel"))]
pub fn fold_reports(reports: &[SiteReport]) -> CorpusAccumulator {
    fold_reports_sequential(reports)
}

/// Sets the size of rayon's global pool. No-op without the `parallel` feature.
pub fn configure_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
        log::warn!("thread pool already configured: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}
