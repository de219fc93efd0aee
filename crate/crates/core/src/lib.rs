//! Post-processing for website crawls: causality trees, client-side library
//! detection, and vulnerability, lag and provenance analysis.
//!
//! The usual flow is [`catalogue::load_catalogue`] →
//! [`causality::read_event_log`] → [`pipeline::process_site`] for every site,
//! then [`analysis::CorpusReport::from_sites`] over the resulting site reports.

pub mod analysis;
pub mod catalogue;
pub mod causality;
pub mod detection;
pub mod digest;
pub mod filterlist;
pub mod parallel;
pub mod pipeline;

pub use catalogue::{Catalogue, SemVer};
pub use causality::{CausalityTree, Label};
pub use detection::Detection;
