use std::fmt;

use serde::{Deserialize, Serialize};
use url::Url;

use super::CausalityNode;

/// Where a script came from relative to the crawled site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InclusionClass {
    Inline,
    Internal,
    External,
}

impl InclusionClass {
    pub const ALL: [InclusionClass; 3] = [InclusionClass::Inline, InclusionClass::Internal, InclusionClass::External];

    pub fn as_str(self) -> &'static str {
        match self {
            InclusionClass::Inline => "inline",
            InclusionClass::Internal => "internal",
            InclusionClass::External => "external",
        }
    }
}

impl fmt::Display for InclusionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lowercased host of an absolute or scheme-relative URL.
pub fn host_of(url: &str) -> Option<String> {
    let parsed = match Url::parse(url) {
        Ok(u) => u,
        Err(url::ParseError::RelativeUrlWithoutBase) if url.starts_with("//") => {
            Url::parse(&format!("https:{url}")).ok()?
        }
        Err(_) => return None,
    };
    parsed
        .host_str()
        .map(|h| h.trim_end_matches('.').to_ascii_lowercase())
        .filter(|h| !h.is_empty())
}

/// `host` equals `domain` or is a subdomain of it at a label boundary.
pub fn host_within(host: &str, domain: &str) -> bool {
    let host = host.trim_end_matches('.').to_ascii_lowercase();
    let domain = domain.trim_end_matches('.').to_ascii_lowercase();
    if domain.is_empty() {
        return false;
    }
    host == domain
        || (host.len() > domain.len()
            && host.ends_with(&domain)
            && host.as_bytes()[host.len() - domain.len() - 1] == b'.')
}

/// Classifies a script by its URL. Unparsable URLs count as external.
pub fn classify_url(url: Option<&str>, site_domain: &str) -> InclusionClass {
    let Some(url) = url else {
        return InclusionClass::Inline;
    };
    match host_of(url) {
        Some(host) if host_within(&host, site_domain) => InclusionClass::Internal,
        Some(_) => InclusionClass::External,
        None => {
            log::warn!("unparsable script URL {url:?}; classified as external");
            InclusionClass::External
        }
    }
}

pub fn classify_inclusion(node: &CausalityNode, site_domain: &str) -> InclusionClass {
    classify_url(node.url.as_deref(), site_domain)
}
