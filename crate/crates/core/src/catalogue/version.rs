//! `major.minor.patch` versions as found in library tags, CDN paths and
//! runtime version attributes.
//!
//! The grammar is deliberately a little wider than strict SemVer: two to four
//! dot-separated numeric components, optionally followed by a `-suffix` or
//! `+build` token. Two components imply `patch = 0`; a fourth numeric component
//! is kept verbatim in [`SemVer::extra`] so that ordering stays a total order
//! over the canonical triple.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VersionError {
    #[error("empty version string")]
    Empty,
    #[error("version {0:?}: component {1} is empty")]
    EmptyComponent(String, usize),
    #[error("version {0:?}: component {1} is not a non-negative integer")]
    NonNumeric(String, usize),
    #[error("version {0:?}: expected 2 to 4 components, found {1}")]
    ComponentCount(String, usize),
    #[error("version {0:?}: empty suffix")]
    EmptySuffix(String),
}

/// A parsed library version.
///
/// Ordering is lexicographic on `(major, minor, patch)`. On a tie, a version
/// without `extra` sorts after one with `extra` (so `2.0.0-beta < 2.0.0`); two
/// versions that both carry `extra` fall back to comparing the raw tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemVer {
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
    /// Raw trailing token including its leading separator, e.g. `-rc1`, `.4`
    /// or `.4-beta`.
    pub extra: Option<String>,
}

impl SemVer {
    pub const fn new(major: u64, minor: u64, patch: u64) -> Self {
        SemVer {
            major,
            minor,
            patch,
            extra: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, VersionError> {
        parse_version(text)
    }

    /// Same `(major, minor)` patch branch.
    pub fn same_branch(&self, other: &SemVer) -> bool {
        self.major == other.major && self.minor == other.minor
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.major, self.minor, self.patch)
    }
}

/// Parses a version string. See the module docs for the accepted grammar.
pub fn parse_version(text: &str) -> Result<SemVer, VersionError> {
    if text.is_empty() {
        return Err(VersionError::Empty);
    }
    let (numeric, suffix) = match text.find(['-', '+']) {
        Some(idx) => {
            let suffix = &text[idx..];
            if suffix.len() == 1 {
                return Err(VersionError::EmptySuffix(text.to_string()));
            }
            (&text[..idx], Some(suffix))
        }
        None => (text, None),
    };

    let parts: Vec<&str> = numeric.split('.').collect();
    if !(2..=4).contains(&parts.len()) {
        return Err(VersionError::ComponentCount(text.to_string(), parts.len()));
    }
    let mut values = [0u64; 4];
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(VersionError::EmptyComponent(text.to_string(), i + 1));
        }
        if !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(VersionError::NonNumeric(text.to_string(), i + 1));
        }
        values[i] = part
            .parse()
            .map_err(|_| VersionError::NonNumeric(text.to_string(), i + 1))?;
    }

    let mut extra = String::new();
    if parts.len() == 4 {
        extra.push('.');
        extra.push_str(parts[3]);
    }
    if let Some(suffix) = suffix {
        extra.push_str(suffix);
    }

    Ok(SemVer {
        major: values[0],
        minor: values[1],
        patch: values[2],
        extra: (!extra.is_empty()).then_some(extra),
    })
}

/// Total order over versions; equivalent to `a.cmp(b)`.
pub fn compare_versions(a: &SemVer, b: &SemVer) -> Ordering {
    a.cmp(b)
}

impl Ord for SemVer {
    fn cmp(&self, other: &Self) -> Ordering {
        self.triple()
            .cmp(&other.triple())
            .then_with(|| match (&self.extra, &other.extra) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Greater,
                (Some(_), None) => Ordering::Less,
                (Some(a), Some(b)) => a.cmp(b),
            })
    }
}

impl PartialOrd for SemVer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SemVer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)?;
        if let Some(extra) = &self.extra {
            f.write_str(extra)?;
        }
        Ok(())
    }
}

impl FromStr for SemVer {
    type Err = VersionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_version(s)
    }
}

impl Serialize for SemVer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SemVer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_version(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> SemVer {
        parse_version(s).unwrap()
    }

    #[test]
    fn parses_plain_triple() {
        assert_eq!(v("1.6.3"), SemVer::new(1, 6, 3));
        assert_eq!(v("1.6.3").to_string(), "1.6.3");
    }

    #[test]
    fn two_components_zero_extend() {
        assert_eq!(v("1.2"), SemVer::new(1, 2, 0));
    }

    #[test]
    fn fourth_component_is_extra() {
        let four = v("1.2.3.4");
        assert_eq!(four.triple(), (1, 2, 3));
        assert_eq!(four.extra.as_deref(), Some(".4"));
        assert_eq!(four.to_string(), "1.2.3.4");
        assert_eq!(v("1.2.3.4-beta").extra.as_deref(), Some(".4-beta"));
    }

    #[test]
    fn suffixes() {
        let rc = v("2.0.0-rc1");
        assert_eq!(rc.extra.as_deref(), Some("-rc1"));
        assert!(rc < v("2.0.0"));
        assert!(v("1.9.1") < rc);
        assert_eq!(v("1.0.0+build.7").extra.as_deref(), Some("+build.7"));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "v1..2", "1", "1.2.3.4.5", "1.x.3", "latest", "1.2.", "1.2-", " 1.2.3", "v1.2.3"] {
            assert!(parse_version(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(compare_versions(&v("1.2.3"), &v("1.2.4")), Ordering::Less);
        assert_eq!(compare_versions(&v("1.2.3"), &v("1.2.3")), Ordering::Equal);
        assert_eq!(compare_versions(&v("2.0.0"), &v("1.99.99")), Ordering::Greater);
    }

    #[test]
    fn serde_uses_string_form() {
        let json = serde_json::to_string(&v("1.11.1")).unwrap();
        assert_eq!(json, "\"1.11.1\"");
        let back: SemVer = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v("1.11.1"));
        assert!(serde_json::from_str::<SemVer>("\"nope\"").is_err());
    }

    fn arb_version() -> impl Strategy<Value = SemVer> {
        (
            0u64..4,
            0u64..4,
            0u64..4,
            prop::option::of(prop::sample::select(vec!["-rc1", "-beta", ".4", "-alpha.2"])),
        )
            .prop_map(|(major, minor, patch, extra)| SemVer {
                major,
                minor,
                patch,
                extra: extra.map(str::to_string),
            })
    }

    proptest! {
        #[test]
        fn canonical_triple_round_trips(a in 0u64..10_000, b in 0u64..10_000, c in 0u64..10_000) {
            let text = format!("{a}.{b}.{c}");
            prop_assert_eq!(v(&text).to_string(), text);
        }

        #[test]
        fn display_parse_round_trips(x in arb_version()) {
            prop_assert_eq!(v(&x.to_string()), x);
        }

        #[test]
        fn order_is_antisymmetric(a in arb_version(), b in arb_version()) {
            prop_assert_eq!(compare_versions(&a, &b), compare_versions(&b, &a).reverse());
            prop_assert_eq!(compare_versions(&a, &b) == Ordering::Equal, a == b);
        }

        #[test]
        fn order_is_transitive(a in arb_version(), b in arb_version(), c in arb_version()) {
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }
    }
}
