//! Library catalogue: releases and their dates, reference file hashes, and
//! vulnerability records, plus the version queries the analysis needs.
//!
//! A [`Catalogue`] is immutable once built and can be shared freely between
//! worker threads.

mod format;
pub mod version;

use std::collections::{BTreeMap, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::Digest;

pub use format::{load_catalogue, write_catalogue, CatalogueError};
pub use version::{compare_versions, parse_version, SemVer, VersionError};

/// Reference files below this size are never admitted into the matchable set.
pub const MIN_REFERENCE_BYTES: u64 = 996;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown library {0:?}")]
    UnknownLibrary(String),
    #[error("library {0:?} has no releases")]
    NoReleases(String),
    #[error("unknown version {version} of library {library:?}")]
    UnknownVersion { library: String, version: SemVer },
    #[error("library {library:?} has no release in branch {major}.{minor}")]
    EmptyBranch {
        library: String,
        major: u64,
        minor: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionRelease {
    pub library_id: String,
    pub version: SemVer,
    pub release_date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Full,
    Minified,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceFile {
    pub library_id: String,
    pub version: SemVer,
    pub variant: Variant,
    pub byte_length: u64,
    pub digest: Digest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VulnerabilityKind {
    Range,
    AtMost,
}

/// Versions affected by one vulnerability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffectedRange {
    /// `[low, high)`; a missing `low` is unbounded below.
    Range { low: Option<SemVer>, high: SemVer },
    /// Every version `<= v`.
    AtMost(SemVer),
}

impl AffectedRange {
    pub fn contains(&self, v: &SemVer) -> bool {
        match self {
            AffectedRange::Range { low, high } => {
                low.as_ref().map_or(true, |low| low <= v) && v < high
            }
            AffectedRange::AtMost(max) => v <= max,
        }
    }

    pub fn kind(&self) -> VulnerabilityKind {
        match self {
            AffectedRange::Range { .. } => VulnerabilityKind::Range,
            AffectedRange::AtMost(_) => VulnerabilityKind::AtMost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VulnerabilityRecord {
    pub library_id: String,
    pub vuln_id: String,
    pub affected: AffectedRange,
}

impl VulnerabilityRecord {
    pub fn affects(&self, v: &SemVer) -> bool {
        self.affected.contains(v)
    }
}

/// Per-library metadata and indexes.
#[derive(Debug, Clone)]
pub struct Library {
    pub id: String,
    pub name: String,
    /// Lowercase token used by the name-in-URL heuristic.
    pub heuristic_token: String,
    releases: BTreeMap<SemVer, NaiveDate>,
    vulnerabilities: Vec<VulnerabilityRecord>,
}

impl Library {
    pub fn releases(&self) -> impl DoubleEndedIterator<Item = (&SemVer, &NaiveDate)> {
        self.releases.iter()
    }

    pub fn vulnerabilities(&self) -> &[VulnerabilityRecord] {
        &self.vulnerabilities
    }

    fn release(&self, version: &SemVer) -> VersionRelease {
        VersionRelease {
            library_id: self.id.clone(),
            version: version.clone(),
            release_date: self.releases[version],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LoadWarning {
    /// A reference file under [`MIN_REFERENCE_BYTES`] was dropped.
    UndersizedReferenceFile {
        line: Option<usize>,
        library_id: String,
        version: SemVer,
        byte_length: u64,
    },
    /// The same reference file appeared twice.
    DuplicateReferenceFile { line: Option<usize>, digest: Digest },
}

#[derive(Debug, Clone)]
pub struct Catalogue {
    libraries: BTreeMap<String, Library>,
    reference_files: HashMap<Digest, ReferenceFile>,
    warnings: Vec<LoadWarning>,
}

impl Catalogue {
    pub fn builder() -> CatalogueBuilder {
        CatalogueBuilder::default()
    }

    pub fn library_ids(&self) -> impl Iterator<Item = &str> {
        self.libraries.keys().map(String::as_str)
    }

    pub fn libraries(&self) -> impl Iterator<Item = &Library> {
        self.libraries.values()
    }

    pub fn library(&self, library_id: &str) -> Result<&Library, LookupError> {
        self.libraries
            .get(library_id)
            .ok_or_else(|| LookupError::UnknownLibrary(library_id.to_string()))
    }

    pub fn contains_library(&self, library_id: &str) -> bool {
        self.libraries.contains_key(library_id)
    }

    pub fn warnings(&self) -> &[LoadWarning] {
        &self.warnings
    }

    pub fn undersized_dropped(&self) -> usize {
        self.warnings
            .iter()
            .filter(|w| matches!(w, LoadWarning::UndersizedReferenceFile { .. }))
            .count()
    }

    /// All admitted reference files, sorted by digest.
    pub fn reference_files(&self) -> Vec<&ReferenceFile> {
        let mut files: Vec<_> = self.reference_files.values().collect();
        files.sort_by_key(|f| f.digest);
        files
    }

    pub fn lookup_digest(&self, digest: &Digest) -> Option<&ReferenceFile> {
        self.reference_files.get(digest)
    }

    pub fn release_count(&self) -> usize {
        self.libraries.values().map(|l| l.releases.len()).sum()
    }

    pub fn vulnerability_count(&self) -> usize {
        self.libraries.values().map(|l| l.vulnerabilities.len()).sum()
    }

    pub fn release_date(&self, library_id: &str, v: &SemVer) -> Result<NaiveDate, LookupError> {
        let lib = self.library(library_id)?;
        lib.releases
            .get(v)
            .copied()
            .ok_or_else(|| LookupError::UnknownVersion {
                library: library_id.to_string(),
                version: v.clone(),
            })
    }

    /// Every vulnerability record whose affected range contains `v`.
    pub fn vulnerabilities_for(
        &self,
        library_id: &str,
        v: &SemVer,
    ) -> Result<Vec<&VulnerabilityRecord>, LookupError> {
        let lib = self.library(library_id)?;
        Ok(lib.vulnerabilities.iter().filter(|r| r.affects(v)).collect())
    }

    /// `true` when at least one record affects `v`; unknown libraries are
    /// treated as not known-vulnerable.
    pub fn is_vulnerable(&self, library_id: &str, v: &SemVer) -> bool {
        self.libraries
            .get(library_id)
            .is_some_and(|lib| lib.vulnerabilities.iter().any(|r| r.affects(v)))
    }

    /// Release with the greatest version (not the latest date).
    pub fn newest_release(&self, library_id: &str) -> Result<VersionRelease, LookupError> {
        let lib = self.library(library_id)?;
        let (version, _) = lib
            .releases
            .last_key_value()
            .ok_or_else(|| LookupError::NoReleases(library_id.to_string()))?;
        Ok(lib.release(version))
    }

    /// Greatest release sharing `(major, minor)` with `v`.
    pub fn latest_in_patch_branch(
        &self,
        library_id: &str,
        v: &SemVer,
    ) -> Result<SemVer, LookupError> {
        self.branch(library_id, v)?
            .last()
            .map(|r| (*r).clone())
            .ok_or_else(|| LookupError::EmptyBranch {
                library: library_id.to_string(),
                major: v.major,
                minor: v.minor,
            })
    }

    /// Releases in the `(major, minor)` branch of `v`, ascending.
    pub fn branch(&self, library_id: &str, v: &SemVer) -> Result<Vec<&SemVer>, LookupError> {
        let lib = self.library(library_id)?;
        let start = SemVer {
            major: v.major,
            minor: v.minor,
            patch: 0,
            extra: Some(String::new()),
        };
        Ok(lib
            .releases
            .range(start..)
            .map(|(ver, _)| ver)
            .take_while(|ver| ver.same_branch(v))
            .collect())
    }

    /// Number of releases in the patch branch of `v` that are newer than `v`.
    pub fn patch_lag(&self, library_id: &str, v: &SemVer) -> Result<usize, LookupError> {
        Ok(self
            .branch(library_id, v)?
            .into_iter()
            .filter(|r| *r > v)
            .count())
    }

    /// Whole days from the release of `v` to the release of the newest
    /// version, clamped at zero.
    pub fn lag_days(&self, library_id: &str, v: &SemVer) -> Result<u64, LookupError> {
        let released = self.release_date(library_id, v)?;
        let newest = self.newest_release(library_id)?;
        let days = (newest.release_date - released).num_days();
        Ok(days.max(0) as u64)
    }

    pub fn heuristic_token(&self, library_id: &str) -> Option<&str> {
        self.libraries
            .get(library_id)
            .map(|l| l.heuristic_token.as_str())
    }
}

/// Collects records and validates catalogue invariants in [`build`](Self::build).
#[derive(Debug, Default)]
pub struct CatalogueBuilder {
    libraries: Vec<(Option<usize>, String, Option<String>, Option<String>)>,
    releases: Vec<(Option<usize>, VersionRelease)>,
    reference_files: Vec<(Option<usize>, ReferenceFile)>,
    vulnerabilities: Vec<(Option<usize>, VulnerabilityRecord)>,
}

/// Why a set of records does not form a valid catalogue.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{record} record: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct InvalidRecord {
    pub line: Option<usize>,
    pub record: &'static str,
    pub message: String,
}

impl CatalogueBuilder {
    pub fn library(mut self, id: &str) -> Self {
        self.add_library(None, id.to_string(), None, None);
        self
    }

    pub fn release(mut self, library_id: &str, version: &str, date: &str) -> Self {
        let release = VersionRelease {
            library_id: library_id.to_string(),
            version: parse_version(version).expect("valid version literal"),
            release_date: date.parse().expect("valid ISO date literal"),
        };
        self.add_release(None, release);
        self
    }

    pub fn vulnerability(mut self, library_id: &str, vuln_id: &str, affected: AffectedRange) -> Self {
        self.add_vulnerability(
            None,
            VulnerabilityRecord {
                library_id: library_id.to_string(),
                vuln_id: vuln_id.to_string(),
                affected,
            },
        );
        self
    }

    pub fn reference_file(mut self, file: ReferenceFile) -> Self {
        self.add_reference_file(None, file);
        self
    }

    pub fn add_library(
        &mut self,
        line: Option<usize>,
        id: String,
        name: Option<String>,
        heuristic_token: Option<String>,
    ) {
        self.libraries.push((line, id, name, heuristic_token));
    }

    pub fn add_release(&mut self, line: Option<usize>, release: VersionRelease) {
        self.releases.push((line, release));
    }

    pub fn add_reference_file(&mut self, line: Option<usize>, file: ReferenceFile) {
        self.reference_files.push((line, file));
    }

    pub fn add_vulnerability(&mut self, line: Option<usize>, record: VulnerabilityRecord) {
        self.vulnerabilities.push((line, record));
    }

    pub fn build(self) -> Result<Catalogue, InvalidRecord> {
        let invalid = |line, record, message: String| InvalidRecord {
            line,
            record,
            message,
        };

        let mut libraries = BTreeMap::new();
        for (line, id, name, token) in self.libraries {
            if id.is_empty() {
                return Err(invalid(line, "library", "empty library id".into()));
            }
            if libraries.contains_key(&id) {
                return Err(invalid(line, "library", format!("duplicate library {id:?}")));
            }
            let heuristic_token = token.unwrap_or_else(|| id.to_lowercase());
            libraries.insert(
                id.clone(),
                Library {
                    name: name.unwrap_or_else(|| id.clone()),
                    id,
                    heuristic_token,
                    releases: BTreeMap::new(),
                    vulnerabilities: Vec::new(),
                },
            );
        }

        for (line, release) in self.releases {
            let lib = libraries.get_mut(&release.library_id).ok_or_else(|| {
                invalid(line, "release", format!("unknown library {:?}", release.library_id))
            })?;
            if lib
                .releases
                .insert(release.version.clone(), release.release_date)
                .is_some()
            {
                return Err(invalid(
                    line,
                    "release",
                    format!("duplicate release {} of {:?}", release.version, release.library_id),
                ));
            }
        }

        for (line, record) in self.vulnerabilities {
            let lib = libraries.get_mut(&record.library_id).ok_or_else(|| {
                invalid(line, "vuln", format!("unknown library {:?}", record.library_id))
            })?;
            if let AffectedRange::Range {
                low: Some(low),
                high,
            } = &record.affected
            {
                if low >= high {
                    return Err(invalid(
                        line,
                        "vuln",
                        format!("{}: range low {low} is not below high {high}", record.vuln_id),
                    ));
                }
            }
            if lib.vulnerabilities.iter().any(|r| r.vuln_id == record.vuln_id) {
                return Err(invalid(
                    line,
                    "vuln",
                    format!("duplicate vulnerability id {:?}", record.vuln_id),
                ));
            }
            lib.vulnerabilities.push(record);
        }
        for lib in libraries.values_mut() {
            lib.vulnerabilities.sort_by(|a, b| a.vuln_id.cmp(&b.vuln_id));
        }

        let mut reference_files: HashMap<Digest, ReferenceFile> = HashMap::new();
        let mut warnings = Vec::new();
        for (line, file) in self.reference_files {
            let lib = libraries.get(&file.library_id).ok_or_else(|| {
                invalid(line, "reffile", format!("unknown library {:?}", file.library_id))
            })?;
            if !lib.releases.contains_key(&file.version) {
                return Err(invalid(
                    line,
                    "reffile",
                    format!("version {} of {:?} has no release record", file.version, file.library_id),
                ));
            }
            if file.byte_length < MIN_REFERENCE_BYTES {
                warnings.push(LoadWarning::UndersizedReferenceFile {
                    line,
                    library_id: file.library_id,
                    version: file.version,
                    byte_length: file.byte_length,
                });
                continue;
            }
            match reference_files.get(&file.digest) {
                Some(existing)
                    if existing.library_id == file.library_id && existing.version == file.version =>
                {
                    warnings.push(LoadWarning::DuplicateReferenceFile {
                        line,
                        digest: file.digest,
                    });
                }
                Some(existing) => {
                    return Err(invalid(
                        line,
                        "reffile",
                        format!(
                            "digest {} already assigned to {} {}",
                            file.digest, existing.library_id, existing.version
                        ),
                    ));
                }
                None => {
                    reference_files.insert(file.digest, file);
                }
            }
        }

        Ok(Catalogue {
            libraries,
            reference_files,
            warnings,
        })
    }
}
