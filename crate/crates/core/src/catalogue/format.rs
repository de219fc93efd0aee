//! Line-delimited JSON catalogue files.
//!
//! Each non-blank line is one JSON object tagged by `"record"`:
//!
//! ```text
//! {"record":"library","id":"jquery","name":"jQuery","heuristic_token":"jquery"}
//! {"record":"release","library":"jquery","version":"1.6.2","date":"2011-06-30"}
//! {"record":"reffile","library":"jquery","version":"1.6.2","variant":"minified","bytes":91556,"sha256":"<64 hex>"}
//! {"record":"vuln","library":"jquery","id":"CVE-2011-4969","kind":"range","high":"1.6.3"}
//! {"record":"vuln","library":"angular","id":"X","kind":"at_most","at_most":"1.2.0"}
//! ```
//!
//! Lines starting with `#` are comments. `docs/catalogue-format.md` in the
//! repository root has the full field reference.

use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    AffectedRange, Catalogue, CatalogueBuilder, InvalidRecord, ReferenceFile, SemVer, Variant,
    VersionRelease, VulnerabilityKind, VulnerabilityRecord,
};
use crate::digest::Digest;

#[derive(Debug, Error)]
pub enum CatalogueError {
    #[error("reading catalogue: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Syntax {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Invalid(#[from] InvalidRecord),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Library {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        heuristic_token: Option<String>,
    },
    Release {
        library: String,
        version: SemVer,
        date: NaiveDate,
    },
    Reffile {
        library: String,
        version: SemVer,
        variant: Variant,
        bytes: u64,
        sha256: Digest,
    },
    Vuln {
        library: String,
        id: String,
        kind: VulnerabilityKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        low: Option<SemVer>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        high: Option<SemVer>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at_most: Option<SemVer>,
    },
}

/// Parses and validates a catalogue. Undersized reference files are dropped
/// and reported through [`Catalogue::warnings`].
pub fn load_catalogue<R: BufRead>(source: R) -> Result<Catalogue, CatalogueError> {
    let mut builder = CatalogueBuilder::default();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record: Record = serde_json::from_str(trimmed).map_err(|source| {
            CatalogueError::Syntax {
                line: line_no,
                source,
            }
        })?;
        let line = Some(line_no);
        match record {
            Record::Library {
                id,
                name,
                heuristic_token,
            } => builder.add_library(line, id, name, heuristic_token.map(|t| t.to_lowercase())),
            Record::Release {
                library,
                version,
                date,
            } => builder.add_release(
                line,
                VersionRelease {
                    library_id: library,
                    version,
                    release_date: date,
                },
            ),
            Record::Reffile {
                library,
                version,
                variant,
                bytes,
                sha256,
            } => builder.add_reference_file(
                line,
                ReferenceFile {
                    library_id: library,
                    version,
                    variant,
                    byte_length: bytes,
                    digest: sha256,
                },
            ),
            Record::Vuln {
                library,
                id,
                kind,
                low,
                high,
                at_most,
            } => {
                let bad = |message: &str| InvalidRecord {
                    line,
                    record: "vuln",
                    message: format!("{id}: {message}"),
                };
                let affected = match kind {
                    VulnerabilityKind::Range => {
                        if at_most.is_some() {
                            return Err(bad("kind=range must not carry at_most").into());
                        }
                        let high = high.ok_or_else(|| bad("kind=range requires high"))?;
                        AffectedRange::Range { low, high }
                    }
                    VulnerabilityKind::AtMost => {
                        if low.is_some() || high.is_some() {
                            return Err(bad("kind=at_most must not carry low/high").into());
                        }
                        AffectedRange::AtMost(at_most.ok_or_else(|| bad("kind=at_most requires at_most"))?)
                    }
                };
                builder.add_vulnerability(
                    line,
                    VulnerabilityRecord {
                        library_id: library,
                        vuln_id: id,
                        affected,
                    },
                );
            }
        }
    }
    Ok(builder.build()?)
}

/// Writes `cat` in the line-delimited format, in a stable order.
pub fn write_catalogue<W: Write>(cat: &Catalogue, mut out: W) -> std::io::Result<()> {
    let mut emit = |record: &Record| -> std::io::Result<()> {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")
    };
    for lib in cat.libraries() {
        emit(&Record::Library {
            id: lib.id.clone(),
            name: Some(lib.name.clone()),
            heuristic_token: Some(lib.heuristic_token.clone()),
        })?;
        for (version, date) in lib.releases() {
            emit(&Record::Release {
                library: lib.id.clone(),
                version: version.clone(),
                date: *date,
            })?;
        }
        for vuln in lib.vulnerabilities() {
            let (low, high, at_most) = match &vuln.affected {
                AffectedRange::Range { low, high } => (low.clone(), Some(high.clone()), None),
                AffectedRange::AtMost(v) => (None, None, Some(v.clone())),
            };
            emit(&Record::Vuln {
                library: lib.id.clone(),
                id: vuln.vuln_id.clone(),
                kind: vuln.affected.kind(),
                low,
                high,
                at_most,
            })?;
        }
    }
    let mut files = cat.reference_files();
    files.sort_by(|a, b| (&a.library_id, &a.version, a.digest).cmp(&(&b.library_id, &b.version, b.digest)));
    for file in files {
        emit(&Record::Reffile {
            library: file.library_id.clone(),
            version: file.version.clone(),
            variant: file.variant,
            bytes: file.byte_length,
            sha256: file.digest,
        })?;
    }
    Ok(())
}
