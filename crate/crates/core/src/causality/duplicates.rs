use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CausalityTree, NodeIndex};
use crate::catalogue::SemVer;

/// Inclusions of one library into one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryDuplicates {
    pub version_counts: BTreeMap<SemVer, usize>,
    pub distinct_versions: usize,
    /// Some version was included two or more times.
    pub same_version_duplicate: bool,
    /// Two or more different versions were included.
    pub multi_version: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentDuplicates {
    pub document: NodeIndex,
    pub document_node_id: String,
    pub url: Option<String>,
    pub libraries: BTreeMap<String, LibraryDuplicates>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateReport {
    /// Every document with at least one detected library, in tree order.
    pub documents: Vec<DocumentDuplicates>,
}

impl DuplicateReport {
    pub fn any_same_version_duplicate(&self, library_id: &str) -> bool {
        self.documents
            .iter()
            .filter_map(|d| d.libraries.get(library_id))
            .any(|l| l.same_version_duplicate)
    }

    pub fn any_multi_version(&self, library_id: &str) -> bool {
        self.documents
            .iter()
            .filter_map(|d| d.libraries.get(library_id))
            .any(|l| l.multi_version)
    }

    pub fn flagged(&self) -> bool {
        self.documents
            .iter()
            .flat_map(|d| d.libraries.values())
            .any(|l| l.same_version_duplicate || l.multi_version)
    }
}

/// Counts library inclusions per attached document and version.
pub fn duplicate_inclusions(tree: &CausalityTree) -> DuplicateReport {
    let mut per_doc: BTreeMap<NodeIndex, BTreeMap<String, BTreeMap<SemVer, usize>>> = BTreeMap::new();
    for (idx, node) in tree.nodes() {
        if !node.kind.is_script() {
            continue;
        }
        // A node carrying conflicting versions counts once per version.
        let distinct: BTreeSet<(&str, &SemVer)> = node
            .detections
            .iter()
            .map(|d| (d.library_id.as_str(), &d.version))
            .collect();
        let doc = tree.attached_document_of(idx);
        for (lib, version) in distinct {
            *per_doc
                .entry(doc)
                .or_default()
                .entry(lib.to_string())
                .or_default()
                .entry(version.clone())
                .or_insert(0) += 1;
        }
    }

    let documents = per_doc
        .into_iter()
        .map(|(doc, libs)| {
            let node = tree.node(doc);
            DocumentDuplicates {
                document: doc,
                document_node_id: node.node_id.clone(),
                url: node.url.clone(),
                libraries: libs
                    .into_iter()
                    .map(|(lib, version_counts)| {
                        let distinct_versions = version_counts.len();
                        let same_version_duplicate = version_counts.values().any(|&c| c >= 2);
                        (
                            lib,
                            LibraryDuplicates {
                                version_counts,
                                distinct_versions,
                                same_version_duplicate,
                                multi_version: distinct_versions >= 2,
                            },
                        )
                    })
                    .collect(),
            }
        })
        .collect();
    DuplicateReport { documents }
}
