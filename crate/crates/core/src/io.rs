//! Structure and chain files.
//!
//! A structure document is a JSON object:
//!
//! ```json
//! {
//!   "signature": { "functions": ["add/2", "zero/0"], "relations": ["le/2"] },
//!   "size": 3,
//!   "functions": { "add": [0, 1, 2, 1, 2, 0, 2, 0, 1], "zero": [0] },
//!   "relations": { "le": [[0, 0], [0, 1]] },
//!   "names": { "a": 1 }
//! }
//! ```
//!
//! Function tables list outputs in lexicographic order of input tuples. A
//! chain document is `{ "members": [<structure>...], "embeddings": [[...]...] }`
//! where entry `e` of each embedding is the image of element `e`. Unknown keys
//! are rejected everywhere.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structure::{ChainFamily, Element, FiniteStructure, RawStructure, Signature, StructureError, Symbol};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureDoc {
    #[serde(default)]
    functions: Vec<String>,
    #[serde(default)]
    relations: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    signature: SignatureDoc,
    size: usize,
    #[serde(default)]
    functions: BTreeMap<String, Vec<Element>>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<Element>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    names: BTreeMap<String, Element>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainDoc {
    members: Vec<StructureDoc>,
    embeddings: Vec<Vec<Element>>,
}

impl StructureDoc {
    fn into_raw(self) -> Result<RawStructure, StructureError> {
        let functions = self.signature.functions.iter().map(|d| Symbol::parse(d)).collect::<Result<Vec<_>, _>>()?;
        let relations = self.signature.relations.iter().map(|d| Symbol::parse(d)).collect::<Result<Vec<_>, _>>()?;
        Ok(RawStructure {
            signature: Signature::new(functions, relations)?,
            size: self.size,
            functions: self.functions,
            relations: self.relations,
            names: self.names,
        })
    }

    fn from_structure(s: &FiniteStructure) -> Self {
        let raw = s.to_raw();
        StructureDoc {
            signature: SignatureDoc {
                functions: raw.signature.functions().iter().map(|s| s.to_string()).collect(),
                relations: raw.signature.relations().iter().map(|s| s.to_string()).collect(),
            },
            size: raw.size,
            functions: raw.functions,
            relations: raw.relations,
            names: raw.names,
        }
    }
}

/// Parses a structure document without validating it.
pub fn parse_raw_structure(text: &str) -> Result<RawStructure, IoError> {
    let doc: StructureDoc = serde_json::from_str(text)?;
    Ok(doc.into_raw()?)
}

/// Parses and validates a structure document.
pub fn parse_structure(text: &str) -> Result<FiniteStructure, IoError> {
    Ok(FiniteStructure::from_raw(parse_raw_structure(text)?)?)
}

pub fn parse_chain(text: &str, label: &str) -> Result<ChainFamily, IoError> {
    let doc: ChainDoc = serde_json::from_str(text)?;
    let members = doc
        .members
        .into_iter()
        .map(|m| Ok(FiniteStructure::from_raw(m.into_raw()?)?))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(ChainFamily::new(label, members, doc.embeddings)?)
}

pub fn structure_to_string(s: &FiniteStructure) -> String {
    serde_json::to_string_pretty(&StructureDoc::from_structure(s)).expect("serializable")
}

pub fn chain_to_string(chain: &ChainFamily) -> String {
    let doc = ChainDoc {
        members: chain.members().iter().map(StructureDoc::from_structure).collect(),
        embeddings: chain.embeddings().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

pub fn load_structure(path: &Path) -> Result<FiniteStructure, IoError> {
    parse_structure(&read_file(path)?)
}

pub fn load_chain(path: &Path) -> Result<ChainFamily, IoError> {
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_chain(&read_file(path)?, &label)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORDER2: &str = r#"{
        "signature": { "functions": [], "relations": ["le/2"] },
        "size": 2,
        "relations": { "le": [[0, 0], [0, 1], [1, 1]] }
    }"#;

    #[test]
    fn parses_a_structure() {
        let s = parse_structure(ORDER2).unwrap();
        assert_eq!(s.size(), 2);
        assert!(s.holds(0, &[0, 1]));
        assert!(!s.holds(0, &[1, 0]));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = ORDER2.replace("\"size\"", "\"colour\": 1, \"size\"");
        assert!(matches!(parse_structure(&text), Err(IoError::Parse(_))));
        let text = ORDER2.replace("\"relations\": [", "\"rels\": [], \"relations\": [");
        assert!(matches!(parse_structure(&text), Err(IoError::Parse(_))));
    }

    #[test]
    fn rejects_invalid_structures() {
        let text = ORDER2.replace("[1, 1]", "[1, 7]");
        assert!(matches!(parse_structure(&text), Err(IoError::Structure(StructureError::Invalid(_)))));
    }

    #[test]
    fn chain_documents() {
        let text = format!(r#"{{ "members": [{ORDER2}, {ORDER2}], "embeddings": [[0, 1]] }}"#);
        let chain = parse_chain(&text, "c").unwrap();
        assert_eq!(chain.len(), 2);
        let again = parse_chain(&chain_to_string(&chain), "c").unwrap();
        assert_eq!(again, chain);
        let bad = format!(r#"{{ "members": [{ORDER2}, {ORDER2}], "embeddings": [[1, 0]] }}"#);
        assert!(parse_chain(&bad, "c").is_err());
    }
}
