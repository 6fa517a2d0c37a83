//! Text and JSON formats for complexes.
//!
//! Text: one maximal face per line, `v a`, `e a b` or `t a b c`. `#` starts a
//! comment. JSON: `{"maximal_faces": [[...], ...], "named_subcomplexes": {...}}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex2, ComplexError};
use crate::mask::SubcomplexMask;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("named subcomplex {name:?}: {source}")]
    NamedSubcomplex { name: String, source: ComplexError },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

/// The JSON schema shared by complex files and enriched-complex output.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub maximal_faces: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub named_subcomplexes: BTreeMap<String, Vec<Vec<String>>>,
}

impl ComplexDoc {
    pub fn from_complex(k: &Complex2) -> Self {
        ComplexDoc {
            maximal_faces: k.canonical_faces(),
            named_subcomplexes: BTreeMap::new(),
        }
    }

    pub fn with_named(mut self, name: impl Into<String>, k: &Complex2, mask: &SubcomplexMask) -> Self {
        self.named_subcomplexes.insert(name.into(), mask.canonical_faces(k));
        self
    }

    pub fn build(&self) -> Result<LoadedComplex, IoError> {
        let complex = Complex2::from_maximal_faces(&self.maximal_faces)?;
        let mut named = BTreeMap::new();
        for (name, faces) in &self.named_subcomplexes {
            let mask =
                SubcomplexMask::from_label_faces(&complex, faces).map_err(|source| IoError::NamedSubcomplex {
                    name: name.clone(),
                    source,
                })?;
            named.insert(name.clone(), mask);
        }
        Ok(LoadedComplex { complex, named })
    }
}

/// A parsed complex with its named subcomplexes.
#[derive(Clone, Debug)]
pub struct LoadedComplex {
    pub complex: Complex2,
    pub named: BTreeMap<String, SubcomplexMask>,
}

pub fn parse_text(src: &str) -> Result<Complex2, IoError> {
    let mut faces: Vec<Vec<&str>> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let kind = words.next().expect("line is nonempty");
        let labels: Vec<&str> = words.collect();
        let expected = match kind {
            "v" => 1,
            "e" => 2,
            "t" => 3,
            other => {
                return Err(IoError::Syntax {
                    line: i + 1,
                    message: format!("unknown record type {other:?}"),
                })
            }
        };
        if labels.len() != expected {
            return Err(IoError::Syntax {
                line: i + 1,
                message: format!("`{kind}` takes {expected} label(s), found {}", labels.len()),
            });
        }
        faces.push(labels);
    }
    Ok(Complex2::from_maximal_faces(faces)?)
}

pub fn to_text(k: &Complex2) -> String {
    let mut out = String::new();
    for face in k.canonical_faces() {
        let kind = ["v", "e", "t"][face.len() - 1];
        out.push_str(kind);
        for l in &face {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
    }
    out
}

pub fn parse_json(src: &str) -> Result<LoadedComplex, IoError> {
    let doc: ComplexDoc = serde_json::from_str(src)?;
    doc.build()
}

/// Parses either format; JSON is recognised by a leading `{`.
pub fn parse_any(src: &str) -> Result<LoadedComplex, IoError> {
    if src.trim_start().starts_with('{') {
        parse_json(src)
    } else {
        Ok(LoadedComplex {
            complex: parse_text(src)?,
            named: BTreeMap::new(),
        })
    }
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<LoadedComplex, IoError> {
    parse_any(&read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard;

    #[test]
    fn text_round_trip() {
        let k = parse_text("# a wedge\nt a b c\n\nt c d e   # second\nv z\n").unwrap();
        assert_eq!((k.num_vertices(), k.num_triangles()), (6, 2));
        assert_eq!(parse_text(&to_text(&k)).unwrap(), k);
    }

    #[test]
    fn text_errors() {
        assert!(matches!(parse_text("t a b"), Err(IoError::Syntax { line: 1, .. })));
        assert!(matches!(parse_text("\nq a"), Err(IoError::Syntax { line: 2, .. })));
        assert!(matches!(
            parse_text("t a a b"),
            Err(IoError::Complex(ComplexError::DuplicateLabelInFace { .. }))
        ));
    }

    #[test]
    fn json_with_named_subcomplexes() {
        let k = standard::tetrahedron_boundary();
        let half = SubcomplexMask::from_label_faces(&k, &[["1", "2", "3"]]).unwrap();
        let doc = ComplexDoc::from_complex(&k).with_named("cap", &k, &half);
        let json = serde_json::to_string(&doc).unwrap();
        let back = parse_any(&json).unwrap();
        assert_eq!(back.complex, k);
        assert_eq!(
            back.named["cap"].canonical_faces(&back.complex),
            half.canonical_faces(&k)
        );

        let bad = r#"{"maximal_faces": [["a","b"]], "named_subcomplexes": {"x": [["a","c"]]}}"#;
        assert!(matches!(parse_json(bad), Err(IoError::NamedSubcomplex { .. })));
    }
}
