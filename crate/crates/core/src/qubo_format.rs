//! Text format for QUBO problems and JSON serialization of variable maps.
//!
//! The QUBO file layout is:
//!
//! ```text
//! p qubo <n> <m_linear> <m_quadratic>
//! <i> <i> <coefficient>     (linear terms, ascending i)
//! <i> <j> <coefficient>     (quadratic terms, i < j, ascending)
//! c <offset>
//! ```
//!
//! Coefficients are printed with 12 significant digits; terminating decimals
//! (all coefficients produced by the encoders) round-trip exactly.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::{Encoding, QuboProblem, VariableMap, VarKey};
use crate::rational::{format_coef, parse_coef, ParseCoefError};

#[derive(Debug, Error)]
pub enum QuboFormatError {
    #[error("line {line}: expected header `p qubo <n> <m_linear> <m_quadratic>`")]
    BadHeader { line: usize },
    #[error("line {line}: malformed term line `{content}`")]
    BadTerm { line: usize, content: String },
    #[error("line {line}: variable index {index} out of range 0..{n}")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("line {line}: {source}")]
    BadCoefficient {
        line: usize,
        source: ParseCoefError,
    },
    #[error("missing header line")]
    MissingHeader,
    #[error("term count mismatch: header declares {declared} {kind} terms, found {found}")]
    CountMismatch {
        kind: &'static str,
        declared: usize,
        found: usize,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Serialize a QUBO problem in the text format.
pub fn write_qubo<W: Write>(mut writer: W, qubo: &QuboProblem) -> io::Result<()> {
    writeln!(
        writer,
        "p qubo {} {} {}",
        qubo.n(),
        qubo.linear().len(),
        qubo.quadratic().len()
    )?;
    for (&i, c) in qubo.linear() {
        writeln!(writer, "{i} {i} {}", format_coef(c))?;
    }
    for (&(i, j), c) in qubo.quadratic() {
        writeln!(writer, "{i} {j} {}", format_coef(c))?;
    }
    writeln!(writer, "c {}", format_coef(qubo.offset()))
}

pub fn qubo_to_string(qubo: &QuboProblem) -> String {
    let mut buf = Vec::new();
    write_qubo(&mut buf, qubo).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("format is ASCII")
}

/// Parse the text format. Duplicate term keys are summed; `i > j` pairs are
/// canonicalized; diagonal entries fold into linear terms.
pub fn read_qubo<R: BufRead>(reader: R) -> Result<QuboProblem, QuboFormatError> {
    let mut qubo: Option<QuboProblem> = None;
    let mut declared = (0usize, 0usize);
    let mut found = (0usize, 0usize);
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("p ") {
            let mut parts = rest.split_whitespace();
            let ok = parts.next() == Some("qubo");
            let nums: Vec<usize> = parts.filter_map(|t| t.parse().ok()).collect();
            if !ok || nums.len() != 3 || qubo.is_some() {
                return Err(QuboFormatError::BadHeader { line: line_no });
            }
            qubo = Some(QuboProblem::new(nums[0]));
            declared = (nums[1], nums[2]);
            continue;
        }
        let Some(qubo) = qubo.as_mut() else {
            return Err(QuboFormatError::MissingHeader);
        };
        if let Some(rest) = text.strip_prefix("c ") {
            let offset = parse_coef(rest)
                .map_err(|source| QuboFormatError::BadCoefficient { line: line_no, source })?;
            qubo.add_offset(offset);
            continue;
        }
        let mut parts = text.split_whitespace();
        let (Some(i), Some(j), Some(c), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(QuboFormatError::BadTerm {
                line: line_no,
                content: text.to_string(),
            });
        };
        let parse_index = |token: &str| -> Result<usize, QuboFormatError> {
            let index: usize = token.parse().map_err(|_| QuboFormatError::BadTerm {
                line: line_no,
                content: text.to_string(),
            })?;
            if index >= qubo.n() {
                return Err(QuboFormatError::IndexOutOfRange {
                    line: line_no,
                    index,
                    n: qubo.n(),
                });
            }
            Ok(index)
        };
        let i = parse_index(i)?;
        let j = parse_index(j)?;
        let value = parse_coef(c)
            .map_err(|source| QuboFormatError::BadCoefficient { line: line_no, source })?;
        if i == j {
            qubo.add_linear(i, value);
            found.0 += 1;
        } else {
            qubo.add_quadratic(i, j, value);
            found.1 += 1;
        }
    }
    let qubo = qubo.ok_or(QuboFormatError::MissingHeader)?;
    if declared.0 != found.0 {
        return Err(QuboFormatError::CountMismatch {
            kind: "linear",
            declared: declared.0,
            found: found.0,
        });
    }
    if declared.1 != found.1 {
        return Err(QuboFormatError::CountMismatch {
            kind: "quadratic",
            declared: declared.1,
            found: found.1,
        });
    }
    Ok(qubo)
}

#[derive(Serialize, Deserialize)]
struct VariableMapFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
    encoding: Encoding,
    entries: Vec<MapEntry>,
}

#[derive(Serialize, Deserialize)]
struct MapEntry {
    var: usize,
    key: VarKey,
}

/// Serialize a variable map (with optional metadata) as JSON.
pub fn variable_map_to_json(map: &VariableMap, metadata: Option<serde_json::Value>) -> String {
    let file = VariableMapFile {
        metadata,
        encoding: map.encoding(),
        entries: map
            .keys()
            .iter()
            .enumerate()
            .map(|(var, &key)| MapEntry { var, key })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("map serialization cannot fail")
}

pub fn variable_map_from_json(text: &str) -> Result<VariableMap, serde_json::Error> {
    let file: VariableMapFile = serde_json::from_str(text)?;
    let mut keys = vec![None; file.entries.len()];
    for entry in &file.entries {
        let fits = matches!(
            (file.encoding, entry.key),
            (Encoding::Positional, VarKey::Position { .. }) | (Encoding::Edge, VarKey::Edge { .. })
        );
        if !fits {
            return Err(serde::de::Error::custom(format!(
                "variable {} has a key of the wrong kind for the {} encoding",
                entry.var, file.encoding
            )));
        }
        if entry.var >= keys.len() || keys[entry.var].is_some() {
            return Err(serde::de::Error::custom(format!(
                "entry for variable {} is out of range or duplicated",
                entry.var
            )));
        }
        keys[entry.var] = Some(entry.key);
    }
    let keys: Vec<VarKey> = keys
        .into_iter()
        .map(|k| k.ok_or_else(|| serde::de::Error::custom("missing variable entry")))
        .collect::<Result<_, serde_json::Error>>()?;
    Ok(VariableMap::new(file.encoding, keys))
}
