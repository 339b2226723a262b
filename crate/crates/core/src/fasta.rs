//! Minimal FASTA reader/writer.
//!
//! Input is the standard `>header` + sequence-line layout, uppercase `ACGT`
//! only. Lines starting with `;` are treated as comments (we emit run
//! metadata that way) and multi-line sequences are concatenated.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::sequence::NucleotideSequence;

#[derive(Debug, Error)]
pub enum FastaError {
    #[error("line {line}: expected `>` header before sequence data")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid base {found:?} (expected one of A, C, G, T)")]
    InvalidBase { line: usize, found: char },
    #[error("line {line}: record `{id}` has no sequence data")]
    EmptyRecord { line: usize, id: String },
    #[error("input contains no FASTA records")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub id: String,
    pub sequence: NucleotideSequence,
}

/// Parse all records from a FASTA stream.
pub fn read_fasta<R: BufRead>(reader: R) -> Result<Vec<FastaRecord>, FastaError> {
    let mut records = Vec::new();
    let mut current: Option<(usize, String, Vec<u8>)> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('>') {
            if let Some(record) = finish_record(current.take())? {
                records.push(record);
            }
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            current = Some((line_no, id, Vec::new()));
        } else {
            let Some((_, _, bases)) = current.as_mut() else {
                return Err(FastaError::MissingHeader { line: line_no });
            };
            for &b in trimmed.as_bytes() {
                if !matches!(b, b'A' | b'C' | b'G' | b'T') {
                    return Err(FastaError::InvalidBase {
                        line: line_no,
                        found: b as char,
                    });
                }
                bases.push(b);
            }
        }
    }
    if let Some(record) = finish_record(current.take())? {
        records.push(record);
    }
    if records.is_empty() {
        return Err(FastaError::Empty);
    }
    Ok(records)
}

fn finish_record(
    current: Option<(usize, String, Vec<u8>)>,
) -> Result<Option<FastaRecord>, FastaError> {
    match current {
        None => Ok(None),
        Some((line, id, bases)) => {
            if bases.is_empty() {
                return Err(FastaError::EmptyRecord { line, id });
            }
            let sequence = NucleotideSequence::new(bases).expect("bases validated during parse");
            Ok(Some(FastaRecord { id, sequence }))
        }
    }
}

/// Write records, preceded by `;`-comment metadata lines.
pub fn write_fasta<W: Write>(
    mut writer: W,
    records: &[FastaRecord],
    metadata: &[String],
) -> io::Result<()> {
    for line in metadata {
        writeln!(writer, "; {line}")?;
    }
    for record in records {
        writeln!(writer, ">{}", record.id)?;
        writeln!(writer, "{}", record.sequence)?;
    }
    Ok(())
}
