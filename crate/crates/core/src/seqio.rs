//! FASTA and feature-CSV ingestion.
//!
//! FASTA headers carry an optional label as the second whitespace-delimited
//! token (`>seq42 1.1.1`). Feature CSVs have one column per k-mer in
//! canonical order and an optional trailing `label` column.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::kmer::{canonical_feature_order, FeatureVector, KmerConfig};
use crate::label::{parse_label, HierLabel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub id: String,
    pub residues: String,
    pub label: Option<HierLabel>,
}

/// A labeled or unlabeled row of a feature CSV.
pub type FeatureRecord = (FeatureVector, Option<HierLabel>);

fn is_nucleotide(b: u8) -> bool {
    matches!(
        b,
        b'A' | b'C' | b'G' | b'T' | b'N' | b'R' | b'Y' | b'S' | b'W' | b'K' | b'M' | b'B' | b'D' | b'H' | b'V'
    )
}

impl Sequence {
    /// Build a validated sequence; residues are uppercased.
    pub fn new(id: impl Into<String>, residues: &str, label: Option<HierLabel>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::format(format!("invalid sequence id {id:?}")));
        }
        let residues = residues.to_ascii_uppercase();
        if residues.is_empty() {
            return Err(Error::format(format!("sequence {id} is empty")));
        }
        if let Some(c) = residues.bytes().find(|b| !is_nucleotide(*b)) {
            return Err(Error::format(format!(
                "sequence {id}: illegal character {:?}",
                c as char
            )));
        }
        Ok(Sequence { id, residues, label })
    }
}

struct Pending {
    id: String,
    label: Option<HierLabel>,
    residues: String,
    header_line: usize,
}

impl Pending {
    fn finish(self) -> Result<Sequence> {
        if self.residues.is_empty() {
            return Err(Error::format(format!(
                "record {} at line {} has no sequence lines",
                self.id, self.header_line
            )));
        }
        Ok(Sequence {
            id: self.id,
            residues: self.residues,
            label: self.label,
        })
    }
}

/// Parse a FASTA stream. Records keep their input order; multi-line bodies
/// are concatenated and uppercased.
pub fn parse_fasta<R: Read>(source: R) -> Result<Vec<Sequence>> {
    let reader = BufReader::new(source);
    let mut out = Vec::new();
    let mut current: Option<Pending> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some(done) = current.take() {
                out.push(done.finish()?);
            }
            let mut tokens = header.split_whitespace();
            let id = tokens
                .next()
                .ok_or_else(|| Error::format(format!("line {lineno}: header without id")))?
                .to_string();
            let label = tokens.next().map(parse_label).transpose()?;
            current = Some(Pending {
                id,
                label,
                residues: String::new(),
                header_line: lineno,
            });
        } else {
            let rec = current.as_mut().ok_or_else(|| {
                Error::format(format!("line {lineno}: sequence data before any header"))
            })?;
            for (col, b) in line.trim().bytes().enumerate() {
                let up = b.to_ascii_uppercase();
                if !is_nucleotide(up) {
                    return Err(Error::format(format!(
                        "line {lineno}, column {}: illegal character {:?}",
                        col + 1,
                        b as char
                    )));
                }
                rec.residues.push(up as char);
            }
        }
    }
    if let Some(done) = current.take() {
        out.push(done.finish()?);
    }
    if out.is_empty() {
        return Err(Error::format("no sequences in FASTA input"));
    }
    Ok(out)
}

/// Write sequences as FASTA, wrapping bodies at `width` columns.
pub fn write_fasta<W: Write>(mut sink: W, sequences: &[Sequence], width: usize) -> Result<()> {
    let width = width.max(1);
    for s in sequences {
        match &s.label {
            Some(l) => writeln!(sink, ">{} {}", s.id, l)?,
            None => writeln!(sink, ">{}", s.id)?,
        }
        for chunk in s.residues.as_bytes().chunks(width) {
            sink.write_all(chunk)?;
            sink.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Read a feature CSV whose header must match the canonical k-mer order of
/// `config`, optionally followed by a `label` column.
pub fn read_feature_csv<R: Read>(source: R, config: &KmerConfig) -> Result<Vec<FeatureRecord>> {
    let names = canonical_feature_order(config);
    let dim = names.len();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let header = reader.headers()?.clone();
    let has_label = match header.len() {
        n if n == dim => false,
        n if n == dim + 1 && header.get(dim).map(str::trim) == Some("label") => true,
        n => {
            return Err(Error::format(format!(
                "header: expected {dim} features (plus optional label), found {n} columns"
            )))
        }
    };
    for (i, (got, want)) in header.iter().zip(&names).enumerate() {
        if got.trim() != want {
            return Err(Error::format(format!(
                "header column {}: expected k-mer {want}, found {got:?}",
                i + 1
            )));
        }
    }

    let width = dim + usize::from(has_label);
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let rowno = idx + 2;
        let row = row?;
        if row.len() != width {
            let found = if has_label { row.len().saturating_sub(1) } else { row.len() };
            return Err(Error::format(format!(
                "row {rowno}: expected {dim} features, found {found}"
            )));
        }
        let mut values = Vec::with_capacity(dim);
        for (col, cell) in row.iter().take(dim).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::format(format!("row {rowno}, column {}: non-numeric cell {cell:?}", col + 1))
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::format(format!(
                    "row {rowno}, column {}: feature values must be finite and >= 0",
                    col + 1
                )));
            }
            values.push(v);
        }
        let label = if has_label {
            let text = row.get(dim).unwrap_or("").trim();
            if text.is_empty() {
                None
            } else {
                Some(parse_label(text).map_err(|e| Error::format(format!("row {rowno}: {e}")))?)
            }
        } else {
            None
        };
        out.push((FeatureVector::from(values), label));
    }
    Ok(out)
}

/// Write a feature CSV. Values use the shortest representation that
/// round-trips exactly.
pub fn write_feature_csv<W: Write>(
    sink: W,
    config: &KmerConfig,
    rows: &[(FeatureVector, Option<HierLabel>)],
) -> Result<()> {
    let names = canonical_feature_order(config);
    let with_label = rows.iter().any(|(_, l)| l.is_some());
    let mut writer = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    if with_label {
        header.push("label");
    }
    writer.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for (v, label) in rows {
        if v.len() != names.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: v.len(),
            });
        }
        record.clear();
        record.extend(v.iter().map(|x| x.to_string()));
        if with_label {
            record.push(label.as_ref().map(|l| l.to_string()).unwrap_or_default());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
