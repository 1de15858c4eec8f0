//! Explanation texts for semantic scoring and the embedding sidecar.
//!
//! Text records are keyed by id and tagged with a prompt family
//! (`reference` for the ground truth). The sidecar holds one vector per
//! id: `id,v1,...,vn` with no header, every vector the same length.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_header, check_length, finish, reader, writer};
use crate::error::{Error, Result};
use crate::factors::EffectType;

pub const TEXT_HEADER: [&str; 7] = [
    "Id",
    "Family",
    "Fund",
    "Period",
    "Sector",
    "Effect Type",
    "Text",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub family: String,
    pub fund: String,
    pub period: String,
    pub sector: String,
    pub effect: EffectType,
    pub text: String,
}

pub fn emit_text_records(records: &[TextRecord]) -> Vec<u8> {
    let mut out = writer();
    out.write_record(TEXT_HEADER).expect("in-memory write");
    for r in records {
        out.write_record([
            r.id.as_str(),
            &r.family,
            &r.fund,
            &r.period,
            &r.sector,
            r.effect.label(),
            &r.text,
        ])
        .expect("in-memory write");
    }
    finish(out)
}

pub fn parse_text_records(text: &str) -> Result<Vec<TextRecord>> {
    let mut rdr = reader(text.as_bytes());
    let mut records = rdr.records();
    let header = records.next().ok_or(Error::EmptyInput)??;
    check_header(&header, &TEXT_HEADER)?;
    let mut out = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record?;
        check_length(&record, row, TEXT_HEADER.len())?;
        let effect = record[5].parse().map_err(|_| Error::Cell {
            row,
            column: TEXT_HEADER[5].to_string(),
            value: record[5].to_string(),
        })?;
        out.push(TextRecord {
            id: record[0].to_string(),
            family: record[1].to_string(),
            fund: record[2].to_string(),
            period: record[3].to_string(),
            sector: record[4].to_string(),
            effect,
            text: record[6].to_string(),
        });
    }
    Ok(out)
}

/// Vectors by text id, all of one dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dimension: Option<usize>,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Adds a vector; the first insert fixes the dimension.
    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let dimension = *self.dimension.get_or_insert(vector.len());
        if vector.len() != dimension {
            return Err(Error::DimensionMismatch {
                left: dimension,
                right: vector.len(),
            });
        }
        self.vectors.insert(id.into(), vector);
        Ok(())
    }
}

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',').map(str::trim);
        let id = cells.next().unwrap_or_default();
        if id.is_empty() {
            return Err(Error::Embedding {
                line: line_no,
                reason: "missing id".into(),
            });
        }
        let vector = cells
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Embedding {
                line: line_no,
                reason: "non-numeric component".into(),
            })?;
        if vector.is_empty() {
            return Err(Error::Embedding {
                line: line_no,
                reason: "empty vector".into(),
            });
        }
        if table.get(id).is_some() {
            return Err(Error::Embedding {
                line: line_no,
                reason: format!("duplicate id {id}"),
            });
        }
        table.insert(id, vector).map_err(|e| Error::Embedding {
            line: line_no,
            reason: e.to_string(),
        })?;
    }
    Ok(table)
}

/// Components written in shortest round-trip form.
pub fn emit_embeddings(table: &EmbeddingTable) -> Vec<u8> {
    let mut out = String::new();
    for (id, vector) in table.iter() {
        out.push_str(id);
        for v in vector {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out.into_bytes()
}
