//! Micro and macro result files.
//!
//! A micro file holds two blocks, each introduced by its own header: sector
//! rows under `GICS Sector,...` and parent rows under `GICS Type,...`. A
//! macro file holds one `GICS Type,Effect Type,Value,Fund,Period` block.
//! Any text up to and including a leading `CSV Format:` marker is ignored,
//! so raw agent responses parse directly.

use serde::{Deserialize, Serialize};

use super::response::CSV_MARKER;
use super::{check_header, check_length, finish, number, reader, writer, RESULT_PLACES};
use crate::attribution::{AttributionTable, Level};
use crate::error::{Error, Result};
use crate::factors::EffectType;
use crate::format::fixed;

pub const MICRO_SECTOR_HEADER: [&str; 6] = [
    "GICS Sector",
    "Allocation Effect",
    "Selection Effect",
    "Total Contribution",
    "Fund",
    "Period",
];

pub const MICRO_TYPE_HEADER: [&str; 6] = [
    "GICS Type",
    "Allocation Effect",
    "Selection Effect",
    "Total Contribution",
    "Fund",
    "Period",
];

pub const MACRO_HEADER: [&str; 5] = ["GICS Type", "Effect Type", "Value", "Fund", "Period"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroResultRecord {
    /// `Sector` or `Parent`.
    pub level: Level,
    pub group: String,
    pub allocation: f64,
    pub selection: f64,
    pub total: f64,
    pub fund: String,
    pub period: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroResultRecord {
    pub group: String,
    pub effect: EffectType,
    pub value: f64,
    pub fund: String,
    pub period: String,
}

/// Either kind of result file, told apart by its header.
#[derive(Debug, Clone, PartialEq)]
pub enum ResultFile {
    Micro(Vec<MicroResultRecord>),
    Macro(Vec<MacroResultRecord>),
}

fn after_marker(text: &str) -> &str {
    match text.find(CSV_MARKER) {
        Some(at) => &text[at + CSV_MARKER.len()..],
        None => text,
    }
}

/// Data lines with their 1-based line numbers; blank lines and code fences
/// are skipped.
fn csv_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with("```"))
}

fn one_record(line: &str) -> Result<csv::StringRecord> {
    let mut rdr = reader(line.as_bytes());
    Ok(rdr.records().next().transpose()?.unwrap_or_default())
}

/// Micro records: all sector rows of `tables` first, then all parent rows.
pub fn micro_records(tables: &[AttributionTable]) -> Vec<MicroResultRecord> {
    let mut out = Vec::new();
    for level in [Level::Sector, Level::Parent] {
        for table in tables {
            out.extend(table.rows_at(level).map(|row| MicroResultRecord {
                level,
                group: row.group.clone(),
                allocation: row.allocation,
                selection: row.selection,
                total: row.total(),
                fund: row.fund.clone(),
                period: row.period.clone(),
            }));
        }
    }
    out
}

/// Macro records: allocation then selection for every parent row.
pub fn macro_records(tables: &[AttributionTable]) -> Vec<MacroResultRecord> {
    tables
        .iter()
        .flat_map(|t| t.rows_at(Level::Parent))
        .flat_map(|row| {
            [
                (EffectType::Allocation, row.allocation),
                (EffectType::Selection, row.selection),
            ]
            .map(|(effect, value)| MacroResultRecord {
                group: row.group.clone(),
                effect,
                value,
                fund: row.fund.clone(),
                period: row.period.clone(),
            })
        })
        .collect()
}

/// Writes sector rows under the sector header and parent rows under the
/// type header; the type block is omitted when there are no parent rows.
pub fn emit_micro_results(records: &[MicroResultRecord]) -> Vec<u8> {
    let mut out = writer();
    let n = |v: f64| fixed(v, RESULT_PLACES);
    out.write_record(MICRO_SECTOR_HEADER)
        .expect("in-memory write");
    let mut in_types = false;
    for r in records {
        if r.level == Level::Parent && !in_types {
            out.write_record(MICRO_TYPE_HEADER)
                .expect("in-memory write");
            in_types = true;
        }
        out.write_record([
            r.group.clone(),
            n(r.allocation),
            n(r.selection),
            n(r.total),
            r.fund.clone(),
            r.period.clone(),
        ])
        .expect("in-memory write");
    }
    finish(out)
}

pub fn emit_macro_results(records: &[MacroResultRecord]) -> Vec<u8> {
    let mut out = writer();
    out.write_record(MACRO_HEADER).expect("in-memory write");
    for r in records {
        out.write_record([
            r.group.clone(),
            r.effect.label().to_string(),
            fixed(r.value, RESULT_PLACES),
            r.fund.clone(),
            r.period.clone(),
        ])
        .expect("in-memory write");
    }
    finish(out)
}

pub fn parse_micro_results(text: &str) -> Result<Vec<MicroResultRecord>> {
    let header = &MICRO_SECTOR_HEADER;
    let mut level = None;
    let mut out = Vec::new();
    for (row, line) in csv_lines(after_marker(text)) {
        let record = one_record(line)?;
        if check_header(&record, header).is_ok() {
            level = Some(Level::Sector);
            continue;
        }
        if check_header(&record, &MICRO_TYPE_HEADER).is_ok() {
            level = Some(Level::Parent);
            continue;
        }
        let Some(level) = level else {
            check_header(&record, header)?;
            unreachable!("header lines are consumed above");
        };
        check_length(&record, row, header.len())?;
        let n = |index| number(&record, row, index, header);
        out.push(MicroResultRecord {
            level,
            group: record[0].to_string(),
            allocation: n(1)?,
            selection: n(2)?,
            total: n(3)?,
            fund: record[4].to_string(),
            period: record[5].to_string(),
        });
    }
    if level.is_none() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

pub fn parse_macro_results(text: &str) -> Result<Vec<MacroResultRecord>> {
    let header = &MACRO_HEADER;
    let mut lines = csv_lines(after_marker(text));
    let (_, first) = lines.next().ok_or(Error::EmptyInput)?;
    check_header(&one_record(first)?, header)?;
    let mut out = Vec::new();
    for (row, line) in lines {
        let record = one_record(line)?;
        check_length(&record, row, header.len())?;
        let effect = record[1].parse().map_err(|_| Error::Cell {
            row,
            column: header[1].to_string(),
            value: record[1].to_string(),
        })?;
        out.push(MacroResultRecord {
            group: record[0].to_string(),
            effect,
            value: number(&record, row, 2, header)?,
            fund: record[3].to_string(),
            period: record[4].to_string(),
        });
    }
    Ok(out)
}

/// Parses a result file of either kind.
pub fn parse_results(text: &str) -> Result<ResultFile> {
    let first = csv_lines(after_marker(text))
        .next()
        .ok_or(Error::EmptyInput)?
        .1;
    let record = one_record(first)?;
    if check_header(&record, &MACRO_HEADER).is_ok() {
        parse_macro_results(text).map(ResultFile::Macro)
    } else {
        parse_micro_results(text).map(ResultFile::Micro)
    }
}
