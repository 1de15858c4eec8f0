//! CSV artifacts of the pipeline and raw agent responses.
//!
//! All files are UTF-8, comma-delimited with LF line endings. Report files
//! carry numbers at 4 decimals, result files at 6.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

mod report;
mod response;
mod results;
mod texts;

pub use report::{
    emit_objective_one, emit_objective_two, parse_any_report, parse_objective_one,
    parse_objective_one_lenient, parse_objective_two, ObjectiveOneSlice, ReportedEffects,
    OBJECTIVE_ONE_HEADER, OBJECTIVE_TWO_HEADER,
};
pub use response::{
    emit_factor_csv, extract_sentence_factors, response_file_name, slug, split_agent_response,
    split_agent_response_bytes, AgentResponse, ResponseStatus, CSV_MARKER, FACTOR_HEADER,
};
pub use results::{
    emit_macro_results, emit_micro_results, macro_records, micro_records, parse_macro_results,
    parse_micro_results, parse_results, MacroResultRecord, MicroResultRecord, ResultFile,
    MACRO_HEADER, MICRO_SECTOR_HEADER, MICRO_TYPE_HEADER,
};
pub use texts::{
    emit_embeddings, emit_text_records, parse_embeddings, parse_text_records, EmbeddingTable,
    TextRecord, TEXT_HEADER,
};

/// Decimal places of numbers in report files.
pub const REPORT_PLACES: usize = 4;
/// Decimal places of numbers in result files.
pub const RESULT_PLACES: usize = 6;

pub(crate) fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

pub(crate) fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub(crate) fn finish(writer: csv::Writer<Vec<u8>>) -> Vec<u8> {
    writer.into_inner().expect("writing to memory cannot fail")
}

/// Compares a header record against the schema, naming the first column
/// that differs.
pub(crate) fn check_header(record: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    for (index, name) in expected.iter().enumerate() {
        let found = record.get(index).unwrap_or("");
        if found != *name {
            return Err(Error::Header {
                index,
                expected: name.to_string(),
                found: found.to_string(),
            });
        }
    }
    if record.len() > expected.len() {
        return Err(Error::Header {
            index: expected.len(),
            expected: String::new(),
            found: record[expected.len()].to_string(),
        });
    }
    Ok(())
}

pub(crate) fn check_length(record: &csv::StringRecord, row: usize, expected: usize) -> Result<()> {
    if record.len() != expected {
        return Err(Error::RowLength {
            row,
            expected,
            found: record.len(),
        });
    }
    Ok(())
}

pub(crate) fn number(
    record: &csv::StringRecord,
    row: usize,
    index: usize,
    header: &[&str],
) -> Result<f64> {
    let raw = &record[index];
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Cell {
            row,
            column: header[index].to_string(),
            value: raw.to_string(),
        })
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
