//! Raw agent responses: explanation bullets, then the factor table after a
//! `CSV Format:` marker.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{finish, writer};
use crate::factors::{
    EffectSign, EffectType, FactorAssessment, PerformanceStance, WeightStance, SENTENCE_PLACES,
};
use crate::format::fixed;

/// Separator between the bullets and the factor table. Matched exactly,
/// first occurrence.
pub const CSV_MARKER: &str = "CSV Format:";

pub const FACTOR_HEADER: [&str; 5] = [
    "Sector",
    "Effect Type",
    "Value",
    "Sector Weight",
    "Sector Performance",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResponseStatus {
    Parsed,
    /// No marker: the response is graded as entirely wrong.
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub raw_text: String,
    /// Bullet texts before the marker, without the leading `-`.
    pub bullets: Vec<String>,
    pub factor_csv: Vec<FactorAssessment>,
    /// Lines after the marker that did not parse as factor rows.
    pub dropped_rows: usize,
    pub status: ResponseStatus,
}

fn strip_quotes(cell: &str) -> &str {
    let cell = cell.trim();
    cell.strip_prefix('\'')
        .and_then(|c| c.strip_suffix('\''))
        .or_else(|| cell.strip_prefix('"').and_then(|c| c.strip_suffix('"')))
        .unwrap_or(cell)
        .trim()
}

fn parse_factor_row(line: &str) -> Option<FactorAssessment> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(line.as_bytes());
    let record = rdr.records().next()?.ok()?;
    if record.len() != FACTOR_HEADER.len() {
        return None;
    }
    let cell = |i: usize| strip_quotes(&record[i]);
    let effect_type: EffectType = cell(1).parse().ok()?;
    let value: f64 = cell(2).parse().ok().filter(|v: &f64| v.is_finite())?;
    let weight_stance = match cell(3) {
        w if w.eq_ignore_ascii_case("none") => None,
        w => Some(w.parse::<WeightStance>().ok()?),
    };
    let performance_stance = cell(4).parse::<PerformanceStance>().ok()?;
    let sector = cell(0);
    if sector.is_empty() {
        return None;
    }
    Some(FactorAssessment {
        sector: sector.to_string(),
        effect_type,
        value,
        weight_stance,
        performance_stance,
        sign: EffectSign::of(value),
    })
}

fn is_factor_header(line: &str) -> bool {
    let cells: Vec<&str> = line.split(',').map(strip_quotes).collect();
    cells.len() == FACTOR_HEADER.len()
        && cells
            .iter()
            .zip(FACTOR_HEADER)
            .all(|(c, h)| c.eq_ignore_ascii_case(h))
}

/// Splits a raw response. Never fails: a missing marker marks the response
/// unparseable, and malformed factor rows are dropped and counted.
pub fn split_agent_response(raw: &str) -> AgentResponse {
    let (head, tail) = match raw.find(CSV_MARKER) {
        Some(at) => (&raw[..at], Some(&raw[at + CSV_MARKER.len()..])),
        None => (raw, None),
    };
    let bullets = head
        .lines()
        .map(str::trim)
        .filter_map(|l| l.strip_prefix('-'))
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();

    let mut factor_csv = Vec::new();
    let mut dropped_rows = 0;
    if let Some(tail) = tail {
        for line in tail
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("```"))
        {
            if is_factor_header(line) {
                continue;
            }
            match parse_factor_row(line) {
                Some(row) => factor_csv.push(row),
                None => dropped_rows += 1,
            }
        }
    }
    AgentResponse {
        raw_text: raw.to_string(),
        bullets,
        factor_csv,
        dropped_rows,
        status: if tail.is_some() {
            ResponseStatus::Parsed
        } else {
            ResponseStatus::Unparseable
        },
    }
}

/// [`split_agent_response`] over arbitrary bytes, decoded lossily.
pub fn split_agent_response_bytes(raw: &[u8]) -> AgentResponse {
    split_agent_response(&String::from_utf8_lossy(raw))
}

/// Factor table with its header, values at 4 decimals.
pub fn emit_factor_csv(rows: &[FactorAssessment]) -> Vec<u8> {
    let mut out = writer();
    out.write_record(FACTOR_HEADER).expect("in-memory write");
    for row in rows {
        out.write_record([
            row.sector.as_str(),
            row.effect_type.label(),
            &fixed(row.value, SENTENCE_PLACES),
            row.weight_stance.map_or("None", WeightStance::keyword),
            row.performance_stance.keyword(),
        ])
        .expect("in-memory write");
    }
    finish(out)
}

fn allocation_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"The '(?P<sector>[^']+)' sector had a '(?P<sign>[a-z]+)' allocation effect of '(?P<value>[^']+)'\. This was due to the fund being '(?P<weight>[a-z]+)' in this sector compared to the benchmark and due to the fact that the benchmark return of '[^']*' compared to the benchmark total return of '[^']*' '(?P<perf>[a-z ]+)'\.",
        )
        .expect("valid pattern")
    })
}

fn selection_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"The '(?P<sector>[^']+)' sector also had a '(?P<sign>[a-z]+)' selection effect of '(?P<value>[^']+)'\. The fund's investments in this sector '(?P<perf>[a-z ]+)' compared to the sector benchmark \(Portfolio Return: '[^']*' vs Benchmark Return: '[^']*'\)\.",
        )
        .expect("valid pattern")
    })
}

/// Recovers the factor keywords from a sentence in the prescriptive
/// template. The value is the quoted 4-decimal figure.
pub fn extract_sentence_factors(sentence: &str) -> Option<FactorAssessment> {
    if let Some(c) = allocation_pattern().captures(sentence) {
        return Some(FactorAssessment {
            sector: c["sector"].to_string(),
            effect_type: EffectType::Allocation,
            value: c["value"].parse().ok()?,
            weight_stance: Some(WeightStance::from_sentence_word(&c["weight"])?),
            performance_stance: PerformanceStance::from_sentence_word(&c["perf"])?,
            sign: EffectSign::from_word(&c["sign"])?,
        });
    }
    let c = selection_pattern().captures(sentence)?;
    Some(FactorAssessment {
        sector: c["sector"].to_string(),
        effect_type: EffectType::Selection,
        value: c["value"].parse().ok()?,
        weight_stance: None,
        performance_stance: PerformanceStance::from_sentence_word(&c["perf"])?,
        sign: EffectSign::from_word(&c["sign"])?,
    })
}

/// File-name-safe form of a label: `/` becomes `-`, whitespace and other
/// punctuation become `_`; letters, digits, `.` and `-` are kept.
pub fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| match c {
            c if c.is_ascii_alphanumeric() || c == '.' || c == '-' => c,
            '/' => '-',
            _ => '_',
        })
        .collect()
}

/// `<fund>__<period>__<sector>.txt`, each part passed through [`slug`].
pub fn response_file_name(fund: &str, period: &str, sector: &str) -> String {
    format!("{}__{}__{}.txt", slug(fund), slug(period), slug(sector))
}
