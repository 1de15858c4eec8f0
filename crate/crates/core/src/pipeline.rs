//! End-to-end plumbing: a deterministic oracle that answers every task the
//! way a perfect agent would, and corpus-level grading of response files.

use std::collections::{HashMap, HashSet};

use crate::attribution::{compute, Mode, ReportSlice};
use crate::error::Result;
use crate::eval::{
    cells_from_macro, cells_from_micro, keyword_accuracy_with, numeric_table_accuracy,
    PredictedCell, ScoreCard, ScoreUnit,
};
use crate::factors::{explain_slice, ground_truth_factors, EffectType, FactorAssessment};
use crate::io::{
    emit_factor_csv, emit_macro_results, emit_micro_results, macro_records, micro_records,
    parse_results, response_file_name, slug, AgentResponse, ResponseStatus, ResultFile, TextRecord,
    CSV_MARKER,
};
use crate::qa::{oracle_answer, PublicQaItem, SubmissionAnswer};

/// Family label of the hard-coded reference sentences.
pub const REFERENCE_FAMILY: &str = "reference";

/// A named text artifact, ready to be written into an output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseFile {
    pub name: String,
    pub contents: String,
}

/// One response per sector of every slice: the two reference sentences as
/// bullets, the marker, then the sector's two factor rows.
pub fn oracle_factor_responses(slices: &[ReportSlice]) -> Result<Vec<ResponseFile>> {
    let mut out = Vec::new();
    for slice in slices {
        for e in explain_slice(slice)? {
            let csv = emit_factor_csv(&[e.allocation.clone(), e.selection.clone()]);
            let contents = format!(
                "- {}\n- {}\n\n{CSV_MARKER}\n{}",
                e.sentences[0],
                e.sentences[1],
                String::from_utf8(csv).expect("csv output is UTF-8"),
            );
            out.push(ResponseFile {
                name: response_file_name(&slice.fund, &slice.period, &e.allocation.sector),
                contents,
            });
        }
    }
    Ok(out)
}

fn funds(slices: &[ReportSlice]) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for s in slices {
        if !out.contains(&s.fund.as_str()) {
            out.push(&s.fund);
        }
    }
    out
}

/// One result file per fund covering all its periods, named
/// `<fund>__micro.csv` or `<fund>__macro.csv` and prefixed by the marker.
pub fn oracle_table_responses(slices: &[ReportSlice], mode: Mode) -> Result<Vec<ResponseFile>> {
    let suffix = match mode {
        Mode::Macro => "macro",
        Mode::Micro => "micro",
        Mode::SingleLevel => "single",
    };
    let mut out = Vec::new();
    for fund in funds(slices) {
        let tables = slices
            .iter()
            .filter(|s| s.fund == fund)
            .map(|s| compute(s, mode))
            .collect::<Result<Vec<_>>>()?;
        let body = match mode {
            Mode::Macro => emit_macro_results(&macro_records(&tables)),
            _ => emit_micro_results(&micro_records(&tables)),
        };
        out.push(ResponseFile {
            name: format!("{}__{suffix}.csv", slug(fund)),
            contents: format!(
                "{CSV_MARKER}\n{}",
                String::from_utf8(body).expect("csv output is UTF-8")
            ),
        });
    }
    Ok(out)
}

pub fn oracle_qa_submission(
    questions: &[PublicQaItem],
    corpus: &[ReportSlice],
) -> Result<Vec<SubmissionAnswer>> {
    questions
        .iter()
        .map(|q| {
            Ok(SubmissionAnswer {
                id: q.id.clone(),
                answer: oracle_answer(q, corpus)?,
            })
        })
        .collect()
}

type SectorResponse<'a> = (&'a ReportSlice, &'a str, Option<&'a AgentResponse>);

/// Each (slice, sector) of the corpus paired with its response, looked up
/// by the conventional file name. Unmatched names are returned as well.
fn match_responses<'a>(
    responses: &'a [(String, AgentResponse)],
    corpus: &'a [ReportSlice],
) -> (Vec<SectorResponse<'a>>, Vec<&'a str>) {
    let by_name: HashMap<&str, &AgentResponse> =
        responses.iter().map(|(n, r)| (n.as_str(), r)).collect();
    let mut used = HashSet::new();
    let mut matched = Vec::new();
    for slice in corpus {
        for record in &slice.records {
            let name = response_file_name(&slice.fund, &slice.period, &record.group);
            let response = by_name.get(name.as_str()).copied();
            if response.is_some() {
                used.insert(name);
            }
            matched.push((slice, record.group.as_str(), response));
        }
    }
    let strays = responses
        .iter()
        .map(|(n, _)| n.as_str())
        .filter(|n| !used.contains(*n))
        .collect();
    (matched, strays)
}

/// Keyword accuracy over a corpus of per-sector responses. Only the rows a
/// response gives for its own sector count, the first per effect; missing
/// or unparseable responses score zero on their six cells.
pub fn grade_factor_responses(
    responses: &[(String, AgentResponse)],
    corpus: &[ReportSlice],
    tolerance: f64,
) -> Result<ScoreCard> {
    let (matched, strays) = match_responses(responses, corpus);
    let mut card = ScoreCard::new(ScoreUnit::Portfolio);
    card.flags.extend(
        strays
            .iter()
            .map(|n| format!("response '{n}' matches no sector")),
    );
    for slice in corpus {
        let mut predicted: Vec<FactorAssessment> = Vec::new();
        for (_, sector, response) in matched.iter().filter(|(s, _, _)| std::ptr::eq(*s, slice)) {
            let Some(response) = response else {
                card.flags.push(format!(
                    "no response for '{sector}' in {} / {}",
                    slice.fund, slice.period
                ));
                continue;
            };
            if response.status == ResponseStatus::Unparseable {
                card.flags.push(format!(
                    "unparseable response for '{sector}' in {} / {}",
                    slice.fund, slice.period
                ));
            }
            for effect in [EffectType::Allocation, EffectType::Selection] {
                let mut rows = response
                    .factor_csv
                    .iter()
                    .filter(|r| r.sector.trim() == *sector && r.effect_type == effect);
                if let Some(first) = rows.next() {
                    predicted.push(first.clone());
                }
                if rows.next().is_some() {
                    card.flags.push(format!(
                        "extra {effect} rows for '{sector}' in {} / {} ignored",
                        slice.fund, slice.period
                    ));
                }
            }
        }
        let truth = ground_truth_factors(slice)?;
        card.merge(
            keyword_accuracy_with(&predicted, &truth, tolerance)?
                .labelled(&slice.fund, &slice.period),
        );
    }
    Ok(card)
}

/// Numeric-table accuracy of result files against the corpus computed in
/// `mode`.
pub fn grade_table_responses(
    texts: &[String],
    corpus: &[ReportSlice],
    mode: Mode,
    tolerance: f64,
) -> Result<ScoreCard> {
    let mut predicted: Vec<PredictedCell> = Vec::new();
    for text in texts {
        predicted.extend(match parse_results(text)? {
            ResultFile::Micro(records) => cells_from_micro(&records),
            ResultFile::Macro(records) => cells_from_macro(&records),
        });
    }
    let truth = corpus
        .iter()
        .map(|s| compute(s, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(numeric_table_accuracy(&predicted, &truth, tolerance))
}

/// Stable text id: `<family>__<fund>__<period>__<sector>__<effect>`.
pub fn text_id(family: &str, fund: &str, period: &str, sector: &str, effect: EffectType) -> String {
    format!(
        "{}__{}__{}__{}__{}",
        slug(family),
        slug(fund),
        slug(period),
        slug(sector),
        effect.label().to_lowercase()
    )
}

fn text_record(
    family: &str,
    slice: &ReportSlice,
    sector: &str,
    effect: EffectType,
    text: String,
) -> TextRecord {
    TextRecord {
        id: text_id(family, &slice.fund, &slice.period, sector, effect),
        family: family.to_string(),
        fund: slice.fund.clone(),
        period: slice.period.clone(),
        sector: sector.to_string(),
        effect,
        text,
    }
}

/// The hard-coded reference sentences of every sector.
pub fn reference_texts(corpus: &[ReportSlice]) -> Result<Vec<TextRecord>> {
    let mut out = Vec::new();
    for slice in corpus {
        for e in explain_slice(slice)? {
            let [allocation, selection] = e.sentences;
            let sector = e.allocation.sector.as_str();
            out.push(text_record(
                REFERENCE_FAMILY,
                slice,
                sector,
                EffectType::Allocation,
                allocation,
            ));
            out.push(text_record(
                REFERENCE_FAMILY,
                slice,
                sector,
                EffectType::Selection,
                selection,
            ));
        }
    }
    Ok(out)
}

/// Candidate sentences from responses: the first bullet explains
/// allocation, the second selection. A missing bullet becomes an empty
/// text, which scores zero.
pub fn candidate_texts(
    responses: &[(String, AgentResponse)],
    corpus: &[ReportSlice],
    family: &str,
) -> Vec<TextRecord> {
    let (matched, _) = match_responses(responses, corpus);
    let mut out = Vec::new();
    for (slice, sector, response) in matched {
        let Some(response) = response else { continue };
        for (i, effect) in [EffectType::Allocation, EffectType::Selection]
            .into_iter()
            .enumerate()
        {
            let text = response.bullets.get(i).cloned().unwrap_or_default();
            out.push(text_record(family, slice, sector, effect, text));
        }
    }
    out
}
