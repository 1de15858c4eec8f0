//! Exam-style questions over report slices: multiple choice (QAMC) and
//! direct calculation (QCalc), with answer keys and grading.
//!
//! The bank is stored as JSON Lines, one question per line. The public
//! variant omits the key. Submissions are two-column CSV (`Id,Answer`).

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attribution::{compute_single_level, AttributionTable, Level, ReportSlice};
use crate::error::{Error, Result};
use crate::eval::{ScoreCard, ScoreCell, ScoreUnit};
use crate::format::{fixed, round_to, within, TOLERANCE_SLACK};
use crate::io::{check_header, finish, reader, writer};

/// Half a unit in the fifth decimal, the precision answers are asked in.
pub const QCALC_TOLERANCE: f64 = 5e-6;
pub const OPTION_PLACES: usize = 5;
pub const OPTION_LETTERS: [char; 4] = ['A', 'B', 'C', 'D'];
/// Letter a respondent gives when it does not know; never a key.
pub const ABSTAIN_LETTER: char = 'E';
pub const SUBMISSION_HEADER: [&str; 2] = ["Id", "Answer"];
const FALLBACK_STEP: f64 = 0.0005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QaKind {
    QAMC,
    QCalc,
}

impl QaKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::QAMC => "QAMC",
            Self::QCalc => "QCalc",
        }
    }
}

impl fmt::Display for QaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QaEffect {
    Allocation,
    Selection,
    Total,
}

impl QaEffect {
    pub const ALL: [QaEffect; 3] = [Self::Allocation, Self::Selection, Self::Total];

    /// Name as it appears in question text.
    pub fn label(self) -> &'static str {
        match self {
            Self::Allocation => "Allocation Effect",
            Self::Selection => "Selection Effect",
            Self::Total => "Total Contribution",
        }
    }

    /// The effect of `sector` in a computed table.
    pub fn value_in(self, table: &AttributionTable, sector: &str) -> Option<f64> {
        let row = table.row(Level::Sector, sector)?;
        Some(match self {
            Self::Allocation => row.allocation,
            Self::Selection => row.selection,
            Self::Total => row.total(),
        })
    }
}

impl fmt::Display for QaEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnswerKey {
    Letter(char),
    /// Unrounded true value.
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaItem {
    pub id: String,
    pub kind: QaKind,
    pub question_text: String,
    pub effect: QaEffect,
    pub sector: String,
    pub fund: String,
    pub period: String,
    /// Choices A to D at 5 decimals; empty for QCalc.
    pub options: Vec<f64>,
    pub key: AnswerKey,
}

/// A question as handed to a respondent: everything but the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicQaItem {
    pub id: String,
    pub kind: QaKind,
    pub question_text: String,
    pub effect: QaEffect,
    pub sector: String,
    pub fund: String,
    pub period: String,
    pub options: Vec<f64>,
}

impl QaItem {
    pub fn public(&self) -> PublicQaItem {
        PublicQaItem {
            id: self.id.clone(),
            kind: self.kind,
            question_text: self.question_text.clone(),
            effect: self.effect,
            sector: self.sector.clone(),
            fund: self.fund.clone(),
            period: self.period.clone(),
            options: self.options.clone(),
        }
    }
}

pub fn question_text(
    kind: QaKind,
    effect: QaEffect,
    sector: &str,
    fund: &str,
    period: &str,
) -> String {
    match kind {
        QaKind::QAMC => format!(
            "The {effect} from the {sector} sector, in fund {fund}, in the period {period}, is closest to:"
        ),
        QaKind::QCalc => format!(
            "Calculate the {effect} from the {sector} sector, in fund {fund}, in the period {period}:"
        ),
    }
}

pub fn option_letter(index: usize) -> char {
    OPTION_LETTERS[index]
}

/// Index of the option nearest to `value`; the first wins a tie.
pub fn closest_option(options: &[f64], value: f64) -> Option<usize> {
    options
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - value).abs().total_cmp(&(*b - value).abs()))
        .map(|(i, _)| i)
}

fn separated(candidate: f64, taken: &[f64]) -> bool {
    candidate.is_finite()
        && taken
            .iter()
            .all(|t| (candidate - t).abs() > 2.0 * QCALC_TOLERANCE + TOLERANCE_SLACK)
}

fn unknown_sector(sector: &str) -> Error {
    Error::QuestionRecord(format!("sector '{sector}' is not in the slice"))
}

/// Builds a multiple-choice item. The key option is the true value at 5
/// decimals; distractors are the sign-flipped key, the sector's other
/// effect and the same effect of another sector, each replaced on
/// collision by further sectors and finally by offsets from the key.
pub fn make_qamc_item(
    id: &str,
    slice: &ReportSlice,
    sector: &str,
    effect: QaEffect,
    rng: &mut impl Rng,
) -> Result<QaItem> {
    let table = compute_single_level(slice)?;
    let value_of = |s: &str, e: QaEffect| e.value_in(&table, s).ok_or_else(|| unknown_sector(s));
    let key = round_to(value_of(sector, effect)?, OPTION_PLACES);

    let other_effect = match effect {
        QaEffect::Allocation => QaEffect::Selection,
        QaEffect::Selection => QaEffect::Allocation,
        QaEffect::Total => *[QaEffect::Allocation, QaEffect::Selection]
            .choose(rng)
            .expect("non-empty"),
    };
    let mut others: Vec<&str> = slice
        .records
        .iter()
        .map(|r| r.group.as_str())
        .filter(|g| *g != sector)
        .collect();
    others.shuffle(rng);

    let mut pool = vec![-key, value_of(sector, other_effect)?];
    for s in &others {
        pool.push(value_of(s, effect)?);
    }
    let mut taken = vec![key];
    for candidate in pool {
        let candidate = round_to(candidate, OPTION_PLACES);
        if taken.len() < OPTION_LETTERS.len() && separated(candidate, &taken) {
            taken.push(candidate);
        }
    }
    let mut k = 1.0;
    while taken.len() < OPTION_LETTERS.len() {
        for sign in [1.0, -1.0] {
            let candidate = round_to(key + sign * k * FALLBACK_STEP, OPTION_PLACES);
            if taken.len() < OPTION_LETTERS.len() && separated(candidate, &taken) {
                taken.push(candidate);
            }
        }
        k += 1.0;
    }

    let mut distractors = taken.split_off(1);
    distractors.shuffle(rng);
    let position = rng.gen_range(0..OPTION_LETTERS.len());
    distractors.insert(position, key);
    Ok(QaItem {
        id: id.to_string(),
        kind: QaKind::QAMC,
        question_text: question_text(QaKind::QAMC, effect, sector, &slice.fund, &slice.period),
        effect,
        sector: sector.to_string(),
        fund: slice.fund.clone(),
        period: slice.period.clone(),
        options: distractors,
        key: AnswerKey::Letter(option_letter(position)),
    })
}

pub fn make_qcalc_item(
    id: &str,
    slice: &ReportSlice,
    sector: &str,
    effect: QaEffect,
) -> Result<QaItem> {
    let table = compute_single_level(slice)?;
    let value = effect
        .value_in(&table, sector)
        .ok_or_else(|| unknown_sector(sector))?;
    Ok(QaItem {
        id: id.to_string(),
        kind: QaKind::QCalc,
        question_text: question_text(QaKind::QCalc, effect, sector, &slice.fund, &slice.period),
        effect,
        sector: sector.to_string(),
        fund: slice.fund.clone(),
        period: slice.period.clone(),
        options: Vec::new(),
        key: AnswerKey::Value(value),
    })
}

/// `n` questions over distinct (sector, fund, period, effect) tuples drawn
/// under `seed`: the first half QAMC, the rest QCalc. With
/// `allow_duplicates`, a corpus with fewer tuples than `n` is reused.
pub fn generate_questions(
    corpus: &[ReportSlice],
    n: usize,
    seed: u64,
    allow_duplicates: bool,
) -> Result<Vec<QaItem>> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::QuestionCount(n));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut tuples = Vec::new();
    for (s, slice) in corpus.iter().enumerate() {
        slice.validate()?;
        for record in &slice.records {
            for effect in QaEffect::ALL {
                tuples.push((s, record.group.as_str(), effect));
            }
        }
    }
    if tuples.len() < n && !allow_duplicates {
        return Err(Error::CorpusTooSmall {
            requested: n,
            available: tuples.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = Vec::with_capacity(n);
    while drawn.len() < n {
        let mut round = tuples.clone();
        round.shuffle(&mut rng);
        drawn.extend(round.into_iter().take(n - drawn.len()));
    }

    let width = n.to_string().len().max(3);
    drawn
        .into_iter()
        .enumerate()
        .map(|(i, (s, sector, effect))| {
            let id = format!("Q{:0width$}", i + 1);
            if i < n / 2 {
                make_qamc_item(&id, &corpus[s], sector, effect, &mut rng)
            } else {
                make_qcalc_item(&id, &corpus[s], sector, effect)
            }
        })
        .collect()
}

fn emit_lines<T: Serialize>(items: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, &item).expect("question records serialize");
        out.push(b'\n');
    }
    out
}

fn parse_lines<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::QuestionRecord(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

/// Questions with keys, one JSON object per line.
pub fn emit_question_bank(items: &[QaItem]) -> Vec<u8> {
    emit_lines(items)
}

/// Questions without keys.
pub fn emit_public_bank(items: &[QaItem]) -> Vec<u8> {
    emit_lines(items.iter().map(QaItem::public))
}

pub fn parse_question_bank(text: &str) -> Result<Vec<QaItem>> {
    parse_lines(text)
}

/// Reads either variant; keys, if present, are ignored.
pub fn parse_public_bank(text: &str) -> Result<Vec<PublicQaItem>> {
    parse_lines(text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionAnswer {
    pub id: String,
    pub answer: String,
}

pub fn emit_submission(answers: &[SubmissionAnswer]) -> Vec<u8> {
    let mut out = writer();
    out.write_record(SUBMISSION_HEADER)
        .expect("in-memory write");
    for a in answers {
        out.write_record([&a.id, &a.answer])
            .expect("in-memory write");
    }
    finish(out)
}

/// Answers keep their raw text; malformed answers are judged at grading.
pub fn parse_submission(text: &str) -> Result<Vec<SubmissionAnswer>> {
    let mut rdr = reader(text.as_bytes());
    let mut records = rdr.records();
    let header = records.next().ok_or(Error::EmptyInput)??;
    check_header(&header, &SUBMISSION_HEADER)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for record in records {
        let record = record?;
        let id = record.get(0).unwrap_or_default().to_string();
        if id.is_empty() {
            continue;
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateAnswer(id));
        }
        let answer = record.iter().skip(1).collect::<Vec<_>>().join(",");
        out.push(SubmissionAnswer { id, answer });
    }
    Ok(out)
}

fn judge(item: &QaItem, answer: &str, tolerance: f64) -> (bool, Option<String>) {
    let answer = answer.trim();
    match item.key {
        AnswerKey::Letter(key) => {
            let mut chars = answer.chars();
            match (chars.next().map(|c| c.to_ascii_uppercase()), chars.next()) {
                (Some(c @ 'A'..='E'), None) => (c == key, None),
                _ => (false, Some(format!("malformed answer '{answer}'"))),
            }
        }
        AnswerKey::Value(value) => match answer.parse::<f64>() {
            Ok(v) if v.is_finite() => (within(v, value, tolerance), None),
            _ => (false, Some(format!("malformed answer '{answer}'"))),
        },
    }
}

/// One cell per question of `key`, tiered by kind. QAMC is right when the
/// letter matches (A to E accepted, case-insensitive); QCalc when within
/// `tolerance`. Unanswered and malformed answers score zero.
pub fn grade(submission: &[SubmissionAnswer], key: &[QaItem], tolerance: f64) -> Result<ScoreCard> {
    let mut answers = HashMap::new();
    for a in submission {
        if !key.iter().any(|q| q.id == a.id) {
            return Err(Error::UnknownQuestion(a.id.clone()));
        }
        if answers.insert(a.id.as_str(), a.answer.as_str()).is_some() {
            return Err(Error::DuplicateAnswer(a.id.clone()));
        }
    }
    let mut card = ScoreCard::new(ScoreUnit::Question);
    for item in key {
        let (correct, note) = match answers.get(item.id.as_str()) {
            Some(answer) => judge(item, answer, tolerance),
            None => (false, Some("unanswered".into())),
        };
        card.cells.push(ScoreCell {
            fund: item.fund.clone(),
            period: item.period.clone(),
            group: item.sector.clone(),
            tier: item.kind.name().into(),
            category: item.effect.label().into(),
            item: item.id.clone(),
            correct,
            note,
        });
    }
    Ok(card)
}

/// The answer a perfect respondent gives: the nearest option's letter, or
/// the value at 5 decimals.
pub fn oracle_answer(item: &PublicQaItem, corpus: &[ReportSlice]) -> Result<String> {
    let slice = corpus
        .iter()
        .find(|s| s.fund == item.fund && s.period == item.period)
        .ok_or_else(|| {
            Error::QuestionRecord(format!(
                "{}: no slice for {} / {}",
                item.id, item.fund, item.period
            ))
        })?;
    let table = compute_single_level(slice)?;
    let value = item
        .effect
        .value_in(&table, &item.sector)
        .ok_or_else(|| unknown_sector(&item.sector))?;
    Ok(match item.kind {
        QaKind::QAMC => closest_option(&item.options, value)
            .filter(|&i| i < OPTION_LETTERS.len())
            .map_or(ABSTAIN_LETTER, option_letter)
            .to_string(),
        QaKind::QCalc => fixed(value, OPTION_PLACES),
    })
}
