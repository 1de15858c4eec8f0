use thiserror::Error;

use crate::attribution::Side;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("report slice has no records")]
    EmptySlice,

    #[error("{side} weights of {fund} / {period} sum to 1 {residual:+e}")]
    WeightSum {
        side: Side,
        fund: String,
        period: String,
        residual: f64,
    },

    #[error("negative {side} weight {weight} for group '{group}'")]
    NegativeWeight {
        side: Side,
        group: String,
        weight: f64,
    },

    #[error("record '{group}' belongs to {found}, expected {expected}")]
    MixedSlice {
        group: String,
        expected: String,
        found: String,
    },

    #[error("group '{0}' appears more than once in one slice")]
    DuplicateGroup(String),

    #[error("group '{0}' has no parent group")]
    MissingParent(String),

    #[error("segment '{parent}' has zero {side} weight")]
    ZeroSegmentWeight { parent: String, side: Side },

    #[error("input is empty")]
    EmptyInput,

    #[error("header column {index}: expected '{expected}', found '{found}'")]
    Header {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("row {row}, column '{column}': cannot parse '{value}'")]
    Cell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column '{column}': stated {stated} but derived {derived}")]
    DerivedColumn {
        row: usize,
        column: String,
        stated: f64,
        derived: f64,
    },

    #[error("fund style '{style}': {reason}")]
    InvalidStyle { style: String, reason: String },

    #[error("fund style '{style}' gives sector '{sector}' a negative weight {weight}")]
    InfeasibleTilt {
        style: String,
        sector: String,
        weight: f64,
    },

    #[error("question count {0} must be even and positive")]
    QuestionCount(usize),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("corpus offers {available} distinct questions, {requested} requested")]
    CorpusTooSmall { requested: usize, available: usize },

    #[error("submission answers unknown question '{0}'")]
    UnknownQuestion(String),

    #[error("question '{0}' answered more than once")]
    DuplicateAnswer(String),

    #[error("duplicate prediction for {effect} of sector '{sector}'")]
    DuplicatePrediction { sector: String, effect: String },

    #[error("malformed question record: {0}")]
    QuestionRecord(String),

    #[error("cosine similarity of a zero vector")]
    ZeroVector,

    #[error("vector dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("embedding sidecar line {line}: {reason}")]
    Embedding { line: usize, reason: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
