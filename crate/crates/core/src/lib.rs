//! Brinson-Fachler performance attribution plus a benchmark harness that
//! generates synthetic attribution corpora, exam-style questions, and grades
//! explanations and calculations produced by an external agent.
//!
//! Module map:
//!
//! - [`attribution`]: single-level, micro and macro attribution effects.
//! - [`factors`]: keyword factors (weight stance, performance stance, sign)
//!   and the prescriptive explanation sentences.
//! - [`io`]: strict CSV schemas, agent responses, text and embedding files.
//! - [`synth`]: seeded synthetic corpus in the three fund styles.
//! - [`qa`]: multiple-choice and calculation question bank with grading.
//! - [`eval`]: keyword accuracy, table accuracy, ROUGE and cosine scoring.
//! - [`pipeline`]: deterministic oracle respondent and corpus-level grading.

pub mod attribution;
pub mod error;
pub mod eval;
pub mod factors;
pub mod format;
pub mod io;
pub mod pipeline;
pub mod qa;
pub mod synth;

pub use attribution::{
    AttributionRow, AttributionTable, HoldingRecord, Level, Mode, ReportSlice, Side,
};
pub use error::{Error, Result};
pub use factors::{EffectSign, EffectType, FactorAssessment, PerformanceStance, WeightStance};
