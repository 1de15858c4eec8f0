//! Scoring of agent outputs: keyword accuracy, numeric-table accuracy,
//! ROUGE F1 and embedding cosine similarity, plus CSV score layouts.

mod keywords;
mod layout;
mod score;
mod semantic;
mod tables;
mod text;

pub use keywords::{keyword_accuracy, keyword_accuracy_with, KEYWORD_VALUE_TOLERANCE};
pub use layout::{
    emit_keyword_scores, emit_qa_scores, emit_semantic_scores, emit_table_scores, percent,
};
pub use score::{ScoreCard, ScoreCell, ScoreUnit, Tally};
pub use semantic::{semantic_report, SemanticReport, SemanticRow, SkippedPair};
pub use tables::{
    cells_from_macro, cells_from_micro, numeric_table_accuracy, PredictedCell, TABLE_TOLERANCE,
};
pub use text::{cosine_similarity, rouge_f1, tokenize, RougeVariant};
