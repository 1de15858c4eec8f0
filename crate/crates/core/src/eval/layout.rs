//! Score tables as CSV, one layout per grading method.

use super::score::{ScoreCard, ScoreCell, Tally};
use super::semantic::{SemanticReport, SemanticRow};
use crate::attribution::Mode;
use crate::factors::EffectType;
use crate::io::{finish, writer};

/// Whole-number percentage, e.g. `78%`.
pub fn percent(ratio: f64) -> String {
    format!("{:.0}%", ratio * 100.0)
}

fn write(out: &mut csv::Writer<Vec<u8>>, record: &[String]) {
    out.write_record(record).expect("in-memory write");
}

fn effect_cells(card: &ScoreCard, label: &str, keep: impl Fn(&ScoreCell) -> bool) -> Vec<String> {
    let mut row = vec![label.to_string()];
    for effect in [EffectType::Allocation, EffectType::Selection] {
        let t = card.tally_where(|c| c.category == effect.label() && keep(c));
        row.push(t.earned.to_string());
        row.push(percent(t.accuracy()));
    }
    row
}

/// Per fund: the fund row, then (micro only) a `Sectors` row, then one row
/// per parent type; closed by `Total Sectors` / `Total Types` (micro) or
/// `Grand Total` (macro). Each row gives the allocation and selection
/// score with its accuracy.
pub fn emit_table_scores(card: &ScoreCard, mode: Mode) -> Vec<u8> {
    let mut out = writer();
    write(
        &mut out,
        &[
            "Group",
            "Allocation Effect Score",
            "Accuracy",
            "Selection Effect Score",
            "Accuracy",
        ]
        .map(String::from),
    );
    let micro = mode != Mode::Macro;
    let mut types = card
        .cells
        .iter()
        .filter(|c| c.tier == "Type")
        .map(|c| c.group.clone())
        .collect::<Vec<_>>();
    types.sort();
    types.dedup();
    for fund in card.distinct(|c| &c.fund) {
        write(&mut out, &effect_cells(card, &fund, |c| c.fund == fund));
        if micro {
            write(
                &mut out,
                &effect_cells(card, "Sectors", |c| c.fund == fund && c.tier == "Sector"),
            );
        }
        for t in &types {
            write(
                &mut out,
                &effect_cells(card, t, |c| {
                    c.fund == fund && c.tier == "Type" && &c.group == t
                }),
            );
        }
    }
    if micro {
        write(
            &mut out,
            &effect_cells(card, "Total Sectors", |c| c.tier == "Sector"),
        );
        write(
            &mut out,
            &effect_cells(card, "Total Types", |c| c.tier == "Type"),
        );
    } else {
        write(&mut out, &effect_cells(card, "Grand Total", |_| true));
    }
    finish(out)
}

const KEYWORD_COLUMNS: [(EffectType, &str); 6] = [
    (EffectType::Allocation, "Value"),
    (EffectType::Allocation, "Sector Weight"),
    (EffectType::Allocation, "Sector Performance"),
    (EffectType::Selection, "Value"),
    (EffectType::Selection, "Sector Weight"),
    (EffectType::Selection, "Sector Performance"),
];

/// One row per fund plus `Total`: accuracy of each scored keyword column,
/// then earned, possible and overall accuracy.
pub fn emit_keyword_scores(card: &ScoreCard) -> Vec<u8> {
    let mut out = writer();
    let mut header = vec!["Fund".to_string()];
    header.extend(KEYWORD_COLUMNS.map(|(e, item)| format!("{} {item}", e.label())));
    header.extend(["Earned", "Possible", "Accuracy"].map(String::from));
    write(&mut out, &header);

    let row = |label: &str, keep: &dyn Fn(&ScoreCell) -> bool| {
        let mut row = vec![label.to_string()];
        for (effect, item) in KEYWORD_COLUMNS {
            let t = card.tally_where(|c| keep(c) && c.category == effect.label() && c.item == item);
            row.push(percent(t.accuracy()));
        }
        let t: Tally = card.tally_where(keep);
        row.extend([
            t.earned.to_string(),
            t.possible.to_string(),
            percent(t.accuracy()),
        ]);
        row
    };
    for fund in card.distinct(|c| &c.fund) {
        write(&mut out, &row(&fund, &|c| c.fund == fund));
    }
    write(&mut out, &row("Total", &|_| true));
    finish(out)
}

/// `Question Type,Correct,Total Questions,Accuracy`, one row per kind.
pub fn emit_qa_scores(card: &ScoreCard) -> Vec<u8> {
    let mut out = writer();
    write(
        &mut out,
        &["Question Type", "Correct", "Total Questions", "Accuracy"].map(String::from),
    );
    for kind in card.distinct(|c| &c.tier) {
        let t = card.tally_where(|c| c.tier == kind);
        write(
            &mut out,
            &[
                kind,
                t.earned.to_string(),
                t.possible.to_string(),
                percent(t.accuracy()),
            ],
        );
    }
    finish(out)
}

/// One row per family: ROUGE-1/2/L means for allocation then selection,
/// then the cosine means (blank without embeddings).
pub fn emit_semantic_scores(report: &SemanticReport) -> Vec<u8> {
    let mut out = writer();
    let mut header = vec!["Family".to_string()];
    for effect in [EffectType::Allocation, EffectType::Selection] {
        for v in ["ROUGE-1", "ROUGE-2", "ROUGE-L"] {
            header.push(format!("{} {v}", effect.label()));
        }
    }
    header.extend(["Allocation Cosine", "Selection Cosine"].map(String::from));
    write(&mut out, &header);

    let mut families: Vec<&str> = Vec::new();
    for row in &report.rows {
        if !families.contains(&row.family.as_str()) {
            families.push(&row.family);
        }
    }
    for family in families {
        let find = |effect| {
            report
                .rows
                .iter()
                .find(|r: &&SemanticRow| r.family == family && r.effect == effect)
        };
        let (a, s) = (find(EffectType::Allocation), find(EffectType::Selection));
        let mut record = vec![family.to_string()];
        for row in [a, s] {
            match row {
                Some(r) => record.extend([r.rouge1, r.rouge2, r.rougel].map(percent)),
                None => record.extend(std::iter::repeat_n(String::new(), 3)),
            }
        }
        for row in [a, s] {
            record.push(row.and_then(|r| r.cosine).map(percent).unwrap_or_default());
        }
        write(&mut out, &record);
    }
    finish(out)
}
