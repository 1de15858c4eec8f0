use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::score::{ScoreCard, ScoreCell, ScoreUnit};
use crate::attribution::{AttributionTable, Level};
use crate::factors::EffectType;
use crate::format::within;
use crate::io::{MacroResultRecord, MicroResultRecord};

/// Result files print 6 decimals.
pub const TABLE_TOLERANCE: f64 = 1e-6;

/// One predicted effect value of a sector or parent row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedCell {
    pub level: Level,
    pub group: String,
    pub effect: EffectType,
    pub value: f64,
    pub fund: String,
    pub period: String,
}

pub fn cells_from_micro(records: &[MicroResultRecord]) -> Vec<PredictedCell> {
    records
        .iter()
        .flat_map(|r| {
            [
                (EffectType::Allocation, r.allocation),
                (EffectType::Selection, r.selection),
            ]
            .map(|(effect, value)| PredictedCell {
                level: r.level,
                group: r.group.clone(),
                effect,
                value,
                fund: r.fund.clone(),
                period: r.period.clone(),
            })
        })
        .collect()
}

pub fn cells_from_macro(records: &[MacroResultRecord]) -> Vec<PredictedCell> {
    records
        .iter()
        .map(|r| PredictedCell {
            level: Level::Parent,
            group: r.group.clone(),
            effect: r.effect,
            value: r.value,
            fund: r.fund.clone(),
            period: r.period.clone(),
        })
        .collect()
}

fn tier(level: Level) -> &'static str {
    match level {
        Level::Sector => "Sector",
        Level::Parent => "Type",
        Level::Total => "Total",
    }
}

type CellKey<'a> = (&'a str, &'a str, Level, &'a str, EffectType);

/// Scores the allocation and selection cell of every sector and parent row
/// of `truth`. A cell is correct when the prediction is within `tolerance`;
/// unmatched cells score zero. Predictions that match no truth row, and
/// repeated predictions, are flagged without counting.
pub fn numeric_table_accuracy(
    predicted: &[PredictedCell],
    truth: &[AttributionTable],
    tolerance: f64,
) -> ScoreCard {
    let mut card = ScoreCard::new(ScoreUnit::Table);
    let mut by_key: HashMap<CellKey, f64> = HashMap::new();
    for p in predicted {
        let key = (
            p.fund.as_str(),
            p.period.as_str(),
            p.level,
            p.group.as_str(),
            p.effect,
        );
        match by_key.entry(key) {
            Entry::Occupied(_) => card.flags.push(format!(
                "repeated prediction for {} of '{}' in {} / {}",
                p.effect, p.group, p.fund, p.period
            )),
            Entry::Vacant(slot) => {
                slot.insert(p.value);
            }
        }
    }

    let mut matched = 0;
    for table in truth {
        for row in table.rows.iter().filter(|r| r.level != Level::Total) {
            for (effect, value) in [
                (EffectType::Allocation, row.allocation),
                (EffectType::Selection, row.selection),
            ] {
                let key = (
                    row.fund.as_str(),
                    row.period.as_str(),
                    row.level,
                    row.group.as_str(),
                    effect,
                );
                let pred = by_key.get(&key);
                matched += usize::from(pred.is_some());
                card.cells.push(ScoreCell {
                    fund: row.fund.clone(),
                    period: row.period.clone(),
                    group: row.group.clone(),
                    tier: tier(row.level).into(),
                    category: effect.label().into(),
                    item: String::new(),
                    correct: pred.is_some_and(|&p| within(p, value, tolerance)),
                    note: pred.is_none().then(|| "missing".into()),
                });
            }
        }
    }
    if matched < by_key.len() {
        for (fund, period, level, group, effect) in by_key.keys() {
            let known = truth
                .iter()
                .any(|t| t.fund == *fund && t.period == *period && t.row(*level, group).is_some());
            if !known {
                card.flags.push(format!(
                    "prediction for unknown {} '{group}' ({effect}) in {fund} / {period}",
                    tier(*level).to_lowercase()
                ));
            }
        }
        card.flags.sort();
    }
    card
}
