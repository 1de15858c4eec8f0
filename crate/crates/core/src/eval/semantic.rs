use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::text::{cosine_similarity, rouge_f1, RougeVariant};
use crate::factors::EffectType;
use crate::io::{EmbeddingTable, TextRecord};

/// Mean scores of one prompt family on one effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticRow {
    pub family: String,
    pub effect: EffectType,
    pub pairs: usize,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rougel: f64,
    /// `None` without embeddings or when every pair lacked a vector.
    pub cosine: Option<f64>,
    pub cosine_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub candidate_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SemanticReport {
    pub rows: Vec<SemanticRow>,
    pub skipped: Vec<SkippedPair>,
}

#[derive(Default)]
struct Sums {
    pairs: usize,
    rouge: [f64; 3],
    cosine: f64,
    cosine_pairs: usize,
}

/// Pairs each candidate with the reference of the same fund, period,
/// sector and effect, then averages per (family, effect). Families keep
/// their first-appearance order, allocation before selection. Candidates
/// without a reference are skipped; pairs lacking an embedding still count
/// toward ROUGE but are skipped for cosine. Both cases are listed.
pub fn semantic_report(
    candidates: &[TextRecord],
    references: &[TextRecord],
    embeddings: Option<&EmbeddingTable>,
) -> SemanticReport {
    let reference_of: HashMap<_, _> = references
        .iter()
        .map(|r| {
            (
                (
                    r.fund.as_str(),
                    r.period.as_str(),
                    r.sector.as_str(),
                    r.effect,
                ),
                r,
            )
        })
        .collect();

    let mut families: Vec<&str> = Vec::new();
    let mut sums: HashMap<(&str, EffectType), Sums> = HashMap::new();
    let mut skipped = Vec::new();
    for c in candidates {
        let key = (
            c.fund.as_str(),
            c.period.as_str(),
            c.sector.as_str(),
            c.effect,
        );
        let Some(r) = reference_of.get(&key) else {
            skipped.push(SkippedPair {
                candidate_id: c.id.clone(),
                reason: "no reference text".into(),
            });
            continue;
        };
        if !families.contains(&c.family.as_str()) {
            families.push(&c.family);
        }
        let s = sums.entry((&c.family, c.effect)).or_default();
        s.pairs += 1;
        for (slot, v) in s.rouge.iter_mut().zip(RougeVariant::ALL) {
            *slot += rouge_f1(&c.text, &r.text, v);
        }
        if let Some(table) = embeddings {
            let cosine = match (table.get(&c.id), table.get(&r.id)) {
                (Some(a), Some(b)) => cosine_similarity(a, b).map_err(|e| e.to_string()),
                (None, _) => Err(format!("no embedding for '{}'", c.id)),
                (_, None) => Err(format!("no embedding for '{}'", r.id)),
            };
            match cosine {
                Ok(v) => {
                    s.cosine += v;
                    s.cosine_pairs += 1;
                }
                Err(reason) => skipped.push(SkippedPair {
                    candidate_id: c.id.clone(),
                    reason,
                }),
            }
        }
    }

    let mut rows = Vec::new();
    for family in families {
        for effect in [EffectType::Allocation, EffectType::Selection] {
            let Some(s) = sums.get(&(family, effect)) else {
                continue;
            };
            let mean = |x: f64| x / s.pairs as f64;
            rows.push(SemanticRow {
                family: family.to_string(),
                effect,
                pairs: s.pairs,
                rouge1: mean(s.rouge[0]),
                rouge2: mean(s.rouge[1]),
                rougel: mean(s.rouge[2]),
                cosine: (s.cosine_pairs > 0).then(|| s.cosine / s.cosine_pairs as f64),
                cosine_pairs: s.cosine_pairs,
            });
        }
    }
    SemanticReport { rows, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(id: &str, family: &str, sector: &str, effect: EffectType, body: &str) -> TextRecord {
        TextRecord {
            id: id.into(),
            family: family.into(),
            fund: "F".into(),
            period: "P".into(),
            sector: sector.into(),
            effect,
            text: body.into(),
        }
    }

    #[test]
    fn identical_corpus_scores_one_everywhere() {
        let refs = vec![
            text(
                "r1",
                "reference",
                "IT",
                EffectType::Allocation,
                "the cat sat",
            ),
            text(
                "r2",
                "reference",
                "IT",
                EffectType::Selection,
                "a dog ran far",
            ),
        ];
        let cands: Vec<_> = refs
            .iter()
            .map(|r| TextRecord {
                id: format!("c{}", &r.id[1..]),
                family: "few_1".into(),
                ..r.clone()
            })
            .collect();
        let mut table = EmbeddingTable::new();
        for (id, v) in [
            ("r1", [1.0, 2.0]),
            ("r2", [0.0, 3.0]),
            ("c1", [2.0, 4.0]),
            ("c2", [0.0, 1.0]),
        ] {
            table.insert(id, v.to_vec()).unwrap();
        }
        let report = semantic_report(&cands, &refs, Some(&table));
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert_eq!((row.rouge1, row.rouge2, row.rougel), (1.0, 1.0, 1.0));
            assert!((row.cosine.unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn missing_embeddings_and_references_are_listed() {
        let refs = vec![text("r1", "reference", "IT", EffectType::Allocation, "x y")];
        let cands = vec![
            text("c1", "zero_1", "IT", EffectType::Allocation, "x z"),
            text("c2", "zero_1", "Energy", EffectType::Allocation, "x y"),
        ];
        let report = semantic_report(&cands, &refs, Some(&EmbeddingTable::new()));
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].pairs, 1);
        assert_eq!(report.rows[0].cosine, None);
        assert_eq!(report.skipped.len(), 2);
    }
}
