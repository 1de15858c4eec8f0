use std::collections::HashMap;

use super::score::{ScoreCard, ScoreCell, ScoreUnit};
use crate::error::{Error, Result};
use crate::factors::{EffectType, FactorAssessment};
use crate::format::within;

/// Value cells are printed at 4 decimals, so half a unit in the last place.
pub const KEYWORD_VALUE_TOLERANCE: f64 = 5e-5;

pub fn keyword_accuracy(
    predicted: &[FactorAssessment],
    truth: &[FactorAssessment],
) -> Result<ScoreCard> {
    keyword_accuracy_with(predicted, truth, KEYWORD_VALUE_TOLERANCE)
}

/// Six cells per sector: allocation scores Value, Sector Weight and Sector
/// Performance; selection scores Value, Sector Performance and a `None`
/// Sector Weight. Missing predictions score zero; predictions for sectors
/// absent from `truth` are flagged.
pub fn keyword_accuracy_with(
    predicted: &[FactorAssessment],
    truth: &[FactorAssessment],
    tolerance: f64,
) -> Result<ScoreCard> {
    let mut by_key: HashMap<(&str, EffectType), &FactorAssessment> = HashMap::new();
    for p in predicted {
        if by_key.insert((p.sector.trim(), p.effect_type), p).is_some() {
            return Err(Error::DuplicatePrediction {
                sector: p.sector.clone(),
                effect: p.effect_type.to_string(),
            });
        }
    }

    let mut card = ScoreCard::new(ScoreUnit::Portfolio);
    for t in truth {
        let pred = by_key.get(&(t.sector.as_str(), t.effect_type)).copied();
        let mut push = |item: &str, correct: Option<bool>| {
            card.cells.push(ScoreCell {
                fund: String::new(),
                period: String::new(),
                group: t.sector.clone(),
                tier: "Sector".into(),
                category: t.effect_type.label().into(),
                item: item.into(),
                correct: correct.unwrap_or(false),
                note: correct.is_none().then(|| "missing".into()),
            })
        };
        push("Value", pred.map(|p| within(p.value, t.value, tolerance)));
        push(
            "Sector Weight",
            pred.map(|p| p.weight_stance == t.weight_stance),
        );
        push(
            "Sector Performance",
            pred.map(|p| p.performance_stance == t.performance_stance),
        );
    }
    for p in predicted {
        if !truth.iter().any(|t| t.sector == p.sector.trim()) {
            card.flags
                .push(format!("prediction for unknown sector '{}'", p.sector));
        }
    }
    Ok(card)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::fixtures::exam_slice;
    use crate::factors::{ground_truth_factors, PerformanceStance, WeightStance};

    #[test]
    fn self_grading_is_perfect_and_empty_is_zero() {
        let truth = ground_truth_factors(&exam_slice()).unwrap();
        let card = keyword_accuracy(&truth, &truth).unwrap();
        assert_eq!((card.earned(), card.possible()), (18, 18));
        let card = keyword_accuracy(&[], &truth).unwrap();
        assert_eq!((card.earned(), card.possible()), (0, 18));
    }

    #[test]
    fn single_corruptions_cost_one_cell() {
        let truth = ground_truth_factors(&exam_slice()).unwrap();
        let mut pred = truth.clone();
        pred[0].weight_stance = Some(WeightStance::Neutral);
        pred[1].weight_stance = Some(WeightStance::Overweight);
        pred[3].performance_stance = PerformanceStance::Outperformance;
        pred[5].value += 1e-4;
        assert_eq!(keyword_accuracy(&pred, &truth).unwrap().earned(), 14);
    }

    #[test]
    fn rounded_values_pass() {
        let truth = ground_truth_factors(&exam_slice()).unwrap();
        let pred: Vec<_> = truth
            .iter()
            .map(|t| FactorAssessment {
                value: crate::format::round_to(t.value, 4),
                ..t.clone()
            })
            .collect();
        assert_eq!(keyword_accuracy(&pred, &truth).unwrap().earned(), 18);
    }

    #[test]
    fn duplicates_error_and_strangers_flag() {
        let truth = ground_truth_factors(&exam_slice()).unwrap();
        let mut pred = truth.clone();
        pred.push(truth[0].clone());
        assert!(matches!(
            keyword_accuracy(&pred, &truth),
            Err(Error::DuplicatePrediction { .. })
        ));
        let mut stranger = truth[0].clone();
        stranger.sector = "Gold".into();
        let card = keyword_accuracy(&[stranger], &truth).unwrap();
        assert_eq!(card.flags.len(), 1);
        assert_eq!(card.possible(), 18);
    }
}
