//! Keyword factors behind each effect and the prescriptive explanation
//! sentences built from them.
//!
//! Allocation is explained by two factors, the weight stance `w - W` and the
//! performance stance `b_i - b`; its sign is the product of their signs.
//! Selection is explained by the performance stance `r_i - b_i` alone, with
//! a zero portfolio weight reading as "no exposure".

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attribution::{self, ReportSlice};
use crate::error::Result;
use crate::format::fixed;

/// Differences within this band classify as neutral.
pub const CLASSIFICATION_EPSILON: f64 = 1e-12;

/// Decimal places of every number quoted in a rendered sentence.
pub const SENTENCE_PLACES: usize = 4;

fn signum(value: f64) -> i8 {
    if value > CLASSIFICATION_EPSILON {
        1
    } else if value < -CLASSIFICATION_EPSILON {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightStance {
    Overweight,
    Underweight,
    Neutral,
}

impl WeightStance {
    pub fn from_difference(weight_difference: f64) -> Self {
        match signum(weight_difference) {
            1 => WeightStance::Overweight,
            -1 => WeightStance::Underweight,
            _ => WeightStance::Neutral,
        }
    }

    fn sign(self) -> i8 {
        match self {
            WeightStance::Overweight => 1,
            WeightStance::Underweight => -1,
            WeightStance::Neutral => 0,
        }
    }

    /// Factor-table keyword.
    pub fn keyword(self) -> &'static str {
        match self {
            WeightStance::Overweight => "Overweight",
            WeightStance::Underweight => "Underweight",
            WeightStance::Neutral => "Neutral",
        }
    }

    pub fn sentence_word(self) -> &'static str {
        match self {
            WeightStance::Overweight => "overweight",
            WeightStance::Underweight => "underweight",
            WeightStance::Neutral => "neutral",
        }
    }

    pub fn from_sentence_word(word: &str) -> Option<Self> {
        [Self::Overweight, Self::Underweight, Self::Neutral]
            .into_iter()
            .find(|s| s.sentence_word() == word)
    }
}

impl FromStr for WeightStance {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "overweight" => Ok(WeightStance::Overweight),
            "underweight" => Ok(WeightStance::Underweight),
            "neutral" => Ok(WeightStance::Neutral),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PerformanceStance {
    Outperformance,
    Underperformance,
    Neutral,
    /// Selection with zero portfolio weight.
    NoExposure,
}

impl PerformanceStance {
    pub fn from_difference(return_difference: f64) -> Self {
        match signum(return_difference) {
            1 => PerformanceStance::Outperformance,
            -1 => PerformanceStance::Underperformance,
            _ => PerformanceStance::Neutral,
        }
    }

    fn sign(self) -> i8 {
        match self {
            PerformanceStance::Outperformance => 1,
            PerformanceStance::Underperformance => -1,
            PerformanceStance::Neutral | PerformanceStance::NoExposure => 0,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            PerformanceStance::Outperformance => "Outperformance",
            PerformanceStance::Underperformance => "Underperformance",
            PerformanceStance::Neutral => "Neutral",
            PerformanceStance::NoExposure => "No exposure",
        }
    }

    pub fn sentence_word(self) -> &'static str {
        match self {
            PerformanceStance::Outperformance => "outperformed",
            PerformanceStance::Underperformance => "underperformed",
            PerformanceStance::Neutral => "neutral",
            PerformanceStance::NoExposure => "no exposure",
        }
    }

    pub fn from_sentence_word(word: &str) -> Option<Self> {
        [
            Self::Outperformance,
            Self::Underperformance,
            Self::Neutral,
            Self::NoExposure,
        ]
        .into_iter()
        .find(|s| s.sentence_word() == word)
    }
}

impl FromStr for PerformanceStance {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "outperformance" => Ok(PerformanceStance::Outperformance),
            "underperformance" => Ok(PerformanceStance::Underperformance),
            "neutral" => Ok(PerformanceStance::Neutral),
            "no exposure" => Ok(PerformanceStance::NoExposure),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EffectSign {
    Positive,
    Negative,
    Zero,
}

impl EffectSign {
    /// Sign of a value under [`CLASSIFICATION_EPSILON`].
    pub fn of(value: f64) -> Self {
        Self::from_signum(signum(value))
    }

    fn from_signum(s: i8) -> Self {
        match s {
            1 => EffectSign::Positive,
            -1 => EffectSign::Negative,
            _ => EffectSign::Zero,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            EffectSign::Positive => "positive",
            EffectSign::Negative => "negative",
            EffectSign::Zero => "zero",
        }
    }

    pub fn from_word(word: &str) -> Option<Self> {
        [Self::Positive, Self::Negative, Self::Zero]
            .into_iter()
            .find(|s| s.word() == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EffectType {
    Allocation,
    Selection,
}

impl EffectType {
    pub fn label(self) -> &'static str {
        match self {
            EffectType::Allocation => "Allocation",
            EffectType::Selection => "Selection",
        }
    }
}

impl fmt::Display for EffectType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EffectType {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "allocation" | "allocation effect" => Ok(EffectType::Allocation),
            "selection" | "selection effect" => Ok(EffectType::Selection),
            _ => Err(()),
        }
    }
}

/// The keyword triple explaining one effect of one sector.
///
/// `weight_stance` is `None` for selection; predictions parsed from agent
/// output may break that rule and are scored accordingly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorAssessment {
    pub sector: String,
    pub effect_type: EffectType,
    pub value: f64,
    pub weight_stance: Option<WeightStance>,
    pub performance_stance: PerformanceStance,
    pub sign: EffectSign,
}

impl FactorAssessment {
    /// Cell text of the combination tables, e.g.
    /// `Allocation Positive W: Overweight R: Outperformance`.
    pub fn cell_label(&self) -> String {
        match self.effect_type {
            EffectType::Allocation => {
                let head = match self.sign {
                    EffectSign::Positive => "Allocation Positive",
                    EffectSign::Negative => "Allocation Negative",
                    EffectSign::Zero => "Zero Allocation",
                };
                let weight = self.weight_stance.map_or("None", WeightStance::keyword);
                format!(
                    "{head} W: {weight} R: {}",
                    self.performance_stance.keyword()
                )
            }
            EffectType::Selection => {
                let head = match self.sign {
                    EffectSign::Positive => "Selection Positive",
                    EffectSign::Negative => "Selection Negative",
                    EffectSign::Zero => "Zero Selection",
                };
                format!("{head} {}", self.performance_stance.keyword())
            }
        }
    }
}

pub fn classify_allocation(
    sector: &str,
    portfolio_weight: f64,
    benchmark_weight: f64,
    group_benchmark_return: f64,
    benchmark_total_return: f64,
) -> FactorAssessment {
    let weight = WeightStance::from_difference(portfolio_weight - benchmark_weight);
    let performance =
        PerformanceStance::from_difference(group_benchmark_return - benchmark_total_return);
    FactorAssessment {
        sector: sector.to_string(),
        effect_type: EffectType::Allocation,
        value: attribution::allocation_effect(
            portfolio_weight,
            benchmark_weight,
            group_benchmark_return,
            benchmark_total_return,
        ),
        weight_stance: Some(weight),
        performance_stance: performance,
        sign: EffectSign::from_signum(weight.sign() * performance.sign()),
    }
}

pub fn classify_selection(
    sector: &str,
    portfolio_weight: f64,
    group_portfolio_return: f64,
    group_benchmark_return: f64,
) -> FactorAssessment {
    let performance = if signum(portfolio_weight) <= 0 {
        PerformanceStance::NoExposure
    } else {
        PerformanceStance::from_difference(group_portfolio_return - group_benchmark_return)
    };
    FactorAssessment {
        sector: sector.to_string(),
        effect_type: EffectType::Selection,
        value: attribution::selection_effect(
            portfolio_weight,
            group_portfolio_return,
            group_benchmark_return,
        ),
        weight_stance: None,
        performance_stance: performance,
        sign: EffectSign::from_signum(performance.sign()),
    }
}

/// Sign of a sector's total contribution.
pub fn total_sign(allocation: f64, selection: f64) -> EffectSign {
    EffectSign::of(allocation + selection)
}

/// Allocation and selection sentences for one sector, without bullet
/// markers. The allocation clause follows the prompt template word for word.
pub fn render_sentences(
    allocation: &FactorAssessment,
    selection: &FactorAssessment,
    group_benchmark_return: f64,
    benchmark_total_return: f64,
    group_portfolio_return: f64,
) -> [String; 2] {
    let n = |v: f64| fixed(v, SENTENCE_PLACES);
    let weight = allocation
        .weight_stance
        .map_or("none", WeightStance::sentence_word);
    [
        format!(
            "The '{}' sector had a '{}' allocation effect of '{}'. This was due to the fund being '{}' \
             in this sector compared to the benchmark and due to the fact that the benchmark return \
             of '{}' compared to the benchmark total return of '{}' '{}'.",
            allocation.sector,
            allocation.sign.word(),
            n(allocation.value),
            weight,
            n(group_benchmark_return),
            n(benchmark_total_return),
            allocation.performance_stance.sentence_word(),
        ),
        format!(
            "The '{}' sector also had a '{}' selection effect of '{}'. The fund's investments in this \
             sector '{}' compared to the sector benchmark (Portfolio Return: '{}' vs Benchmark \
             Return: '{}').",
            selection.sector,
            selection.sign.word(),
            n(selection.value),
            selection.performance_stance.sentence_word(),
            n(group_portfolio_return),
            n(group_benchmark_return),
        ),
    ]
}

/// Allocation and selection assessments for every record, in record order.
pub fn ground_truth_factors(slice: &ReportSlice) -> Result<Vec<FactorAssessment>> {
    let benchmark_total = attribution::benchmark_total_return(slice)?;
    Ok(slice
        .records
        .iter()
        .flat_map(|r| {
            [
                classify_allocation(
                    &r.group,
                    r.portfolio_weight,
                    r.benchmark_weight,
                    r.benchmark_return,
                    benchmark_total,
                ),
                classify_selection(
                    &r.group,
                    r.portfolio_weight,
                    r.portfolio_return,
                    r.benchmark_return,
                ),
            ]
        })
        .collect())
}

/// The reference sentences for one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorExplanation {
    pub allocation: FactorAssessment,
    pub selection: FactorAssessment,
    pub sentences: [String; 2],
}

/// Hard-coded reference explanations for every record of a slice.
pub fn explain_slice(slice: &ReportSlice) -> Result<Vec<SectorExplanation>> {
    let benchmark_total = attribution::benchmark_total_return(slice)?;
    let factors = ground_truth_factors(slice)?;
    Ok(slice
        .records
        .iter()
        .zip(factors.chunks_exact(2))
        .map(|(record, pair)| SectorExplanation {
            sentences: render_sentences(
                &pair[0],
                &pair[1],
                record.benchmark_return,
                benchmark_total,
                record.portfolio_return,
            ),
            allocation: pair[0].clone(),
            selection: pair[1].clone(),
        })
        .collect())
}
