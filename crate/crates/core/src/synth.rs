//! Seeded synthetic corpus: three fund styles over four quarters, twelve
//! GICS sectors each (Cash included), grouped into Sensitive, Cyclical and
//! Defensive parent types.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attribution::{HoldingRecord, ReportSlice};
use crate::error::{Error, Result};

/// `(parent type, sector)` in report order.
pub const SECTORS: [(&str, &str); 12] = [
    ("Sensitive", "Energy"),
    ("Cyclical", "Materials"),
    ("Sensitive", "Industrials"),
    ("Cyclical", "Consumer Discret."),
    ("Defensive", "Consumer Staples"),
    ("Defensive", "Health Care"),
    ("Cyclical", "Financials"),
    ("Sensitive", "IT"),
    ("Sensitive", "Communication"),
    ("Defensive", "Utilities"),
    ("Cyclical", "Real Estate"),
    ("Defensive", "Cash"),
];

pub const CASH: &str = "Cash";

/// Benchmark weights the generator jitters around, aligned with [`SECTORS`].
pub const BASE_BENCHMARK_WEIGHTS: [f64; 12] = [
    0.075, 0.089, 0.093, 0.093, 0.088, 0.094, 0.136, 0.112, 0.081, 0.072, 0.067, 0.0,
];

pub const PERIODS: [&str; 4] = [
    "1/31/2022 to 3/31/2022",
    "4/1/2022 to 6/30/2022",
    "7/1/2022 to 9/30/2022",
    "10/1/2022 to 12/31/2022",
];

pub const RETURN_CAP: f64 = 0.15;
pub const CASH_PORTFOLIO_RETURN: f64 = 0.0038;
const WEIGHT_JITTER: f64 = 0.05;
const MARKET_RANGE: f64 = 0.05;
const SHOCK_RANGE: f64 = 0.05;
const UNITS: i64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FundStyle {
    Defensive,
    Growth,
    Value,
}

impl FundStyle {
    pub fn name(self) -> &'static str {
        match self {
            Self::Defensive => "Defensive",
            Self::Growth => "Growth",
            Self::Value => "Value",
        }
    }
}

impl fmt::Display for FundStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fund style: per-sector over/underweight bias and the spread of
/// portfolio returns around the sector benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundStyleSpec {
    pub style: FundStyle,
    pub tilts: BTreeMap<String, f64>,
    pub return_dispersion: f64,
}

fn tilt_map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(s, t)| (s.to_string(), t)).collect()
}

impl FundStyleSpec {
    /// Low variation in weights, leaning on staples, utilities and cash.
    pub fn defensive() -> Self {
        Self {
            style: FundStyle::Defensive,
            tilts: tilt_map(&[
                ("Cash", 0.02),
                ("Consumer Staples", 0.05),
                ("Health Care", 0.02),
                ("Utilities", 0.06),
                ("Real Estate", 0.03),
                ("Energy", -0.035),
                ("Materials", -0.035),
                ("Industrials", -0.025),
                ("Financials", -0.045),
                ("IT", -0.025),
                ("Communication", -0.01),
                ("Consumer Discret.", -0.005),
            ]),
            return_dispersion: 0.015,
        }
    }

    pub fn growth() -> Self {
        Self {
            style: FundStyle::Growth,
            tilts: tilt_map(&[
                ("IT", 0.08),
                ("Communication", 0.03),
                ("Consumer Discret.", 0.03),
                ("Cash", 0.01),
                ("Utilities", -0.04),
                ("Consumer Staples", -0.03),
                ("Energy", -0.03),
                ("Real Estate", -0.02),
                ("Financials", -0.03),
            ]),
            return_dispersion: 0.03,
        }
    }

    pub fn value() -> Self {
        Self {
            style: FundStyle::Value,
            tilts: tilt_map(&[
                ("Utilities", 0.05),
                ("Health Care", 0.04),
                ("Financials", 0.03),
                ("Energy", 0.01),
                ("Cash", 0.015),
                ("IT", -0.06),
                ("Communication", -0.03),
                ("Consumer Discret.", -0.03),
                ("Real Estate", -0.025),
            ]),
            return_dispersion: 0.02,
        }
    }

    pub fn defaults() -> Vec<Self> {
        vec![Self::defensive(), Self::growth(), Self::value()]
    }

    pub fn fund_name(&self) -> String {
        format!("Portfolio {}", self.style)
    }

    pub fn benchmark_name(&self) -> String {
        format!("Benchmark {}", self.style)
    }

    pub fn tilt(&self, sector: &str) -> f64 {
        self.tilts.get(sector).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidStyle {
            style: self.style.to_string(),
            reason,
        };
        if let Some(unknown) = self
            .tilts
            .keys()
            .find(|s| !SECTORS.iter().any(|(_, known)| known == s))
        {
            return Err(invalid(format!("unknown sector {unknown}")));
        }
        if self.tilts.values().any(|t| !t.is_finite()) {
            return Err(invalid("non-finite tilt".into()));
        }
        let sum: f64 = self.tilts.values().sum();
        if sum.abs() > 1e-9 {
            return Err(invalid(format!("tilts sum to {sum}, not 0")));
        }
        if !(0.0..=RETURN_CAP).contains(&self.return_dispersion) {
            return Err(invalid(format!(
                "return dispersion {} outside [0, {RETURN_CAP}]",
                self.return_dispersion
            )));
        }
        Ok(())
    }
}

/// Rounds non-negative weights summing to 1 onto a 4-decimal grid that sums
/// to exactly 10000 units, handing leftover units to the largest remainders.
pub fn round_weights(raw: &[f64]) -> Vec<f64> {
    let scaled: Vec<f64> = raw.iter().map(|w| w * UNITS as f64).collect();
    let mut units: Vec<i64> = scaled.iter().map(|s| s.floor() as i64).collect();
    let deficit = UNITS - units.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (scaled[a] - scaled[a].floor(), scaled[b] - scaled[b].floor());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(deficit.max(0) as usize) {
        units[i] += 1;
    }
    units.into_iter().map(|u| u as f64 / UNITS as f64).collect()
}

fn round4(value: f64) -> f64 {
    (value * UNITS as f64).round() / UNITS as f64
}

fn jittered(rng: &mut ChaCha8Rng, base: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = base
        .iter()
        .map(|w| w * (1.0 + WEIGHT_JITTER * rng.gen_range(-1.0..=1.0)))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

fn slice_for(
    spec: &FundStyleSpec,
    period: &str,
    market: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ReportSlice> {
    let benchmark_weights = round_weights(&jittered(rng, &BASE_BENCHMARK_WEIGHTS));
    let mut tilted = Vec::with_capacity(SECTORS.len());
    for (&(_, sector), &w) in SECTORS.iter().zip(&benchmark_weights) {
        let weight = w + spec.tilt(sector);
        if weight < 0.0 {
            return Err(Error::InfeasibleTilt {
                style: spec.style.to_string(),
                sector: sector.to_string(),
                weight,
            });
        }
        tilted.push(weight);
    }
    let portfolio_weights = round_weights(&jittered(rng, &tilted));

    let records = SECTORS
        .iter()
        .zip(benchmark_weights.iter().zip(&portfolio_weights))
        .map(|(&(parent, sector), (&bw, &pw))| {
            let shock = SHOCK_RANGE * rng.gen_range(-1.0..=1.0);
            let noise = spec.return_dispersion * rng.gen_range(-1.0..=1.0);
            let (benchmark_return, portfolio_return) = if sector == CASH {
                (0.0, CASH_PORTFOLIO_RETURN)
            } else {
                let b = round4((market + shock).clamp(-RETURN_CAP, RETURN_CAP));
                (b, round4((b + noise).clamp(-RETURN_CAP, RETURN_CAP)))
            };
            HoldingRecord {
                parent_group: Some(parent.to_string()),
                group: sector.to_string(),
                portfolio_weight: pw,
                benchmark_weight: bw,
                portfolio_return,
                benchmark_return,
                period: period.to_string(),
                fund: spec.fund_name(),
                benchmark: spec.benchmark_name(),
            }
        })
        .collect();
    ReportSlice::new(records)
}

/// One slice per (style, period), styles outermost. Each slice draws from
/// its own ChaCha stream and the market factor of a period is shared by
/// every style, so the output depends only on the seed and the inputs.
pub fn generate_corpus(
    seed: u64,
    styles: &[FundStyleSpec],
    periods: &[&str],
) -> Result<Vec<ReportSlice>> {
    for spec in styles {
        spec.validate()?;
    }
    let mut market_rng = ChaCha8Rng::seed_from_u64(seed);
    market_rng.set_stream(u64::MAX);
    let markets: Vec<f64> = periods
        .iter()
        .map(|_| MARKET_RANGE * market_rng.gen_range(-1.0..=1.0))
        .collect();

    let mut corpus = Vec::with_capacity(styles.len() * periods.len());
    for (s, spec) in styles.iter().enumerate() {
        for (p, period) in periods.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((s * periods.len() + p) as u64);
            corpus.push(slice_for(spec, period, markets[p], &mut rng)?);
        }
    }
    log::debug!("generated {} slices from seed {seed}", corpus.len());
    Ok(corpus)
}

/// The default corpus: three styles over the four quarters of 2022.
pub fn default_corpus(seed: u64) -> Result<Vec<ReportSlice>> {
    generate_corpus(seed, &FundStyleSpec::defaults(), &PERIODS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_weights_and_tilts_balance() {
        assert!((BASE_BENCHMARK_WEIGHTS.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for spec in FundStyleSpec::defaults() {
            spec.validate().unwrap();
        }
    }

    #[test]
    fn default_corpus_shape() {
        let corpus = default_corpus(7).unwrap();
        assert_eq!(corpus.len(), 12);
        assert_eq!(corpus.iter().map(|s| s.records.len()).sum::<usize>(), 144);
        for slice in &corpus {
            let cash = slice.record(CASH).unwrap();
            assert_eq!(cash.benchmark_weight, 0.0);
            assert_eq!(cash.benchmark_return, 0.0);
            assert_eq!(cash.portfolio_return, CASH_PORTFOLIO_RETURN);
            for r in &slice.records {
                assert!(r.portfolio_weight >= 0.0 && r.benchmark_weight >= 0.0);
                assert!(r.portfolio_return.abs() <= RETURN_CAP);
                assert!(r.benchmark_return.abs() <= RETURN_CAP);
            }
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        assert_eq!(default_corpus(11).unwrap(), default_corpus(11).unwrap());
        assert_ne!(default_corpus(11).unwrap(), default_corpus(12).unwrap());
    }

    #[test]
    fn style_tilts_take_effect() {
        for seed in 0..20 {
            let corpus = default_corpus(seed).unwrap();
            for slice in &corpus[..4] {
                let u = slice.record("Utilities").unwrap();
                assert!(u.portfolio_weight > u.benchmark_weight);
            }
            for slice in &corpus[4..8] {
                let it = slice.record("IT").unwrap();
                assert!(it.portfolio_weight > it.benchmark_weight);
            }
            for slice in &corpus[8..] {
                let hc = slice.record("Health Care").unwrap();
                assert!(hc.portfolio_weight > hc.benchmark_weight);
            }
        }
    }

    #[test]
    fn rounded_weights_sum_to_whole_units() {
        let w = round_weights(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]);
        assert_eq!(w, vec![0.3334, 0.3333, 0.3333, 0.0]);
    }

    #[test]
    fn unbalanced_or_infeasible_tilts_are_rejected() {
        let mut spec = FundStyleSpec::growth();
        spec.tilts.insert("IT".into(), 0.09);
        assert!(matches!(spec.validate(), Err(Error::InvalidStyle { .. })));

        let mut spec = FundStyleSpec::value();
        spec.tilts.insert("IT".into(), -0.2);
        spec.tilts.insert("Cash".into(), 0.155);
        assert!(matches!(
            generate_corpus(1, &[spec], &PERIODS),
            Err(Error::InfeasibleTilt { .. })
        ));
    }
}
