#![allow(dead_code)]

use std::path::PathBuf;

use brinson_bench::{HoldingRecord, ReportSlice};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture exists")
}

fn normalized(raw: &[f64]) -> Vec<f64> {
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|w| w / sum).collect()
}

/// A valid long-only slice of 2 to 12 sectors under up to three parents.
/// Every parent holds positive weight on both sides, so macro mode applies.
pub fn random_slice(rng: &mut impl Rng) -> ReportSlice {
    let n = rng.gen_range(2..=12);
    let parents = rng.gen_range(1..=3.min(n));
    let portfolio = normalized(&(0..n).map(|_| rng.gen_range(0.01..1.0)).collect::<Vec<_>>());
    let benchmark = normalized(&(0..n).map(|_| rng.gen_range(0.01..1.0)).collect::<Vec<_>>());
    let records = (0..n)
        .map(|i| HoldingRecord {
            parent_group: Some(format!("Type {}", i % parents)),
            group: format!("Sector {i}"),
            portfolio_weight: portfolio[i],
            benchmark_weight: benchmark[i],
            portfolio_return: rng.gen_range(-0.3..0.3),
            benchmark_return: rng.gen_range(-0.3..0.3),
            period: "P".into(),
            fund: "F".into(),
            benchmark: "B".into(),
        })
        .collect();
    ReportSlice::new(records).expect("generated slice is valid")
}
