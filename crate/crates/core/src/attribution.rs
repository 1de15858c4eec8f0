//! Arithmetic Brinson-Fachler attribution.
//!
//! Interaction is folded into selection: for a group with portfolio weight
//! `w`, benchmark weight `W`, portfolio return `r_i`, benchmark return `b_i`
//! and benchmark total return `b`,
//!
//! ```text
//! allocation = (w - W) * (b_i - b)
//! selection  = w * (r_i - b_i)
//! ```
//!
//! and the effects over all groups add up to the arithmetic excess return
//! `r - b`. Micro attribution applies the formulas to the lowest groups and
//! sums them into their parents; macro attribution applies them once per
//! parent using summed weights and weighted-average returns.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of either weight column from a sum of one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Portfolio,
    Benchmark,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Portfolio => "portfolio",
            Side::Benchmark => "benchmark",
        })
    }
}

/// One (fund, period, group) row of weights and returns, as decimal fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldingRecord {
    pub parent_group: Option<String>,
    pub group: String,
    pub portfolio_weight: f64,
    pub benchmark_weight: f64,
    pub portfolio_return: f64,
    pub benchmark_return: f64,
    pub period: String,
    pub fund: String,
    pub benchmark: String,
}

impl HoldingRecord {
    pub fn weight(&self, side: Side) -> f64 {
        match side {
            Side::Portfolio => self.portfolio_weight,
            Side::Benchmark => self.benchmark_weight,
        }
    }

    pub fn return_on(&self, side: Side) -> f64 {
        match side {
            Side::Portfolio => self.portfolio_return,
            Side::Benchmark => self.benchmark_return,
        }
    }

    pub fn contribution(&self, side: Side) -> f64 {
        self.weight(side) * self.return_on(side)
    }
}

/// All records of one fund in one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSlice {
    pub fund: String,
    pub period: String,
    pub records: Vec<HoldingRecord>,
}

impl ReportSlice {
    /// Builds a slice from records, taking fund and period from the first
    /// record, and validates it.
    pub fn new(records: Vec<HoldingRecord>) -> Result<Self> {
        let first = records.first().ok_or(Error::EmptySlice)?;
        let slice = ReportSlice {
            fund: first.fund.clone(),
            period: first.period.clone(),
            records,
        };
        slice.validate()?;
        Ok(slice)
    }

    /// Checks every slice invariant: non-empty, one fund/period/benchmark,
    /// unique groups, long-only weights, and both weight columns summing to
    /// one within [`WEIGHT_SUM_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        let first = self.records.first().ok_or(Error::EmptySlice)?;
        let mut seen = std::collections::HashSet::new();
        for record in &self.records {
            for (expected, found) in [
                (&self.fund, &record.fund),
                (&self.period, &record.period),
                (&first.benchmark, &record.benchmark),
            ] {
                if expected != found {
                    return Err(Error::MixedSlice {
                        group: record.group.clone(),
                        expected: expected.clone(),
                        found: found.clone(),
                    });
                }
            }
            if !seen.insert(record.group.as_str()) {
                return Err(Error::DuplicateGroup(record.group.clone()));
            }
            for side in [Side::Portfolio, Side::Benchmark] {
                let weight = record.weight(side);
                if weight.is_nan() || weight < 0.0 {
                    return Err(Error::NegativeWeight {
                        side,
                        group: record.group.clone(),
                        weight,
                    });
                }
            }
        }
        for side in [Side::Portfolio, Side::Benchmark] {
            let residual = self.records.iter().map(|r| r.weight(side)).sum::<f64>() - 1.0;
            if residual.is_nan() || residual.abs() > WEIGHT_SUM_TOLERANCE {
                return Err(Error::WeightSum {
                    side,
                    fund: self.fund.clone(),
                    period: self.period.clone(),
                    residual,
                });
            }
        }
        Ok(())
    }

    pub fn benchmark(&self) -> &str {
        self.records.first().map_or("", |r| r.benchmark.as_str())
    }

    pub fn record(&self, group: &str) -> Option<&HoldingRecord> {
        self.records.iter().find(|r| r.group == group)
    }

    /// Records grouped by parent, parents in order of first appearance.
    pub fn segments(&self) -> Result<Vec<(&str, Vec<&HoldingRecord>)>> {
        let mut segments: Vec<(&str, Vec<&HoldingRecord>)> = Vec::new();
        for record in &self.records {
            let parent = record
                .parent_group
                .as_deref()
                .ok_or_else(|| Error::MissingParent(record.group.clone()))?;
            match segments.iter_mut().find(|(name, _)| *name == parent) {
                Some((_, members)) => members.push(record),
                None => segments.push((parent, vec![record])),
            }
        }
        Ok(segments)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Sector,
    Parent,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    SingleLevel,
    Micro,
    Macro,
}

/// Allocation and selection of one group; the total is always derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRow {
    pub level: Level,
    pub group: String,
    pub allocation: f64,
    pub selection: f64,
    pub fund: String,
    pub period: String,
}

impl AttributionRow {
    pub fn total(&self) -> f64 {
        self.allocation + self.selection
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionTable {
    pub mode: Mode,
    pub fund: String,
    pub period: String,
    pub rows: Vec<AttributionRow>,
    pub benchmark_total_return: f64,
    pub portfolio_total_return: f64,
}

impl AttributionTable {
    pub fn rows_at(&self, level: Level) -> impl Iterator<Item = &AttributionRow> {
        self.rows.iter().filter(move |r| r.level == level)
    }

    pub fn row(&self, level: Level, group: &str) -> Option<&AttributionRow> {
        self.rows
            .iter()
            .find(|r| r.level == level && r.group == group)
    }

    pub fn total_row(&self) -> &AttributionRow {
        self.rows
            .iter()
            .rev()
            .find(|r| r.level == Level::Total)
            .expect("every table ends with a total row")
    }

    pub fn excess_return(&self) -> f64 {
        self.portfolio_total_return - self.benchmark_total_return
    }
}

// ---------------------------------------------------------------------------
// Single formulas
// ---------------------------------------------------------------------------

pub fn total_return(slice: &ReportSlice, side: Side) -> Result<f64> {
    slice.validate()?;
    Ok(slice.records.iter().map(|r| r.contribution(side)).sum())
}

/// `b = Σ W_i b_i`
pub fn benchmark_total_return(slice: &ReportSlice) -> Result<f64> {
    total_return(slice, Side::Benchmark)
}

/// `r = Σ w_i r_i`
pub fn portfolio_total_return(slice: &ReportSlice) -> Result<f64> {
    total_return(slice, Side::Portfolio)
}

pub fn allocation_effect(
    portfolio_weight: f64,
    benchmark_weight: f64,
    group_benchmark_return: f64,
    benchmark_total_return: f64,
) -> f64 {
    (portfolio_weight - benchmark_weight) * (group_benchmark_return - benchmark_total_return)
}

pub fn selection_effect(
    portfolio_weight: f64,
    group_portfolio_return: f64,
    group_benchmark_return: f64,
) -> f64 {
    portfolio_weight * (group_portfolio_return - group_benchmark_return)
}

/// Weighted-average return of a segment on one side, `Σ w·r / Σ w`.
pub fn segment_return<'a, I>(records: I, side: Side) -> Result<f64>
where
    I: IntoIterator<Item = &'a HoldingRecord>,
{
    let mut weight = 0.0;
    let mut contribution = 0.0;
    let mut label = None;
    for record in records {
        label.get_or_insert_with(|| {
            record
                .parent_group
                .clone()
                .unwrap_or_else(|| record.group.clone())
        });
        weight += record.weight(side);
        contribution += record.contribution(side);
    }
    let parent = label.ok_or(Error::EmptySlice)?;
    if weight.is_nan() || weight <= 0.0 {
        return Err(Error::ZeroSegmentWeight { parent, side });
    }
    Ok(contribution / weight)
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

fn total_row(slice: &ReportSlice, allocation: f64, selection: f64) -> AttributionRow {
    AttributionRow {
        level: Level::Total,
        group: "Total".to_string(),
        allocation,
        selection,
        fund: slice.fund.clone(),
        period: slice.period.clone(),
    }
}

fn sector_rows(slice: &ReportSlice, benchmark_total: f64) -> Vec<AttributionRow> {
    slice
        .records
        .iter()
        .map(|r| AttributionRow {
            level: Level::Sector,
            group: r.group.clone(),
            allocation: allocation_effect(
                r.portfolio_weight,
                r.benchmark_weight,
                r.benchmark_return,
                benchmark_total,
            ),
            selection: selection_effect(r.portfolio_weight, r.portfolio_return, r.benchmark_return),
            fund: slice.fund.clone(),
            period: slice.period.clone(),
        })
        .collect()
}

fn sum_effects<'a>(rows: impl IntoIterator<Item = &'a AttributionRow>) -> (f64, f64) {
    rows.into_iter()
        .fold((0.0, 0.0), |(a, s), r| (a + r.allocation, s + r.selection))
}

/// One row per record in input order, then the total row.
pub fn compute_single_level(slice: &ReportSlice) -> Result<AttributionTable> {
    let benchmark_total = benchmark_total_return(slice)?;
    let portfolio_total = portfolio_total_return(slice)?;
    let mut rows = sector_rows(slice, benchmark_total);
    let (allocation, selection) = sum_effects(&rows);
    rows.push(total_row(slice, allocation, selection));
    Ok(AttributionTable {
        mode: Mode::SingleLevel,
        fund: slice.fund.clone(),
        period: slice.period.clone(),
        rows,
        benchmark_total_return: benchmark_total,
        portfolio_total_return: portfolio_total,
    })
}

/// Sector rows as in [`compute_single_level`], then one row per parent
/// holding the sum of its children, then the total row.
pub fn compute_micro(slice: &ReportSlice) -> Result<AttributionTable> {
    let segments = slice.segments()?;
    let mut table = compute_single_level(slice)?;
    let total = table
        .rows
        .pop()
        .expect("single-level table has a total row");

    let mut parent_rows = Vec::with_capacity(segments.len());
    for (parent, members) in &segments {
        let (allocation, selection) = sum_effects(
            table
                .rows
                .iter()
                .filter(|row| members.iter().any(|m| m.group == row.group)),
        );
        parent_rows.push(AttributionRow {
            level: Level::Parent,
            group: parent.to_string(),
            allocation,
            selection,
            fund: slice.fund.clone(),
            period: slice.period.clone(),
        });
    }
    table.rows.extend(parent_rows);
    table.rows.push(total);
    table.mode = Mode::Micro;
    Ok(table)
}

/// One row per parent computed from segment weights and weighted-average
/// segment returns, then the total row.
pub fn compute_macro(slice: &ReportSlice) -> Result<AttributionTable> {
    let segments = slice.segments()?;
    let benchmark_total = benchmark_total_return(slice)?;
    let portfolio_total = portfolio_total_return(slice)?;

    let mut rows = Vec::with_capacity(segments.len() + 1);
    for (parent, members) in &segments {
        let portfolio_weight: f64 = members.iter().map(|m| m.portfolio_weight).sum();
        let benchmark_weight: f64 = members.iter().map(|m| m.benchmark_weight).sum();
        let portfolio_return = segment_return(members.iter().copied(), Side::Portfolio)?;
        let benchmark_return = segment_return(members.iter().copied(), Side::Benchmark)?;
        rows.push(AttributionRow {
            level: Level::Parent,
            group: parent.to_string(),
            allocation: allocation_effect(
                portfolio_weight,
                benchmark_weight,
                benchmark_return,
                benchmark_total,
            ),
            selection: selection_effect(portfolio_weight, portfolio_return, benchmark_return),
            fund: slice.fund.clone(),
            period: slice.period.clone(),
        });
    }
    let (allocation, selection) = sum_effects(&rows);
    rows.push(total_row(slice, allocation, selection));
    Ok(AttributionTable {
        mode: Mode::Macro,
        fund: slice.fund.clone(),
        period: slice.period.clone(),
        rows,
        benchmark_total_return: benchmark_total,
        portfolio_total_return: portfolio_total,
    })
}

pub fn compute(slice: &ReportSlice, mode: Mode) -> Result<AttributionTable> {
    match mode {
        Mode::SingleLevel => compute_single_level(slice),
        Mode::Micro => compute_micro(slice),
        Mode::Macro => compute_macro(slice),
    }
}
