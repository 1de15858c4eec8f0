use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{check_header, check_length, finish, number, reader, writer, REPORT_PLACES};
use crate::attribution::{compute_single_level, HoldingRecord, Level, ReportSlice};
use crate::error::{Error, Result};
use crate::format::{fixed, within};

pub const OBJECTIVE_ONE_HEADER: [&str; 13] = [
    "GICS Sector",
    "Portfolio Weight",
    "Benchmark Weight",
    "Portfolio Return",
    "Benchmark Return",
    "Variation in Weight",
    "Variation in Return",
    "Allocation Effect",
    "Selection Effect",
    "Total Contribution",
    "Period",
    "Fund",
    "Benchmark",
];

pub const OBJECTIVE_TWO_HEADER: [&str; 9] = [
    "GICS Type",
    "GICS Sector",
    "Portfolio Weight",
    "Benchmark Weight",
    "Portfolio Return",
    "Benchmark Return",
    "Period",
    "Fund",
    "Benchmark",
];

/// Tolerance on the variation columns against their inputs.
const DERIVED_TOLERANCE: f64 = 1e-9;

/// Effect columns of a full attribution report, as stated in the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportedEffects {
    pub allocation: f64,
    pub selection: f64,
    pub total: f64,
}

/// A slice together with the effect columns of its report, one entry per
/// record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveOneSlice {
    pub slice: ReportSlice,
    pub effects: Vec<ReportedEffects>,
}

impl ObjectiveOneSlice {
    /// Fills the effect columns from the single-level engine.
    pub fn compute(slice: ReportSlice) -> Result<Self> {
        let table = compute_single_level(&slice)?;
        let effects = table
            .rows_at(Level::Sector)
            .map(|row| ReportedEffects {
                allocation: row.allocation,
                selection: row.selection,
                total: row.total(),
            })
            .collect();
        Ok(ObjectiveOneSlice { slice, effects })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum DerivedCheck {
    Reject,
    Warn,
}

fn group_into_slices<T>(rows: Vec<(HoldingRecord, T)>) -> Result<Vec<(ReportSlice, Vec<T>)>> {
    let mut groups: Vec<(ReportSlice, Vec<T>)> = Vec::new();
    for (record, extra) in rows {
        let index = groups
            .iter()
            .position(|(s, _)| s.fund == record.fund && s.period == record.period);
        match index {
            Some(i) => {
                groups[i].0.records.push(record);
                groups[i].1.push(extra);
            }
            None => groups.push((
                ReportSlice {
                    fund: record.fund.clone(),
                    period: record.period.clone(),
                    records: vec![record],
                },
                vec![extra],
            )),
        }
    }
    for (slice, _) in &groups {
        slice.validate()?;
    }
    Ok(groups)
}

fn parse_one<R: Read>(
    input: R,
    check: DerivedCheck,
) -> Result<(Vec<ObjectiveOneSlice>, Vec<String>)> {
    let header = &OBJECTIVE_ONE_HEADER;
    let mut records = reader(input).into_records();
    let first = records.next().ok_or(Error::EmptyInput)??;
    check_header(&first, header)?;

    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        let row = i + 2;
        check_length(&record, row, header.len())?;
        let n = |index| number(&record, row, index, header);
        let holding = HoldingRecord {
            parent_group: None,
            group: record[0].to_string(),
            portfolio_weight: n(1)?,
            benchmark_weight: n(2)?,
            portfolio_return: n(3)?,
            benchmark_return: n(4)?,
            period: record[10].to_string(),
            fund: record[11].to_string(),
            benchmark: record[12].to_string(),
        };
        for (index, derived) in [
            (5, holding.portfolio_weight - holding.benchmark_weight),
            (6, holding.portfolio_return - holding.benchmark_return),
        ] {
            let stated = n(index)?;
            if !within(stated, derived, DERIVED_TOLERANCE) {
                let err = Error::DerivedColumn {
                    row,
                    column: header[index].to_string(),
                    stated,
                    derived,
                };
                match check {
                    DerivedCheck::Reject => return Err(err),
                    DerivedCheck::Warn => warnings.push(err.to_string()),
                }
            }
        }
        let effects = ReportedEffects {
            allocation: n(7)?,
            selection: n(8)?,
            total: n(9)?,
        };
        rows.push((holding, effects));
    }
    if rows.is_empty() {
        log::warn!("attribution report has a header but no rows");
    }
    let slices = group_into_slices(rows)?
        .into_iter()
        .map(|(slice, effects)| ObjectiveOneSlice { slice, effects })
        .collect();
    Ok((slices, warnings))
}

/// Reads a full attribution report, grouped by (fund, period) in order of
/// first appearance. Variation columns inconsistent with their inputs are
/// rejected.
pub fn parse_objective_one<R: Read>(input: R) -> Result<Vec<ObjectiveOneSlice>> {
    parse_one(input, DerivedCheck::Reject).map(|(slices, _)| slices)
}

/// As [`parse_objective_one`], but inconsistent variation cells are
/// returned as warnings instead of failing the parse.
pub fn parse_objective_one_lenient<R: Read>(
    input: R,
) -> Result<(Vec<ObjectiveOneSlice>, Vec<String>)> {
    parse_one(input, DerivedCheck::Warn)
}

/// Reads a weights-and-returns report with parent groups.
pub fn parse_objective_two<R: Read>(input: R) -> Result<Vec<ReportSlice>> {
    let header = &OBJECTIVE_TWO_HEADER;
    let mut records = reader(input).into_records();
    let first = records.next().ok_or(Error::EmptyInput)??;
    check_header(&first, header)?;

    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        let row = i + 2;
        check_length(&record, row, header.len())?;
        if record[0].is_empty() {
            return Err(Error::Cell {
                row,
                column: header[0].to_string(),
                value: String::new(),
            });
        }
        let n = |index| number(&record, row, index, header);
        rows.push((
            HoldingRecord {
                parent_group: Some(record[0].to_string()),
                group: record[1].to_string(),
                portfolio_weight: n(2)?,
                benchmark_weight: n(3)?,
                portfolio_return: n(4)?,
                benchmark_return: n(5)?,
                period: record[6].to_string(),
                fund: record[7].to_string(),
                benchmark: record[8].to_string(),
            },
            (),
        ));
    }
    if rows.is_empty() {
        log::warn!("weights-and-returns report has a header but no rows");
    }
    Ok(group_into_slices(rows)?
        .into_iter()
        .map(|(slice, _)| slice)
        .collect())
}

/// Reads either report schema, chosen by the first header cell. Variation
/// mismatches in a full report are logged, not fatal.
pub fn parse_any_report<R: Read>(mut input: R) -> Result<Vec<ReportSlice>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    if text.trim_start().starts_with(OBJECTIVE_TWO_HEADER[0]) {
        parse_objective_two(text.as_bytes())
    } else {
        let (slices, warnings) = parse_objective_one_lenient(text.as_bytes())?;
        for warning in warnings {
            log::warn!("{warning}");
        }
        Ok(slices.into_iter().map(|s| s.slice).collect())
    }
}

pub fn emit_objective_one(reports: &[ObjectiveOneSlice]) -> Vec<u8> {
    let mut out = writer();
    out.write_record(OBJECTIVE_ONE_HEADER)
        .expect("in-memory write");
    let n = |v: f64| fixed(v, REPORT_PLACES);
    for report in reports {
        for (r, e) in report.slice.records.iter().zip(&report.effects) {
            out.write_record([
                r.group.clone(),
                n(r.portfolio_weight),
                n(r.benchmark_weight),
                n(r.portfolio_return),
                n(r.benchmark_return),
                n(r.portfolio_weight - r.benchmark_weight),
                n(r.portfolio_return - r.benchmark_return),
                n(e.allocation),
                n(e.selection),
                n(e.total),
                r.period.clone(),
                r.fund.clone(),
                r.benchmark.clone(),
            ])
            .expect("in-memory write");
        }
    }
    finish(out)
}

pub fn emit_objective_two(slices: &[ReportSlice]) -> Vec<u8> {
    let mut out = writer();
    out.write_record(OBJECTIVE_TWO_HEADER)
        .expect("in-memory write");
    let n = |v: f64| fixed(v, REPORT_PLACES);
    for slice in slices {
        for r in &slice.records {
            out.write_record([
                r.parent_group.clone().unwrap_or_default(),
                r.group.clone(),
                n(r.portfolio_weight),
                n(r.benchmark_weight),
                n(r.portfolio_return),
                n(r.benchmark_return),
                r.period.clone(),
                r.fund.clone(),
                r.benchmark.clone(),
            ])
            .expect("in-memory write");
        }
    }
    finish(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OBJ1: &str = "GICS Sector,Portfolio Weight,Benchmark Weight,Portfolio Return,Benchmark Return,Variation in Weight,Variation in Return,Allocation Effect,Selection Effect,Total Contribution,Period,Fund,Benchmark
A,0.6000,0.5000,0.0100,0.0200,0.1000,-0.0100,0.0005,-0.0060,-0.0055,Q1,F,B
B,0.4000,0.5000,0.0300,0.0100,-0.1000,0.0200,0.0005,0.0080,0.0085,Q1,F,B
";

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(
            parse_objective_one("".as_bytes()),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            parse_objective_two("".as_bytes()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn header_only_gives_no_slices() {
        let text = OBJECTIVE_TWO_HEADER.join(",") + "\n";
        assert!(parse_objective_two(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn header_mismatch_names_the_column() {
        let text = OBJ1.replacen("Benchmark Weight", "Bench Weight", 1);
        match parse_objective_one(text.as_bytes()) {
            Err(Error::Header {
                index,
                expected,
                found,
            }) => {
                assert_eq!(index, 2);
                assert_eq!(expected, "Benchmark Weight");
                assert_eq!(found, "Bench Weight");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reordered_or_dropped_columns_are_rejected() {
        let swapped = OBJ1.replacen(
            "Portfolio Return,Benchmark Return",
            "Benchmark Return,Portfolio Return",
            1,
        );
        assert!(matches!(
            parse_objective_one(swapped.as_bytes()),
            Err(Error::Header { index: 3, .. })
        ));
        let lowered = OBJ1.replacen("GICS Sector", "gics sector", 1);
        assert!(matches!(
            parse_objective_one(lowered.as_bytes()),
            Err(Error::Header { index: 0, .. })
        ));
        let extra = OBJ1.replacen(",Benchmark\n", ",Benchmark,Extra\n", 1);
        assert!(matches!(
            parse_objective_one(extra.as_bytes()),
            Err(Error::Header { index: 13, .. })
        ));
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let text = OBJ1.replacen("0.6000", "abc", 1);
        match parse_objective_one(text.as_bytes()) {
            Err(Error::Cell { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "Portfolio Weight");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_variation_is_rejected() {
        let text = OBJ1.replacen(",0.1000,", ",0.1100,", 1);
        let err = parse_objective_one(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, Error::DerivedColumn { row: 2, ref column, .. } if column == "Variation in Weight")
        );
        let (slices, warnings) = parse_objective_one_lenient(text.as_bytes()).unwrap();
        assert_eq!(slices.len(), 1);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn weight_sum_violation_is_rejected() {
        let text = OBJ1
            .replacen("A,0.6000,0.5000", "A,0.6000,0.4000", 1)
            .replacen(",0.1000,-0.0100", ",0.2000,-0.0100", 1);
        assert!(matches!(
            parse_objective_one(text.as_bytes()),
            Err(Error::WeightSum { .. })
        ));
    }

    #[test]
    fn emit_then_parse_round_trips() {
        let slices = parse_objective_one(OBJ1.as_bytes()).unwrap();
        let bytes = emit_objective_one(&slices);
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), OBJ1);
        assert_eq!(parse_objective_one(bytes.as_slice()).unwrap(), slices);
    }

    #[test]
    fn empty_emit_is_header_only() {
        let text = String::from_utf8(emit_objective_two(&[])).unwrap();
        assert_eq!(text, OBJECTIVE_TWO_HEADER.join(",") + "\n");
        assert!(parse_objective_two(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn any_report_sniffs_schema() {
        let slices = parse_any_report(OBJ1.as_bytes()).unwrap();
        assert_eq!(slices[0].records.len(), 2);
        assert!(slices[0].records[0].parent_group.is_none());
    }
}
