mod common;

use brinson_bench::attribution::{compute_macro, compute_micro};
use brinson_bench::io::{
    emit_macro_results, emit_micro_results, macro_records, micro_records, parse_macro_results,
    parse_micro_results, parse_objective_two,
};
use brinson_bench::{Level, ReportSlice};
use common::read_fixture;

const TOL: f64 = 5e-5;

fn slice() -> ReportSlice {
    let mut slices =
        parse_objective_two(read_fixture("multi_manager_objective2.csv").as_bytes()).unwrap();
    assert_eq!(slices.len(), 1);
    slices.remove(0)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < TOL
}

#[test]
fn micro_effects_per_manager() {
    let table = compute_micro(&slice()).unwrap();
    for (group, allocation, selection) in [
        ("Small-cap value equities", -0.000775, 0.00174),
        ("Large-cap value equities", -0.0002, 0.004582),
        ("Large-cap growth equities", 0.000315, 0.00418),
    ] {
        let row = table.row(Level::Sector, group).unwrap();
        assert!(close(row.allocation, allocation), "{group}");
        assert!(close(row.selection, selection), "{group}");
    }
    let total = table.total_row();
    assert!(close(total.allocation, -0.00066));
    assert!(close(total.selection, 0.010502));
    assert!(close(total.total(), 0.0098));
}

#[test]
fn macro_effects_per_segment() {
    let table = compute_macro(&slice()).unwrap();
    for (group, allocation, selection) in [
        ("Value Portfolio Manager", 0.000105, 0.005242),
        ("Growth Portfolio Manager", 0.000315, 0.00418),
    ] {
        let row = table.row(Level::Parent, group).unwrap();
        assert!(close(row.allocation, allocation), "{group}");
        assert!(close(row.selection, selection), "{group}");
    }
    assert!(close(table.total_row().total(), 0.0098));
}

#[test]
fn micro_and_macro_agree_on_the_total() {
    let s = slice();
    let micro = compute_micro(&s).unwrap().total_row().total();
    let macro_ = compute_macro(&s).unwrap().total_row().total();
    assert!((micro - macro_).abs() < 1e-12);
}

#[test]
fn result_files_round_trip() {
    let s = slice();
    let micro = micro_records(&[compute_micro(&s).unwrap()]);
    let text = String::from_utf8(emit_micro_results(&micro)).unwrap();
    assert!(text.contains("Small-cap value equities,-0.000775,0.001740,0.000965,"));
    let parsed = parse_micro_results(&text).unwrap();
    assert_eq!(parsed.len(), micro.len());
    for (p, m) in parsed.iter().zip(&micro) {
        assert_eq!((p.level, &p.group), (m.level, &m.group));
        assert!((p.allocation - m.allocation).abs() <= 5e-7);
    }

    let macro_ = macro_records(&[compute_macro(&s).unwrap()]);
    let text = String::from_utf8(emit_macro_results(&macro_)).unwrap();
    assert_eq!(parse_macro_results(&text).unwrap().len(), 4);
}
