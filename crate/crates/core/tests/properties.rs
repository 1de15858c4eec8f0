use brinson_bench::attribution::{compute, compute_micro};
use brinson_bench::eval::{
    cells_from_micro, cosine_similarity, keyword_accuracy, numeric_table_accuracy, rouge_f1,
    RougeVariant, TABLE_TOLERANCE,
};
use brinson_bench::factors::{explain_slice, ground_truth_factors};
use brinson_bench::io::{
    emit_embeddings, emit_factor_csv, emit_micro_results, emit_objective_one, emit_objective_two,
    emit_text_records, extract_sentence_factors, micro_records, parse_embeddings,
    parse_micro_results, parse_objective_one, parse_objective_two, parse_text_records,
    split_agent_response, split_agent_response_bytes, EmbeddingTable, ObjectiveOneSlice,
    ResponseStatus, TextRecord, CSV_MARKER,
};
use brinson_bench::qa::{
    emit_question_bank, generate_questions, parse_question_bank, AnswerKey, QaKind, OPTION_LETTERS,
    OPTION_PLACES, QCALC_TOLERANCE,
};
use brinson_bench::synth::round_weights;
use brinson_bench::{EffectSign, EffectType, HoldingRecord, Level, Mode, ReportSlice};
use proptest::collection::vec;
use proptest::prelude::*;

const MODES: [Mode; 3] = [Mode::SingleLevel, Mode::Micro, Mode::Macro];

fn build(
    portfolio: Vec<f64>,
    benchmark: Vec<f64>,
    portfolio_returns: Vec<f64>,
    benchmark_returns: Vec<f64>,
    parents: usize,
) -> ReportSlice {
    let records = (0..portfolio.len())
        .map(|i| HoldingRecord {
            parent_group: Some(format!("Type {}", i % parents)),
            group: format!("Sector {i}"),
            portfolio_weight: portfolio[i],
            benchmark_weight: benchmark[i],
            portfolio_return: portfolio_returns[i],
            benchmark_return: benchmark_returns[i],
            period: "1/1/2023 to 3/31/2023".into(),
            fund: "Portfolio Test".into(),
            benchmark: "Benchmark Test".into(),
        })
        .collect();
    ReportSlice::new(records).expect("strategy yields valid slices")
}

fn normalized(raw: &[f64]) -> Vec<f64> {
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|w| w / sum).collect()
}

/// Arbitrary valid slices; every parent holds weight on both sides.
fn slices() -> impl Strategy<Value = ReportSlice> {
    (2usize..=12)
        .prop_flat_map(|n| {
            (
                vec(0.01f64..1.0, n),
                vec(0.01f64..1.0, n),
                vec(-0.3f64..0.3, n),
                vec(-0.3f64..0.3, n),
                1usize..=3,
            )
        })
        .prop_map(|(w, bw, r, b, parents)| build(normalized(&w), normalized(&bw), r, b, parents))
}

/// Slices whose inputs sit on the 4-decimal grid of report files.
fn report_slices() -> impl Strategy<Value = ReportSlice> {
    (2usize..=12)
        .prop_flat_map(|n| {
            (
                vec(0.01f64..1.0, n),
                vec(0.01f64..1.0, n),
                vec(-3000i32..3000, n),
                vec(-3000i32..3000, n),
                1usize..=3,
            )
        })
        .prop_map(|(w, bw, r, b, parents)| {
            let grid = |v: Vec<i32>| v.into_iter().map(|x| x as f64 / 10_000.0).collect();
            build(
                round_weights(&normalized(&w)),
                round_weights(&normalized(&bw)),
                grid(r),
                grid(b),
                parents,
            )
        })
}

fn words() -> impl Strategy<Value = String> {
    vec("[a-e]{1,2}", 0..12).prop_map(|w| w.join(" "))
}

fn field() -> impl Strategy<Value = String> {
    "[ -~\n]{0,30}".prop_map(|s| s.trim().to_string())
}

proptest! {
    #[test]
    fn effects_sum_to_excess_return(slice in slices()) {
        for mode in MODES {
            let table = compute(&slice, mode).unwrap();
            let level = if mode == Mode::Macro { Level::Parent } else { Level::Sector };
            let sum: f64 = table.rows_at(level).map(|r| r.total()).sum();
            prop_assert!((sum - table.excess_return()).abs() < 1e-12);
            prop_assert!((table.total_row().total() - table.excess_return()).abs() < 1e-12);
        }
    }

    #[test]
    fn micro_parents_are_exact_child_sums(slice in slices()) {
        let table = compute_micro(&slice).unwrap();
        for parent in table.rows_at(Level::Parent) {
            let (a, s) = slice
                .records
                .iter()
                .filter(|r| r.parent_group.as_deref() == Some(parent.group.as_str()))
                .map(|r| table.row(Level::Sector, &r.group).unwrap())
                .fold((0.0, 0.0), |(a, s), r| (a + r.allocation, s + r.selection));
            prop_assert_eq!(parent.allocation, a);
            prop_assert_eq!(parent.selection, s);
        }
    }

    #[test]
    fn effects_scale_with_returns(slice in slices(), k in 0.1f64..10.0) {
        let mut scaled = slice.clone();
        for r in &mut scaled.records {
            r.portfolio_return *= k;
            r.benchmark_return *= k;
        }
        for mode in MODES {
            let base = compute(&slice, mode).unwrap();
            let other = compute(&scaled, mode).unwrap();
            for (a, b) in base.rows.iter().zip(&other.rows) {
                prop_assert!((a.allocation * k - b.allocation).abs() < 1e-12 * k.max(1.0));
                prop_assert!((a.selection * k - b.selection).abs() < 1e-12 * k.max(1.0));
            }
        }
    }

    #[test]
    fn weights_and_returns_report_round_trips(slice in report_slices()) {
        let bytes = emit_objective_two(std::slice::from_ref(&slice));
        let parsed = parse_objective_two(bytes.as_slice()).unwrap();
        prop_assert_eq!(parsed, vec![slice]);
    }

    #[test]
    fn full_report_round_trips_strictly(slice in report_slices()) {
        let report = ObjectiveOneSlice::compute(slice).unwrap();
        let bytes = emit_objective_one(std::slice::from_ref(&report));
        let parsed = parse_objective_one(bytes.as_slice()).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        for (p, r) in parsed[0].slice.records.iter().zip(&report.slice.records) {
            prop_assert_eq!(&p.group, &r.group);
            prop_assert_eq!(p.portfolio_weight, r.portfolio_weight);
            prop_assert_eq!(p.benchmark_return, r.benchmark_return);
        }
        for (p, r) in parsed[0].effects.iter().zip(&report.effects) {
            prop_assert!((p.allocation - r.allocation).abs() <= 5e-5 + 1e-12);
            prop_assert!((p.selection - r.selection).abs() <= 5e-5 + 1e-12);
            prop_assert!((p.total - r.total).abs() <= 5e-5 + 1e-12);
        }
    }

    #[test]
    fn micro_result_file_round_trips(slice in slices()) {
        let records = micro_records(&[compute_micro(&slice).unwrap()]);
        let text = String::from_utf8(emit_micro_results(&records)).unwrap();
        let parsed = parse_micro_results(&text).unwrap();
        prop_assert_eq!(parsed.len(), records.len());
        for (p, r) in parsed.iter().zip(&records) {
            prop_assert_eq!((p.level, &p.group, &p.fund), (r.level, &r.group, &r.fund));
            prop_assert!((p.allocation - r.allocation).abs() <= 5e-7 + 1e-12);
            prop_assert!((p.selection - r.selection).abs() <= 5e-7 + 1e-12);
        }
    }

    #[test]
    fn factor_table_round_trips(slice in slices()) {
        let truth = ground_truth_factors(&slice).unwrap();
        let text = format!("{CSV_MARKER}\n{}", String::from_utf8(emit_factor_csv(&truth)).unwrap());
        let response = split_agent_response(&text);
        prop_assert_eq!(response.status, ResponseStatus::Parsed);
        prop_assert_eq!(response.dropped_rows, 0);
        prop_assert_eq!(response.factor_csv.len(), truth.len());
        for (p, t) in response.factor_csv.iter().zip(&truth) {
            prop_assert_eq!(&p.sector, &t.sector);
            prop_assert_eq!(p.effect_type, t.effect_type);
            prop_assert_eq!(p.weight_stance, t.weight_stance);
            prop_assert_eq!(p.performance_stance, t.performance_stance);
            prop_assert!((p.value - t.value).abs() <= 5e-5 + 1e-12);
        }
    }

    #[test]
    fn text_records_round_trip(
        rows in vec((field(), field(), field(), any::<bool>()), 0..6),
    ) {
        let records: Vec<TextRecord> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (fund, sector, text, alloc))| TextRecord {
                id: format!("t{i}"),
                family: "few_1".into(),
                fund,
                period: "P".into(),
                sector,
                effect: if alloc { EffectType::Allocation } else { EffectType::Selection },
                text,
            })
            .collect();
        let bytes = emit_text_records(&records);
        prop_assert_eq!(parse_text_records(std::str::from_utf8(&bytes).unwrap()).unwrap(), records);
    }

    #[test]
    fn embeddings_round_trip(vectors in vec(vec(-1e6f64..1e6, 3), 1..8)) {
        let mut table = EmbeddingTable::new();
        for (i, v) in vectors.into_iter().enumerate() {
            table.insert(format!("id{i}"), v).unwrap();
        }
        let text = String::from_utf8(emit_embeddings(&table)).unwrap();
        prop_assert_eq!(parse_embeddings(&text).unwrap(), table);
    }

    #[test]
    fn response_splitting_is_total(raw in vec(any::<u8>(), 0..400)) {
        let response = split_agent_response_bytes(&raw);
        prop_assert_eq!(response.status == ResponseStatus::Parsed, response.raw_text.contains(CSV_MARKER));
    }

    #[test]
    fn response_splitting_is_total_near_the_marker(
        head in "[-a-z ,'\n]{0,40}",
        tail in "[-a-zA-Z0-9 ,.'\"`\n]{0,120}",
    ) {
        let response = split_agent_response(&format!("{head}{CSV_MARKER}{tail}"));
        prop_assert_eq!(response.status, ResponseStatus::Parsed);
    }

    #[test]
    fn sentences_recover_their_keywords(slice in slices()) {
        for e in explain_slice(&slice).unwrap() {
            for (sentence, truth) in e.sentences.iter().zip([&e.allocation, &e.selection]) {
                let got = extract_sentence_factors(sentence).unwrap();
                prop_assert_eq!(&got.sector, &truth.sector);
                prop_assert_eq!(got.effect_type, truth.effect_type);
                prop_assert_eq!(got.weight_stance, truth.weight_stance);
                prop_assert_eq!(got.performance_stance, truth.performance_stance);
                prop_assert_eq!(got.sign, truth.sign);
                prop_assert!((got.value - truth.value).abs() <= 5e-5 + 1e-12);
            }
        }
    }

    #[test]
    fn rouge_is_symmetric_and_bounded(a in words(), b in words()) {
        for v in RougeVariant::ALL {
            let ab = rouge_f1(&a, &b, v);
            prop_assert_eq!(ab, rouge_f1(&b, &a, v));
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }

    #[test]
    fn longer_reference_prefix_never_scores_lower(reference in vec("[a-e]{1,2}", 1..12)) {
        let full = reference.join(" ");
        for v in [RougeVariant::R1, RougeVariant::RL] {
            let mut last = 0.0;
            for k in 1..=reference.len() {
                let score = rouge_f1(&reference[..k].join(" "), &full, v);
                prop_assert!(score >= last);
                last = score;
            }
            prop_assert_eq!(last, 1.0);
        }
    }

    #[test]
    fn cosine_ignores_positive_scale(
        a in vec(-10.0f64..10.0, 4),
        b in vec(-10.0f64..10.0, 4),
        k in 0.01f64..100.0,
    ) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
        let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
        let base = cosine_similarity(&a, &b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&base));
        prop_assert!((cosine_similarity(&scaled, &b).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn truth_grades_itself_perfectly(slice in slices()) {
        let truth = ground_truth_factors(&slice).unwrap();
        let card = keyword_accuracy(&truth, &truth).unwrap();
        prop_assert_eq!(card.earned(), 6 * slice.records.len());
        prop_assert_eq!(card.possible(), 6 * slice.records.len());
    }

    #[test]
    fn table_score_ignores_row_order(
        (slice, order, corrupt) in slices().prop_flat_map(|s| {
            let cells = 2 * (s.records.len() + 3);
            (Just(s), Just((0..cells).collect::<Vec<_>>()).prop_shuffle(), vec(any::<bool>(), cells))
        }),
    ) {
        let table = compute_micro(&slice).unwrap();
        let mut cells = cells_from_micro(&micro_records(std::slice::from_ref(&table)));
        for (cell, bad) in cells.iter_mut().zip(&corrupt) {
            if *bad {
                cell.value += 1.0;
            }
        }
        let shuffled: Vec<_> = order
            .iter()
            .filter(|&&i| i < cells.len())
            .map(|&i| cells[i].clone())
            .collect();
        let truth = std::slice::from_ref(&table);
        let a = numeric_table_accuracy(&cells, truth, TABLE_TOLERANCE);
        let b = numeric_table_accuracy(&shuffled, truth, TABLE_TOLERANCE);
        prop_assert_eq!(a.tally(), b.tally());
        prop_assert_eq!(a.possible(), cells.len());
    }

    #[test]
    fn question_keys_are_sound(slice in slices(), seed in any::<u64>()) {
        let n = 2 * slice.records.len();
        let corpus = std::slice::from_ref(&slice);
        let table = compute(&slice, Mode::SingleLevel).unwrap();
        for item in generate_questions(corpus, n, seed, false).unwrap() {
            let truth = item.effect.value_in(&table, &item.sector).unwrap();
            match (item.kind, item.key) {
                (QaKind::QAMC, AnswerKey::Letter(letter)) => {
                    prop_assert_eq!(item.options.len(), OPTION_LETTERS.len());
                    let at = OPTION_LETTERS.iter().position(|&l| l == letter).unwrap();
                    prop_assert!((item.options[at] - truth).abs() <= 0.5e-5 + 1e-12);
                    for (i, x) in item.options.iter().enumerate() {
                        let text = format!("{x:.prec$}", prec = OPTION_PLACES);
                        prop_assert_eq!(text.parse::<f64>().unwrap(), *x);
                        for y in &item.options[i + 1..] {
                            prop_assert!((x - y).abs() > 2.0 * QCALC_TOLERANCE);
                        }
                    }
                }
                (QaKind::QCalc, AnswerKey::Value(v)) => prop_assert_eq!(v, truth),
                other => prop_assert!(false, "kind and key disagree: {:?}", other),
            }
        }
    }

    #[test]
    fn question_bank_is_deterministic_and_round_trips(slice in slices(), seed in any::<u64>()) {
        let corpus = std::slice::from_ref(&slice);
        let a = generate_questions(corpus, 4, seed, true).unwrap();
        let b = generate_questions(corpus, 4, seed, true).unwrap();
        prop_assert_eq!(&a, &b);
        let text = String::from_utf8(emit_question_bank(&a)).unwrap();
        prop_assert_eq!(parse_question_bank(&text).unwrap(), a);
    }
}

#[test]
fn zero_valued_sentence_keeps_its_sign_word() {
    let slice = build(
        vec![0.5, 0.5],
        vec![0.5, 0.5],
        vec![0.01, 0.02],
        vec![0.01, 0.02],
        1,
    );
    for e in explain_slice(&slice).unwrap() {
        let got = extract_sentence_factors(&e.sentences[1]).unwrap();
        assert_eq!(got.sign, EffectSign::Zero);
    }
}
