//! `brinson-bench`: attribution, synthetic data, question banks, an oracle
//! respondent and grading, as subcommands.
//!
//! Scores never change the exit status; only structural failures (bad
//! input, IO errors) exit nonzero. Set `RUST_LOG` for more output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use brinson_bench::attribution::{compute, compute_single_level, Level, Mode, ReportSlice};
use brinson_bench::eval::{
    emit_keyword_scores, emit_qa_scores, emit_semantic_scores, emit_table_scores, percent,
    semantic_report, ScoreCard, KEYWORD_VALUE_TOLERANCE, TABLE_TOLERANCE,
};
use brinson_bench::io::{
    emit_macro_results, emit_micro_results, emit_objective_one, emit_objective_two,
    emit_text_records, macro_records, micro_records, parse_any_report, parse_embeddings,
    parse_results, split_agent_response_bytes, write_atomic, AgentResponse, ObjectiveOneSlice,
    ResultFile,
};
use brinson_bench::pipeline::{
    candidate_texts, grade_factor_responses, grade_table_responses, oracle_factor_responses,
    oracle_qa_submission, oracle_table_responses, reference_texts, ResponseFile,
};
use brinson_bench::qa::{
    emit_public_bank, emit_question_bank, emit_submission, generate_questions, grade,
    parse_public_bank, parse_question_bank, parse_submission, QCALC_TOLERANCE,
};
use brinson_bench::synth::default_corpus;

mod config;

use config::Config;

const DEFAULT_SEED: u64 = 2022;
const DEFAULT_QUESTIONS: usize = 140;
const DEFAULT_FAMILY: &str = "candidate";

#[derive(Parser, Debug)]
#[command(
    name = "brinson-bench",
    version,
    about = "Brinson-Fachler attribution benchmark"
)]
struct Cli {
    /// TOML file with defaults (seed, questions, allow_duplicates, tolerance, family)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Single,
    Micro,
    Macro,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Single => Mode::SingleLevel,
            ModeArg::Micro => Mode::Micro,
            ModeArg::Macro => Mode::Macro,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SortArg {
    /// Keep input order
    Input,
    /// Largest total contribution first
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GradeKind {
    Factors,
    Tables,
    Qa,
    Semantic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Task {
    Factors,
    Micro,
    Macro,
    Qa,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute attribution effects for a report
    Compute {
        /// Report CSV (either schema)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "single")]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
        /// Row order of the single-level report
        #[arg(long, value_enum, default_value = "input")]
        sort: SortArg,
    },
    /// Generate the synthetic corpus (objective1.csv and objective2.csv)
    GenData {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Generate a question bank from a corpus
    GenQa {
        /// Corpus file, or a directory holding objective2.csv or report CSVs
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Questions without keys
        #[arg(long)]
        out: PathBuf,
        /// Questions with keys
        #[arg(long)]
        keys: PathBuf,
        /// Reuse (sector, fund, period, effect) tuples when the corpus is small
        #[arg(long)]
        allow_duplicates: bool,
    },
    /// Grade predictions against the truth
    Grade {
        #[arg(long, value_enum)]
        kind: GradeKind,
        /// Response file or directory; a submission CSV for qa
        #[arg(long)]
        pred: PathBuf,
        /// Corpus for factors, tables and semantic; the keyed bank for qa
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        /// Truth mode for tables (inferred from the predictions when absent)
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Score CSV destination (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Embedding sidecar for semantic grading
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Prompt family of the candidate texts
        #[arg(long)]
        family: Option<String>,
        /// Also write the candidate and reference texts (semantic)
        #[arg(long)]
        texts_out: Option<PathBuf>,
    },
    /// Write the responses a perfect agent would give
    OracleRespond {
        /// Corpus file or directory
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        task: Task,
        /// Question bank (qa only)
        #[arg(long)]
        questions: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Compute {
            input,
            mode,
            out,
            sort,
        } => run_compute(&input, mode.into(), &out, sort),
        Command::GenData { seed, out_dir } => {
            run_gen_data(seed.or(config.seed).unwrap_or(DEFAULT_SEED), &out_dir)
        }
        Command::GenQa {
            corpus,
            n,
            seed,
            out,
            keys,
            allow_duplicates,
        } => run_gen_qa(
            &corpus,
            n.or(config.questions).unwrap_or(DEFAULT_QUESTIONS),
            seed.or(config.seed).unwrap_or(DEFAULT_SEED),
            allow_duplicates || config.allow_duplicates.unwrap_or(false),
            &out,
            &keys,
        ),
        Command::Grade {
            kind,
            pred,
            truth,
            tol,
            mode,
            out,
            embeddings,
            family,
            texts_out,
        } => {
            let tol = tol.or(config.tolerance);
            let family = family
                .or(config.family)
                .unwrap_or_else(|| DEFAULT_FAMILY.to_string());
            let scores = match kind {
                GradeKind::Factors => grade_factors(&pred, &truth, tol)?,
                GradeKind::Tables => grade_tables(&pred, &truth, mode, tol)?,
                GradeKind::Qa => grade_qa(&pred, &truth, tol)?,
                GradeKind::Semantic => grade_semantic(
                    &pred,
                    &truth,
                    embeddings.as_deref(),
                    &family,
                    texts_out.as_deref(),
                )?,
            };
            match out {
                Some(path) => write_file(&path, &scores),
                None => {
                    print!("{}", String::from_utf8_lossy(&scores));
                    Ok(())
                }
            }
        }
        Command::OracleRespond {
            input,
            task,
            questions,
            out_dir,
        } => run_oracle(&input, task, questions.as_deref(), &out_dir),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_atomic(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_report(path: &Path) -> Result<Vec<ReportSlice>> {
    let text = read_text(path)?;
    parse_any_report(text.as_bytes()).with_context(|| format!("parsing {}", path.display()))
}

/// A corpus file, or a directory: its `objective2.csv` when present,
/// otherwise every `.csv` in name order.
fn load_corpus(path: &Path) -> Result<Vec<ReportSlice>> {
    if !path.is_dir() {
        return read_report(path);
    }
    let preferred = path.join("objective2.csv");
    if preferred.is_file() {
        return read_report(&preferred);
    }
    let mut corpus = Vec::new();
    for file in files_with_extension(path, "csv")? {
        corpus.extend(read_report(&file)?);
    }
    if corpus.is_empty() {
        bail!("no report slices found in {}", path.display());
    }
    Ok(corpus)
}

fn files_with_extension(dir: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == extension) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Files of `pred`: the file itself, or every file with `extension` in the
/// directory.
fn prediction_files(pred: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    if pred.is_dir() {
        files_with_extension(pred, extension)
    } else if pred.is_file() {
        Ok(vec![pred.to_path_buf()])
    } else {
        bail!("{} does not exist", pred.display())
    }
}

fn load_responses(pred: &Path) -> Result<Vec<(String, AgentResponse)>> {
    prediction_files(pred, "txt")?
        .into_iter()
        .map(|path| {
            let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, split_agent_response_bytes(&bytes)))
        })
        .collect()
}

fn write_responses(dir: &Path, files: &[ResponseFile]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for f in files {
        write_file(&dir.join(&f.name), f.contents.as_bytes())?;
    }
    log::info!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

fn run_compute(input: &Path, mode: Mode, out: &Path, sort: SortArg) -> Result<()> {
    let slices = read_report(input)?;
    if slices.is_empty() {
        bail!("{} holds no data rows", input.display());
    }
    let bytes = match mode {
        Mode::SingleLevel => {
            let mut reports = Vec::with_capacity(slices.len());
            for mut slice in slices {
                if sort == SortArg::Total {
                    let table = compute_single_level(&slice)?;
                    let total = |g: &str| table.row(Level::Sector, g).map_or(0.0, |r| r.total());
                    slice
                        .records
                        .sort_by(|a, b| total(&b.group).total_cmp(&total(&a.group)));
                }
                reports.push(ObjectiveOneSlice::compute(slice)?);
            }
            emit_objective_one(&reports)
        }
        Mode::Micro | Mode::Macro => {
            let tables = slices
                .iter()
                .map(|s| compute(s, mode))
                .collect::<brinson_bench::Result<Vec<_>>>()
                .with_context(|| format!("computing {mode:?} attribution"))?;
            if mode == Mode::Micro {
                emit_micro_results(&micro_records(&tables))
            } else {
                emit_macro_results(&macro_records(&tables))
            }
        }
    };
    write_file(out, &bytes)
}

fn run_gen_data(seed: u64, out_dir: &Path) -> Result<()> {
    let corpus = default_corpus(seed)?;
    let reports = corpus
        .iter()
        .cloned()
        .map(ObjectiveOneSlice::compute)
        .collect::<brinson_bench::Result<Vec<_>>>()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_file(
        &out_dir.join("objective1.csv"),
        &emit_objective_one(&reports),
    )?;
    write_file(
        &out_dir.join("objective2.csv"),
        &emit_objective_two(&corpus),
    )?;
    log::info!("wrote {} slices from seed {seed}", corpus.len());
    Ok(())
}

fn run_gen_qa(
    corpus: &Path,
    n: usize,
    seed: u64,
    allow_duplicates: bool,
    out: &Path,
    keys: &Path,
) -> Result<()> {
    let slices = load_corpus(corpus)?;
    let bank = generate_questions(&slices, n, seed, allow_duplicates)?;
    write_file(out, &emit_public_bank(&bank))?;
    write_file(keys, &emit_question_bank(&bank))
}

fn log_flags(card: &ScoreCard) {
    for flag in &card.flags {
        log::warn!("{flag}");
    }
    eprintln!(
        "score: {}/{} ({})",
        card.earned(),
        card.possible(),
        percent(card.accuracy())
    );
}

fn grade_factors(pred: &Path, truth: &Path, tol: Option<f64>) -> Result<Vec<u8>> {
    let corpus = load_corpus(truth)?;
    let tol = tol.unwrap_or(KEYWORD_VALUE_TOLERANCE);
    let card = grade_factor_responses(&load_responses(pred)?, &corpus, tol)?;
    log_flags(&card);
    Ok(emit_keyword_scores(&card))
}

fn grade_tables(
    pred: &Path,
    truth: &Path,
    mode: Option<ModeArg>,
    tol: Option<f64>,
) -> Result<Vec<u8>> {
    let corpus = load_corpus(truth)?;
    let texts = prediction_files(pred, "csv")?
        .iter()
        .map(|p| read_text(p))
        .collect::<Result<Vec<_>>>()?;
    let mode = match mode {
        Some(m) => m.into(),
        None => {
            let mut all_macro = !texts.is_empty();
            for text in &texts {
                all_macro &= matches!(parse_results(text)?, ResultFile::Macro(_));
            }
            if all_macro {
                Mode::Macro
            } else {
                Mode::Micro
            }
        }
    };
    let card = grade_table_responses(&texts, &corpus, mode, tol.unwrap_or(TABLE_TOLERANCE))?;
    log_flags(&card);
    Ok(emit_table_scores(&card, mode))
}

fn grade_qa(pred: &Path, truth: &Path, tol: Option<f64>) -> Result<Vec<u8>> {
    let key = parse_question_bank(&read_text(truth)?)
        .with_context(|| format!("parsing {}", truth.display()))?;
    let submission = parse_submission(&read_text(pred)?)
        .with_context(|| format!("parsing {}", pred.display()))?;
    let card = grade(&submission, &key, tol.unwrap_or(QCALC_TOLERANCE))?;
    log_flags(&card);
    Ok(emit_qa_scores(&card))
}

fn grade_semantic(
    pred: &Path,
    truth: &Path,
    embeddings: Option<&Path>,
    family: &str,
    texts_out: Option<&Path>,
) -> Result<Vec<u8>> {
    let corpus = load_corpus(truth)?;
    let candidates = candidate_texts(&load_responses(pred)?, &corpus, family);
    let references = reference_texts(&corpus)?;
    if let Some(path) = texts_out {
        let mut all = references.clone();
        all.extend(candidates.iter().cloned());
        write_file(path, &emit_text_records(&all))?;
    }
    let table = embeddings
        .map(|p| {
            parse_embeddings(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    let report = semantic_report(&candidates, &references, table.as_ref());
    for skipped in &report.skipped {
        log::warn!("skipped {}: {}", skipped.candidate_id, skipped.reason);
    }
    Ok(emit_semantic_scores(&report))
}

fn run_oracle(input: &Path, task: Task, questions: Option<&Path>, out_dir: &Path) -> Result<()> {
    let corpus = load_corpus(input)?;
    match task {
        Task::Factors => write_responses(out_dir, &oracle_factor_responses(&corpus)?),
        Task::Micro => write_responses(out_dir, &oracle_table_responses(&corpus, Mode::Micro)?),
        Task::Macro => write_responses(out_dir, &oracle_table_responses(&corpus, Mode::Macro)?),
        Task::Qa => {
            let Some(path) = questions else {
                bail!("--questions is required for the qa task");
            };
            let bank = parse_public_bank(&read_text(path)?)
                .with_context(|| format!("parsing {}", path.display()))?;
            let answers = oracle_qa_submission(&bank, &corpus)?;
            fs::create_dir_all(out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            write_file(&out_dir.join("answers.csv"), &emit_submission(&answers))
        }
    }
}
