//! `cadorder`: variable ordering heuristics, features, SVM training and the
//! selection experiment from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cadorder::features::{
    extract_features, parse_examples, render_examples, FeatureError, Label, LabeledExample,
    NUM_FEATURES,
};
use cadorder::heuristics::{choose, choose_all, Heuristic, HeuristicChoice};
use cadorder::ingest::{
    emit_qepcad_script, load_problem, parse_labels, polynomials_of, render_native, split_dataset,
    CellCountRecord, IngestError, ProblemInstance,
};
use cadorder::learner::{
    cost_factor, evaluate, f1, grid_search, mcc, parse_model, render_model, train_svm,
    KernelParams, LearnerError, Metric,
};
use cadorder::pipeline::{
    heuristic_success, load_corpus, random_baseline, run_experiment, CaseBreakdown,
    ExperimentConfig, ExperimentReport, PipelineError, CASES,
};
use cadorder::projection::full_projection;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::NoWinner(_) | PipelineError::MissingMargin(_) => {
                CliError::Internal(e.to_string())
            }
            _ => input(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeuristicArg {
    Brown,
    Sotd,
    Ndrr,
    All,
}

impl HeuristicArg {
    fn single(self) -> Option<Heuristic> {
        match self {
            HeuristicArg::Brown => Some(Heuristic::Brown),
            HeuristicArg::Sotd => Some(Heuristic::Sotd),
            HeuristicArg::Ndrr => Some(Heuristic::Ndrr),
            HeuristicArg::All => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Mcc,
    F1,
}

#[derive(Parser)]
#[command(
    name = "cadorder",
    version,
    about = "CAD variable ordering heuristics and learned selection"
)]
struct Cli {
    /// Seed for dataset splitting; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a problem and print it with its polynomial set.
    Parse { file: PathBuf },
    /// Feature vectors; with --labels and --heuristic, labelled sparse examples.
    Features {
        /// Problem files or corpus directories.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, value_enum)]
        heuristic: Option<HeuristicArg>,
    },
    /// Ordering chosen by a heuristic.
    Choose {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = HeuristicArg::All)]
        heuristic: HeuristicArg,
    },
    /// Projection levels for an elimination order such as `x2,x1,x0`.
    Project {
        file: PathBuf,
        #[arg(long)]
        order: String,
    },
    /// QEPCAD input script for an elimination order.
    QepcadGen {
        file: PathBuf,
        #[arg(long)]
        order: String,
        /// Treat every variable as free and request projection factor output.
        #[arg(long)]
        quantifier_free: bool,
    },
    /// Seeded train/validation/test split of a corpus directory.
    Split { corpus: PathBuf },
    /// Train an SVM on a sparse example file.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long = "c")]
        c: f64,
        /// Positive-class cost factor; defaults to negatives over positives.
        #[arg(long)]
        j: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search the (gamma, C) grid on a validation file.
    GridSearch {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        validation: PathBuf,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
    },
    /// Margins of a trained model on a sparse example file.
    Classify {
        #[arg(long)]
        model: PathBuf,
        examples: PathBuf,
    },
    /// Run the selection experiment on a labelled corpus directory.
    Evaluate {
        corpus: PathBuf,
        /// Cell-count labels; defaults to `labels.txt` in the corpus.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Derived tables from 13 case counts, or re-render an experiment JSON.
    Report { file: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_toml(&read(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn load_one(path: &Path) -> Result<ProblemInstance, CliError> {
    load_problem(path).map_err(|e| match e {
        IngestError::Io { .. } => input(e),
        _ => input(format!("{}: {e}", path.display())),
    })
}

fn load_many(paths: &[PathBuf]) -> Result<Vec<ProblemInstance>, CliError> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let (problems, failed) = load_corpus(path)?;
            if let Some(f) = failed.first() {
                return Err(input(format!("{}: {}", f.problem_id, f.message)));
            }
            out.extend(problems);
        } else {
            out.push(load_one(path)?);
        }
    }
    Ok(out)
}

fn load_labels(path: &Path) -> Result<Vec<CellCountRecord>, CliError> {
    parse_labels(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_examples(path: &Path) -> Result<Vec<LabeledExample>, CliError> {
    parse_examples(&read(path)?, NUM_FEATURES)
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn learner(e: LearnerError) -> CliError {
    input(e)
}

fn emit(out: String) {
    print!("{out}");
    if !out.ends_with('\n') {
        println!();
    }
}

fn choice_json(p: &ProblemInstance, c: &HeuristicChoice) -> serde_json::Value {
    json!({
        "problem": p.id(),
        "heuristic": c.heuristic,
        "chosen": p.render_ordering(&c.chosen),
        "tied": c.tied_candidates.iter().map(|o| p.render_ordering(o)).collect::<Vec<_>>(),
        "measure": c.measure,
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let structured = cli.format == Format::Structured;
    match &cli.command {
        Command::Parse { file } => {
            let p = load_one(file)?;
            let polys: Vec<String> = polynomials_of(&p)
                .iter()
                .map(|q| q.display_with(p.variables()).to_string())
                .collect();
            if structured {
                emit(
                    json!({
                        "id": p.id(),
                        "variables": p.variables(),
                        "quantified": p.quantifiers().len(),
                        "polynomials": polys,
                        "native": render_native(&p),
                    })
                    .to_string(),
                );
            } else {
                let mut s = render_native(&p);
                s.push_str("# polynomials\n");
                for q in polys {
                    s.push_str(&format!("#   {q}\n"));
                }
                emit(s);
            }
        }
        Command::Features {
            paths,
            labels,
            heuristic,
        } => {
            let problems = load_many(paths)?;
            match (labels, heuristic.map(|h| h.single())) {
                (None, None) => {
                    let mut rows = Vec::new();
                    for p in &problems {
                        let f =
                            extract_features(p).map_err(|e| input(format!("{}: {e}", p.id())))?;
                        rows.push((p.id().to_string(), f));
                    }
                    if structured {
                        let v: Vec<_> = rows
                            .iter()
                            .map(|(id, f)| {
                                json!({"id": id, "features": f.0.iter().map(|r| r.to_string()).collect::<Vec<_>>()})
                            })
                            .collect();
                        emit(serde_json::Value::from(v).to_string());
                    } else {
                        emit(rows.iter().map(|(id, f)| format!("{id} {f}\n")).collect());
                    }
                }
                (Some(labels), Some(Some(h))) => {
                    let config = load_config(cli)?;
                    let records = load_labels(labels)?;
                    let mut examples = Vec::new();
                    for p in &problems {
                        let record = records
                            .iter()
                            .find(|r| r.problem_id == p.id())
                            .ok_or_else(|| input(format!("{}: no label record", p.id())))?;
                        let choices = choose_all(p, &config.heuristics)
                            .map_err(|e| input(format!("{}: {e}", p.id())))?;
                        let success = match heuristic_success(p, &choices, record) {
                            Err(
                                PipelineError::AllTimeout(id)
                                | PipelineError::Features(FeatureError::AllTimeout(id)),
                            ) => {
                                eprintln!("skipping {id}: every ordering timed out");
                                continue;
                            }
                            other => other?,
                        };
                        let f =
                            extract_features(p).map_err(|e| input(format!("{}: {e}", p.id())))?;
                        examples.push(LabeledExample {
                            features: f.to_f64(),
                            label: Label::from_bool(success[&h]),
                        });
                    }
                    emit(render_examples(&examples));
                }
                _ => {
                    return Err(input(
                        "--labels needs --heuristic brown, sotd or ndrr, and vice versa",
                    ))
                }
            }
        }
        Command::Choose { file, heuristic } => {
            let config = load_config(cli)?;
            let p = load_one(file)?;
            let choices: Vec<HeuristicChoice> = match heuristic.single() {
                Some(h) => vec![choose(h, &p, &config.heuristics).map_err(input)?],
                None => choose_all(&p, &config.heuristics).map_err(input)?.to_vec(),
            };
            if structured {
                let v: Vec<_> = choices.iter().map(|c| choice_json(&p, c)).collect();
                emit(serde_json::Value::from(v).to_string());
            } else {
                emit(choices.iter().map(|c| c.render(&p) + "\n").collect());
            }
        }
        Command::Project { file, order } => {
            let p = load_one(file)?;
            let ordering = p.parse_ordering(order).map_err(input)?;
            let ps = full_projection(&p, &ordering).map_err(input)?;
            if structured {
                let levels: Vec<Vec<String>> = ps
                    .levels
                    .iter()
                    .map(|l| {
                        l.iter()
                            .map(|q| q.display_with(p.variables()).to_string())
                            .collect()
                    })
                    .collect();
                emit(json!({"ordering": order, "levels": levels}).to_string());
            } else {
                emit(ps.render(p.variables()));
            }
        }
        Command::QepcadGen {
            file,
            order,
            quantifier_free,
        } => {
            let p = load_one(file)?;
            let ordering = p.parse_ordering(order).map_err(input)?;
            let script = emit_qepcad_script(&p, &ordering, !quantifier_free).map_err(input)?;
            if structured {
                emit(json!({"script": script}).to_string());
            } else {
                print!("{script}");
            }
        }
        Command::Split { corpus } => {
            let config = load_config(cli)?;
            let problems = load_many(std::slice::from_ref(corpus))?;
            let ids: Vec<String> = problems.iter().map(|p| p.id().to_string()).collect();
            let split = split_dataset(&ids, config.seed, config.fractions).map_err(input)?;
            if structured {
                emit(serde_json::to_string(&split).expect("serializable"));
            } else {
                emit(format!(
                    "seed {}\ntrain {}\nvalidation {}\ntest {}\n",
                    split.seed,
                    split.train.join(" "),
                    split.validation.join(" "),
                    split.test.join(" ")
                ));
            }
        }
        Command::Train {
            train,
            gamma,
            c,
            j,
            out,
        } => {
            let config = load_config(cli)?;
            let examples = load_examples(train)?;
            let j = match j {
                Some(j) => *j,
                None => cost_factor(&examples).map_err(learner)?,
            };
            let kernel = KernelParams::new(*gamma).map_err(learner)?;
            let model = train_svm(&examples, kernel, *c, j, &config.grid.svm).map_err(learner)?;
            let text = render_model(&model, NUM_FEATURES);
            match out {
                Some(path) => {
                    fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))?;
                    let counts = evaluate(&model, &examples).map_err(learner)?;
                    let summary = format!(
                        "support vectors {}  training mcc {:.4}  j {j}",
                        model.support_vectors.len(),
                        mcc(&counts)
                    );
                    if structured {
                        emit(json!({"support_vectors": model.support_vectors.len(), "training_mcc": mcc(&counts), "j": j}).to_string());
                    } else {
                        emit(summary);
                    }
                }
                None => print!("{text}"),
            }
        }
        Command::GridSearch {
            train,
            validation,
            metric,
        } => {
            let mut config = load_config(cli)?;
            if let Some(m) = metric {
                config.grid.metric = match m {
                    MetricArg::Mcc => Metric::Mcc,
                    MetricArg::F1 => Metric::F1,
                };
            }
            let tr = load_examples(train)?;
            let va = load_examples(validation)?;
            let result = grid_search(&tr, &va, &config.grid).map_err(learner)?;
            if structured {
                emit(serde_json::to_string(&result).expect("serializable"));
            } else {
                emit(format!(
                    "cells {}  failed {}  j {}\nbest gamma {} C {} score {:.4}\n",
                    result.cells.len(),
                    result.failed_cells(),
                    result.j,
                    result.best_gamma,
                    result.best_c,
                    result.best_score
                ));
            }
        }
        Command::Classify { model, examples } => {
            let model = parse_model(&read(model)?).map_err(learner)?;
            let examples = load_examples(examples)?;
            let mut margins = Vec::new();
            for e in &examples {
                margins.push(model.decision_value(&e.features).map_err(learner)?);
            }
            let counts = evaluate(&model, &examples).map_err(learner)?;
            if structured {
                emit(json!({"margins": margins, "counts": counts, "mcc": mcc(&counts), "f1": f1(&counts)}).to_string());
            } else {
                let mut s = String::new();
                for (e, m) in examples.iter().zip(&margins) {
                    let predicted = Label::from_bool(*m > 0.0);
                    s.push_str(&format!("{m:+.6} {predicted} {}\n", e.label));
                }
                s.push_str(&format!(
                    "tp {} tn {} fp {} fn {}  mcc {:.4}  f1 {:.4}\n",
                    counts.tp,
                    counts.tn,
                    counts.fp,
                    counts.fn_,
                    mcc(&counts),
                    f1(&counts)
                ));
                emit(s);
            }
        }
        Command::Evaluate { corpus, labels } => {
            let config = load_config(cli)?;
            let (problems, failed) = load_corpus(corpus)?;
            let labels_path = labels.clone().unwrap_or_else(|| corpus.join("labels.txt"));
            let records = load_labels(&labels_path)?;
            let mut report = run_experiment(&problems, &records, &config)?;
            report.problems += failed.len();
            report.quarantined.splice(0..0, failed);
            if structured {
                emit(report.to_json());
            } else {
                emit(report.render_text());
            }
        }
        Command::Report { file } => {
            let text = read(file)?;
            if text.trim_start().starts_with('{') {
                let report: ExperimentReport = serde_json::from_str(&text).map_err(input)?;
                emit(if structured {
                    report.to_json()
                } else {
                    report.render_text()
                });
            } else {
                emit(case_report(&text, structured)?);
            }
        }
    }
    Ok(())
}

fn case_report(text: &str, structured: bool) -> Result<String, CliError> {
    let counts: Vec<u64> = text
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| input(format!("bad case count '{t}'")))
        })
        .collect::<Result<_, _>>()?;
    let counts: [u64; 13] = counts
        .try_into()
        .map_err(|v: Vec<u64>| input(format!("expected 13 case counts, found {}", v.len())))?;
    let b = CaseBreakdown::new(counts);
    let total = b.total();
    let baseline = random_baseline(&b, total)?;
    let t = b.totals();
    let ml_rate = t.ml as f64 / total as f64;
    if structured {
        return Ok(json!({
            "breakdown": b,
            "totals": t,
            "conditional": b.conditional_rows(),
            "random_baseline": baseline,
            "ml_rate": ml_rate,
        })
        .to_string());
    }
    let yn = |x: bool| if x { "Y" } else { "N" };
    let mut s = String::from("case  ML  sotd  ndrr  Brown  count\n");
    for (k, (&(ml, so, nd, br), c)) in CASES.iter().zip(b.counts).enumerate() {
        s.push_str(&format!(
            "{:>4}  {:<2}  {:<4}  {:<4}  {:<5}  {c:>5}\n",
            k + 1,
            yn(ml),
            yn(so),
            yn(nd),
            yn(br)
        ));
    }
    s.push_str("\nsotd  ndrr  Brown  ML rate (random)\n");
    for r in b.conditional_rows() {
        let rate = r
            .ml_rate
            .map_or_else(|| "-".into(), |x| format!("{:.1}%", 100.0 * x));
        s.push_str(&format!(
            "{:<4}  {:<4}  {:<5}  {rate} ({:.1}%)\n",
            yn(r.sotd),
            yn(r.ndrr),
            yn(r.brown),
            100.0 * r.random_rate
        ));
    }
    s.push_str(&format!(
        "\ntotals  ML {}  sotd {}  ndrr {}  Brown {}\nrandom baseline   {:.2}%\nmachine learning  {:.2}%\n",
        t.ml,
        t.sotd,
        t.ndrr,
        t.brown,
        100.0 * baseline,
        100.0 * ml_rate
    ));
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
