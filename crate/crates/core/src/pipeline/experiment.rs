use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    random_baseline, CaseBreakdown, ConditionalRow, PipelineError, SelectionResult, SuccessTotals,
};
use crate::features::{
    extract_features, fit_normalization, label_example, FeatureVector, LabeledExample,
    NormalizationParams,
};
use crate::heuristics::{choose_all, Heuristic, HeuristicChoice, HeuristicConfig};
use crate::ingest::{load_problem, split_dataset, CellCountRecord, IngestError, ProblemInstance};
use crate::learner::{grid_search, train_svm, GridConfig, KernelParams, SvmModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Train, validation and test fractions.
    pub fractions: (f64, f64, f64),
    pub heuristics: HeuristicConfig,
    pub grid: GridConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let n = 7001.0;
        ExperimentConfig {
            seed: 7,
            fractions: (3545.0 / n, 1735.0 / n, 1721.0 / n),
            heuristics: HeuristicConfig::default(),
            grid: GridConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// A problem left out of the experiment, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quarantined {
    pub problem_id: String,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicModelSummary {
    pub heuristic: Heuristic,
    pub gamma: f64,
    pub c: f64,
    pub j: f64,
    pub validation_score: f64,
    pub failed_cells: usize,
    pub train_positives: usize,
    pub support_vectors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub problems: usize,
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    pub quarantined: Vec<Quarantined>,
    pub models: Vec<HeuristicModelSummary>,
    pub selections: Vec<SelectionResult>,
    pub breakdown: CaseBreakdown,
    pub totals: SuccessTotals,
    pub conditional: Vec<ConditionalRow>,
    pub random_baseline: f64,
    pub ml_rate: f64,
}

struct Prepared {
    id: String,
    features: FeatureVector,
    success: BTreeMap<Heuristic, bool>,
}

fn quarantine(id: &str, stage: &str, message: impl ToString) -> Quarantined {
    Quarantined {
        problem_id: id.to_string(),
        stage: stage.to_string(),
        message: message.to_string(),
    }
}

fn prepare(
    problem: &ProblemInstance,
    record: Option<&CellCountRecord>,
    config: &HeuristicConfig,
) -> Result<Prepared, Quarantined> {
    let id = problem.id();
    let record = record.ok_or_else(|| quarantine(id, "labels", "no label record"))?;
    record
        .resolve(problem)
        .map_err(|e| quarantine(id, "labels", e))?;
    let choices = choose_all(problem, config).map_err(|e| quarantine(id, "heuristics", e))?;
    let features = extract_features(problem).map_err(|e| quarantine(id, "features", e))?;
    let success =
        heuristic_success(problem, &choices, record).map_err(|e| quarantine(id, "labels", e))?;
    Ok(Prepared {
        id: id.to_string(),
        features,
        success,
    })
}

/// Whether each heuristic's ordering is optimal, where optimal means the
/// lowest count among the orderings the three heuristics picked.
pub fn heuristic_success(
    problem: &ProblemInstance,
    choices: &[HeuristicChoice],
    record: &CellCountRecord,
) -> Result<BTreeMap<Heuristic, bool>, PipelineError> {
    let picked = record.restricted_to(problem, choices.iter().map(|c| &c.chosen));
    let mut success = BTreeMap::new();
    for choice in choices {
        let label = label_example(problem, choice, &picked)?;
        success.insert(choice.heuristic, label.is_positive());
    }
    Ok(success)
}

fn examples(rows: &[&Prepared], params: &NormalizationParams, h: Heuristic) -> Vec<LabeledExample> {
    rows.iter()
        .map(|p| LabeledExample {
            features: params.apply(&p.features.to_f64()),
            label: crate::features::Label::from_bool(p.success[&h]),
        })
        .collect()
}

/// The full experiment: heuristics and labels per problem, split, normalize,
/// grid-search and train one classifier per heuristic, select on the test
/// split and tabulate.
pub fn run_experiment(
    problems: &[ProblemInstance],
    labels: &[CellCountRecord],
    config: &ExperimentConfig,
) -> Result<ExperimentReport, PipelineError> {
    let by_id: BTreeMap<&str, &CellCountRecord> =
        labels.iter().map(|r| (r.problem_id.as_str(), r)).collect();
    let mut sorted: Vec<&ProblemInstance> = problems.iter().collect();
    sorted.sort_by(|a, b| a.id().cmp(b.id()));
    for w in sorted.windows(2) {
        if w[0].id() == w[1].id() {
            return Err(
                IngestError::InvalidProblem(format!("duplicate problem id {}", w[0].id())).into(),
            );
        }
    }

    let run = |p: &&ProblemInstance| prepare(p, by_id.get(p.id()).copied(), &config.heuristics);
    #[cfg(feature = "parallel")]
    let outcomes: Vec<_> = sorted.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<_> = sorted.iter().map(run).collect();

    let mut prepared = BTreeMap::new();
    let mut quarantined = Vec::new();
    for o in outcomes {
        match o {
            Ok(p) => {
                prepared.insert(p.id.clone(), p);
            }
            Err(q) => quarantined.push(q),
        }
    }

    let ids: Vec<String> = prepared.keys().cloned().collect();
    let split = split_dataset(&ids, config.seed, config.fractions)?;
    let pick = |names: &[String]| -> Vec<&Prepared> {
        let mut v: Vec<&Prepared> = names.iter().map(|n| &prepared[n]).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    };
    let (train, validation, test) = (
        pick(&split.train),
        pick(&split.validation),
        pick(&split.test),
    );
    for (name, part) in [
        ("train", &train),
        ("validation", &validation),
        ("test", &test),
    ] {
        if part.is_empty() {
            return Err(PipelineError::EmptySplit(name));
        }
    }

    let train_features: Vec<FeatureVector> = train.iter().map(|p| p.features.clone()).collect();
    let params = fit_normalization(&train_features)?;

    let mut models: BTreeMap<Heuristic, SvmModel> = BTreeMap::new();
    let mut summaries = Vec::new();
    for h in Heuristic::ALL {
        let classifier = |source| PipelineError::Classifier {
            heuristic: h,
            source,
        };
        let tr = examples(&train, &params, h);
        let va = examples(&validation, &params, h);
        let grid = grid_search(&tr, &va, &config.grid).map_err(classifier)?;
        let kernel = KernelParams::new(grid.best_gamma).map_err(classifier)?;
        let model =
            train_svm(&tr, kernel, grid.best_c, grid.j, &config.grid.svm).map_err(classifier)?;
        summaries.push(HeuristicModelSummary {
            heuristic: h,
            gamma: grid.best_gamma,
            c: grid.best_c,
            j: grid.j,
            validation_score: grid.best_score,
            failed_cells: grid.failed_cells(),
            train_positives: tr.iter().filter(|e| e.label.is_positive()).count(),
            support_vectors: model.support_vectors.len(),
        });
        models.insert(h, model);
    }

    let mut selections = Vec::new();
    for p in &test {
        let x = params.apply(&p.features.to_f64());
        let mut margins = BTreeMap::new();
        for (h, m) in &models {
            let f = m
                .decision_value(&x)
                .map_err(|source| PipelineError::Classifier {
                    heuristic: *h,
                    source,
                })?;
            margins.insert(*h, f);
        }
        selections.push(SelectionResult::new(
            p.id.clone(),
            margins,
            p.success.clone(),
        )?);
    }

    let breakdown = CaseBreakdown::from_results(&selections)?;
    let evaluated = selections.len() as u64;
    let baseline = random_baseline(&breakdown, evaluated)?;
    let totals = breakdown.totals();
    Ok(ExperimentReport {
        seed: config.seed,
        problems: problems.len(),
        train: train.len(),
        validation: validation.len(),
        test: test.len(),
        quarantined,
        models: summaries,
        conditional: breakdown.conditional_rows(),
        ml_rate: totals.ml as f64 / evaluated as f64,
        totals,
        breakdown,
        random_baseline: baseline,
        selections,
    })
}

/// Problem files (`.smt2`, `.smt`, `.prob`) in a directory, sorted by
/// path, with per-file load failures returned alongside.
pub fn load_corpus(dir: &Path) -> Result<(Vec<ProblemInstance>, Vec<Quarantined>), PipelineError> {
    let io = |e: std::io::Error| IngestError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("smt2" | "smt" | "prob")
            )
        })
        .collect();
    paths.sort();
    let mut problems = Vec::new();
    let mut failed = Vec::new();
    for path in paths {
        match load_problem(&path) {
            Ok(p) => problems.push(p),
            Err(e) => failed.push(quarantine(&path.display().to_string(), "parse", e)),
        }
    }
    Ok((problems, failed))
}

fn yn(b: bool) -> &'static str {
    if b {
        "Y"
    } else {
        "N"
    }
}

fn pow2(x: f64) -> String {
    format!("2^{}", x.log2().round() as i32)
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text tables.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "seed {}  problems {}  quarantined {}",
            self.seed,
            self.problems,
            self.quarantined.len()
        );
        let _ = writeln!(
            s,
            "split  train {}  validation {}  test {}",
            self.train, self.validation, self.test
        );

        s.push_str("\nclassifiers\n");
        let _ = writeln!(
            s,
            "  {:<7}{:>7}{:>7}{:>9}{:>10}{:>8}{:>6}{:>8}",
            "", "gamma", "C", "j", "val", "pos", "sv", "failed"
        );
        for m in &self.models {
            let _ = writeln!(
                s,
                "  {:<7}{:>7}{:>7}{:>9.4}{:>10.4}{:>8}{:>6}{:>8}",
                m.heuristic.name(),
                pow2(m.gamma),
                pow2(m.c),
                m.j,
                m.validation_score,
                m.train_positives,
                m.support_vectors,
                m.failed_cells
            );
        }

        s.push_str("\ncases\n  case  ML  sotd  ndrr  Brown  count\n");
        for (k, (&(ml, so, nd, br), c)) in
            super::CASES.iter().zip(self.breakdown.counts).enumerate()
        {
            let _ = writeln!(
                s,
                "  {:>4}  {:<2}  {:<4}  {:<4}  {:<5}  {c:>5}",
                k + 1,
                yn(ml),
                yn(so),
                yn(nd),
                yn(br)
            );
        }

        s.push_str(
            "\nmachine learning success by pattern (random choice)\n  sotd  ndrr  Brown  rate\n",
        );
        for r in &self.conditional {
            let rate = r.ml_rate.map_or_else(|| "-".to_string(), pct);
            let _ = writeln!(
                s,
                "  {:<4}  {:<4}  {:<5}  {} ({})  {}/{}",
                yn(r.sotd),
                yn(r.ndrr),
                yn(r.brown),
                rate,
                pct(r.random_rate),
                r.ml_success,
                r.ml_success + r.ml_failure
            );
        }

        let t = &self.totals;
        s.push_str("\ntotals\n  ML  sotd  ndrr  Brown\n");
        let _ = writeln!(s, "  {}  {}  {}  {}", t.ml, t.sotd, t.ndrr, t.brown);
        let _ = writeln!(s, "\nrandom baseline   {}", pct(self.random_baseline));
        let _ = writeln!(s, "machine learning  {}", pct(self.ml_rate));

        s.push_str("\nselections\n");
        for r in &self.selections {
            let margins: Vec<String> = r
                .margins
                .iter()
                .map(|(h, m)| format!("{h}={m:+.6}"))
                .collect();
            let ok: String = Heuristic::ALL
                .iter()
                .map(|h| if r.per_heuristic_success[h] { 'Y' } else { 'N' })
                .collect();
            let _ = writeln!(
                s,
                "  {}  {}  {}  success(brown,sotd,ndrr)={}  ml={}",
                r.problem_id,
                r.selected,
                margins.join(" "),
                ok,
                yn(r.ml_success)
            );
        }
        if !self.quarantined.is_empty() {
            s.push_str("\nquarantined\n");
            for q in &self.quarantined {
                let _ = writeln!(s, "  {}  {}: {}", q.problem_id, q.stage, q.message);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_partial() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
        let partial = ExperimentConfig::from_toml(
            "seed = 3\nfractions = [0.5, 0.25, 0.25]\n[grid]\nmetric = \"f1\"\ngamma_exponents = [-2, 2]\n",
        )
        .unwrap();
        assert_eq!(partial.seed, 3);
        assert_eq!(partial.grid.gammas().len(), 5);
        assert_eq!(partial.grid.c_exponents, (-5, 15));
        assert!(partial.heuristics.sotd_include_input);
        assert!(matches!(
            ExperimentConfig::from_toml("sed = 1\n"),
            Err(PipelineError::Config(_))
        ));
    }
}
