//! Margin-based heuristic selection, the case breakdown and its derived
//! tables, and the end-to-end experiment.

mod experiment;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureError;
use crate::heuristics::Heuristic;
use crate::ingest::{CellCount, CellCountRecord, IngestError};
use crate::learner::LearnerError;

pub use experiment::{
    heuristic_success, load_corpus, run_experiment, ExperimentConfig, ExperimentReport,
    HeuristicModelSummary, Quarantined,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("every ordering of problem {0} timed out")]
    AllTimeout(String),
    #[error("no margin for {0}")]
    MissingMargin(Heuristic),
    #[error("problem {0}: no fixed heuristic succeeded")]
    NoWinner(String),
    #[error("case counts sum to {sum}, expected {total}")]
    InconsistentCounts { sum: u64, total: u64 },
    #[error("{heuristic} classifier: {source}")]
    Classifier {
        heuristic: Heuristic,
        source: LearnerError,
    },
    #[error("{0} split has no usable problem")]
    EmptySplit(&'static str),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error("config: {0}")]
    Config(String),
}

/// Orderings, as variable-name sequences, attaining the minimal count.
pub fn best_orderings(record: &CellCountRecord) -> Result<BTreeSet<Vec<String>>, PipelineError> {
    let best = record
        .min_count()
        .ok_or_else(|| PipelineError::AllTimeout(record.problem_id.clone()))?;
    Ok(record
        .counts
        .iter()
        .filter(|(_, c)| **c == CellCount::Cells(best))
        .map(|(k, _)| k.clone())
        .collect())
}

/// Largest margin wins; exact ties go to Brown, then sotd, then ndrr.
pub fn select_heuristic(margins: &BTreeMap<Heuristic, f64>) -> Result<Heuristic, PipelineError> {
    let mut best: Option<(Heuristic, f64)> = None;
    for h in Heuristic::ALL {
        let m = *margins.get(&h).ok_or(PipelineError::MissingMargin(h))?;
        if !m.is_finite() {
            return Err(PipelineError::MissingMargin(h));
        }
        if best.is_none_or(|(_, b)| m > b) {
            best = Some((h, m));
        }
    }
    Ok(best.expect("three heuristics").0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub problem_id: String,
    pub margins: BTreeMap<Heuristic, f64>,
    pub selected: Heuristic,
    pub per_heuristic_success: BTreeMap<Heuristic, bool>,
    pub ml_success: bool,
}

impl SelectionResult {
    pub fn new(
        problem_id: impl Into<String>,
        margins: BTreeMap<Heuristic, f64>,
        per_heuristic_success: BTreeMap<Heuristic, bool>,
    ) -> Result<Self, PipelineError> {
        let selected = select_heuristic(&margins)?;
        let ml_success = per_heuristic_success
            .get(&selected)
            .copied()
            .unwrap_or(false);
        Ok(SelectionResult {
            problem_id: problem_id.into(),
            margins,
            selected,
            per_heuristic_success,
            ml_success,
        })
    }

    fn success(&self, h: Heuristic) -> bool {
        self.per_heuristic_success.get(&h).copied().unwrap_or(false)
    }
}

/// Case patterns as (machine learning, sotd, ndrr, Brown).
pub const CASES: [(bool, bool, bool, bool); 13] = [
    (true, true, true, true),
    (true, true, true, false),
    (false, true, true, false),
    (true, true, false, true),
    (false, true, false, true),
    (true, false, true, true),
    (false, false, true, true),
    (true, true, false, false),
    (false, true, false, false),
    (true, false, true, false),
    (false, false, true, false),
    (true, false, false, true),
    (false, false, false, true),
];

/// Case number 1..=13 of a success pattern, if it is one of the table rows.
pub fn case_for_pattern(ml: bool, sotd: bool, ndrr: bool, brown: bool) -> Option<usize> {
    CASES
        .iter()
        .position(|&c| c == (ml, sotd, ndrr, brown))
        .map(|i| i + 1)
}

pub fn case_of(result: &SelectionResult) -> Result<usize, PipelineError> {
    let (s, n, b) = (
        result.success(Heuristic::Sotd),
        result.success(Heuristic::Ndrr),
        result.success(Heuristic::Brown),
    );
    case_for_pattern(result.ml_success, s, n, b)
        .ok_or_else(|| PipelineError::NoWinner(result.problem_id.clone()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseBreakdown {
    /// `counts[k]` is the count of case `k + 1`.
    pub counts: [u64; 13],
}

/// Problems where each selector picked an optimal ordering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessTotals {
    pub ml: u64,
    pub sotd: u64,
    pub ndrr: u64,
    pub brown: u64,
}

/// One pair of cases with identical fixed-heuristic outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRow {
    pub sotd: bool,
    pub ndrr: bool,
    pub brown: bool,
    pub ml_success: u64,
    pub ml_failure: u64,
    /// `None` when no problem has this pattern.
    pub ml_rate: Option<f64>,
    /// Success chance of a uniformly random heuristic.
    pub random_rate: f64,
}

impl CaseBreakdown {
    pub fn new(counts: [u64; 13]) -> Self {
        CaseBreakdown { counts }
    }

    pub fn from_results(results: &[SelectionResult]) -> Result<Self, PipelineError> {
        let mut b = CaseBreakdown::default();
        for r in results {
            b.counts[case_of(r)? - 1] += 1;
        }
        Ok(b)
    }

    pub fn count(&self, case: usize) -> u64 {
        self.counts[case - 1]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Problems with exactly `k` successful fixed heuristics.
    pub fn with_k_successes(&self, k: usize) -> u64 {
        CASES
            .iter()
            .zip(&self.counts)
            .filter(|((_, s, n, b), _)| usize::from(*s) + usize::from(*n) + usize::from(*b) == k)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn totals(&self) -> SuccessTotals {
        let mut t = SuccessTotals::default();
        for (&(ml, s, n, b), &c) in CASES.iter().zip(&self.counts) {
            t.ml += u64::from(ml) * c;
            t.sotd += u64::from(s) * c;
            t.ndrr += u64::from(n) * c;
            t.brown += u64::from(b) * c;
        }
        t
    }

    /// Cases 2..=13 in pairs, two-winner patterns first.
    pub fn conditional_rows(&self) -> Vec<ConditionalRow> {
        (0..6)
            .map(|p| {
                let success_case = 2 + 2 * p;
                let (_, sotd, ndrr, brown) = CASES[success_case - 1];
                let ml_success = self.count(success_case);
                let ml_failure = self.count(success_case + 1);
                let winners = usize::from(sotd) + usize::from(ndrr) + usize::from(brown);
                let n = ml_success + ml_failure;
                ConditionalRow {
                    sotd,
                    ndrr,
                    brown,
                    ml_success,
                    ml_failure,
                    ml_rate: (n > 0).then(|| ml_success as f64 / n as f64),
                    random_rate: winners as f64 / 3.0,
                }
            })
            .collect()
    }
}

/// Expected success rate of picking one of the three heuristics at random.
pub fn random_baseline(breakdown: &CaseBreakdown, total: u64) -> Result<f64, PipelineError> {
    let sum = breakdown.total();
    if sum != total || total == 0 {
        return Err(PipelineError::InconsistentCounts { sum, total });
    }
    let expected = breakdown.with_k_successes(3) as f64
        + breakdown.with_k_successes(2) as f64 * 2.0 / 3.0
        + breakdown.with_k_successes(1) as f64 / 3.0;
    Ok(expected / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_labels;

    fn margins(s: f64, n: f64, b: f64) -> BTreeMap<Heuristic, f64> {
        BTreeMap::from([
            (Heuristic::Sotd, s),
            (Heuristic::Ndrr, n),
            (Heuristic::Brown, b),
        ])
    }

    #[test]
    fn best_ordering_examples() {
        let rec = &parse_labels("p output_cells a,b,c=10;a,c,b=10;b,a,c=57\n").unwrap()[0];
        let best = best_orderings(rec).unwrap();
        assert_eq!(best.len(), 2);
        let rec = &parse_labels("p output_cells a,b,c=3;a,c,b=TIMEOUT\n").unwrap()[0];
        assert_eq!(best_orderings(rec).unwrap().len(), 1);
        let rec = &parse_labels("p output_cells a,b,c=TIMEOUT\n").unwrap()[0];
        assert!(matches!(
            best_orderings(rec),
            Err(PipelineError::AllTimeout(_))
        ));
    }

    #[test]
    fn selection_examples() {
        assert_eq!(
            select_heuristic(&margins(0.5, -0.2, 0.1)),
            Ok(Heuristic::Sotd)
        );
        assert_eq!(
            select_heuristic(&margins(-0.3, -0.1, -0.9)),
            Ok(Heuristic::Ndrr)
        );
        assert_eq!(
            select_heuristic(&margins(0.2, 0.2, 0.2)),
            Ok(Heuristic::Brown)
        );
        assert_eq!(
            select_heuristic(&margins(0.2, 0.2, 0.1)),
            Ok(Heuristic::Sotd)
        );
        let mut partial = margins(0.0, 0.0, 0.0);
        partial.remove(&Heuristic::Ndrr);
        assert_eq!(
            select_heuristic(&partial),
            Err(PipelineError::MissingMargin(Heuristic::Ndrr))
        );
    }

    #[test]
    fn case_examples() {
        assert_eq!(case_for_pattern(true, true, true, true), Some(1));
        assert_eq!(case_for_pattern(true, true, true, false), Some(2));
        assert_eq!(case_for_pattern(false, true, true, false), Some(3));
        assert_eq!(case_for_pattern(false, true, true, true), None);
        let result = |s, n, b, pick: f64| {
            let succ = BTreeMap::from([
                (Heuristic::Sotd, s),
                (Heuristic::Ndrr, n),
                (Heuristic::Brown, b),
            ]);
            SelectionResult::new("p", margins(pick, 0.0, -1.0), succ).unwrap()
        };
        assert_eq!(case_of(&result(true, false, false, 1.0)), Ok(8));
        assert_eq!(case_of(&result(true, false, false, -1.0)), Ok(9));
        assert!(matches!(
            case_of(&result(false, false, false, 1.0)),
            Err(PipelineError::NoWinner(_))
        ));
    }

    #[test]
    fn baseline_examples() {
        let all_one = CaseBreakdown::new([5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(random_baseline(&all_one, 5), Ok(1.0));
        assert_eq!(
            random_baseline(&all_one, 6),
            Err(PipelineError::InconsistentCounts { sum: 5, total: 6 })
        );
        let t = all_one.totals();
        assert_eq!((t.ml, t.sotd, t.ndrr, t.brown), (5, 5, 5, 5));
        let rows = all_one.conditional_rows();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.ml_rate.is_none()));
        assert_eq!(rows[0].random_rate, 2.0 / 3.0);
        assert_eq!(rows[5].random_rate, 1.0 / 3.0);
    }
}
