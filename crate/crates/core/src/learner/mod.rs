//! Soft-margin SVM with an RBF kernel, classification metrics and the
//! (gamma, C) grid search.

mod grid;
mod model;
mod smo;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{Label, LabeledExample};

pub use grid::{grid_search, GridCell, GridConfig, GridSearchResult, Metric};
pub use model::{parse_model, render_model};
pub use smo::{
    dual_objective, kkt_violation, solve_dual, train_svm, DualSolution, SvmConfig, SvmModel,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no positive examples")]
    NoPositives,
    #[error("training needs both classes")]
    SingleClass,
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(gamma: f64) -> Result<Self, LearnerError> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(KernelParams { gamma })
        } else {
            Err(LearnerError::InvalidParameter(format!(
                "gamma {gamma} must be positive"
            )))
        }
    }
}

pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `exp(-gamma * |x - y|^2)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64, LearnerError> {
    if x.len() != y.len() {
        return Err(LearnerError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok((-gamma * squared_distance(x, y)).exp())
}

/// Negatives over positives; scales the positive box bound.
pub fn cost_factor(examples: &[LabeledExample]) -> Result<f64, LearnerError> {
    let pos = examples.iter().filter(|e| e.label.is_positive()).count();
    if pos == 0 {
        return Err(LearnerError::NoPositives);
    }
    Ok((examples.len() - pos) as f64 / pos as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionCounts { tp, tn, fp, fn_ }
    }

    pub fn record(&mut self, actual: Label, predicted: Label) {
        match (actual, predicted) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Negative, Label::Positive) => self.fp += 1,
            (Label::Positive, Label::Negative) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Matthews correlation; the denominator is 1 when any of its sums is 0.
pub fn mcc(c: &ConfusionCounts) -> f64 {
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let sums = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    let denom = if sums.contains(&0.0) {
        1.0
    } else {
        sums.iter().product::<f64>().sqrt()
    };
    (tp * tn - fp * fn_) / denom
}

pub fn f1(c: &ConfusionCounts) -> f64 {
    let denom = 2 * c.tp + c.fp + c.fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * c.tp as f64 / denom as f64
    }
}

/// Predicts each example (positive iff the margin is > 0) and tallies.
pub fn evaluate(
    model: &SvmModel,
    examples: &[LabeledExample],
) -> Result<ConfusionCounts, LearnerError> {
    let mut counts = ConfusionCounts::default();
    for e in examples {
        let f = model.decision_value(&e.features)?;
        counts.record(e.label, Label::from_bool(f > 0.0));
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(label: Label) -> LabeledExample {
        LabeledExample {
            features: vec![0.0],
            label,
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(rbf_kernel(&[1.0, 2.0], &[1.0, 2.0], 3.0), Ok(1.0));
        let k = rbf_kernel(&[0.0, 1.0], &[0.0, 0.0], 2f64.ln()).unwrap();
        assert!((k - 0.5).abs() < 1e-15);
        assert_eq!(
            rbf_kernel(&[0.0], &[0.0, 1.0], 1.0),
            Err(LearnerError::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
        assert!(KernelParams::new(0.0).is_err());
    }

    #[test]
    fn cost_factor_examples() {
        let set = |p: usize, n: usize| {
            let mut v = vec![ex(Label::Positive); p];
            v.extend(vec![ex(Label::Negative); n]);
            v
        };
        assert_eq!(cost_factor(&set(5, 10)), Ok(2.0));
        assert_eq!(cost_factor(&set(4, 4)), Ok(1.0));
        assert_eq!(cost_factor(&set(5, 0)), Ok(0.0));
        assert_eq!(cost_factor(&set(0, 3)), Err(LearnerError::NoPositives));
    }

    #[test]
    fn metric_examples() {
        assert_eq!(mcc(&ConfusionCounts::new(5, 5, 0, 0)), 1.0);
        assert_eq!(mcc(&ConfusionCounts::new(0, 0, 5, 5)), -1.0);
        assert_eq!(mcc(&ConfusionCounts::new(1, 0, 0, 0)), 0.0);
        assert_eq!(f1(&ConfusionCounts::new(5, 0, 0, 0)), 1.0);
        assert_eq!(f1(&ConfusionCounts::new(0, 0, 3, 0)), 0.0);
        assert!((f1(&ConfusionCounts::new(2, 0, 1, 1)) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f1(&ConfusionCounts::default()), 0.0);
    }
}
