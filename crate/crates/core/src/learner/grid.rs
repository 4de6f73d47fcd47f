//! Exhaustive (gamma, C) search scored on a validation set.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::smo::{check_inputs, distance_matrix, gram_from_distances, solve_with_gram};
use super::{cost_factor, evaluate, f1, mcc, ConfusionCounts, LearnerError, SvmConfig};
use crate::features::LabeledExample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Mcc,
    F1,
}

impl Metric {
    pub fn score(self, c: &ConfusionCounts) -> f64 {
        match self {
            Metric::Mcc => mcc(c),
            Metric::F1 => f1(c),
        }
    }
}

/// Grid axes as inclusive ranges of base-2 exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub gamma_exponents: (i32, i32),
    pub c_exponents: (i32, i32),
    pub metric: Metric,
    pub svm: SvmConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            gamma_exponents: (-15, 3),
            c_exponents: (-5, 15),
            metric: Metric::Mcc,
            svm: SvmConfig::default(),
        }
    }
}

impl GridConfig {
    pub fn gammas(&self) -> Vec<f64> {
        (self.gamma_exponents.0..=self.gamma_exponents.1)
            .map(|e| 2f64.powi(e))
            .collect()
    }

    pub fn cs(&self) -> Vec<f64> {
        (self.c_exponents.0..=self.c_exponents.1)
            .map(|e| 2f64.powi(e))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub gamma: f64,
    pub c: f64,
    /// Validation score; `None` when training hit the iteration cap.
    pub score: Option<f64>,
    pub counts: Option<ConfusionCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    /// Gamma-major, each axis ascending.
    pub cells: Vec<GridCell>,
    pub best_gamma: f64,
    pub best_c: f64,
    pub best_score: f64,
    /// Cost factor computed from the training set.
    pub j: f64,
}

impl GridSearchResult {
    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.score.is_none()).count()
    }
}

/// Trains one model per cell and keeps the best validation score; ties go
/// to the smallest C, then the smallest gamma.
pub fn grid_search(
    train: &[LabeledExample],
    validation: &[LabeledExample],
    config: &GridConfig,
) -> Result<GridSearchResult, LearnerError> {
    let j = cost_factor(train).map_err(|_| LearnerError::SingleClass)?;
    check_inputs(train, 1.0, j)?;
    if validation.is_empty() {
        return Err(LearnerError::InvalidParameter(
            "empty validation set".into(),
        ));
    }
    let distances = distance_matrix(train);
    let y: Vec<f64> = train.iter().map(|e| e.label.sign()).collect();
    let cs = config.cs();
    let mut cells = Vec::new();
    for gamma in config.gammas() {
        let gram = gram_from_distances(&distances, gamma);
        let run = |&c: &f64| -> Result<GridCell, LearnerError> {
            match solve_with_gram(&gram, &y, c, j, &config.svm) {
                Ok(sol) => {
                    let model = sol.into_model(train, gamma);
                    let counts = evaluate(&model, validation)?;
                    Ok(GridCell {
                        gamma,
                        c,
                        score: Some(config.metric.score(&counts)),
                        counts: Some(counts),
                    })
                }
                Err(LearnerError::NonConvergence(_)) => Ok(GridCell {
                    gamma,
                    c,
                    score: None,
                    counts: None,
                }),
                Err(e) => Err(e),
            }
        };
        #[cfg(feature = "parallel")]
        let row: Result<Vec<GridCell>, _> = cs.par_iter().map(run).collect();
        #[cfg(not(feature = "parallel"))]
        let row: Result<Vec<GridCell>, _> = cs.iter().map(run).collect();
        cells.extend(row?);
    }
    let best = cells
        .iter()
        .filter_map(|cell| cell.score.map(|s| (s, cell)))
        .max_by(|(sa, a), (sb, b)| {
            sa.total_cmp(sb)
                .then(b.c.total_cmp(&a.c))
                .then(b.gamma.total_cmp(&a.gamma))
        })
        .map(|(s, cell)| (s, cell.gamma, cell.c))
        .ok_or(LearnerError::NonConvergence(config.svm.max_iterations))?;
    Ok(GridSearchResult {
        best_gamma: best.1,
        best_c: best.2,
        best_score: best.0,
        cells,
        j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Label;

    fn ex(x: f64, positive: bool) -> LabeledExample {
        LabeledExample {
            features: vec![x],
            label: Label::from_bool(positive),
        }
    }

    #[test]
    fn full_grid_has_399_cells() {
        let train: Vec<_> = (0..8).map(|i| ex(i as f64, i >= 4)).collect();
        let val: Vec<_> = (0..4).map(|i| ex(2.0 * i as f64 + 0.5, i >= 2)).collect();
        let r = grid_search(&train, &val, &GridConfig::default()).unwrap();
        assert_eq!(r.cells.len(), 399);
        assert_eq!(r.j, 1.0);
        assert_eq!(r.best_score, 1.0);
        // smallest C among perfect cells, then smallest gamma
        let perfect: Vec<_> = r.cells.iter().filter(|c| c.score == Some(1.0)).collect();
        let min_c = perfect.iter().map(|c| c.c).fold(f64::INFINITY, f64::min);
        let min_g = perfect
            .iter()
            .filter(|c| c.c == min_c)
            .map(|c| c.gamma)
            .fold(f64::INFINITY, f64::min);
        assert_eq!((r.best_c, r.best_gamma), (min_c, min_g));
        assert_eq!(
            r,
            grid_search(&train, &val, &GridConfig::default()).unwrap()
        );
    }

    #[test]
    fn single_class_propagates() {
        let train = vec![ex(0.0, false), ex(1.0, false)];
        assert_eq!(
            grid_search(&train, &train, &GridConfig::default()),
            Err(LearnerError::SingleClass)
        );
    }
}
