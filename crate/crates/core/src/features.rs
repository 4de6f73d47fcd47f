//! The 11 problem features, train-set normalization and labelled examples.

use std::fmt;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heuristics::HeuristicChoice;
use crate::ingest::{polynomials_of, CellCount, CellCountRecord, ProblemInstance};

pub const NUM_FEATURES: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("features need exactly 3 variables, found {0}")]
    WrongArity(usize),
    #[error("problem {0} has no nonconstant polynomial")]
    EmptyInput(String),
    #[error("cannot fit normalization on an empty set")]
    EmptySet,
    #[error("every ordering of problem {0} timed out")]
    AllTimeout(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Exact feature values in table order: polynomial count, max total
/// degree, max degree of x0/x1/x2, proportion of polynomials containing
/// x0/x1/x2, proportion of monomials containing x0/x1/x2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(pub [Rational64; NUM_FEATURES]);

impl FeatureVector {
    pub fn to_f64(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|r| r.to_f64().expect("small rational"))
            .collect()
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Rational64::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn extract_features(problem: &ProblemInstance) -> Result<FeatureVector, FeatureError> {
    if problem.num_vars() != 3 {
        return Err(FeatureError::WrongArity(problem.num_vars()));
    }
    let polys = polynomials_of(problem);
    if polys.is_empty() {
        return Err(FeatureError::EmptyInput(problem.id().to_string()));
    }
    let int = |n: usize| Rational64::from_integer(n as i64);
    let n_polys = polys.len() as i64;
    let n_terms: i64 = polys.iter().map(|p| p.num_terms() as i64).sum();
    let mut values = [Rational64::default(); NUM_FEATURES];
    values[0] = Rational64::from_integer(n_polys);
    values[1] = int(polys
        .iter()
        .map(|p| p.total_degree() as usize)
        .max()
        .unwrap_or(0));
    for (i, v) in problem.vars().enumerate() {
        values[2 + i] = int(polys
            .iter()
            .map(|p| p.degree_in(v) as usize)
            .max()
            .unwrap_or(0));
        let in_polys = polys.iter().filter(|p| p.contains(v)).count() as i64;
        values[5 + i] = Rational64::new(in_polys, n_polys);
        let in_terms = polys
            .iter()
            .flat_map(|p| p.terms())
            .filter(|t| t.monomial.contains(v))
            .count() as i64;
        values[8 + i] = Rational64::new(in_terms, n_terms);
    }
    Ok(FeatureVector(values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub means: Vec<f64>,
    /// Population standard deviations, with 0 replaced by 1.
    pub stds: Vec<f64>,
}

/// Per-column mean and population standard deviation of equal-length rows.
pub fn fit_columns(rows: &[Vec<f64>]) -> Result<NormalizationParams, FeatureError> {
    let Some(first) = rows.first() else {
        return Err(FeatureError::EmptySet);
    };
    let n = rows.len() as f64;
    let dim = first.len();
    let means: Vec<f64> = (0..dim)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let stds = (0..dim)
        .map(|j| {
            let var = rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd == 0.0 {
                1.0
            } else {
                sd
            }
        })
        .collect();
    Ok(NormalizationParams { means, stds })
}

pub fn fit_normalization(train: &[FeatureVector]) -> Result<NormalizationParams, FeatureError> {
    let rows: Vec<Vec<f64>> = train.iter().map(FeatureVector::to_f64).collect();
    fit_columns(&rows)
}

impl NormalizationParams {
    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

pub fn apply_normalization(params: &NormalizationParams, fv: &FeatureVector) -> Vec<f64> {
    params.apply(&fv.to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn from_bool(positive: bool) -> Label {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub label: Label,
}

/// +1 iff the heuristic's ordering attains the record's minimum cell count.
pub fn label_example(
    problem: &ProblemInstance,
    choice: &HeuristicChoice,
    record: &CellCountRecord,
) -> Result<Label, FeatureError> {
    let best = record
        .min_count()
        .ok_or_else(|| FeatureError::AllTimeout(record.problem_id.clone()))?;
    Ok(Label::from_bool(
        record.count_for(problem, &choice.chosen) == CellCount::Cells(best),
    ))
}

/// `<label> 1:<v1> 2:<v2> ...`, one example per line.
pub fn render_examples(examples: &[LabeledExample]) -> String {
    let mut out = String::new();
    for e in examples {
        out.push_str(&e.label.to_string());
        for (i, v) in e.features.iter().enumerate() {
            out.push_str(&format!(" {}:{v}", i + 1));
        }
        out.push('\n');
    }
    out
}

/// Parses the sparse format; omitted indices are zero.
pub fn parse_examples(text: &str, dim: usize) -> Result<Vec<LabeledExample>, FeatureError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| FeatureError::Parse {
            line: i + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let Some(label) = fields.next() else {
            continue;
        };
        let label = match label {
            "+1" | "1" => Label::Positive,
            "-1" => Label::Negative,
            other => return Err(err(format!("bad label '{other}'"))),
        };
        let mut features = vec![0.0; dim];
        let mut last = 0;
        for field in fields {
            let (idx, val) = field
                .split_once(':')
                .ok_or_else(|| err(format!("expected index:value, found '{field}'")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad index '{idx}'")))?;
            if idx <= last || idx > dim {
                return Err(err(format!("index {idx} out of order or above {dim}")));
            }
            last = idx;
            features[idx - 1] = val.parse().map_err(|_| err(format!("bad value '{val}'")))?;
        }
        out.push(LabeledExample { features, label });
    }
    Ok(out)
}
