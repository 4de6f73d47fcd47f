//! Pairwise dual optimization with second-order working set selection.

use serde::{Deserialize, Serialize};

use super::{rbf_kernel, squared_distance, KernelParams, LearnerError};
use crate::features::LabeledExample;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    /// KKT tolerance on the maximal violating pair.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            tolerance: 1e-3,
            max_iterations: 100_000,
        }
    }
}

/// Dual variables for every training example.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    /// Box bound per example: `j*C` for positives, `C` for negatives.
    pub bounds: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelParams,
}

impl SvmModel {
    pub fn dim(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    /// Signed margin `sum alpha_i y_i K(x_i, x) + b`.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64, LearnerError> {
        let mut f = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefficients) {
            f += coef * rbf_kernel(sv, x, self.kernel.gamma)?;
        }
        Ok(f)
    }
}

impl DualSolution {
    pub fn into_model(self, examples: &[LabeledExample], gamma: f64) -> SvmModel {
        let mut support_vectors = Vec::new();
        let mut dual_coefficients = Vec::new();
        for (e, &a) in examples.iter().zip(&self.alphas) {
            if a > 0.0 {
                support_vectors.push(e.features.clone());
                dual_coefficients.push(a * e.label.sign());
            }
        }
        SvmModel {
            support_vectors,
            dual_coefficients,
            bias: self.bias,
            kernel: KernelParams { gamma },
        }
    }
}

pub(crate) fn check_inputs(
    examples: &[LabeledExample],
    c: f64,
    j: f64,
) -> Result<(), LearnerError> {
    if !(c > 0.0 && c.is_finite() && j > 0.0 && j.is_finite()) {
        return Err(LearnerError::InvalidParameter(format!(
            "C {c} and j {j} must be positive"
        )));
    }
    let dim = examples.first().map_or(0, |e| e.features.len());
    if let Some(e) = examples.iter().find(|e| e.features.len() != dim) {
        return Err(LearnerError::DimensionMismatch {
            expected: dim,
            found: e.features.len(),
        });
    }
    let pos = examples.iter().filter(|e| e.label.is_positive()).count();
    if pos == 0 || pos == examples.len() {
        return Err(LearnerError::SingleClass);
    }
    Ok(())
}

/// Row-major squared distances between all pairs of examples.
pub(crate) fn distance_matrix(examples: &[LabeledExample]) -> Vec<f64> {
    let n = examples.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for k in i + 1..n {
            let v = squared_distance(&examples[i].features, &examples[k].features);
            d[i * n + k] = v;
            d[k * n + i] = v;
        }
    }
    d
}

pub(crate) fn gram_from_distances(distances: &[f64], gamma: f64) -> Vec<f64> {
    distances.iter().map(|d| (-gamma * d).exp()).collect()
}

pub fn solve_dual(
    examples: &[LabeledExample],
    kernel: KernelParams,
    c: f64,
    j: f64,
    config: &SvmConfig,
) -> Result<DualSolution, LearnerError> {
    check_inputs(examples, c, j)?;
    let gram = gram_from_distances(&distance_matrix(examples), kernel.gamma);
    let y: Vec<f64> = examples.iter().map(|e| e.label.sign()).collect();
    solve_with_gram(&gram, &y, c, j, config)
}

pub fn train_svm(
    examples: &[LabeledExample],
    kernel: KernelParams,
    c: f64,
    j: f64,
    config: &SvmConfig,
) -> Result<SvmModel, LearnerError> {
    Ok(solve_dual(examples, kernel, c, j, config)?.into_model(examples, kernel.gamma))
}

/// The solver proper on a precomputed row-major kernel matrix.
pub(crate) fn solve_with_gram(
    gram: &[f64],
    y: &[f64],
    c: f64,
    j: f64,
    config: &SvmConfig,
) -> Result<DualSolution, LearnerError> {
    let n = y.len();
    let k = |a: usize, b: usize| gram[a * n + b];
    let q = |a: usize, b: usize| y[a] * y[b] * gram[a * n + b];
    let bounds: Vec<f64> = y
        .iter()
        .map(|&yi| if yi > 0.0 { j * c } else { c })
        .collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up =
        |a: &[f64], t: usize| (y[t] > 0.0 && a[t] < bounds[t]) || (y[t] < 0.0 && a[t] > 0.0);
    let in_low =
        |a: &[f64], t: usize| (y[t] > 0.0 && a[t] > 0.0) || (y[t] < 0.0 && a[t] < bounds[t]);

    let mut iterations = 0;
    loop {
        // maximal violating pair, second-order choice of the partner
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        for t in 0..n {
            if in_up(&alpha, t) && -y[t] * grad[t] > g_max {
                g_max = -y[t] * grad[t];
                i = t;
            }
        }
        let mut partner = usize::MAX;
        let mut g_min = f64::INFINITY;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            if !in_low(&alpha, t) {
                continue;
            }
            let v = -y[t] * grad[t];
            g_min = g_min.min(v);
            if i != usize::MAX && v < g_max {
                let b = g_max - v;
                let mut a = k(i, i) + k(t, t) - 2.0 * k(i, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best_obj {
                    best_obj = obj;
                    partner = t;
                }
            }
        }
        if g_max - g_min < config.tolerance || partner == usize::MAX {
            break;
        }
        if iterations >= config.max_iterations {
            return Err(LearnerError::NonConvergence(iterations));
        }
        iterations += 1;

        let jj = partner;
        let (ci, cj) = (bounds[i], bounds[jj]);
        let (old_i, old_j) = (alpha[i], alpha[jj]);
        if y[i] != y[jj] {
            let mut quad = q(i, i) + q(jj, jj) + 2.0 * q(i, jj);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[jj]) / quad;
            let diff = alpha[i] - alpha[jj];
            alpha[i] += delta;
            alpha[jj] += delta;
            if diff > 0.0 {
                if alpha[jj] < 0.0 {
                    alpha[jj] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[jj] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[jj] = ci - diff;
                }
            } else if alpha[jj] > cj {
                alpha[jj] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = q(i, i) + q(jj, jj) - 2.0 * q(i, jj);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[jj]) / quad;
            let sum = alpha[i] + alpha[jj];
            alpha[i] -= delta;
            alpha[jj] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[jj] = sum - ci;
                }
            } else if alpha[jj] < 0.0 {
                alpha[jj] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[jj] > cj {
                    alpha[jj] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[jj] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[jj] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, jj) * dj;
        }
    }

    // bias: mean over free vectors, else the midpoint of the feasible range
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..n {
        let v = -y[t] * grad[t];
        // a positive at its bound needs b <= v, one at zero needs b >= v
        let caps_above = (alpha[t] >= bounds[t]) == (y[t] > 0.0);
        if alpha[t] >= bounds[t] || alpha[t] <= 0.0 {
            if caps_above {
                ub = ub.min(v);
            } else {
                lb = lb.max(v);
            }
        } else {
            free += 1;
            free_sum += v;
        }
    }
    let bias = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };
    Ok(DualSolution {
        alphas: alpha,
        bounds,
        bias,
        iterations,
    })
}

/// `1/2 a'Qa - sum a`, the minimized dual objective.
pub fn dual_objective(examples: &[LabeledExample], gamma: f64, alphas: &[f64]) -> f64 {
    let mut quad = 0.0;
    for (a, ea) in alphas.iter().zip(examples) {
        for (b, eb) in alphas.iter().zip(examples) {
            let kab = (-gamma * squared_distance(&ea.features, &eb.features)).exp();
            quad += a * b * ea.label.sign() * eb.label.sign() * kab;
        }
    }
    0.5 * quad - alphas.iter().sum::<f64>()
}

/// Largest KKT violation over the training set, measured on freshly
/// computed margins `y_i f(x_i)`.
pub fn kkt_violation(examples: &[LabeledExample], gamma: f64, sol: &DualSolution) -> f64 {
    let model = sol.clone().into_model(examples, gamma);
    examples
        .iter()
        .enumerate()
        .map(|(t, e)| {
            let yf = e.label.sign() * model.decision_value(&e.features).expect("same dimension");
            if sol.alphas[t] <= 0.0 {
                (1.0 - yf).max(0.0)
            } else if sol.alphas[t] >= sol.bounds[t] {
                (yf - 1.0).max(0.0)
            } else {
                (yf - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}
