//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Each export returns a JSON string; failures become a thrown string.
//! The plain `*_json` functions carry the logic and are callable natively.

use cadorder::features::{extract_features, Label, LabeledExample};
use cadorder::heuristics::{choose_all, HeuristicConfig};
use cadorder::ingest::{
    emit_qepcad_script, parse_problem, polynomials_of, ProblemFormat, ProblemInstance,
};
use cadorder::learner::{cost_factor, train_svm, KernelParams, SvmConfig};
use cadorder::projection::project_polynomials;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

fn format_of(name: &str) -> Result<ProblemFormat, String> {
    match name {
        "smt" | "smt2" => Ok(ProblemFormat::SmtSubset),
        "native" => Ok(ProblemFormat::Native),
        other => Err(format!("unknown format '{other}'")),
    }
}

fn parse(text: &str, format: &str) -> Result<ProblemInstance, String> {
    parse_problem(text, format_of(format)?).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ChoiceView {
    heuristic: String,
    chosen: String,
    tied: Vec<String>,
    measure: Option<u64>,
    projection: String,
}

#[derive(Serialize)]
struct Analysis {
    variables: Vec<String>,
    polynomials: Vec<String>,
    /// Absent unless the problem has exactly three variables.
    features: Option<Vec<String>>,
    choices: Vec<ChoiceView>,
}

pub fn analyze_problem_json(text: &str, format: &str) -> Result<String, String> {
    let problem = parse(text, format)?;
    let names = problem.variables();
    let polys = polynomials_of(&problem);
    let features = extract_features(&problem)
        .ok()
        .map(|f| f.0.iter().map(ToString::to_string).collect());
    let choices = choose_all(&problem, &HeuristicConfig::default()).map_err(|e| e.to_string())?;
    let choices = choices
        .iter()
        .map(|c| ChoiceView {
            heuristic: c.heuristic.to_string(),
            chosen: problem.render_ordering(&c.chosen),
            tied: c
                .tied_candidates
                .iter()
                .map(|o| problem.render_ordering(o))
                .collect(),
            measure: c.measure,
            projection: project_polynomials(&polys, &c.chosen).render(names),
        })
        .collect();
    let analysis = Analysis {
        variables: names.to_vec(),
        polynomials: polys
            .iter()
            .map(|p| p.display_with(names).to_string())
            .collect(),
        features,
        choices,
    };
    serde_json::to_string(&analysis).map_err(|e| e.to_string())
}

pub fn qepcad_script_text(
    text: &str,
    format: &str,
    order: &str,
    quantified: bool,
) -> Result<String, String> {
    let problem = parse(text, format)?;
    let ordering = problem.parse_ordering(order).map_err(|e| e.to_string())?;
    emit_qepcad_script(&problem, &ordering, quantified).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct Point {
    x: f64,
    y: f64,
    positive: bool,
}

#[derive(Serialize)]
struct DecisionGrid {
    resolution: usize,
    /// Row-major, `y` ascending then `x` ascending, over [-1, 1]^2.
    values: Vec<f64>,
    support_vectors: usize,
    training_errors: usize,
}

/// Trains on 2-d points and samples the decision function on a square grid.
pub fn svm_decision_grid_json(
    points_json: &str,
    gamma: f64,
    c: f64,
    resolution: usize,
) -> Result<String, String> {
    let points: Vec<Point> = serde_json::from_str(points_json).map_err(|e| e.to_string())?;
    if !(2..=200).contains(&resolution) {
        return Err(format!("resolution {resolution} outside 2..=200"));
    }
    let examples: Vec<LabeledExample> = points
        .iter()
        .map(|p| LabeledExample {
            features: vec![p.x, p.y],
            label: Label::from_bool(p.positive),
        })
        .collect();
    let kernel = KernelParams::new(gamma).map_err(|e| e.to_string())?;
    let j = cost_factor(&examples).map_err(|e| e.to_string())?;
    let model =
        train_svm(&examples, kernel, c, j, &SvmConfig::default()).map_err(|e| e.to_string())?;
    let step = 2.0 / (resolution - 1) as f64;
    let mut values = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let x = [-1.0 + col as f64 * step, -1.0 + row as f64 * step];
            values.push(model.decision_value(&x).map_err(|e| e.to_string())?);
        }
    }
    let mut training_errors = 0;
    for e in &examples {
        let f = model
            .decision_value(&e.features)
            .map_err(|e| e.to_string())?;
        if (f > 0.0) != e.label.is_positive() {
            training_errors += 1;
        }
    }
    let grid = DecisionGrid {
        resolution,
        values,
        support_vectors: model.support_vectors.len(),
        training_errors,
    };
    serde_json::to_string(&grid).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn analyze_problem(text: &str, format: &str) -> Result<String, JsValue> {
    analyze_problem_json(text, format).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn qepcad_script(
    text: &str,
    format: &str,
    order: &str,
    quantified: bool,
) -> Result<String, JsValue> {
    qepcad_script_text(text, format, order, quantified).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn svm_decision_grid(
    points_json: &str,
    gamma: f64,
    c: f64,
    resolution: usize,
) -> Result<String, JsValue> {
    svm_decision_grid_json(points_json, gamma, c, resolution).map_err(|e| JsValue::from_str(&e))
}
