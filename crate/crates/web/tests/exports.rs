use cadorder_web::{analyze_problem_json, qepcad_script_text, svm_decision_grid_json};
use serde_json::Value;

const SPHERE: &str = "id: sphere\nvars: x0 x1 x2\nformula: (= x0^2 + x1^2 + x2^2 - 1)\n";

#[test]
fn analysis_of_sphere() {
    let v: Value = serde_json::from_str(&analyze_problem_json(SPHERE, "native").unwrap()).unwrap();
    assert_eq!(v["variables"], serde_json::json!(["x0", "x1", "x2"]));
    let f = v["features"].as_array().unwrap();
    assert_eq!(f.len(), 11);
    assert_eq!(f[0], "1");
    let choices = v["choices"].as_array().unwrap();
    let names: Vec<&str> = choices
        .iter()
        .map(|c| c["heuristic"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["brown", "sotd", "ndrr"]);
    assert_eq!(choices[1]["measure"], 12);
    assert_eq!(choices[2]["measure"], 2);
    assert_eq!(choices[1]["tied"].as_array().unwrap().len(), 6);
    assert!(choices[0]["projection"]
        .as_str()
        .unwrap()
        .starts_with("S_3"));
}

#[test]
fn analysis_reports_bad_input() {
    assert!(analyze_problem_json(SPHERE, "xml")
        .unwrap_err()
        .contains("xml"));
    assert!(analyze_problem_json("(assert", "smt").is_err());
}

#[test]
fn two_variable_problem_has_no_features() {
    let text = "(declare-fun a () Real)\n(declare-fun b () Real)\n(assert (> (* a b) 1))\n";
    let v: Value = serde_json::from_str(&analyze_problem_json(text, "smt").unwrap()).unwrap();
    assert!(v["features"].is_null());
    assert_eq!(v["choices"].as_array().unwrap().len(), 3);
}

#[test]
fn script_matches_quantifier_free_layout() {
    let s = qepcad_script_text(SPHERE, "native", "x2,x1,x0", false).unwrap();
    assert!(s.starts_with("(x0,x1,x2)\n3\n"));
    assert!(qepcad_script_text(SPHERE, "native", "x0,x0,x1", true).is_err());
}

#[test]
fn decision_grid_separates_clusters() {
    let pts = r#"[{"x":-0.5,"y":-0.5,"positive":false},{"x":-0.6,"y":-0.4,"positive":false},
                 {"x":0.5,"y":0.5,"positive":true},{"x":0.4,"y":0.6,"positive":true}]"#;
    let v: Value =
        serde_json::from_str(&svm_decision_grid_json(pts, 1.0, 10.0, 5).unwrap()).unwrap();
    let values: Vec<f64> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 25);
    assert!(values[0] < 0.0);
    assert!(values[24] > 0.0);
    assert_eq!(v["training_errors"], 0);
}

#[test]
fn decision_grid_rejects_bad_input() {
    let one_class = r#"[{"x":0,"y":0,"positive":true},{"x":1,"y":0,"positive":true}]"#;
    assert!(svm_decision_grid_json(one_class, 1.0, 1.0, 10).is_err());
    assert!(svm_decision_grid_json("[]", 1.0, 1.0, 1).is_err());
    assert!(svm_decision_grid_json("not json", 1.0, 1.0, 10).is_err());
    let pts = r#"[{"x":0,"y":0,"positive":true},{"x":1,"y":0,"positive":false}]"#;
    assert!(svm_decision_grid_json(pts, -1.0, 1.0, 10).is_err());
}
