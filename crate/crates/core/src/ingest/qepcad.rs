//! QEPCAD session scripts.
//!
//! QEPCAD lists variables so that the last one is projected first, so the
//! variable tuple is the elimination order reversed.

use num_traits::One;

use crate::poly::Term;
use crate::projection::VariableOrdering;

use super::{Formula, IngestError, ProblemInstance, Quantifier, Relation};

const QUANTIFIED_COMMANDS: &[&str] = &["go", "go", "go", "d-stat", "go", "finish"];
const QUANTIFIER_FREE_COMMANDS: &[&str] = &[
    "go",
    "go",
    "d-proj-factors",
    "d-proj-polynomials",
    "go",
    "d-fpc-stat",
    "go",
];

/// Renders the script for one ordering.
///
/// With `quantified` set, the problem's quantifier block is used, or every
/// variable is existential when the problem has none. Otherwise all
/// variables are free and any ordering is admissible.
pub fn emit_qepcad_script(
    problem: &ProblemInstance,
    ordering: &VariableOrdering,
    quantified: bool,
) -> Result<String, IngestError> {
    let effective = if !quantified {
        problem.without_quantifiers()
    } else if problem.quantifiers().is_empty() {
        let all = problem.vars().map(|v| (Quantifier::Exists, v)).collect();
        ProblemInstance::new(
            problem.id(),
            problem.variables().to_vec(),
            all,
            problem.formula().clone(),
        )?
    } else {
        problem.clone()
    };
    if !effective.is_admissible(ordering) {
        return Err(IngestError::InadmissibleOrdering(
            problem.render_ordering_lossy(ordering),
        ));
    }
    let names = problem.variables();
    let tuple: Vec<&str> = ordering
        .as_slice()
        .iter()
        .rev()
        .map(|v| names[v.0].as_str())
        .collect();
    let mut out = format!("({})\n", tuple.join(","));
    out.push_str(&format!(
        "{}\n",
        names.len() - effective.quantifiers().len()
    ));
    for &name in &tuple {
        let v = problem
            .var_named(name)
            .expect("tuple names come from the problem");
        if let Some((q, _)) = effective.quantifiers().iter().find(|(_, qv)| *qv == v) {
            out.push_str(&format!("({}{name})", q.letter()));
        }
    }
    let body = render_formula(problem.formula(), names);
    match problem.formula() {
        Formula::Atom(_) => out.push_str(&format!("[{body}].\n")),
        _ => out.push_str(&format!("{body}.\n")),
    }
    let commands = if quantified {
        QUANTIFIED_COMMANDS
    } else {
        QUANTIFIER_FREE_COMMANDS
    };
    for c in commands {
        out.push_str(c);
        out.push('\n');
    }
    Ok(out)
}

fn relation(r: Relation) -> &'static str {
    match r {
        Relation::Eq => "=",
        Relation::Ne => "/=",
        Relation::Lt => "<",
        Relation::Le => "<=",
        Relation::Gt => ">",
        Relation::Ge => ">=",
    }
}

fn render_formula(f: &Formula, names: &[String]) -> String {
    let join = |cs: &[Formula], op: &str| {
        let parts: Vec<String> = cs.iter().map(|c| render_formula(c, names)).collect();
        format!("[{}]", parts.join(op))
    };
    match f {
        Formula::Atom(c) => {
            let constant = c.lhs.constant_term();
            let nonconstant: Vec<&Term> = c
                .lhs
                .terms()
                .iter()
                .filter(|t| !t.monomial.is_one())
                .collect();
            format!(
                "[{} {} {}]",
                render_sum(&nonconstant, names),
                relation(c.relation),
                -constant
            )
        }
        Formula::And(cs) => join(cs, " /\\ "),
        Formula::Or(cs) => join(cs, " \\/ "),
        Formula::Not(c) => format!("[~{}]", render_formula(c, names)),
    }
}

/// Right-nested binary sums of juxtaposed products.
fn render_sum(terms: &[&Term], names: &[String]) -> String {
    match terms {
        [] => "0".to_string(),
        [t] => render_term(t, names),
        [t, rest @ ..] => format!("({} + {})", render_term(t, names), render_sum(rest, names)),
    }
}

fn render_term(t: &Term, names: &[String]) -> String {
    let mut factors = Vec::new();
    if !t.coeff.is_one() {
        factors.push(t.coeff.to_string());
    }
    for v in t.monomial.vars() {
        for _ in 0..t.monomial.exponent(v) {
            factors.push(names[v.0].clone());
        }
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        format!("({})", factors.join(" "))
    }
}

impl ProblemInstance {
    fn render_ordering_lossy(&self, ordering: &VariableOrdering) -> String {
        ordering
            .as_slice()
            .iter()
            .map(|v| {
                self.variables()
                    .get(v.0)
                    .cloned()
                    .unwrap_or_else(|| v.to_string())
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_problem, ProblemFormat};
    use crate::poly::Var;

    fn ord(v: &[usize]) -> VariableOrdering {
        VariableOrdering::new(v.iter().map(|&i| Var(i)).collect())
    }

    #[test]
    fn single_variable_quantified() {
        let p = parse_problem("id: p\nvars: x0\nformula: (> x0)\n", ProblemFormat::Native).unwrap();
        let s = emit_qepcad_script(&p, &ord(&[0]), true).unwrap();
        assert_eq!(
            s,
            "(x0)\n0\n(Ex0)[[x0 > 0]].\ngo\ngo\ngo\nd-stat\ngo\nfinish\n"
        );
    }

    #[test]
    fn connectives_and_coefficients() {
        let p = parse_problem(
            "id: p\nvars: x y\nformula: (and (<= 3*x^2*y - y + 2) (not (!= x)))\n",
            ProblemFormat::Native,
        )
        .unwrap();
        let s = emit_qepcad_script(&p, &ord(&[1, 0]), false).unwrap();
        assert_eq!(
            s.lines().take(3).collect::<Vec<_>>(),
            vec![
                "(x,y)",
                "2",
                "[[((3 x x y) + (-1 y)) <= -2] /\\ [~[x /= 0]]]."
            ]
        );
    }

    #[test]
    fn inadmissible_ordering_rejected() {
        let p = parse_problem(
            "id: p\nvars: x0 x1\nquantifiers: E x1\nformula: (> x0*x1)\n",
            ProblemFormat::Native,
        )
        .unwrap();
        assert!(matches!(
            emit_qepcad_script(&p, &ord(&[0, 1]), true),
            Err(IngestError::InadmissibleOrdering(_))
        ));
        let s = emit_qepcad_script(&p, &ord(&[1, 0]), true).unwrap();
        assert!(s.starts_with("(x0,x1)\n1\n(Ex1)[[(x0 x1) > 0]].\n"));
        assert!(emit_qepcad_script(&p, &ord(&[0, 1]), false).is_ok());
    }
}
