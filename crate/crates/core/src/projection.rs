//! McCallum projection sets for a given variable ordering.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{polynomials_of, ProblemInstance};
use crate::poly::{content_wrt, discriminant, resultant, squarefree_part, Polynomial, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("problem {0} has no nonconstant polynomial")]
    EmptyInput(String),
    #[error("ordering {0} is not admissible")]
    InadmissibleOrdering(String),
}

/// Variables in elimination order, first eliminated first.
///
/// Orderings compare lexicographically by variable index, which is the
/// tie-break order used by every heuristic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VariableOrdering(Vec<Var>);

impl VariableOrdering {
    pub fn new(elimination_order: Vec<Var>) -> Self {
        VariableOrdering(elimination_order)
    }

    pub fn as_slice(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Image under the relabeling `v -> perm[v]`.
    pub fn permuted(&self, perm: &[Var]) -> VariableOrdering {
        VariableOrdering(self.0.iter().map(|v| perm[v.0]).collect())
    }
}

impl fmt::Display for VariableOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Var::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// Levels `S_n, S_(n-1), ..., S_1`; `levels[0]` is the canonical input set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionSet {
    pub ordering: VariableOrdering,
    pub levels: Vec<BTreeSet<Polynomial>>,
}

impl ProjectionSet {
    /// The univariate level `S_1`.
    pub fn univariate_level(&self) -> &BTreeSet<Polynomial> {
        self.levels.last().expect("at least one level")
    }

    /// One block per level, headed `S_i (vars)`, polynomials one per line.
    pub fn render(&self, names: &[String]) -> String {
        let n = self.levels.len();
        let mut out = String::new();
        for (k, level) in self.levels.iter().enumerate() {
            let vars: Vec<&str> = self.ordering.as_slice()[k..]
                .iter()
                .map(|v| names[v.0].as_str())
                .collect();
            out.push_str(&format!("S_{} ({})\n", n - k, vars.join(",")));
            for p in level {
                out.push_str(&format!("  {}\n", p.display_with(names)));
            }
        }
        out
    }
}

thread_local! {
    static FULL_PROJECTIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`full_projection`] calls made on the current thread.
pub fn full_projection_calls() -> u64 {
    FULL_PROJECTIONS.with(Cell::get)
}

/// Drops constants and replaces each polynomial by its primitive,
/// sign-normalized squarefree part with respect to its main variable: the
/// first variable of `remaining` (elimination order) that it contains. A
/// nonconstant content in the main variable is kept as a separate member,
/// canonicalized the same way.
pub fn canonicalize_set<'a>(
    polys: impl IntoIterator<Item = &'a Polynomial>,
    remaining: &[Var],
) -> BTreeSet<Polynomial> {
    let mut out = BTreeSet::new();
    for p in polys {
        canonicalize_into(p, remaining, &mut out);
    }
    out
}

fn canonicalize_into(p: &Polynomial, remaining: &[Var], out: &mut BTreeSet<Polynomial>) {
    if p.is_constant() {
        return;
    }
    let main = remaining
        .iter()
        .copied()
        .find(|&v| p.contains(v))
        .or_else(|| p.vars().into_iter().next())
        .expect("nonconstant polynomial has a variable");
    let content = content_wrt(p, main);
    let primitive = p.div_exact(&content).expect("content divides");
    out.insert(squarefree_part(&primitive, main).expect("main variable occurs"));
    canonicalize_into(&content, remaining, out);
}

/// One McCallum projection step eliminating `v`; `remaining` is the
/// elimination order of the variables left afterwards.
pub fn mccallum_step(
    polys: &BTreeSet<Polynomial>,
    v: Var,
    remaining: &[Var],
) -> BTreeSet<Polynomial> {
    let (with_v, without_v): (Vec<&Polynomial>, Vec<&Polynomial>) =
        polys.iter().partition(|p| p.contains(v));
    let mut out: Vec<Polynomial> = without_v.into_iter().cloned().collect();
    for p in &with_v {
        out.extend(p.coefficients_wrt(v));
        if p.degree_in(v) >= 2 {
            out.push(discriminant(p, v).expect("degree checked"));
        }
    }
    for (i, p) in with_v.iter().enumerate() {
        for q in &with_v[i + 1..] {
            out.push(resultant(p, q, v).expect("both contain v"));
        }
    }
    canonicalize_set(&out, remaining)
}

/// All projection levels of a problem under an ordering.
pub fn full_projection(
    problem: &ProblemInstance,
    ordering: &VariableOrdering,
) -> Result<ProjectionSet, ProjectionError> {
    FULL_PROJECTIONS.with(|c| c.set(c.get() + 1));
    if !problem.is_admissible(ordering) {
        return Err(ProjectionError::InadmissibleOrdering(
            problem.render_ordering(ordering),
        ));
    }
    let input = polynomials_of(problem);
    if input.is_empty() {
        return Err(ProjectionError::EmptyInput(problem.id().to_string()));
    }
    Ok(project_polynomials(&input, ordering))
}

/// [`full_projection`] on a bare polynomial set; every ordering is allowed.
pub fn project_polynomials(input: &[Polynomial], ordering: &VariableOrdering) -> ProjectionSet {
    let order = ordering.as_slice();
    let mut levels = vec![canonicalize_set(input, order)];
    for k in 0..order.len().saturating_sub(1) {
        let next = mccallum_step(levels.last().unwrap(), order[k], &order[k + 1..]);
        levels.push(next);
    }
    ProjectionSet {
        ordering: ordering.clone(),
        levels,
    }
}
