//! The Brown, sotd and ndrr variable ordering heuristics.
//!
//! Every heuristic returns all orderings that attain its optimum and picks
//! the lexicographically least of them by elimination-order indices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{polynomials_of, ProblemInstance};
use crate::poly::{count_distinct_real_roots, Var};
use crate::projection::{full_projection, ProjectionError, ProjectionSet, VariableOrdering};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("problem {0} has no nonconstant polynomial")]
    EmptyInput(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// Declaration order doubles as the margin tie precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    Brown,
    Sotd,
    Ndrr,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [Heuristic::Brown, Heuristic::Sotd, Heuristic::Ndrr];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Brown => "brown",
            Heuristic::Sotd => "sotd",
            Heuristic::Ndrr => "ndrr",
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown heuristic '{s}' (expected brown, sotd or ndrr)"))
    }
}

/// Switches for readings of sotd and ndrr.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicConfig {
    /// Include the input polynomials in the sotd sum.
    pub sotd_include_input: bool,
    /// Count univariate polynomials from every level for ndrr, not only `S_1`.
    pub ndrr_all_levels: bool,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            sotd_include_input: true,
            ndrr_all_levels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicChoice {
    pub heuristic: Heuristic,
    pub chosen: VariableOrdering,
    /// Sorted; `chosen` is the first.
    pub tied_candidates: Vec<VariableOrdering>,
    /// The minimized quantity; Brown has none.
    pub measure: Option<u64>,
}

impl HeuristicChoice {
    /// Stable one-line summary.
    pub fn render(&self, problem: &ProblemInstance) -> String {
        let tied: Vec<String> = self
            .tied_candidates
            .iter()
            .map(|o| problem.render_ordering(o))
            .collect();
        let measure = self
            .measure
            .map_or_else(|| "-".to_string(), |m| m.to_string());
        format!(
            "{} {} chosen={} tied=[{}] measure={}",
            problem.id(),
            self.heuristic,
            problem.render_ordering(&self.chosen),
            tied.join(" "),
            measure
        )
    }
}

fn permutations(items: &[Var]) -> Vec<Vec<Var>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Groups of variables that are eliminated together, in elimination order:
/// quantifier blocks innermost first, then the free variables.
fn elimination_groups(problem: &ProblemInstance) -> Vec<Vec<Var>> {
    let blocks = problem.quantifier_blocks();
    let quantified = problem.quantifiers().len();
    let mut groups: Vec<Vec<Var>> = blocks.into_iter().rev().map(|(_, vs)| vs).collect();
    let free: Vec<Var> = problem
        .vars()
        .take(problem.num_vars() - quantified)
        .collect();
    if !free.is_empty() {
        groups.push(free);
    }
    groups
}

fn cartesian(parts: &[Vec<Vec<Var>>]) -> Vec<Vec<Var>> {
    parts.iter().fold(vec![Vec::new()], |acc, options| {
        acc.iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(o);
                    v
                })
            })
            .collect()
    })
}

/// Admissible orderings, sorted lexicographically.
pub fn admissible_orderings(problem: &ProblemInstance) -> Vec<VariableOrdering> {
    let per_group: Vec<Vec<Vec<Var>>> = elimination_groups(problem)
        .iter()
        .map(|g| permutations(g))
        .collect();
    let mut all: Vec<VariableOrdering> = cartesian(&per_group)
        .into_iter()
        .map(VariableOrdering::new)
        .collect();
    all.sort();
    all
}

/// Brown's per-variable criteria on the input, smaller is eliminated first:
/// overall degree, max total degree of terms containing the variable, and
/// number of terms containing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BrownKey {
    pub degree: u32,
    pub max_term_total_degree: u32,
    pub term_count: usize,
}

pub fn brown_keys(problem: &ProblemInstance) -> Vec<BrownKey> {
    let polys = polynomials_of(problem);
    problem
        .vars()
        .map(|v| {
            let terms = polys
                .iter()
                .flat_map(|p| p.terms())
                .filter(|t| t.monomial.contains(v));
            BrownKey {
                degree: polys.iter().map(|p| p.degree_in(v)).max().unwrap_or(0),
                max_term_total_degree: terms
                    .clone()
                    .map(|t| t.monomial.total_degree())
                    .max()
                    .unwrap_or(0),
                term_count: terms.count(),
            }
        })
        .collect()
}

pub fn brown_choose(problem: &ProblemInstance) -> Result<HeuristicChoice, HeuristicError> {
    if polynomials_of(problem).is_empty() {
        return Err(HeuristicError::EmptyInput(problem.id().to_string()));
    }
    let keys = brown_keys(problem);
    // within each admissible group, pick greedily; equal keys branch
    let mut per_group = Vec::new();
    for mut group in elimination_groups(problem) {
        group.sort_by_key(|v| (keys[v.0], *v));
        let runs: Vec<Vec<Var>> = group
            .chunk_by(|a, b| keys[a.0] == keys[b.0])
            .map(<[Var]>::to_vec)
            .collect();
        let options: Vec<Vec<Vec<Var>>> = runs.iter().map(|r| permutations(r)).collect();
        per_group.push(cartesian(&options));
    }
    let mut tied: Vec<VariableOrdering> = cartesian(&per_group)
        .into_iter()
        .map(VariableOrdering::new)
        .collect();
    tied.sort();
    Ok(HeuristicChoice {
        heuristic: Heuristic::Brown,
        chosen: tied[0].clone(),
        tied_candidates: tied,
        measure: None,
    })
}

/// Sum of the total degrees of all monomials of all projection polynomials.
pub fn sotd_measure(ps: &ProjectionSet, include_input: bool) -> u64 {
    let skip = usize::from(!include_input);
    ps.levels
        .iter()
        .skip(skip)
        .flatten()
        .flat_map(|p| p.terms())
        .map(|t| u64::from(t.monomial.total_degree()))
        .sum()
}

/// Distinct real roots of the univariate projection polynomials.
pub fn ndrr_measure(ps: &ProjectionSet, all_levels: bool) -> u64 {
    let univariate: Vec<_> = if all_levels {
        let mut seen = std::collections::BTreeSet::new();
        ps.levels
            .iter()
            .flatten()
            .filter(|p| p.vars().len() == 1)
            .filter(|p| seen.insert((*p).clone()))
            .collect()
    } else {
        ps.univariate_level().iter().collect()
    };
    univariate
        .into_iter()
        .map(|p| count_distinct_real_roots(p).expect("nonzero univariate") as u64)
        .sum()
}

fn argmin(heuristic: Heuristic, scored: Vec<(VariableOrdering, u64)>) -> HeuristicChoice {
    let best = scored.iter().map(|(_, m)| *m).min().expect("nonempty");
    let mut tied: Vec<VariableOrdering> = scored
        .into_iter()
        .filter(|(_, m)| *m == best)
        .map(|(o, _)| o)
        .collect();
    tied.sort();
    HeuristicChoice {
        heuristic,
        chosen: tied[0].clone(),
        tied_candidates: tied,
        measure: Some(best),
    }
}

/// Projection sets for every admissible ordering.
pub fn all_projections(problem: &ProblemInstance) -> Result<Vec<ProjectionSet>, HeuristicError> {
    if polynomials_of(problem).is_empty() {
        return Err(HeuristicError::EmptyInput(problem.id().to_string()));
    }
    admissible_orderings(problem)
        .iter()
        .map(|o| full_projection(problem, o).map_err(HeuristicError::from))
        .collect()
}

pub fn sotd_choose(
    problem: &ProblemInstance,
    config: &HeuristicConfig,
) -> Result<HeuristicChoice, HeuristicError> {
    let sets = all_projections(problem)?;
    Ok(sotd_from(&sets, config))
}

pub fn ndrr_choose(
    problem: &ProblemInstance,
    config: &HeuristicConfig,
) -> Result<HeuristicChoice, HeuristicError> {
    let sets = all_projections(problem)?;
    Ok(ndrr_from(&sets, config))
}

fn sotd_from(sets: &[ProjectionSet], config: &HeuristicConfig) -> HeuristicChoice {
    argmin(
        Heuristic::Sotd,
        sets.iter()
            .map(|ps| {
                (
                    ps.ordering.clone(),
                    sotd_measure(ps, config.sotd_include_input),
                )
            })
            .collect(),
    )
}

fn ndrr_from(sets: &[ProjectionSet], config: &HeuristicConfig) -> HeuristicChoice {
    argmin(
        Heuristic::Ndrr,
        sets.iter()
            .map(|ps| {
                (
                    ps.ordering.clone(),
                    ndrr_measure(ps, config.ndrr_all_levels),
                )
            })
            .collect(),
    )
}

pub fn choose(
    heuristic: Heuristic,
    problem: &ProblemInstance,
    config: &HeuristicConfig,
) -> Result<HeuristicChoice, HeuristicError> {
    match heuristic {
        Heuristic::Brown => brown_choose(problem),
        Heuristic::Sotd => sotd_choose(problem, config),
        Heuristic::Ndrr => ndrr_choose(problem, config),
    }
}

/// Brown, sotd and ndrr choices, sharing one projection per ordering.
pub fn choose_all(
    problem: &ProblemInstance,
    config: &HeuristicConfig,
) -> Result<[HeuristicChoice; 3], HeuristicError> {
    let brown = brown_choose(problem)?;
    let sets = all_projections(problem)?;
    Ok([brown, sotd_from(&sets, config), ndrr_from(&sets, config)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_problem, ProblemFormat};
    use crate::projection::full_projection_calls;

    fn problem(vars: &str, quants: &str, formula: &str) -> ProblemInstance {
        parse_problem(
            &format!("id: t\nvars: {vars}\nquantifiers: {quants}\nformula: {formula}\n"),
            ProblemFormat::Native,
        )
        .unwrap()
    }

    fn ord(v: &[usize]) -> VariableOrdering {
        VariableOrdering::new(v.iter().map(|&i| Var(i)).collect())
    }

    #[test]
    fn admissible_examples() {
        let all_e = problem("x0 x1 x2", "E x0, E x1, E x2", "(> x0*x1*x2)");
        assert_eq!(admissible_orderings(&all_e).len(), 6);
        let one_q = problem("x0 x1 x2", "E x2", "(> x0*x1*x2)");
        assert_eq!(
            admissible_orderings(&one_q),
            vec![ord(&[2, 0, 1]), ord(&[2, 1, 0])]
        );
        let alternating = problem("x0 x1 x2", "E x1, A x2", "(> x0*x1*x2)");
        assert_eq!(admissible_orderings(&alternating), vec![ord(&[2, 1, 0])]);
        let free = problem("x0 x1 x2", "", "(> x0*x1*x2)");
        assert_eq!(admissible_orderings(&free), admissible_orderings(&all_e));
    }

    #[test]
    fn brown_examples() {
        let worked = problem(
            "x0 x1 x2",
            "",
            "(and (= -6*x0^2 - x2^3 - 1) (= x0^4*x2 + 9*x1) (= x0 + x0^2 - x2*x0 - 5))",
        );
        let c = brown_choose(&worked).unwrap();
        assert_eq!(c.chosen, ord(&[1, 2, 0]));
        assert_eq!(c.tied_candidates.len(), 1);
        assert_eq!(c.measure, None);

        let sym = problem("x0 x1", "", "(> x0 + x1)");
        let c = brown_choose(&sym).unwrap();
        assert_eq!(c.chosen, ord(&[0, 1]));
        assert_eq!(c.tied_candidates, vec![ord(&[0, 1]), ord(&[1, 0])]);

        let c = brown_choose(&problem("x0 x1", "", "(> x0^2 + x1)")).unwrap();
        assert_eq!(c.chosen, ord(&[1, 0]));
    }

    #[test]
    fn brown_never_projects() {
        let p = problem("x0 x1 x2", "", "(> x0^2*x1 + x2^3 - x1)");
        let before = full_projection_calls();
        brown_choose(&p).unwrap();
        assert_eq!(full_projection_calls(), before);
        sotd_choose(&p, &HeuristicConfig::default()).unwrap();
        assert_eq!(full_projection_calls(), before + 6);
    }

    #[test]
    fn sotd_examples() {
        let cfg = HeuristicConfig::default();
        let sphere = problem("x0 x1 x2", "", "(= x0^2 + x1^2 + x2^2 - 1)");
        let c = sotd_choose(&sphere, &cfg).unwrap();
        assert_eq!(c.tied_candidates.len(), 6);
        assert_eq!(c.chosen, ord(&[0, 1, 2]));
        assert_eq!(c.measure, Some(12));

        // x0 first: {x0^4 + x1} / {x1}; x1 first: {x0^4 + x1} / {x0}
        let c = sotd_choose(&problem("x0 x1", "", "(= x0^4 + x1)"), &cfg).unwrap();
        assert_eq!(c.tied_candidates, vec![ord(&[0, 1]), ord(&[1, 0])]);
        assert_eq!(c.measure, Some(6));

        let c = sotd_choose(&problem("x", "", "(< x^2 + 1)"), &cfg).unwrap();
        assert_eq!(c.chosen, ord(&[0]));
    }

    #[test]
    fn sotd_measure_examples() {
        use crate::projection::project_polynomials;
        let ps = project_polynomials(&["x0^2 + x1^2 - 1".parse().unwrap()], &ord(&[1, 0]));
        assert_eq!(sotd_measure(&ps, true), 6);
        assert_eq!(sotd_measure(&ps, false), 2);
        let ps = project_polynomials(&["x0 - x1".parse().unwrap()], &ord(&[0]));
        assert_eq!(sotd_measure(&ps, true), 2);
    }

    #[test]
    fn ndrr_examples() {
        let cfg = HeuristicConfig::default();
        let sphere = problem("x0 x1 x2", "", "(= x0^2 + x1^2 + x2^2 - 1)");
        let c = ndrr_choose(&sphere, &cfg).unwrap();
        assert_eq!(c.tied_candidates.len(), 6);
        assert_eq!(c.measure, Some(2));
        let c = ndrr_choose(&problem("x", "", "(< x^2 + 1)"), &cfg).unwrap();
        assert_eq!(c.measure, Some(0));
        let c = ndrr_choose(
            &problem("x0 x1", "", "(and (= x0^2*x1 - 1) (= x1^2 - 4))"),
            &cfg,
        )
        .unwrap();
        // {x1, x1^2 - 4} against {x0, 4*x0^4 - 1}: 3 roots either way
        assert_eq!(c.tied_candidates.len(), 2);
    }

    #[test]
    fn ndrr_measure_examples() {
        let ps = ProjectionSet {
            ordering: ord(&[0]),
            levels: vec![["x0^2 - 1", "x0^3 - x0"]
                .iter()
                .map(|s| s.parse().unwrap())
                .collect()],
        };
        assert_eq!(ndrr_measure(&ps, false), 5);
        let empty = ProjectionSet {
            ordering: ord(&[0]),
            levels: vec![Default::default()],
        };
        assert_eq!(ndrr_measure(&empty, false), 0);
    }

    #[test]
    fn empty_input() {
        let p = problem("x0", "", "(> 3)");
        assert!(matches!(
            brown_choose(&p),
            Err(HeuristicError::EmptyInput(_))
        ));
        assert!(matches!(
            ndrr_choose(&p, &HeuristicConfig::default()),
            Err(HeuristicError::EmptyInput(_))
        ));
    }
}
