//! Problem instances, their text formats, label files, dataset splits and
//! QEPCAD script emission.

mod labels;
mod native;
mod qepcad;
mod smt;
mod split;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Polynomial, Var};
use crate::projection::VariableOrdering;

pub use labels::{parse_labels, render_labels, CellCount, CellCountRecord, Metric};
pub use native::render_native;
pub use qepcad::emit_qepcad_script;
pub use split::{split_dataset, DatasetSplit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct '{token}' at {line}:{column}")]
    UnsupportedConstruct {
        token: String,
        line: usize,
        column: usize,
    },
    #[error("bad split fractions: {0}")]
    BadFractions(String),
    #[error("ordering references undeclared variables: {0}")]
    UnknownOrdering(String),
    #[error("ordering listed twice: {0}")]
    DuplicateOrdering(String),
    #[error("ordering {0} is not admissible for the problem")]
    InadmissibleOrdering(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Eq,
        Relation::Ne,
        Relation::Lt,
        Relation::Le,
        Relation::Gt,
        Relation::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.symbol() == s)
    }
}

/// `lhs rel 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub lhs: Polynomial,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Constraint),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    /// Conjunction, collapsing a single operand.
    pub fn and(mut children: Vec<Formula>) -> Formula {
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::And(children)
        }
    }

    pub fn or(mut children: Vec<Formula>) -> Formula {
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::Or(children)
        }
    }

    /// Constraint leaves, left to right.
    pub fn constraints(&self) -> Vec<&Constraint> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Constraint>) {
        match self {
            Formula::Atom(c) => out.push(c),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect(out)),
            Formula::Not(c) => c.collect(out),
        }
    }

    pub fn map_polynomials(&self, f: &impl Fn(&Polynomial) -> Polynomial) -> Formula {
        match self {
            Formula::Atom(c) => Formula::Atom(Constraint {
                lhs: f(&c.lhs),
                relation: c.relation,
            }),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.map_polynomials(f)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.map_polynomials(f)).collect()),
            Formula::Not(c) => Formula::Not(Box::new(c.map_polynomials(f))),
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            Formula::Atom(_) => Ok(()),
            Formula::And(cs) | Formula::Or(cs) => {
                if cs.len() < 2 {
                    return Err("and/or need at least two operands".into());
                }
                cs.iter().try_for_each(Formula::check)
            }
            Formula::Not(c) => c.check(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Exists,
    ForAll,
}

impl Quantifier {
    pub fn letter(self) -> char {
        match self {
            Quantifier::Exists => 'E',
            Quantifier::ForAll => 'A',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemFormat {
    SmtSubset,
    Native,
}

impl ProblemFormat {
    /// Guesses from a file extension: `.smt2`/`.smt` or anything else.
    pub fn from_path(path: &Path) -> ProblemFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("smt2" | "smt") => ProblemFormat::SmtSubset,
            _ => ProblemFormat::Native,
        }
    }
}

/// A possibly quantified formula over named real variables.
///
/// The quantifier block covers a suffix of `variables`, in order; the
/// remaining leading variables are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    id: String,
    variables: Vec<String>,
    quantifiers: Vec<(Quantifier, Var)>,
    formula: Formula,
}

impl ProblemInstance {
    pub fn new(
        id: impl Into<String>,
        variables: Vec<String>,
        quantifiers: Vec<(Quantifier, Var)>,
        formula: Formula,
    ) -> Result<Self, IngestError> {
        let invalid = |m: String| Err(IngestError::InvalidProblem(m));
        let names: BTreeSet<&String> = variables.iter().collect();
        if names.len() != variables.len() {
            return invalid("duplicate variable names".into());
        }
        let n = variables.len();
        let k = quantifiers.len();
        if k > n {
            return invalid("more quantifiers than variables".into());
        }
        for (i, (_, v)) in quantifiers.iter().enumerate() {
            if v.0 != n - k + i {
                return invalid(format!(
                    "quantified variables must be the last {k} variables in declaration order"
                ));
            }
        }
        if let Err(m) = formula.check() {
            return invalid(m);
        }
        for c in formula.constraints() {
            if let Some(v) = c.lhs.vars().into_iter().find(|v| v.0 >= n) {
                return invalid(format!("constraint uses undeclared variable {v}"));
            }
        }
        Ok(ProblemInstance {
            id: id.into(),
            variables,
            quantifiers,
            formula,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.variables.len()).map(Var)
    }

    pub fn var_named(&self, name: &str) -> Option<Var> {
        self.variables.iter().position(|n| n == name).map(Var)
    }

    pub fn name_of(&self, v: Var) -> &str {
        &self.variables[v.0]
    }

    pub fn quantifiers(&self) -> &[(Quantifier, Var)] {
        &self.quantifiers
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// Same problem with every quantifier dropped.
    pub fn without_quantifiers(&self) -> ProblemInstance {
        ProblemInstance {
            quantifiers: Vec::new(),
            ..self.clone()
        }
    }

    /// Same problem with each constraint polynomial transformed.
    pub fn map_polynomials(&self, f: impl Fn(&Polynomial) -> Polynomial) -> ProblemInstance {
        ProblemInstance {
            formula: self.formula.map_polynomials(&f),
            ..self.clone()
        }
    }

    /// Renames variable `i` to `perm[i]`; display names follow their variable.
    pub fn relabeled(&self, perm: &[Var]) -> Result<ProblemInstance, IngestError> {
        let mut names = vec![String::new(); self.variables.len()];
        for (i, v) in perm.iter().enumerate() {
            names[v.0] = self.variables[i].clone();
        }
        let quantifiers = self
            .quantifiers
            .iter()
            .map(|&(q, v)| (q, perm[v.0]))
            .collect::<Vec<_>>();
        let mut quantifiers = quantifiers;
        quantifiers.sort_by_key(|&(_, v)| v);
        ProblemInstance::new(
            self.id.clone(),
            names,
            quantifiers,
            self.formula.map_polynomials(&|p| p.permute_vars(perm)),
        )
    }

    /// Quantifier blocks, outermost first, as maximal runs of one quantifier.
    pub fn quantifier_blocks(&self) -> Vec<(Quantifier, Vec<Var>)> {
        let mut blocks: Vec<(Quantifier, Vec<Var>)> = Vec::new();
        for &(q, v) in &self.quantifiers {
            match blocks.last_mut() {
                Some((bq, vs)) if *bq == q => vs.push(v),
                _ => blocks.push((q, vec![v])),
            }
        }
        blocks
    }

    /// Quantified variables first, innermost block first; only like
    /// quantifiers may trade places.
    pub fn is_admissible(&self, ordering: &VariableOrdering) -> bool {
        let order = ordering.as_slice();
        let n = self.num_vars();
        if order.len() != n || order.iter().any(|v| v.0 >= n) {
            return false;
        }
        if order.iter().collect::<BTreeSet<_>>().len() != n {
            return false;
        }
        let mut pos = 0;
        for (_, block) in self.quantifier_blocks().iter().rev() {
            let want: BTreeSet<&Var> = block.iter().collect();
            let got: BTreeSet<&Var> = order[pos..pos + block.len()].iter().collect();
            if want != got {
                return false;
            }
            pos += block.len();
        }
        true
    }

    pub fn render_ordering(&self, ordering: &VariableOrdering) -> String {
        ordering
            .as_slice()
            .iter()
            .map(|&v| self.name_of(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Resolves a comma-separated list of variable names.
    pub fn parse_ordering(&self, text: &str) -> Result<VariableOrdering, IngestError> {
        let vars = text
            .split(',')
            .map(|n| {
                self.var_named(n.trim())
                    .ok_or_else(|| IngestError::UnknownOrdering(text.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ordering = VariableOrdering::new(vars);
        if ordering.len() != self.num_vars()
            || ordering.as_slice().iter().collect::<BTreeSet<_>>().len() != self.num_vars()
        {
            return Err(IngestError::UnknownOrdering(text.to_string()));
        }
        Ok(ordering)
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_native(self))
    }
}

/// Parses a problem in the given format. SMT problems get an empty id.
pub fn parse_problem(text: &str, format: ProblemFormat) -> Result<ProblemInstance, IngestError> {
    match format {
        ProblemFormat::SmtSubset => smt::parse_smt(text),
        ProblemFormat::Native => native::parse_native(text),
    }
}

/// Reads a problem file; SMT problems are named after the file stem.
pub fn load_problem(path: &Path) -> Result<ProblemInstance, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let format = ProblemFormat::from_path(path);
    let problem = parse_problem(&text, format)?;
    if problem.id().is_empty() {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("problem")
            .to_string();
        return Ok(problem.with_id(stem));
    }
    Ok(problem)
}

/// Distinct nonconstant constraint polynomials, in canonical order.
pub fn polynomials_of(problem: &ProblemInstance) -> Vec<Polynomial> {
    problem
        .formula
        .constraints()
        .into_iter()
        .filter(|c| !c.lhs.is_constant())
        .map(|c| c.lhs.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
