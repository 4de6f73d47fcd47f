//! Ground-truth cell counts, one record per line:
//!
//! ```text
//! problem_id metric ordering=count;ordering=count;...
//! ```
//!
//! An ordering is a comma-separated list of variable names, first
//! eliminated first. A count is a positive integer or `TIMEOUT`. Orderings
//! absent from a record count as `TIMEOUT`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{IngestError, ProblemInstance};
use crate::projection::VariableOrdering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Cells in the output CAD.
    OutputCells,
    /// Cells constructed while building a partial CAD.
    ConstructedCells,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::OutputCells => "output_cells",
            Metric::ConstructedCells => "constructed_cells",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellCount {
    Cells(u64),
    Timeout,
}

impl fmt::Display for CellCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellCount::Cells(n) => write!(f, "{n}"),
            CellCount::Timeout => f.write_str("TIMEOUT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCountRecord {
    pub problem_id: String,
    pub metric: Metric,
    /// Keyed by variable names in elimination order.
    pub counts: BTreeMap<Vec<String>, CellCount>,
}

impl CellCountRecord {
    /// Count for an ordering of `problem`, `TIMEOUT` when absent.
    pub fn count_for(&self, problem: &ProblemInstance, ordering: &VariableOrdering) -> CellCount {
        let key: Vec<String> = ordering
            .as_slice()
            .iter()
            .map(|&v| problem.name_of(v).to_string())
            .collect();
        self.counts.get(&key).copied().unwrap_or(CellCount::Timeout)
    }

    /// Smallest non-timeout count.
    pub fn min_count(&self) -> Option<u64> {
        self.counts
            .values()
            .filter_map(|c| match c {
                CellCount::Cells(n) => Some(*n),
                CellCount::Timeout => None,
            })
            .min()
    }

    pub fn is_usable(&self) -> bool {
        self.min_count().is_some()
    }

    /// Checks every ordering against the problem's variables.
    pub fn resolve(&self, problem: &ProblemInstance) -> Result<(), IngestError> {
        for key in self.counts.keys() {
            problem.parse_ordering(&key.join(","))?;
        }
        Ok(())
    }

    /// The record keeping only the given orderings.
    pub fn restricted_to<'a>(
        &self,
        problem: &ProblemInstance,
        orderings: impl IntoIterator<Item = &'a VariableOrdering>,
    ) -> CellCountRecord {
        let counts = orderings
            .into_iter()
            .map(|o| {
                let key = problem
                    .render_ordering(o)
                    .split(',')
                    .map(str::to_string)
                    .collect();
                (key, self.count_for(problem, o))
            })
            .collect();
        CellCountRecord {
            problem_id: self.problem_id.clone(),
            metric: self.metric,
            counts,
        }
    }
}

pub fn parse_labels(text: &str) -> Result<Vec<CellCountRecord>, IngestError> {
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| IngestError::Parse {
            line: line_no,
            column,
            message,
        };
        let mut fields = line.splitn(3, char::is_whitespace);
        let id = fields.next().unwrap_or_default().to_string();
        let metric = match fields.next() {
            Some("output_cells") => Metric::OutputCells,
            Some("constructed_cells") => Metric::ConstructedCells,
            Some(other) => return Err(err(id.len() + 2, format!("unknown metric '{other}'"))),
            None => return Err(err(1, "expected 'id metric counts'".into())),
        };
        if !seen.insert(id.clone()) {
            return Err(err(1, format!("duplicate record for '{id}'")));
        }
        let body = fields.next().unwrap_or("").trim();
        let mut counts = BTreeMap::new();
        let mut vars: Option<BTreeSet<String>> = None;
        for entry in body.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let Some((ord, count)) = entry.split_once('=') else {
                return Err(err(1, format!("expected ordering=count in '{entry}'")));
            };
            let names: Vec<String> = ord.split(',').map(|s| s.trim().to_string()).collect();
            if names.iter().any(String::is_empty) {
                return Err(err(1, format!("empty variable name in '{ord}'")));
            }
            let set: BTreeSet<String> = names.iter().cloned().collect();
            if set.len() != names.len() {
                return Err(IngestError::UnknownOrdering(ord.to_string()));
            }
            match &vars {
                None => vars = Some(set),
                Some(expected) if *expected != set => {
                    return Err(IngestError::UnknownOrdering(ord.to_string()))
                }
                Some(_) => {}
            }
            let count = match count.trim() {
                "TIMEOUT" => CellCount::Timeout,
                c => match c.parse::<u64>() {
                    Ok(n) if n > 0 => CellCount::Cells(n),
                    _ => return Err(err(1, format!("bad cell count '{c}'"))),
                },
            };
            if counts.insert(names, count).is_some() {
                return Err(IngestError::DuplicateOrdering(format!("{id}: {ord}")));
            }
        }
        records.push(CellCountRecord {
            problem_id: id,
            metric,
            counts,
        });
    }
    Ok(records)
}

pub fn render_labels(records: &[CellCountRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let body = r
            .counts
            .iter()
            .map(|(k, c)| format!("{}={c}", k.join(",")))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!("{} {} {body}\n", r.problem_id, r.metric.as_str()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIX: &str = "p1 output_cells x0,x1,x2=25;x0,x2,x1=31;x1,x0,x2=25;\
                       x1,x2,x0=TIMEOUT;x2,x0,x1=7;x2,x1,x0=9\n";

    #[test]
    fn six_orderings() {
        let recs = parse_labels(SIX).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].counts.len(), 6);
        assert_eq!(recs[0].min_count(), Some(7));
        let key: Vec<String> = ["x1", "x2", "x0"].iter().map(|s| s.to_string()).collect();
        assert_eq!(recs[0].counts[&key], CellCount::Timeout);
        assert_eq!(parse_labels(&render_labels(&recs)).unwrap(), recs);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_labels("p q x0,x1=3"),
            Err(IngestError::Parse { .. })
        ));
        assert!(matches!(
            parse_labels("p output_cells x0,x1=3;x1,x0=4;x0,x1=5"),
            Err(IngestError::DuplicateOrdering(_))
        ));
        assert!(matches!(
            parse_labels("p output_cells x0,x1=3;x1,y=4"),
            Err(IngestError::UnknownOrdering(_))
        ));
        assert!(parse_labels("p output_cells x0,x1=0").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let recs = parse_labels("# header\n\np constructed_cells a,b=3 # trailing\n").unwrap();
        assert_eq!(recs[0].metric, Metric::ConstructedCells);
    }
}
