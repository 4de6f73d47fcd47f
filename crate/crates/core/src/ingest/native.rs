//! The native problem format:
//!
//! ```text
//! id: sphere
//! vars: x0 x1 x2
//! quantifiers: E x0, E x1, E x2
//! formula: (and (= x0^2 + x1^2 + x2^2 - 1) (> x0))
//! ```
//!
//! Leaves are `(rel poly)` meaning `poly rel 0`, with `rel` one of
//! `= != < <= > >=`. Blank lines and `#` comments are ignored.

use crate::poly::Polynomial;

use super::{Constraint, Formula, IngestError, ProblemInstance, Quantifier, Relation};

pub fn render_native(p: &ProblemInstance) -> String {
    let quantifiers = p
        .quantifiers()
        .iter()
        .map(|&(q, v)| format!("{} {}", q.letter(), p.name_of(v)))
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = format!("id: {}\nvars: {}\n", p.id(), p.variables().join(" "));
    if quantifiers.is_empty() {
        out.push_str("quantifiers:\n");
    } else {
        out.push_str(&format!("quantifiers: {quantifiers}\n"));
    }
    out.push_str("formula: ");
    render_formula(p.formula(), p.variables(), &mut out);
    out.push('\n');
    out
}

fn render_formula(f: &Formula, names: &[String], out: &mut String) {
    let group = |op: &str, cs: &[Formula], out: &mut String| {
        out.push('(');
        out.push_str(op);
        for c in cs {
            out.push(' ');
            render_formula(c, names, out);
        }
        out.push(')');
    };
    match f {
        Formula::Atom(c) => {
            out.push_str(&format!(
                "({} {})",
                c.relation.symbol(),
                c.lhs.display_with(names)
            ));
        }
        Formula::And(cs) => group("and", cs, out),
        Formula::Or(cs) => group("or", cs, out),
        Formula::Not(c) => group("not", std::slice::from_ref(c), out),
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column0: usize,
}

impl Cursor<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, IngestError> {
        Err(IngestError::Parse {
            line: self.line,
            column: self.column0 + self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        self.pos += len;
        &self.text[start..start + len]
    }

    fn expect(&mut self, c: char) -> Result<(), IngestError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected '{c}'"))
        }
    }

    fn formula(&mut self, names: &[String]) -> Result<Formula, IngestError> {
        self.expect('(')?;
        let op_start = self.pos;
        let op = self.word().to_string();
        let node = match op.as_str() {
            "and" | "or" | "not" => {
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    if self.text[self.pos..].starts_with(')') {
                        break;
                    }
                    if self.pos >= self.text.len() {
                        return self.error("unterminated formula");
                    }
                    children.push(self.formula(names)?);
                }
                match (op.as_str(), children.len()) {
                    ("not", 1) => Formula::Not(Box::new(children.pop().unwrap())),
                    ("not", _) => return self.error("not takes exactly one operand"),
                    (_, n) if n < 2 => {
                        return self.error(format!("{op} needs two or more operands"))
                    }
                    ("and", _) => Formula::And(children),
                    _ => Formula::Or(children),
                }
            }
            sym => {
                let Some(relation) = Relation::from_symbol(sym) else {
                    self.pos = op_start;
                    return self.error(format!("unknown operator '{sym}'"));
                };
                // polynomial text runs to the matching parenthesis
                let start = self.pos;
                let mut depth = 0usize;
                let bytes = self.text.as_bytes();
                while self.pos < bytes.len() {
                    match bytes[self.pos] {
                        b'(' => depth += 1,
                        b')' if depth == 0 => break,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    self.pos += 1;
                }
                let lhs =
                    Polynomial::parse_named(&self.text[start..self.pos], names).map_err(|e| {
                        IngestError::Parse {
                            line: self.line,
                            column: self.column0 + start + e.offset + 1,
                            message: e.message,
                        }
                    })?;
                Formula::Atom(Constraint { lhs, relation })
            }
        };
        self.expect(')')?;
        Ok(node)
    }
}

pub fn parse_native(text: &str) -> Result<ProblemInstance, IngestError> {
    let mut id = None;
    let mut vars: Option<Vec<String>> = None;
    let mut quantifiers = Vec::new();
    let mut formula = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(IngestError::Parse {
                line: line_no,
                column: 1,
                message: "expected 'key: value'".into(),
            });
        };
        let column0 = key.len() + 1;
        match key.trim() {
            "id" => id = Some(value.trim().to_string()),
            "vars" => vars = Some(value.split_whitespace().map(str::to_string).collect()),
            "quantifiers" => {
                let names = vars.as_deref().ok_or_else(|| IngestError::Parse {
                    line: line_no,
                    column: 1,
                    message: "quantifiers must follow vars".into(),
                })?;
                for entry in value.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                    let bad = || IngestError::Parse {
                        line: line_no,
                        column: column0 + 1,
                        message: format!("bad quantifier entry '{entry}'"),
                    };
                    let (q, name) = entry.split_once(char::is_whitespace).ok_or_else(bad)?;
                    let q = match q {
                        "E" => Quantifier::Exists,
                        "A" => Quantifier::ForAll,
                        _ => return Err(bad()),
                    };
                    let v = names
                        .iter()
                        .position(|n| n == name.trim())
                        .ok_or_else(bad)?;
                    quantifiers.push((q, crate::poly::Var(v)));
                }
            }
            "formula" => {
                let names = vars.as_deref().ok_or_else(|| IngestError::Parse {
                    line: line_no,
                    column: 1,
                    message: "formula must follow vars".into(),
                })?;
                let mut cur = Cursor {
                    text: value,
                    pos: 0,
                    line: line_no,
                    column0,
                };
                let f = cur.formula(names)?;
                cur.skip_ws();
                if cur.pos != value.len() {
                    return cur.error("trailing input after formula");
                }
                formula = Some(f);
            }
            other => {
                return Err(IngestError::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }
    let missing = |what: &str| IngestError::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("missing '{what}'"),
    };
    ProblemInstance::new(
        id.ok_or_else(|| missing("id"))?,
        vars.ok_or_else(|| missing("vars"))?,
        quantifiers,
        formula.ok_or_else(|| missing("formula"))?,
    )
}
