//! A small SMT-LIB subset for nonlinear real arithmetic.
//!
//! Supported: `declare-fun`/`declare-const` of `Real` constants, `assert`,
//! `and`, `or`, `not`, the relations `= < <= > >=`, arithmetic `+ - *`,
//! division by constants, and integer, decimal and `(/ a b)` literals.
//! `set-logic`, `set-info`, `set-option`, `check-sat` and `exit` are
//! accepted and ignored. Declared constants become existentially
//! quantified variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::{Polynomial, Var};

use super::{Constraint, Formula, IngestError, ProblemInstance, Quantifier, Relation};

#[derive(Debug, Clone)]
enum Sexp {
    Atom {
        text: String,
        line: usize,
        column: usize,
    },
    List {
        items: Vec<Sexp>,
        line: usize,
        column: usize,
    },
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, column, .. } | Sexp::List { line, column, .. } => (*line, *column),
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List { items, .. } => match items.first() {
                Some(Sexp::Atom { text, .. }) => Some(text),
                _ => None,
            },
            Sexp::Atom { .. } => None,
        }
    }

    fn unsupported<T>(&self) -> Result<T, IngestError> {
        let (line, column) = self.pos();
        let token = match self {
            Sexp::Atom { text, .. } => text.clone(),
            Sexp::List { .. } => self.head().unwrap_or("(").to_string(),
        };
        Err(IngestError::UnsupportedConstruct {
            token,
            line,
            column,
        })
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, IngestError> {
        let (line, column) = self.pos();
        Err(IngestError::Parse {
            line,
            column,
            message: message.into(),
        })
    }
}

fn tokenize(text: &str) -> Result<Vec<Sexp>, IngestError> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = vec![(Vec::new(), 0, 0)];
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
                continue;
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), line, column));
            }
            ')' => {
                chars.next();
                let (items, l, col) = stack.pop().expect("root frame");
                let Some(parent) = stack.last_mut() else {
                    return Err(IngestError::Parse {
                        line,
                        column,
                        message: "unbalanced ')'".into(),
                    });
                };
                parent.0.push(Sexp::List {
                    items,
                    line: l,
                    column: col,
                });
            }
            '|' | '"' => {
                let quote = c;
                let (l, col) = (line, column);
                chars.next();
                column += 1;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some(ch) if ch == quote => break,
                        Some('\n') => {
                            line += 1;
                            column = 0;
                            s.push('\n');
                        }
                        Some(ch) => s.push(ch),
                        None => {
                            return Err(IngestError::Parse {
                                line: l,
                                column: col,
                                message: "unterminated quoted token".into(),
                            })
                        }
                    }
                    column += 1;
                }
                stack.last_mut().unwrap().0.push(Sexp::Atom {
                    text: s,
                    line: l,
                    column: col,
                });
            }
            _ => {
                let (l, col) = (line, column);
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '(' || ch == ')' || ch == ';' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                    column += 1;
                }
                stack.last_mut().unwrap().0.push(Sexp::Atom {
                    text: s,
                    line: l,
                    column: col,
                });
                continue;
            }
        }
        column += 1;
    }
    if stack.len() != 1 {
        let (_, l, col) = stack.pop().unwrap();
        return Err(IngestError::Parse {
            line: l,
            column: col,
            message: "unclosed '('".into(),
        });
    }
    Ok(stack.pop().unwrap().0)
}

/// `num / den` with `den > 0`, kept in lowest terms.
#[derive(Debug, Clone)]
struct RatPoly {
    num: Polynomial,
    den: BigInt,
}

impl RatPoly {
    fn constant(r: BigRational) -> Self {
        RatPoly {
            num: Polynomial::constant(r.numer().clone()),
            den: r.denom().clone(),
        }
        .reduced()
    }

    fn reduced(self) -> Self {
        let g = self.num.content().gcd(&self.den);
        if g.is_zero() || g.is_one() {
            return self;
        }
        RatPoly {
            num: self
                .num
                .div_exact(&Polynomial::constant(g.clone()))
                .unwrap(),
            den: &self.den / g,
        }
    }

    fn add(&self, other: &RatPoly) -> RatPoly {
        RatPoly {
            num: &self.num.scale(&other.den) + &other.num.scale(&self.den),
            den: &self.den * &other.den,
        }
        .reduced()
    }

    fn neg(&self) -> RatPoly {
        RatPoly {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    fn mul(&self, other: &RatPoly) -> RatPoly {
        RatPoly {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
        .reduced()
    }

    fn as_constant(&self) -> Option<BigRational> {
        self.num
            .is_constant()
            .then(|| BigRational::new(self.num.constant_term(), self.den.clone()))
    }
}

struct Context {
    names: Vec<String>,
}

impl Context {
    fn term(&self, e: &Sexp) -> Result<RatPoly, IngestError> {
        match e {
            Sexp::Atom { text, .. } => {
                if let Some(i) = self.names.iter().position(|n| n == text) {
                    return Ok(RatPoly {
                        num: Polynomial::var(Var(i)),
                        den: BigInt::one(),
                    });
                }
                match parse_decimal(text) {
                    Some(r) => Ok(RatPoly::constant(r)),
                    None if text.starts_with(|c: char| c.is_ascii_alphabetic()) => {
                        e.error(format!("undeclared symbol '{text}'"))
                    }
                    None => e.unsupported(),
                }
            }
            Sexp::List { items, .. } => {
                let args = &items[1..];
                match e.head() {
                    Some("+") if !args.is_empty() => {
                        let mut acc = self.term(&args[0])?;
                        for a in &args[1..] {
                            acc = acc.add(&self.term(a)?);
                        }
                        Ok(acc)
                    }
                    Some("-") if args.len() == 1 => Ok(self.term(&args[0])?.neg()),
                    Some("-") if args.len() > 1 => {
                        let mut acc = self.term(&args[0])?;
                        for a in &args[1..] {
                            acc = acc.add(&self.term(a)?.neg());
                        }
                        Ok(acc)
                    }
                    Some("*") if !args.is_empty() => {
                        let mut acc = self.term(&args[0])?;
                        for a in &args[1..] {
                            acc = acc.mul(&self.term(a)?);
                        }
                        Ok(acc)
                    }
                    Some("/") if args.len() >= 2 => {
                        let mut acc = self.term(&args[0])?;
                        for a in &args[1..] {
                            let d = self.term(a)?;
                            match d.as_constant() {
                                Some(c) if !c.is_zero() => {
                                    acc = acc.mul(&RatPoly::constant(c.recip()));
                                }
                                Some(_) => return a.error("division by zero"),
                                None => return e.unsupported(),
                            }
                        }
                        Ok(acc)
                    }
                    Some("+" | "-" | "*" | "/") => e.error("wrong number of operands"),
                    _ => e.unsupported(),
                }
            }
        }
    }

    fn formula(&self, e: &Sexp) -> Result<Formula, IngestError> {
        let Sexp::List { items, .. } = e else {
            return e.unsupported();
        };
        let args = &items[1..];
        let head = e.head();
        match head {
            Some("and" | "or") => {
                if args.is_empty() {
                    return e.error("empty connective");
                }
                let children = args
                    .iter()
                    .map(|a| self.formula(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(if head == Some("and") {
                    Formula::and(children)
                } else {
                    Formula::or(children)
                })
            }
            Some("not") if args.len() == 1 => Ok(Formula::Not(Box::new(self.formula(&args[0])?))),
            Some("not") => e.error("not takes exactly one operand"),
            Some(op @ ("=" | "<" | "<=" | ">" | ">=")) => {
                if args.len() < 2 {
                    return e.error("relation needs two operands");
                }
                let relation = Relation::from_symbol(op).unwrap();
                let terms = args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let atoms = terms
                    .windows(2)
                    .map(|w| {
                        // clearing the positive denominator keeps the relation
                        let diff = w[0].add(&w[1].neg());
                        Formula::Atom(Constraint {
                            lhs: diff.num,
                            relation,
                        })
                    })
                    .collect();
                Ok(Formula::and(atoms))
            }
            _ => e.unsupported(),
        }
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Some(BigRational::new(num, den))
}

pub fn parse_smt(text: &str) -> Result<ProblemInstance, IngestError> {
    let mut ctx = Context { names: Vec::new() };
    let mut assertions = Vec::new();
    for cmd in tokenize(text)? {
        let Sexp::List { items, .. } = &cmd else {
            return cmd.error("expected a command");
        };
        match cmd.head() {
            Some("set-logic" | "set-info" | "set-option" | "check-sat" | "exit" | "get-model") => {}
            Some("declare-fun") => {
                let (name, sort) = match items.as_slice() {
                    [_, Sexp::Atom { text, .. }, Sexp::List { items: params, .. }, sort]
                        if params.is_empty() =>
                    {
                        (text.clone(), sort)
                    }
                    _ => return cmd.unsupported(),
                };
                declare(&mut ctx, &cmd, name, sort)?;
            }
            Some("declare-const") => {
                let (name, sort) = match items.as_slice() {
                    [_, Sexp::Atom { text, .. }, sort] => (text.clone(), sort),
                    _ => return cmd.error("malformed declare-const"),
                };
                declare(&mut ctx, &cmd, name, sort)?;
            }
            Some("assert") if items.len() == 2 => assertions.push(ctx.formula(&items[1])?),
            Some("assert") => return cmd.error("assert takes one formula"),
            _ => return cmd.unsupported(),
        }
    }
    if assertions.is_empty() {
        return Err(IngestError::Parse {
            line: 1,
            column: 1,
            message: "no assertions".into(),
        });
    }
    let quantifiers = (0..ctx.names.len())
        .map(|i| (Quantifier::Exists, Var(i)))
        .collect();
    ProblemInstance::new("", ctx.names, quantifiers, Formula::and(assertions))
}

fn declare(ctx: &mut Context, cmd: &Sexp, name: String, sort: &Sexp) -> Result<(), IngestError> {
    match sort {
        Sexp::Atom { text, .. } if text == "Real" => {}
        _ => return sort.unsupported(),
    }
    if ctx.names.contains(&name) {
        return cmd.error(format!("'{name}' declared twice"));
    }
    ctx.names.push(name);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::polynomials_of;

    fn parse(body: &str) -> Result<ProblemInstance, IngestError> {
        parse_smt(&format!(
            "(set-logic QF_NRA)\n(declare-fun x0 () Real)\n(declare-fun x1 () Real)\n\
             (declare-fun x2 () Real)\n{body}\n(check-sat)\n"
        ))
    }

    #[test]
    fn sphere_constraint() {
        let p = parse("(assert (= (+ (* x0 x0) (* x1 x1) (* x2 x2)) 1))").unwrap();
        let cs = p.formula().constraints();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].relation, Relation::Eq);
        assert_eq!(cs[0].lhs.to_string(), "x0^2 + x1^2 + x2^2 - 1");
        assert_eq!(p.quantifiers().len(), 3);
    }

    #[test]
    fn denominators_are_cleared() {
        let p = parse_smt("(declare-fun x () Real)\n(assert (> (* (/ 1 2) x) 1))").unwrap();
        let c = p.formula().constraints()[0].clone();
        assert_eq!(c.relation, Relation::Gt);
        assert_eq!(c.lhs.display_with(p.variables()).to_string(), "x - 2");
        let p = parse("(assert (<= (* 0.25 x0) (- (/ x1 3))))").unwrap();
        assert_eq!(polynomials_of(&p)[0].to_string(), "3*x0 + 4*x1");
    }

    #[test]
    fn transcendental_is_unsupported() {
        let err = parse_smt("(declare-fun x () Real)\n(assert (> (sin x) 0))").unwrap_err();
        assert_eq!(
            err,
            IngestError::UnsupportedConstruct {
                token: "sin".into(),
                line: 2,
                column: 12
            }
        );
        assert!(matches!(
            parse("(assert (> (/ x0 x1) 0))"),
            Err(IngestError::UnsupportedConstruct { .. })
        ));
    }

    #[test]
    fn connectives_and_chains() {
        let p = parse("(assert (and (< x0 x1 x2) (or (> x0 0) (not (= x2 1)))))").unwrap();
        assert_eq!(p.formula().constraints().len(), 4);
        let err = parse("(assert (> x0 y))").unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 5, .. }));
        assert!(parse_smt("(declare-fun x () Real)\n(assert (> x 0)").is_err());
    }
}
