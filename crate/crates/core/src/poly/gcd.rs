use super::univariate::UniPoly;
use super::{PolyError, Polynomial, Var};

/// Greatest common divisor, primitive with a positive leading coefficient.
///
/// `gcd(0, q)` is `q` normalized; two nonzero constants give `1`.
pub fn gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return q.normalized();
    }
    if q.is_zero() {
        return p.normalized();
    }
    if p.is_constant() || q.is_constant() {
        return Polynomial::one();
    }
    let v = p
        .vars()
        .into_iter()
        .chain(q.vars())
        .max()
        .expect("nonconstant input has a variable");
    match (p.contains(v), q.contains(v)) {
        (true, false) => gcd(&content_wrt(p, v), q),
        (false, true) => gcd(p, &content_wrt(q, v)),
        _ => {
            let cp = content_wrt(p, v);
            let cq = content_wrt(q, v);
            let g = gcd(&cp, &cq);
            let mut a = UniPoly::of(&p.div_exact(&cp).expect("content divides"), v);
            let mut b = UniPoly::of(&q.div_exact(&cq).expect("content divides"), v);
            if a.degree() < b.degree() {
                std::mem::swap(&mut a, &mut b);
            }
            // primitive remainder sequence
            loop {
                let r = a.prem(&b);
                if r.is_zero() {
                    break;
                }
                if r.degree() == 0 {
                    return g;
                }
                a = b;
                b = UniPoly::of(&primitive_wrt(&r.to_poly(v), v), v);
            }
            (&g * &primitive_wrt(&b.to_poly(v), v)).normalized()
        }
    }
}

/// `p` divided by its content in `v` and by its integer content.
fn primitive_wrt(p: &Polynomial, v: Var) -> Polynomial {
    p.div_exact(&content_wrt(p, v))
        .expect("content divides")
        .normalized()
}

/// Normalized gcd of the coefficients of `p` with respect to `v`.
pub fn content_wrt(p: &Polynomial, v: Var) -> Polynomial {
    let mut acc = Polynomial::zero();
    for c in p.coefficients_wrt(v) {
        if c.is_zero() {
            continue;
        }
        acc = gcd(&acc, &c);
        if acc.is_constant() {
            break;
        }
    }
    acc
}

/// `p / gcd(p, dp/dv)`, primitive with a positive leading coefficient.
pub fn squarefree_part(p: &Polynomial, v: Var) -> Result<Polynomial, PolyError> {
    if p.degree_in(v) == 0 {
        return Err(PolyError::DegreeZero(v));
    }
    let g = gcd(p, &p.derivative_wrt(v));
    Ok(p.div_exact(&g)
        .expect("gcd divides its argument")
        .normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&p("x0^2 - 1"), &p("x0 - 1")), p("x0 - 1"));
        assert_eq!(gcd(&p("x0^2"), &p("x1^2")), p("1"));
        assert_eq!(gcd(&p("2*x0 + 2"), &p("4*x0 + 4")), p("x0 + 1"));
        assert_eq!(gcd(&p("0"), &p("-3*x0 + 6")), p("x0 - 2"));
    }

    #[test]
    fn gcd_multivariate() {
        let common = p("x0*x1 - x2 + 3");
        let a = &common * &p("x0 + x2^2");
        let b = &common * &p("x1^3 - 2*x0");
        assert_eq!(gcd(&a, &b), common);
        let c = &p("x0 - x1") * &p("x0 + x1");
        assert_eq!(gcd(&c, &p("x1^2 - x0^2")), p("x0^2 - x1^2"));
        // content in another variable
        let d = &p("x0 + 1") * &p("x1^2 + 1");
        let e = &p("x0 + 1") * &p("x1 - 5");
        assert_eq!(gcd(&d, &e), p("x0 + 1"));
    }

    #[test]
    fn squarefree_examples() {
        let x = Var(0);
        assert_eq!(
            squarefree_part(&p("x0^2 - 2*x0 + 1"), x).unwrap(),
            p("x0 - 1")
        );
        assert_eq!(squarefree_part(&p("x0^3 - x0"), x).unwrap(), p("x0^3 - x0"));
        assert_eq!(
            squarefree_part(&p("x0^4 - 2*x0^2 + 1"), x).unwrap(),
            p("x0^2 - 1")
        );
        assert_eq!(squarefree_part(&p("7"), x), Err(PolyError::DegreeZero(x)));
    }
}
