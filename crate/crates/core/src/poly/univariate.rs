//! Polynomials viewed as univariate in one variable, with coefficients in
//! the integer polynomial ring of the remaining variables.

use super::{PolyError, Polynomial, Var};

/// Dense coefficient vector, lowest power first, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct UniPoly(pub(crate) Vec<Polynomial>);

impl UniPoly {
    pub(crate) fn of(p: &Polynomial, v: Var) -> Self {
        let mut c = p.coefficients_wrt(v);
        while c.last().is_some_and(Polynomial::is_zero) {
            c.pop();
        }
        UniPoly(c)
    }

    pub(crate) fn to_poly(&self, v: Var) -> Polynomial {
        Polynomial::from_coefficients(&self.0, v)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; callers never ask for the degree of zero.
    pub(crate) fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub(crate) fn lc(&self) -> &Polynomial {
        self.0.last().expect("nonzero")
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Polynomial::is_zero) {
            self.0.pop();
        }
    }

    pub(crate) fn scale(&self, c: &Polynomial) -> UniPoly {
        let mut out = UniPoly(self.0.iter().map(|x| x * c).collect());
        out.trim();
        out
    }

    /// Coefficient-wise exact division; panics if inexact.
    pub(crate) fn div_exact(&self, c: &Polynomial) -> UniPoly {
        UniPoly(
            self.0
                .iter()
                .map(|x| x.div_exact(c).expect("exact coefficient division"))
                .collect(),
        )
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub(crate) fn prem(&self, b: &UniPoly) -> UniPoly {
        let db = b.degree();
        let lb = b.lc();
        let mut r = self.clone();
        if r.is_zero() || r.degree() < db {
            return r;
        }
        let mut e = r.degree() - db + 1;
        while !r.is_zero() && r.degree() >= db {
            let shift = r.degree() - db;
            let lr = r.lc().clone();
            let mut next: Vec<Polynomial> = r.0.iter().map(|x| x * lb).collect();
            for (i, bi) in b.0.iter().enumerate() {
                next[i + shift] = &next[i + shift] - &(bi * &lr);
            }
            r = UniPoly(next);
            r.trim();
            e -= 1;
        }
        if e > 0 {
            r = r.scale(&lb.pow(e as u32));
        }
        r
    }
}

fn odd(n: usize) -> bool {
    n % 2 == 1
}

/// Resultant with respect to `v`, by the subresultant remainder sequence.
pub fn resultant(p: &Polynomial, q: &Polynomial, v: Var) -> Result<Polynomial, PolyError> {
    let mut a = UniPoly::of(p, v);
    let mut b = UniPoly::of(q, v);
    if a.is_zero() || a.degree() == 0 {
        return Err(PolyError::DegreeZero(v));
    }
    if b.is_zero() || b.degree() == 0 {
        return Err(PolyError::DegreeZero(v));
    }
    let mut negate = false;
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
        if odd(a.degree()) && odd(b.degree()) {
            negate = !negate;
        }
    }
    let mut g = Polynomial::one();
    let mut h = Polynomial::one();
    loop {
        let delta = a.degree() - b.degree();
        if odd(a.degree()) && odd(b.degree()) {
            negate = !negate;
        }
        let r = a.prem(&b);
        if r.is_zero() {
            return Ok(Polynomial::zero());
        }
        a = b;
        b = r.div_exact(&(&g * &h.pow(delta as u32)));
        g = a.lc().clone();
        if delta > 0 {
            h = g
                .pow(delta as u32)
                .div_exact(&h.pow(delta as u32 - 1))
                .expect("subresultant h update is exact");
        }
        if b.degree() == 0 {
            break;
        }
    }
    let da = a.degree() as u32;
    let res = b
        .lc()
        .pow(da)
        .div_exact(&h.pow(da - 1))
        .expect("final subresultant step is exact");
    Ok(if negate { -res } else { res })
}

/// `(-1)^(d(d-1)/2) * res(p, dp/dv) / lc(p)` with `d = deg_v p`.
pub fn discriminant(p: &Polynomial, v: Var) -> Result<Polynomial, PolyError> {
    let d = p.degree_in(v);
    if d < 2 {
        return Err(PolyError::DegreeTooLow { var: v, degree: d });
    }
    let res = resultant(p, &p.derivative_wrt(v), v)?;
    let lc = p.leading_coeff_wrt(v);
    let q = res
        .div_exact(&lc)
        .expect("leading coefficient divides res(p, p')");
    let sign_negative = (d as u64 * (d as u64 - 1) / 2) % 2 == 1;
    Ok(if sign_negative { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn resultant_examples() {
        let x = Var(0);
        assert_eq!(resultant(&p("x0^2 - 1"), &p("x0 - 2"), x).unwrap(), p("3"));
        assert_eq!(resultant(&p("x0"), &p("x0"), x).unwrap(), p("0"));
        // y = x1, x = x0
        assert_eq!(
            resultant(&p("x1^2 - x0"), &p("x1 - 1"), Var(1)).unwrap(),
            p("1 - x0")
        );
        assert_eq!(
            resultant(&p("5"), &p("x0"), x),
            Err(PolyError::DegreeZero(x))
        );
    }

    #[test]
    fn resultant_swap_sign() {
        let a = p("x0^3*x1 - 2*x0 + x1^2");
        let b = p("3*x0^3 + x0*x1 - 7");
        let ab = resultant(&a, &b, Var(0)).unwrap();
        let ba = resultant(&b, &a, Var(0)).unwrap();
        assert_eq!(ab, -ba);
    }

    #[test]
    fn discriminant_examples() {
        // x^2 + b*x + c with x = x0, b = x1, c = x2
        assert_eq!(
            discriminant(&p("x0^2 + x1*x0 + x2"), Var(0)).unwrap(),
            p("x1^2 - 4*x2")
        );
        assert_eq!(discriminant(&p("x0^2 - 2*x0 + 1"), Var(0)).unwrap(), p("0"));
        assert_eq!(discriminant(&p("x0^2 + 1"), Var(0)).unwrap(), p("-4"));
        // cubic x^3 + a x + b has discriminant -4a^3 - 27b^2
        assert_eq!(
            discriminant(&p("x0^3 + x1*x0 + x2"), Var(0)).unwrap(),
            p("-4*x1^3 - 27*x2^2")
        );
        assert!(matches!(
            discriminant(&p("x0 + 1"), Var(0)),
            Err(PolyError::DegreeTooLow { degree: 1, .. })
        ));
    }
}
