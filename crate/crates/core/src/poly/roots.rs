use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{squarefree_part, PolyError, Polynomial};

/// Number of distinct real roots of a univariate polynomial.
///
/// Constants have no roots. Counting is a Sturm sign-variation count on the
/// squarefree part, with the signs at infinity read off the leading
/// coefficient and degree parity.
pub fn count_distinct_real_roots(p: &Polynomial) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let vars = p.vars();
    if vars.len() > 1 {
        return Err(PolyError::Multivariate(p.to_string()));
    }
    let Some(&v) = vars.iter().next() else {
        return Ok(0);
    };
    let sf = squarefree_part(p, v)?;
    let dense: Vec<BigInt> = sf
        .coefficients_wrt(v)
        .iter()
        .map(Polynomial::constant_term)
        .collect();
    Ok(sturm_count(&dense))
}

/// As [`count_distinct_real_roots`] for a dense coefficient vector, lowest
/// power first.
pub fn count_distinct_real_roots_dense(coeffs: &[BigInt]) -> Result<usize, PolyError> {
    let p = Polynomial::from_coefficients(
        &coeffs
            .iter()
            .map(|c| Polynomial::constant(c.clone()))
            .collect::<Vec<_>>(),
        super::Var(0),
    );
    count_distinct_real_roots(&p)
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

/// Remainder of `a` by `b` scaled by a positive constant.
fn positive_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b[db].abs();
    let b_sign_neg = b[db].is_negative();
    let mut r = a.to_vec();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let mut lr = r.last().cloned().expect("nonzero");
        if b_sign_neg {
            lr = -lr;
        }
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= bi * &lr;
        }
        r = trim(r);
    }
    r
}

fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

fn variations(signs: impl Iterator<Item = bool>) -> usize {
    let mut last = None;
    let mut count = 0;
    for s in signs {
        if last.is_some_and(|l| l != s) {
            count += 1;
        }
        last = Some(s);
    }
    count
}

fn sturm_count(p: &[BigInt]) -> usize {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return 0;
    }
    let mut seq = vec![p.clone(), derivative(&p)];
    loop {
        let n = seq.len();
        let r = positive_prem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(primitive(r.into_iter().map(|c| -c).collect()));
    }
    // sign of each member at +inf is sign(lc); at -inf it flips for odd degree
    let at_pos = seq.iter().map(|q| q.last().unwrap().is_positive());
    let at_neg = seq
        .iter()
        .map(|q| q.last().unwrap().is_positive() ^ (q.len() % 2 == 0));
    variations(at_neg) - variations(at_pos)
}
