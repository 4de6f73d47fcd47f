//! Independent oracles and random instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cadorder::features::{Label, LabeledExample};
use cadorder::ingest::{polynomials_of, Constraint, Formula, ProblemInstance, Relation};
use cadorder::poly::{Monomial, Polynomial, Var};
use cadorder::projection::{project_polynomials, VariableOrdering};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poly(s: &str) -> Polynomial {
    s.parse().expect("test polynomial parses")
}

// ---------------------------------------------------------------- generators

/// Univariate in `x0` with degree exactly `deg` (leading coefficient nonzero).
pub fn random_univariate(rng: &mut ChaCha8Rng, deg: u32, bound: i64) -> Polynomial {
    let mut terms = Vec::new();
    for e in 0..=deg {
        let mut c = rng.gen_range(-bound..=bound);
        if e == deg && c == 0 {
            c = if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        terms.push((Monomial::var(Var(0), e), BigInt::from(c)));
    }
    Polynomial::from_terms(terms)
}

/// Random nonconstant polynomial in the first `nvars` variables.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    max_total_degree: u32,
    max_terms: usize,
    bound: i64,
) -> Polynomial {
    loop {
        let count = rng.gen_range(1..=max_terms);
        let mut terms = Vec::new();
        for _ in 0..count {
            let total = rng.gen_range(0..=max_total_degree);
            let mut exps = vec![0u32; nvars];
            for _ in 0..total {
                exps[rng.gen_range(0..nvars)] += 1;
            }
            let mut c = rng.gen_range(-bound..=bound);
            if c == 0 {
                c = 1;
            }
            terms.push((Monomial::new(exps), BigInt::from(c)));
        }
        let p = Polynomial::from_terms(terms);
        if !p.is_constant() {
            return p;
        }
    }
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// A quantifier-free conjunction of random constraints over x0, x1, x2.
pub fn random_problem(
    rng: &mut ChaCha8Rng,
    id: &str,
    max_polys: usize,
    max_total_degree: u32,
    max_terms: usize,
) -> ProblemInstance {
    let count = rng.gen_range(1..=max_polys);
    let atoms = (0..count)
        .map(|_| {
            Formula::Atom(Constraint {
                lhs: random_poly(rng, 3, max_total_degree, max_terms, 9),
                relation: Relation::ALL[rng.gen_range(0..Relation::ALL.len())],
            })
        })
        .collect();
    ProblemInstance::new(id, names(3), Vec::new(), Formula::and(atoms)).expect("valid problem")
}

/// Uniformly random permutation of `0..n` as variables.
pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<Var> {
    use rand::seq::SliceRandom;
    let mut v: Vec<Var> = (0..n).map(Var).collect();
    v.shuffle(rng);
    v
}

/// Permutations of `0..n` in lexicographic order.
pub fn index_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in index_permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|i| if i >= first { i + 1 } else { i }));
            out.push(p);
        }
    }
    out
}

pub fn ordering(idx: &[usize]) -> VariableOrdering {
    VariableOrdering::new(idx.iter().map(|&i| Var(i)).collect())
}

// ---------------------------------------------------------- root counting

type Dense = Vec<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Integer polynomial divided by the gcd of its coefficients.
fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let g = p
        .iter()
        .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
    if g.is_zero() {
        return p;
    }
    p.into_iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder `lc(b)^k a mod b` over the integers, lowest first.
fn int_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &lr * bi;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// Gcd by the primitive remainder sequence, as a rational polynomial.
fn rational_gcd(a: &Dense, b: &Dense) -> Dense {
    let (mut a, mut b) = (integral(a), integral(b));
    while !b.is_empty() {
        let r = primitive(int_prem(&a, &b));
        a = b;
        b = r;
    }
    a.into_iter().map(BigRational::from_integer).collect()
}

fn quotient(a: &Dense, b: &Dense) -> Dense {
    let db = b.len() - 1;
    let mut r = a.clone();
    let mut out = vec![BigRational::zero(); a.len() - db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / &b[db];
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &f * bi;
        }
        out[shift] = f;
        r = trim(r);
    }
    out
}

/// Primitive integer multiple of a rational polynomial.
fn integral(p: &Dense) -> Vec<BigInt> {
    let lcm = p.iter().fold(BigInt::one(), |acc, c| {
        num_integer::Integer::lcm(&acc, c.denom())
    });
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn variations(p: &[BigInt]) -> usize {
    let signs: Vec<bool> = p
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `p(x + 1)` by repeated synthetic division.
fn shift_one(p: &[BigInt]) -> Vec<BigInt> {
    let mut a = p.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = a[j + 1].clone();
            a[j] += next;
        }
    }
    a
}

/// Sign variations of `(x + 1)^n p(1 / (x + 1))`, a bound on the roots of
/// `p` in `(0, 1)` that is exact when it is 0 or 1.
fn descartes01(p: &[BigInt]) -> usize {
    let rev: Vec<BigInt> = p.iter().rev().cloned().collect();
    variations(&shift_one(&rev))
}

/// Roots of the squarefree `p` in the open interval `(0, 1)`.
fn roots01(p: &[BigInt]) -> usize {
    match descartes01(p) {
        0 => 0,
        1 => 1,
        _ => {
            let n = p.len() - 1;
            // left half: 2^n p(x / 2); right half: that shifted by one
            let left: Vec<BigInt> = p.iter().enumerate().map(|(i, c)| c << (n - i)).collect();
            let mut right = shift_one(&left);
            let mut at_mid = 0;
            if right[0].is_zero() {
                at_mid = 1;
                right.remove(0);
            }
            roots01(&left) + at_mid + roots01(&right)
        }
    }
}

/// Roots of the squarefree `p` in `(0, 2^k)`.
fn positive_roots(p: &[BigInt], k: usize) -> usize {
    let scaled: Vec<BigInt> = p.iter().enumerate().map(|(i, c)| c << (k * i)).collect();
    roots01(&scaled)
}

/// Distinct real roots by bisection of the Cauchy interval `[-B, B]` on the
/// squarefree part, using Descartes' rule to detect isolating intervals.
pub fn bisection_root_count(coeffs: &[BigInt]) -> usize {
    let p = trim(
        coeffs
            .iter()
            .cloned()
            .map(BigRational::from_integer)
            .collect(),
    );
    if p.len() <= 1 {
        return 0;
    }
    let dp: Dense = trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * q(i as i64))
            .collect(),
    );
    let mut sf = integral(&quotient(&p, &rational_gcd(&p, &dp)));
    let mut count = 0;
    if sf[0].is_zero() {
        count += 1;
        sf.remove(0);
    }
    if sf.len() == 1 {
        return count;
    }
    let lc = sf.last().unwrap().abs();
    let bound = BigRational::one()
        + sf.iter()
            .map(|c| BigRational::new(c.abs(), lc.clone()))
            .max()
            .unwrap();
    let mut k = 0;
    while BigRational::from_integer(BigInt::one() << k) < bound {
        k += 1;
    }
    let mirrored: Vec<BigInt> = sf
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
        .collect();
    count + positive_roots(&sf, k) + positive_roots(&mirrored, k)
}

/// Dense integer coefficients of a univariate polynomial, lowest first.
pub fn dense_of(p: &Polynomial) -> Vec<BigInt> {
    match p.vars().into_iter().next() {
        None => vec![p.constant_term()],
        Some(v) => p
            .coefficients_wrt(v)
            .iter()
            .map(Polynomial::constant_term)
            .collect(),
    }
}

// ------------------------------------------------------------- resultants

/// Sylvester determinant by fraction-free (Bareiss) elimination.
pub fn sylvester_resultant(p: &Polynomial, qp: &Polynomial, v: Var) -> Polynomial {
    let a: Vec<Polynomial> = p.coefficients_wrt(v).into_iter().rev().collect();
    let b: Vec<Polynomial> = qp.coefficients_wrt(v).into_iter().rev().collect();
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![Polynomial::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss(rows)
}

pub fn bareiss(mut a: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = a.len();
    if n == 0 {
        return Polynomial::one();
    }
    let mut negate = false;
    let mut prev = Polynomial::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Polynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

// ------------------------------------------------------------- heuristics

/// Brute-force argmin over all orderings of a quantifier-free problem:
/// the tied index sequences (sorted) and the minimal measure.
pub fn brute_argmin(
    problem: &ProblemInstance,
    measure: impl Fn(&[BTreeSet<Polynomial>]) -> u64,
) -> (Vec<Vec<usize>>, u64) {
    let input = polynomials_of(problem);
    let scored: Vec<(Vec<usize>, u64)> = index_permutations(problem.num_vars())
        .into_iter()
        .map(|idx| {
            let ps = project_polynomials(&input, &ordering(&idx));
            let m = measure(&ps.levels);
            (idx, m)
        })
        .collect();
    let best = scored.iter().map(|(_, m)| *m).min().unwrap();
    let mut tied: Vec<Vec<usize>> = scored
        .into_iter()
        .filter(|(_, m)| *m == best)
        .map(|(i, _)| i)
        .collect();
    tied.sort();
    (tied, best)
}

/// Sum of total degrees of every monomial on every level.
pub fn sotd_oracle(levels: &[BTreeSet<Polynomial>]) -> u64 {
    levels
        .iter()
        .flatten()
        .flat_map(|p| p.terms())
        .map(|t| {
            t.monomial
                .exponents()
                .iter()
                .map(|&e| u64::from(e))
                .sum::<u64>()
        })
        .sum()
}

/// Distinct real roots of the last level, counted by bisection.
pub fn ndrr_oracle(levels: &[BTreeSet<Polynomial>]) -> u64 {
    levels
        .last()
        .unwrap()
        .iter()
        .map(|p| bisection_root_count(&dense_of(p)) as u64)
        .sum()
}

/// Per-variable (degree, max total degree of terms with it, term count).
pub fn brown_key(problem: &ProblemInstance, v: usize) -> (u32, u32, usize) {
    let polys = polynomials_of(problem);
    let mut degree = 0;
    let mut tdeg = 0;
    let mut count = 0;
    for p in &polys {
        for t in p.terms() {
            let e = t.monomial.exponents().get(v).copied().unwrap_or(0);
            if e > 0 {
                degree = degree.max(e);
                tdeg = tdeg.max(t.monomial.exponents().iter().sum());
                count += 1;
            }
        }
    }
    (degree, tdeg, count)
}

/// Orderings whose key sequence is lexicographically minimal.
pub fn brown_oracle(problem: &ProblemInstance) -> Vec<Vec<usize>> {
    let n = problem.num_vars();
    let keys: Vec<_> = (0..n).map(|v| brown_key(problem, v)).collect();
    let seq = |idx: &Vec<usize>| idx.iter().map(|&i| keys[i]).collect::<Vec<_>>();
    let perms = index_permutations(n);
    let best = perms.iter().map(seq).min().unwrap();
    perms.into_iter().filter(|p| seq(p) == best).collect()
}

pub fn indices(o: &VariableOrdering) -> Vec<usize> {
    o.as_slice().iter().map(|v| v.0).collect()
}

// --------------------------------------------------------------------- SVM

pub fn example(features: &[f64], positive: bool) -> LabeledExample {
    LabeledExample {
        features: features.to_vec(),
        label: Label::from_bool(positive),
    }
}

/// Exact minimum of `1/2 a'Qa - sum a` over `0 <= a <= bounds`, `y'a = 0`,
/// by enumerating which bounds are active and solving the equality
/// constrained problem on the remaining coordinates.
pub fn brute_force_dual(examples: &[LabeledExample], gamma: f64, bounds: &[f64]) -> f64 {
    let n = examples.len();
    let y: Vec<f64> = examples.iter().map(|e| e.label.sign()).collect();
    let qm = DMatrix::from_fn(n, n, |i, j| {
        let d: f64 = examples[i]
            .features
            .iter()
            .zip(&examples[j].features)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        y[i] * y[j] * (-gamma * d).exp()
    });
    let objective = |a: &[f64]| {
        let av = DVector::from_column_slice(a);
        0.5 * (av.transpose() * &qm * &av)[(0, 0)] - a.iter().sum::<f64>()
    };
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(n as u32) {
        // state per coordinate: 0 = at zero, 1 = at upper bound, 2 = free
        let mut state = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            state.push(c % 3);
            c /= 3;
        }
        let mut alpha = vec![0.0; n];
        for i in 0..n {
            if state[i] == 1 {
                alpha[i] = bounds[i];
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if !free.is_empty() {
            let k = free.len();
            let mut m = DMatrix::zeros(k + 1, k + 1);
            let mut rhs = DVector::zeros(k + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    m[(r, s)] = qm[(i, j)];
                }
                m[(r, k)] = y[i];
                m[(k, r)] = y[i];
                let fixed: f64 = (0..n)
                    .filter(|j| state[*j] != 2)
                    .map(|j| qm[(i, j)] * alpha[j])
                    .sum();
                rhs[r] = 1.0 - fixed;
            }
            rhs[k] = -(0..n)
                .filter(|j| state[*j] != 2)
                .map(|j| y[j] * alpha[j])
                .sum::<f64>();
            let Some(sol) = m.lu().solve(&rhs) else {
                continue;
            };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let feasible = alpha
            .iter()
            .zip(bounds)
            .all(|(a, b)| *a >= -1e-9 && *a <= b + 1e-9)
            && alpha
                .iter()
                .zip(&y)
                .map(|(a, yi)| a * yi)
                .sum::<f64>()
                .abs()
                < 1e-9;
        if feasible {
            best = best.min(objective(&alpha));
        }
    }
    best
}

// ----------------------------------------------------------- published tables

/// Case counts 1..=13 from the published breakdown.
pub const QUANTIFIER_FREE_CASES: [u64; 13] =
    [399, 146, 39, 208, 35, 64, 7, 106, 106, 159, 58, 230, 164];
pub const QUANTIFIED_CASES: [u64; 13] = [573, 96, 24, 232, 43, 57, 11, 66, 75, 101, 89, 208, 146];
/// Machine learning, sotd, ndrr, Brown.
pub const QUANTIFIER_FREE_TOTALS: [u64; 4] = [1312, 1039, 872, 1107];
pub const QUANTIFIED_TOTALS: [u64; 4] = [1333, 1109, 951, 1270];
/// Success percentages for the six conditional rows.
pub const QUANTIFIER_FREE_RATES: [f64; 6] = [79.0, 86.0, 90.0, 50.0, 73.0, 58.0];
pub const QUANTIFIED_RATES: [f64; 6] = [80.0, 84.0, 84.0, 47.0, 53.0, 59.0];
