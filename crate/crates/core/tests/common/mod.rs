//! Shared helpers for the integration tests: an exact bivariate polynomial
//! implemented independently of the library's arithmetic, used to expand
//! defects of monomial inputs symbolically.

use monomial_lab::{EquationFamily, Scalar};
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use std::collections::BTreeMap;

/// Bivariate polynomial over the rationals, keyed by `(deg_x, deg_y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

#[allow(dead_code)]
impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: (u32, u32), c: BigRational) {
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `c * (alpha x + beta y)^d`, expanded by the binomial theorem.
    pub fn scaled_power(c: &BigRational, d: u32, alpha: &BigRational, beta: &BigRational) -> Self {
        let mut out = Poly2::zero();
        for m in 0..=d {
            let coeff = c
                * BigRational::from_integer(binomial(d, m))
                * alpha.pow(m as i32)
                * beta.pow((d - m) as i32);
            out.add_term((m, d - m), coeff);
        }
        out
    }

    pub fn add(&self, other: &Poly2) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        self.terms
            .iter()
            .map(|((i, j), c)| c * x.pow(*i as i32) * y.pow(*j as i32))
            .fold(BigRational::zero(), |acc, t| acc + t)
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

#[allow(dead_code)]
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Extracts the rational payload of an exact scalar.
pub fn unwrap_exact(s: &Scalar) -> BigRational {
    match s {
        Scalar::Exact(r) => r.clone(),
        Scalar::Float(v) => panic!("expected an exact scalar, got float {v}"),
    }
}

/// The defect of `f(t) = t^d` under the family, expanded symbolically:
/// `c1 (ax+by)^d + c2 (ax-by)^d - c3 x^d - c4 y^d - c5 (x+y)^d - c6 (x-y)^d`.
#[allow(dead_code)]
pub fn monomial_defect_poly(family: &EquationFamily, d: u32) -> Poly2 {
    let a = unwrap_exact(family.a());
    let b = unwrap_exact(family.b());
    let c = |i: usize| unwrap_exact(family.c(i));
    let one = BigRational::one();
    let neg = |r: &BigRational| -r.clone();

    Poly2::scaled_power(&c(1), d, &a, &b)
        .add(&Poly2::scaled_power(&c(2), d, &a, &neg(&b)))
        .add(&Poly2::scaled_power(&neg(&c(3)), d, &one, &BigRational::zero()))
        .add(&Poly2::scaled_power(&neg(&c(4)), d, &BigRational::zero(), &one))
        .add(&Poly2::scaled_power(&neg(&c(5)), d, &one, &one))
        .add(&Poly2::scaled_power(&neg(&c(6)), d, &one, &neg(&one)))
}
