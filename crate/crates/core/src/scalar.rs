//! Dual-mode scalar arithmetic: arbitrary-precision rationals or `f64`.
//!
//! Every computation runs entirely in one mode. Mixing the two modes inside
//! one arithmetic expression is a programming error and panics immediately,
//! so rounding can never leak silently into an exact computation.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

const MODE_MIX: &str = "scalar mode mismatch: exact and float values mixed in one computation";

/// A number carried in one arithmetic mode.
///
/// Exact scalars are reduced rationals with no rounding under `+ - * /`.
/// Float scalars are `f64`; all float comparisons in this crate go through
/// explicit tolerances.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

/// Error produced when a string cannot be read as a scalar in a given mode.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as a {mode}-mode scalar: {reason}")]
pub struct ScalarParseError {
    pub input: String,
    pub mode: Mode,
    pub reason: String,
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Scalar {
        Scalar::int(0, mode)
    }

    pub fn one(mode: Mode) -> Scalar {
        Scalar::int(1, mode)
    }

    /// Integer literal in the given mode.
    pub fn int(n: i64, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(n))),
            Mode::Float => Scalar::Float(n as f64),
        }
    }

    /// Ratio `p/q` in the given mode. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64, mode: Mode) -> Scalar {
        assert!(q != 0, "zero denominator in scalar ratio");
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q))),
            Mode::Float => Scalar::Float(p as f64 / q as f64),
        }
    }

    pub fn float(x: f64) -> Scalar {
        Scalar::Float(x)
    }

    pub fn exact(r: BigRational) -> Scalar {
        Scalar::Exact(r)
    }

    /// Parses an integer, a ratio `p/q`, or (float mode only) a decimal.
    ///
    /// Exact mode deliberately rejects decimal and scientific notation so a
    /// run's mode is always chosen explicitly, never inferred from rounding.
    pub fn parse(input: &str, mode: Mode) -> Result<Scalar, ScalarParseError> {
        let s = input.trim();
        let err = |reason: &str| ScalarParseError {
            input: input.to_string(),
            mode,
            reason: reason.to_string(),
        };
        if s.is_empty() {
            return Err(err("empty string"));
        }
        match mode {
            Mode::Exact => {
                if s.contains(['.', 'e', 'E']) {
                    return Err(err(
                        "exact mode accepts integers and ratios like -3/4; decimals need float mode",
                    ));
                }
                match s.split_once('/') {
                    None => BigInt::from_str(s)
                        .map(|n| Scalar::Exact(BigRational::from_integer(n)))
                        .map_err(|_| err("not an integer")),
                    Some((p, q)) => {
                        let p = BigInt::from_str(p.trim()).map_err(|_| err("bad numerator"))?;
                        let q = BigInt::from_str(q.trim()).map_err(|_| err("bad denominator"))?;
                        if q.is_zero() {
                            return Err(err("zero denominator"));
                        }
                        Ok(Scalar::Exact(BigRational::new(p, q)))
                    }
                }
            }
            Mode::Float => {
                let v = match s.split_once('/') {
                    None => f64::from_str(s).map_err(|_| err("not a number"))?,
                    Some((p, q)) => {
                        let p = f64::from_str(p.trim()).map_err(|_| err("bad numerator"))?;
                        let q = f64::from_str(q.trim()).map_err(|_| err("bad denominator"))?;
                        if q == 0.0 {
                            return Err(err("zero denominator"));
                        }
                        p / q
                    }
                };
                if !v.is_finite() {
                    return Err(err("not finite"));
                }
                Ok(Scalar::Float(v))
            }
        }
    }

    /// Lossy view of the value as `f64` (exact rationals round once, here).
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    /// True exact zero test: rational zero, or float exactly `0.0`.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(x) => x.is_finite(),
        }
    }

    /// Zero test under the mode's comparison policy: exact equality in exact
    /// mode, `|x| <= tol` in float mode.
    pub fn approx_zero(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x.abs() <= tol,
        }
    }

    /// Equality under the mode's comparison policy (see [`Scalar::approx_zero`]).
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        (self - other).approx_zero(tol)
    }

    /// Integer power; negative exponents invert (panics on exact zero base).
    pub fn pow_i(&self, n: i64) -> Scalar {
        match self {
            Scalar::Float(x) => Scalar::Float(x.powi(n.clamp(i32::MIN as i64, i32::MAX as i64) as i32)),
            Scalar::Exact(r) => {
                if n < 0 && r.is_zero() {
                    panic!("exact zero raised to a negative power");
                }
                let mut acc = BigRational::one();
                let mut base = r.clone();
                let mut e = n.unsigned_abs();
                while e > 0 {
                    if e & 1 == 1 {
                        acc = &acc * &base;
                    }
                    base = &base * &base;
                    e >>= 1;
                }
                if n < 0 {
                    acc = acc.recip();
                }
                Scalar::Exact(acc)
            }
        }
    }

    pub fn recip(&self) -> Scalar {
        self.pow_i(-1)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => panic!("{}", MODE_MIX),
                }
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "exact division by zero");
                Scalar::Exact(a / b)
            }
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a / b),
            _ => panic!("{}", MODE_MIX),
        }
    }
}
impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}
impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        &self / rhs
    }
}
impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => panic!("{}", MODE_MIX),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            _ => panic!("{}", MODE_MIX),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

// Exact scalars serialize as strings ("8", "-3/4") so rationals survive JSON
// bit-exactly; float scalars serialize as plain numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => s.serialize_str(&r.to_string()),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a number or a rational string like \"-3/4\"")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Scalar, E> {
                Scalar::parse(s, Mode::Exact).map_err(|e| E::custom(e.to_string()))
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x as f64))
            }
        }
        d.deserialize_any(V)
    }
}

/// Evenly spaced grid of `n` points from `lo` to `hi` inclusive, in the mode
/// of the endpoints. Exact mode yields exact rational nodes.
pub fn linear_grid(lo: &Scalar, hi: &Scalar, n: usize) -> Vec<Scalar> {
    assert!(n >= 1, "grid needs at least one point");
    if n == 1 {
        return vec![lo.clone()];
    }
    let span = hi - lo;
    let denom = Scalar::int((n - 1) as i64, lo.mode());
    (0..n)
        .map(|j| lo + &(&(&span * &Scalar::int(j as i64, lo.mode())) / &denom))
        .collect()
}

/// Uniform draw from the lattice `{k/denom : lo_k <= k <= hi_k}`, the
/// sampling policy used for reproducible rational test points.
pub fn lattice_rational(
    rng: &mut impl rand::Rng,
    lo_k: i64,
    hi_k: i64,
    denom: i64,
    mode: Mode,
) -> Scalar {
    let k = rng.gen_range(lo_k..=hi_k);
    Scalar::ratio(k, denom, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(p: i64, q: i64) -> Scalar {
        Scalar::ratio(p, q, Mode::Exact)
    }

    #[test]
    fn exact_arithmetic_is_closed_and_reduced() {
        let a = ex(1, 3);
        let b = ex(1, 6);
        assert_eq!(&a + &b, ex(1, 2));
        assert_eq!(&a - &b, ex(1, 6));
        assert_eq!(&a * &b, ex(1, 18));
        assert_eq!(&a / &b, Scalar::int(2, Mode::Exact));
        assert_eq!(ex(-4, 8).to_string(), "-1/2");
    }

    #[test]
    #[should_panic(expected = "mode mismatch")]
    fn mixing_modes_panics() {
        let _ = Scalar::int(1, Mode::Exact) + Scalar::float(1.0);
    }

    #[test]
    fn parse_accepts_integers_ratios_and_decimals_per_mode() {
        assert_eq!(Scalar::parse("8", Mode::Exact).unwrap(), Scalar::int(8, Mode::Exact));
        assert_eq!(Scalar::parse("-3/4", Mode::Exact).unwrap(), ex(-3, 4));
        assert_eq!(Scalar::parse(" 1/2 ", Mode::Float).unwrap(), Scalar::float(0.5));
        assert_eq!(Scalar::parse("1e-3", Mode::Float).unwrap(), Scalar::float(1e-3));
        assert!(Scalar::parse("0.5", Mode::Exact).is_err());
        assert!(Scalar::parse("1/0", Mode::Exact).is_err());
        assert!(Scalar::parse("", Mode::Float).is_err());
        assert!(Scalar::parse("inf", Mode::Float).is_err());
    }

    #[test]
    fn pow_i_handles_negative_exponents() {
        assert_eq!(ex(2, 3).pow_i(2), ex(4, 9));
        assert_eq!(ex(2, 3).pow_i(-2), ex(9, 4));
        assert_eq!(ex(5, 1).pow_i(0), Scalar::one(Mode::Exact));
        assert_eq!(Scalar::float(2.0).pow_i(-1), Scalar::float(0.5));
    }

    #[test]
    fn approx_comparisons_follow_mode_policy() {
        assert!(ex(0, 5).approx_zero(0.0));
        assert!(!ex(1, 1_000_000_000).approx_zero(1e-3));
        assert!(Scalar::float(1e-13).approx_zero(1e-12));
        assert!(Scalar::float(1.0).approx_eq(&Scalar::float(1.0 + 1e-13), 1e-12));
    }

    #[test]
    fn serde_round_trips_both_modes() {
        let e = ex(-7, 3);
        let js = serde_json::to_string(&e).unwrap();
        assert_eq!(js, "\"-7/3\"");
        assert_eq!(serde_json::from_str::<Scalar>(&js).unwrap(), e);

        let f = Scalar::float(0.01);
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(js, "0.01");
        assert_eq!(serde_json::from_str::<Scalar>(&js).unwrap(), f);
    }

    #[test]
    fn linear_grid_hits_endpoints_exactly() {
        let g = linear_grid(&Scalar::int(-5, Mode::Exact), &Scalar::int(5, Mode::Exact), 21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], Scalar::int(-5, Mode::Exact));
        assert_eq!(g[20], Scalar::int(5, Mode::Exact));
        assert_eq!(g[10], Scalar::zero(Mode::Exact));
        assert_eq!(g[11], ex(1, 2));
    }

    #[test]
    fn lattice_rational_stays_in_range_and_is_seeded() {
        use rand::SeedableRng;
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = lattice_rational(&mut r1, 16, 256, 64, Mode::Exact);
            let b = lattice_rational(&mut r2, 16, 256, 64, Mode::Exact);
            assert_eq!(a, b);
            assert!(a >= ex(1, 4) && a <= Scalar::int(4, Mode::Exact));
        }
    }
}
