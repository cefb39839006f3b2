//! The function mini-language used by `--fn` and config files.
//!
//! Grammar (whitespace is stripped before parsing; positions refer to the
//! stripped text):
//!
//! ```text
//! spec  := term ('+' term)*
//! term  := 'poly:' num (',' num)*          -- 1..=5 coefficients, low first
//!        | 'sin:amp=' num ',freq=' num
//!        | 'cos:amp=' num ',freq=' num
//!        | 'noise:amp=' num ',seed=' uint
//!        | 'scale:' num '(' spec ')'
//! num   := integer | ratio p/q | decimal/scientific float literal
//! ```
//!
//! Decimal or scientific literals and the trigonometric terms force float
//! mode; integer and ratio literals (and `noise`, whose values are dyadic
//! rationals) work in either mode.

use monomial_lab::{FunctionHandle, Mode, Scalar};
use std::fmt;

/// One additive term of a function spec.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// `poly:c0,c1,...` — coefficients from the constant term up.
    Poly { coeffs: Vec<String> },
    /// `sin:amp=A,freq=F` — `A sin(F x)`.
    Sin { amp: String, freq: String },
    /// `cos:amp=A,freq=F` — `A cos(F x)`.
    Cos { amp: String, freq: String },
    /// `noise:amp=A,seed=S` — deterministic hash noise in `[-A, A)`,
    /// pinned to zero at the origin.
    Noise { amp: String, seed: u64 },
    /// `scale:F(spec)` — the inner spec scaled by `F`.
    Scale { factor: String, inner: Box<FunctionSpec> },
}

/// A sum of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub terms: Vec<Term>,
}

/// Parse failure at a byte position of the whitespace-stripped input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Poly { coeffs } => write!(f, "poly:{}", coeffs.join(",")),
            Term::Sin { amp, freq } => write!(f, "sin:amp={amp},freq={freq}"),
            Term::Cos { amp, freq } => write!(f, "cos:amp={amp},freq={freq}"),
            Term::Noise { amp, seed } => write!(f, "noise:amp={amp},seed={seed}"),
            Term::Scale { factor, inner } => write!(f, "scale:{factor}({inner})"),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn found_here(&self) -> String {
        match self.peek() {
            Some(b) => format!("{:?}", b as char),
            None => "end of input".to_string(),
        }
    }

    fn err(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.pos,
            expected: expected.to_string(),
            found: self.found_here(),
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("{:?}", b as char)))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.s[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(self.err(&format!("{kw:?}")))
        }
    }

    /// Scans one number literal: optional leading '-', then digits with an
    /// optional '.', an optional exponent, or a `p/q` ratio.
    fn number(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("a number"));
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let denom_start = self.pos;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == denom_start {
                return Err(self.err("denominator digits"));
            }
            return Ok(self.take_from(start));
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_start {
                return Err(self.err("exponent digits"));
            }
        }
        Ok(self.take_from(start))
    }

    fn unsigned(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("an unsigned integer"));
        }
        self.take_from(start)
            .parse()
            .map_err(|_| ParseError {
                position: start,
                expected: "an unsigned 64-bit integer".to_string(),
                found: self.take_from(start),
            })
    }

    fn take_from(&self, start: usize) -> String {
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }
}

/// Parses a spec from text; whitespace is ignored everywhere.
pub fn parse(input: &str) -> Result<FunctionSpec, ParseError> {
    let stripped: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cur = Cursor { s: stripped.as_bytes(), pos: 0 };
    let spec = parse_spec(&mut cur)?;
    if cur.peek().is_some() {
        return Err(cur.err("end of input or '+'"));
    }
    Ok(spec)
}

fn parse_spec(cur: &mut Cursor) -> Result<FunctionSpec, ParseError> {
    let mut terms = vec![parse_term(cur)?];
    while cur.peek() == Some(b'+') {
        cur.pos += 1;
        terms.push(parse_term(cur)?);
    }
    Ok(FunctionSpec { terms })
}

fn parse_term(cur: &mut Cursor) -> Result<Term, ParseError> {
    let start = cur.pos;
    while cur.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
        cur.pos += 1;
    }
    let name = cur.take_from(start);
    match name.as_str() {
        "poly" => {
            cur.expect(b':')?;
            let mut coeffs = vec![cur.number()?];
            while cur.peek() == Some(b',') {
                cur.pos += 1;
                coeffs.push(cur.number()?);
            }
            if coeffs.len() > 5 {
                return Err(ParseError {
                    position: start,
                    expected: "at most 5 polynomial coefficients".to_string(),
                    found: format!("{} coefficients", coeffs.len()),
                });
            }
            Ok(Term::Poly { coeffs })
        }
        "sin" | "cos" => {
            cur.expect(b':')?;
            cur.eat_keyword("amp=")?;
            let amp = cur.number()?;
            cur.expect(b',')?;
            cur.eat_keyword("freq=")?;
            let freq = cur.number()?;
            if name == "sin" {
                Ok(Term::Sin { amp, freq })
            } else {
                Ok(Term::Cos { amp, freq })
            }
        }
        "noise" => {
            cur.expect(b':')?;
            cur.eat_keyword("amp=")?;
            let amp = cur.number()?;
            cur.expect(b',')?;
            cur.eat_keyword("seed=")?;
            let seed = cur.unsigned()?;
            Ok(Term::Noise { amp, seed })
        }
        "scale" => {
            cur.expect(b':')?;
            let factor = cur.number()?;
            cur.expect(b'(')?;
            let inner = parse_spec(cur)?;
            cur.expect(b')')?;
            Ok(Term::Scale { factor, inner: Box::new(inner) })
        }
        _ => Err(ParseError {
            position: start,
            expected: "a term (poly, sin, cos, noise, scale)".to_string(),
            found: if name.is_empty() {
                Cursor { s: cur.s, pos: start }.found_here()
            } else {
                format!("{name:?}")
            },
        }),
    }
}

fn literal_needs_float(lit: &str) -> bool {
    lit.contains(['.', 'e', 'E'])
}

impl Term {
    fn requires_float(&self) -> bool {
        match self {
            Term::Poly { coeffs } => coeffs.iter().any(|c| literal_needs_float(c)),
            Term::Sin { .. } | Term::Cos { .. } => true,
            Term::Noise { amp, .. } => literal_needs_float(amp),
            Term::Scale { factor, inner } => {
                literal_needs_float(factor) || inner.requires_float()
            }
        }
    }
}

impl FunctionSpec {
    /// True when this function spec contains a construct that only evaluates in
    /// float mode (trigonometric terms or decimal literals).
    pub fn requires_float(&self) -> bool {
        self.terms.iter().any(Term::requires_float)
    }

    /// Builds an evaluable handle in the given mode. Fails when this function
    /// spec requires float mode but `mode` is exact.
    pub fn to_handle(&self, mode: Mode) -> Result<FunctionHandle, ParseError> {
        let mut acc: Option<FunctionHandle> = None;
        for term in &self.terms {
            let h = term.to_handle(mode)?;
            acc = Some(match acc {
                Some(prev) => prev.add(&h),
                None => h,
            });
        }
        Ok(acc.expect("specs have at least one term"))
    }
}

fn scalar_lit(lit: &str, mode: Mode) -> Result<Scalar, ParseError> {
    Scalar::parse(lit, mode).map_err(|e| ParseError {
        position: 0,
        expected: format!("a literal valid in {mode} mode"),
        found: e.to_string(),
    })
}

impl Term {
    fn to_handle(&self, mode: Mode) -> Result<FunctionHandle, ParseError> {
        match self {
            Term::Poly { coeffs } => {
                let cs: Result<Vec<Scalar>, ParseError> =
                    coeffs.iter().map(|c| scalar_lit(c, mode)).collect();
                Ok(FunctionHandle::poly(mode, &cs?))
            }
            Term::Sin { amp, freq } | Term::Cos { amp, freq } => {
                if mode == Mode::Exact {
                    return Err(ParseError {
                        position: 0,
                        expected: "float mode for trigonometric terms".to_string(),
                        found: "exact mode".to_string(),
                    });
                }
                let a = scalar_lit(amp, mode)?.to_f64();
                let w = scalar_lit(freq, mode)?.to_f64();
                let is_sin = matches!(self, Term::Sin { .. });
                Ok(FunctionHandle::from_pure(mode, move |x| {
                    let t = w * x.to_f64();
                    Scalar::float(a * if is_sin { t.sin() } else { t.cos() })
                }))
            }
            Term::Noise { amp, seed } => {
                let a = scalar_lit(amp, mode)?;
                let seed = *seed;
                Ok(FunctionHandle::from_pure(mode, move |x| {
                    &a * &noise_unit(seed, x)
                }))
            }
            Term::Scale { factor, inner } => {
                let c = scalar_lit(factor, mode)?;
                Ok(inner.to_handle(mode)?.scale(&c))
            }
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(h: u64, bytes: &[u8]) -> u64 {
    bytes.iter().fold(h, |acc, &b| {
        (acc ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic unit noise in `[-1, 1)`: a hash of `(seed, x)` mapped to
/// the dyadic lattice `k / 2^52 - 1`, identical arithmetic in both modes.
/// The origin is pinned to zero so perturbations keep `f(0) = 0`.
fn noise_unit(seed: u64, x: &Scalar) -> Scalar {
    if x.is_zero() {
        return Scalar::zero(x.mode());
    }
    let mut h = fnv1a(FNV_OFFSET, &seed.to_le_bytes());
    match x {
        Scalar::Exact(r) => {
            h = fnv1a(h, b"e");
            h = fnv1a(h, r.to_string().as_bytes());
        }
        Scalar::Float(v) => {
            h = fnv1a(h, b"f");
            h = fnv1a(h, &v.to_bits().to_le_bytes());
        }
    }
    let k = splitmix_finalize(h) >> 11; // 53 bits
    match x.mode() {
        Mode::Float => Scalar::float(k as f64 / (1u64 << 52) as f64 - 1.0),
        Mode::Exact => {
            let num = k as i64 - (1i64 << 52);
            let lit = format!("{num}/{}", 1u64 << 52);
            Scalar::parse(&lit, Mode::Exact).expect("dyadic literal")
        }
    }
}
