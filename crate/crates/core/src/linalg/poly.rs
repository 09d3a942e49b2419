//! Dense univariate polynomials over the rationals.
//!
//! `UniPoly` is the coefficient ring element used throughout the engine. A
//! rational number is a constant polynomial; whether a computation is "over Q"
//! or "over Q[t]" is tracked by the container (matrix, model) via
//! [`CoefficientRing`](super::CoefficientRing), not by the scalar itself.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{CourantError, Result};

pub type Rational = num_rational::BigRational;

/// Builds a rational from a small integer pair. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || CourantError::Parse(format!("invalid rational '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Polynomial in `t` with rational coefficients, `coeffs[k]` multiplying `t^k`.
///
/// Invariant: the last stored coefficient is nonzero (the zero polynomial has
/// no coefficients).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The transverse variable `t`.
    pub fn t() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Units of Q[t] are the nonzero constants.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplicative inverse; only defined for units.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_unit() {
            Some(Self::constant(self.coeffs[0].recip()))
        } else {
            None
        }
    }

    /// Scales to a monic polynomial; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        if d.is_unit() {
            return (self.scale(&d.coeffs[0].recip()), UniPoly::zero());
        }
        let lead_inv = d.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (UniPoly::zero(), UniPoly::zero());
        };
        if sd < dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); sd - dd + 1];
        for k in (dd..=sd).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] * &lead_inv;
            for (i, dc) in d.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] -= &c * dc;
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (UniPoly::from_coeffs(quot), UniPoly::from_coeffs(rem))
    }

    /// Exact quotient if `d` divides `self`.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        if d.is_zero() {
            return if self.is_zero() { Some(Self::zero()) } else { None };
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &UniPoly) -> bool {
        other.exact_div(self).is_some()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic lcm; zero if either argument is zero.
    pub fn lcm(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let g = self.gcd(other);
        (self * other).exact_div(&g).expect("gcd divides product").monic()
    }

    /// Reduction to the canonical remainder modulo `m`; identity when `m = 0`.
    pub fn rem_mod(&self, m: &UniPoly) -> UniPoly {
        if m.is_zero() {
            self.clone()
        } else {
            self.div_rem(m).1
        }
    }

    /// Size measure used for pivot selection: the degree (zero has none).
    pub fn norm(&self) -> usize {
        self.degree().unwrap_or(usize::MAX)
    }
}

impl From<Rational> for UniPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for UniPoly {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl PartialOrd for UniPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order: by degree, then coefficients from the top. Used only to make
/// iteration orders deterministic.
impl Ord for UniPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

fn add_coeffs(a: &[Rational], b: &[Rational], sign: bool) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(Rational::zero);
            match b.get(k) {
                Some(y) if sign => x + y,
                Some(y) => x - y,
                None => x,
            }
        })
        .collect()
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::from_coeffs(add_coeffs(&self.coeffs, &rhs.coeffs, true))
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        &self + &rhs
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::from_coeffs(add_coeffs(&self.coeffs, &rhs.coeffs, false))
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        &self - &rhs
    }
}

impl AddAssign<&UniPoly> for UniPoly {
    fn add_assign(&mut self, rhs: &UniPoly) {
        if rhs.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl SubAssign<&UniPoly> for UniPoly {
    fn sub_assign(&mut self, rhs: &UniPoly) {
        if rhs.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        if rhs.is_unit() {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.is_unit() {
            return rhs.scale(&self.coeffs[0]);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        &self * &rhs
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders as e.g. `3/2*t^2 - 1`; the zero polynomial renders as `0`.
impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let body = match k {
                0 => fmt_rational(&a),
                _ => {
                    let var = if k == 1 { "t".to_string() } else { format!("t^{k}") };
                    if a.is_one() {
                        var
                    } else {
                        format!("{}*{}", fmt_rational(&a), var)
                    }
                }
            };
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

/// Parses sums of `c*t^k` terms, e.g. `"3/2*t^2 - 1"`, `"-t"`, `"2 t"`.
impl FromStr for UniPoly {
    type Err = CourantError;

    fn from_str(s: &str) -> Result<Self> {
        let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(CourantError::Parse("empty polynomial".into()));
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in src.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        terms.push((neg, cur));

        let mut acc = UniPoly::zero();
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(CourantError::Parse(format!("dangling sign in '{s}'")));
            }
            let (coef, power) = match term.find('t') {
                None => (parse_rational(&term)?, 0usize),
                Some(pos) => {
                    let (head, tail) = term.split_at(pos);
                    let coef = match head.strip_suffix('*').unwrap_or(head) {
                        "" => Rational::one(),
                        h => parse_rational(h)?,
                    };
                    let power = match &tail[1..] {
                        "" => 1,
                        p => p
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| CourantError::Parse(format!("bad exponent in '{term}'")))?,
                    };
                    (coef, power)
                }
            };
            let coef = if neg { -coef } else { coef };
            acc += &UniPoly::monomial(coef, power);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> UniPoly {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3/2*t^2 - 1", "t", "-t", "0", "1/3", "t^3 + 2*t - 5/7"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("2 t + t"), p("3*t"));
        assert_eq!(p("t^2-t^2"), UniPoly::zero());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<UniPoly>().is_err());
        assert!("t^x".parse::<UniPoly>().is_err());
        assert!("1/0".parse::<UniPoly>().is_err());
        assert!("3+".parse::<UniPoly>().is_err());
    }

    #[test]
    fn division_with_remainder() {
        let a = p("t^3 + 2*t + 1");
        let d = p("t^2 + 1");
        let (q, r) = a.div_rem(&d);
        assert_eq!(q, p("t"));
        assert_eq!(r, p("t + 1"));
        assert_eq!(&(&q * &d) + &r, a);
    }

    #[test]
    fn gcd_is_monic() {
        let a = p("2*t^2 - 2");
        let b = p("3*t - 3");
        assert_eq!(a.gcd(&b), p("t - 1"));
        assert_eq!(UniPoly::zero().gcd(&p("2*t")), p("t"));
        assert_eq!(a.lcm(&b), p("t^2 - 1"));
    }

    #[test]
    fn derivative_of_square() {
        assert_eq!(p("t^2").derivative(), p("2*t"));
        assert!(p("5").derivative().is_zero());
    }
}
