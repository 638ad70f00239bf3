//! Dense univariate polynomials, coefficients in ascending degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{format_rational, parse_rational, positive_divisors, Rational};

/// Polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_u64(&self, n: u64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    /// `gcd` of the coefficients, zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Rising factorial `x (x + 1) ... (x + e - 1)`.
    pub fn rising_factorial(e: u32) -> IntPoly {
        (0..e).fold(IntPoly::one(), |acc, i| &acc * &IntPoly::from_i64(&[i as i64, 1]))
    }

    /// `p(a x + b)`.
    pub fn compose_linear(&self, a: &BigInt, b: &BigInt) -> IntPoly {
        let lin = IntPoly::new(vec![b.clone(), a.clone()]);
        let mut out = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &IntPoly::new(vec![c.clone()]);
        }
        out
    }
}

impl<'a> Add<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &rhs.scale(&BigInt::from(-1))
    }
}

impl<'a> Mul<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| c.to_string()).collect(), |c| c == "0")
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, coeffs: Vec<String>, is_zero: impl Fn(&str) -> bool) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if is_zero(c) {
            continue;
        }
        let (neg, mag) = match c.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, c.clone()),
        };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let show_coeff = i == 0 || mag != "1";
        if show_coeff {
            write!(f, "{mag}")?;
        }
        match i {
            0 => {}
            1 => write!(f, "x")?,
            _ => write!(f, "x^{i}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::zero(),
        }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// `p(x + r)`.
    pub fn shift(&self, r: &Rational) -> Poly {
        let lin = Poly::new(vec![r.clone(), Rational::one()]);
        let mut out = Poly::zero();
        for c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Poly::constant(c.clone());
        }
        out
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("divisor is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Writes `self = scale * primitive` with `primitive` an integer polynomial
    /// of content 1 and positive leading coefficient.
    pub fn to_primitive(&self) -> (Rational, IntPoly) {
        if self.is_zero() {
            return (Rational::zero(), IntPoly::zero());
        }
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let mut content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().is_some_and(|l| l.is_negative()) {
            content = -content;
        }
        let prim = IntPoly::new(ints.iter().map(|c| c / &content).collect());
        (Rational::new(content, den), prim)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
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
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().map(|c| c.to_string()).collect(), |c| c == "0")
    }
}

/// Coefficients travel as JSON integers; values outside `i64` fall back to strings.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

fn to_wire(c: &BigInt) -> WireInt {
    use num_traits::ToPrimitive;
    match c.to_i64() {
        Some(v) => WireInt::Small(v),
        None => WireInt::Big(c.to_string()),
    }
}

/// Serializes a single integer the way polynomial coefficients are written.
pub(crate) fn serialize_wire_int<S: Serializer>(c: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_wire(c).serialize(s)
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: Vec<WireInt> = self.coeffs.iter().map(to_wire).collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = Vec::<WireInt>::deserialize(d)?;
        let coeffs = wire
            .into_iter()
            .map(|w| match w {
                WireInt::Small(v) => Ok(BigInt::from(v)),
                WireInt::Big(s) => s.parse::<BigInt>().map_err(serde::de::Error::custom),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = Vec::<String>::deserialize(d)?;
        let coeffs = wire
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

/// A rational root `numer/denom` in lowest terms (`denom >= 1`) with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRoot {
    pub root: Rational,
    pub multiplicity: u32,
}

/// All rational roots of a nonzero integer polynomial, with multiplicities,
/// and the integer cofactor left after deflating them.
///
/// Candidates come from the rational root theorem: a root `a/c` in lowest
/// terms has `a | q(0)` and `c | lead(q)` once zero roots are removed.
pub fn rational_roots(q: &IntPoly) -> Result<(Vec<RationalRoot>, IntPoly)> {
    if q.is_zero() {
        return Err(Error::InvalidPolynomial("zero polynomial has no finite root set".into()));
    }
    let mut roots = Vec::new();
    let zeros = q.coeffs().iter().take_while(|c| c.is_zero()).count();
    let mut rest = IntPoly::new(q.coeffs()[zeros..].to_vec());
    if zeros > 0 {
        roots.push(RationalRoot { root: Rational::zero(), multiplicity: zeros as u32 });
    }
    if rest.degree().unwrap_or(0) == 0 {
        return Ok((roots, rest));
    }
    let numer_divs = positive_divisors(&rest.coeffs()[0]);
    let denom_divs = positive_divisors(rest.leading().expect("nonzero"));
    let mut candidates: Vec<Rational> = Vec::new();
    for a in &numer_divs {
        for c in &denom_divs {
            if !a.gcd(c).is_one() {
                continue;
            }
            candidates.push(Rational::new(a.clone(), c.clone()));
            candidates.push(Rational::new(-a.clone(), c.clone()));
        }
    }
    candidates.sort();
    for r in candidates {
        let mut mult = 0u32;
        while rest.degree().unwrap_or(0) > 0 && rest.eval_rational(&r).is_zero() {
            rest = deflate(&rest, &r);
            mult += 1;
        }
        if mult > 0 {
            roots.push(RationalRoot { root: r, multiplicity: mult });
        }
    }
    roots.sort_by(|a, b| a.root.cmp(&b.root));
    Ok((roots, rest))
}

/// Exact division of `q` by the primitive factor `(c x - a)` of root `a/c`.
fn deflate(q: &IntPoly, root: &Rational) -> IntPoly {
    let factor = Poly::new(vec![
        Rational::from_integer(-root.numer().clone()),
        Rational::from_integer(root.denom().clone()),
    ]);
    let (quot, rem) = q.to_poly().div_rem(&factor).expect("nonzero factor");
    debug_assert!(rem.is_zero());
    IntPoly::new(
        quot.coeffs()
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer(), "Gauss's lemma keeps the quotient integral");
                c.to_integer()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    fn q(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn display() {
        assert_eq!(q(&[0, 1, 6, 8]).to_string(), "8x^3 + 6x^2 + x");
        assert_eq!(q(&[-1, 0, -1]).to_string(), "-x^2 - 1");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    #[test]
    fn division_and_gcd() {
        let a = q(&[0, 0, 1]).to_poly(); // x^2
        let b = q(&[0, 1]).to_poly(); // x
        assert_eq!(Poly::gcd(&a, &b), b);
        let (quot, rem) = q(&[1, 0, 1]).to_poly().div_rem(&q(&[1, 1]).to_poly()).unwrap();
        assert_eq!(quot, q(&[-1, 1]).to_poly());
        assert_eq!(rem, q(&[2]).to_poly());
        assert!(Poly::gcd(&q(&[1, 0, 1]).to_poly(), &q(&[0, 1]).to_poly()).degree() == Some(0));
        assert_eq!(q(&[1]).to_poly().div_rem(&Poly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn roots_of_lehmer_like_denominator() {
        // x (2x + 1)(4x + 1)
        let (roots, rest) = rational_roots(&q(&[0, 1, 6, 8])).unwrap();
        let rs: Vec<Rational> = roots.iter().map(|r| r.root.clone()).collect();
        assert_eq!(rs, vec![rational(-1, 2), rational(-1, 4), rational(0, 1)]);
        assert_eq!(rest.degree(), Some(0));
        assert_eq!(rest.coeffs()[0], BigInt::from(1));
    }

    #[test]
    fn roots_with_multiplicity_and_irreducible_rest() {
        // (x - 1)^2 (x^2 + 1) = x^4 - 2x^3 + 2x^2 - 2x + 1
        let (roots, rest) = rational_roots(&q(&[1, -2, 2, -2, 1])).unwrap();
        assert_eq!(roots, vec![RationalRoot { root: rational(1, 1), multiplicity: 2 }]);
        assert_eq!(rest, q(&[1, 0, 1]));
    }

    #[test]
    fn shift_and_compose() {
        let p = q(&[1, 2, 3]).to_poly();
        let r = rational(1, 2);
        let shifted = p.shift(&r);
        for x in [rational(0, 1), rational(3, 7)] {
            assert_eq!(shifted.eval(&x), p.eval(&(&x + &r)));
        }
        let c = q(&[1, 2, 3]).compose_linear(&BigInt::from(2), &BigInt::from(-1));
        assert_eq!(c.eval(&BigInt::from(5)), q(&[1, 2, 3]).eval(&BigInt::from(9)));
    }

    #[test]
    fn primitive_part() {
        let p = Poly::new(vec![rational(-1, 2), rational(0, 1), rational(-3, 4)]);
        let (scale, prim) = p.to_primitive();
        assert_eq!(prim, q(&[2, 0, 3]));
        assert_eq!(prim.to_poly().scale(&scale), p);
    }
}
