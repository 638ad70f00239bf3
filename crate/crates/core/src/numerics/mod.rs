//! Exact integer and rational arithmetic plus midpoint–radius enclosures.
//!
//! Every approximate quantity in the crate is a [`BoundedReal`]: an exact
//! rational midpoint and an exact rational radius. Containment claims are
//! therefore decided exactly, never by floating-point comparison.

mod bounded;
mod constants;

pub use bounded::BoundedReal;
pub use constants::{const_pi, exp_bounded, exp_real, ln_rational};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Guard bits added whenever an enclosure is rounded outward.
pub const GUARD_BITS: u64 = 32;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `a / b`, reporting division by zero instead of panicking.
pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    Rational::new(x.numer().mod_floor(x.denom()), x.denom().clone())
}

pub fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// `2^-bits` as an exact rational.
pub fn ulp(bits: u64) -> Rational {
    Rational::new(BigInt::one(), pow2(bits))
}

/// `floor(x * 2^bits)`.
pub fn floor_scaled(x: &Rational, bits: u64) -> BigInt {
    (x.numer() << bits).div_floor(x.denom())
}

/// `ceil(x * 2^bits)`.
pub fn ceil_scaled(x: &Rational, bits: u64) -> BigInt {
    -((-(x.numer() << bits)).div_floor(x.denom()))
}

pub fn dyadic(numer: BigInt, bits: u64) -> Rational {
    Rational::new(numer, pow2(bits))
}

pub fn pow_rational(x: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(x.clone(), exp as usize)
    } else {
        num_traits::pow(x.recip(), exp.unsigned_abs() as usize)
    }
}

/// Toroidal distance on R/Z: `min(|u - v| mod 1, 1 - |u - v| mod 1)`.
pub fn toroidal_distance(u: &Rational, v: &Rational) -> Rational {
    let d = frac(&(u - v));
    let other = Rational::one() - &d;
    if d <= other {
        d
    } else {
        other
    }
}

/// Best-effort `f64` view of an exact rational (for reports and plots only).
pub fn to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Shift both parts down to 64 significant bits.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n = (x.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// `"num/den"` with an explicit denominator, the crate's wire format for exact rationals.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `base^exponent mod modulus` by square-and-multiply.
pub fn mod_pow(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if modulus.is_one() {
        return Ok(BigUint::zero());
    }
    let mut result = BigUint::one();
    let mut acc = base % modulus;
    for i in 0..exponent.bits() {
        if exponent.bit(i) {
            result = (&result * &acc) % modulus;
        }
        acc = (&acc * &acc) % modulus;
    }
    Ok(result)
}

/// Word-sized [`mod_pow`]; intermediate products are carried in `u128`.
pub fn mod_pow_u64(base: u64, mut exponent: u64, modulus: u64) -> u64 {
    assert!(modulus >= 1, "modulus must be at least 1");
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut result: u128 = 1;
    let mut acc = base as u128 % m;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = result * acc % m;
        }
        acc = acc * acc % m;
        exponent >>= 1;
    }
    result as u64
}

/// Least common multiple of the absolute values.
pub fn lcm_int(values: &[BigInt]) -> Result<BigInt> {
    if values.is_empty() {
        return Err(Error::EmptyLcm);
    }
    let mut acc = BigInt::one();
    for v in values {
        if v.is_zero() {
            return Err(Error::ZeroInLcm);
        }
        acc = acc.lcm(&v.abs());
    }
    Ok(acc)
}

/// Ceiling of `log2(x)` for a positive rational, as a signed bit count.
pub(crate) fn log2_ceil(x: &Rational) -> i64 {
    debug_assert!(x.is_positive());
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64 + 1;
    // `e` is an upper bound within one; tighten it.
    while e > i64::MIN / 2 && pow2_signed(e - 1) >= *x {
        e -= 1;
    }
    e
}

pub(crate) fn pow2_signed(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(pow2(e as u64))
    } else {
        ulp(e.unsigned_abs())
    }
}

/// Integer divisors of `|n|`, `n != 0`, by trial division.
pub(crate) fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    debug_assert!(!n.is_zero());
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut k = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            k += 1;
        }
        if k > 0 {
            factors.push((p.clone(), k));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if !rest.is_one() {
        factors.push((rest, 1));
    }
    let mut divisors = vec![BigInt::one()];
    for (p, k) in factors {
        let mut next = Vec::with_capacity(divisors.len() * (k as usize + 1));
        for d in &divisors {
            let mut pk = d.clone();
            next.push(pk.clone());
            for _ in 0..k {
                pk *= &p;
                next.push(pk.clone());
            }
        }
        divisors = next;
    }
    divisors.sort();
    divisors
}

pub(crate) mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }
    }
}

pub(crate) mod serde_bigint {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)).unwrap(), big(24));
        assert_eq!(mod_pow(&big(7), &big(0), &big(13)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(5), &big(1), &big(1)).unwrap(), big(0));
        assert_eq!(mod_pow(&big(5), &big(1), &big(0)), Err(Error::ZeroModulus));
    }

    #[test]
    fn mod_pow_matches_repeated_multiplication() {
        for a in 0..=12u64 {
            for e in 0..=12u64 {
                for m in 1..=50u64 {
                    let mut direct = 1 % m;
                    for _ in 0..e {
                        direct = direct * a % m;
                    }
                    assert_eq!(mod_pow(&big(a), &big(e), &big(m)).unwrap(), big(direct));
                    assert_eq!(mod_pow_u64(a, e, m), direct);
                }
            }
        }
    }

    #[test]
    fn mod_pow_u64_large_modulus() {
        let m = u64::MAX - 58; // prime
        let a = 0x1234_5678_9abc_def0u64;
        let big_result = mod_pow(&big(a), &big(1_000_003), &big(m)).unwrap();
        assert_eq!(big(mod_pow_u64(a, 1_000_003, m)), big_result);
    }

    #[test]
    fn lcm_examples() {
        let v = |xs: &[i64]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(lcm_int(&v(&[1, 2, 3, 4])).unwrap(), BigInt::from(12));
        assert_eq!(lcm_int(&v(&[6, -4])).unwrap(), BigInt::from(12));
        let one_to_twenty: Vec<i64> = (1..=20).collect();
        assert_eq!(lcm_int(&v(&one_to_twenty)).unwrap(), BigInt::from(232_792_560u64));
        assert_eq!(lcm_int(&[]), Err(Error::EmptyLcm));
        assert_eq!(lcm_int(&v(&[3, 0])), Err(Error::ZeroInLcm));
    }

    #[test]
    fn lcm_one_to_twenty_by_gcd_accumulation() {
        // Independent route: lcm(a, b) = a * b / gcd(a, b) with a hand-rolled Euclid.
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let acc = (1..=20u64).fold(1u64, |acc, k| acc / gcd(acc, k) * k);
        assert_eq!(acc, 232_792_560);
    }

    #[test]
    fn rational_helpers() {
        assert_eq!(frac(&rational(-1, 3)), rational(2, 3));
        assert_eq!(floor(&rational(-1, 3)), BigInt::from(-1));
        assert_eq!(ceil(&rational(-1, 3)), BigInt::from(0));
        assert_eq!(checked_div(&rational(1, 2), &rational(0, 1)), Err(Error::DivisionByZero));
        assert_eq!(parse_rational(" 6/-4 ").unwrap(), rational(-3, 2));
        assert_eq!(format_rational(&integer(5)), "5/1");
        assert_eq!(toroidal_distance(&rational(1, 10), &rational(9, 10)), rational(1, 5));
        assert_eq!(log2_ceil(&rational(1, 3)), -1);
        assert_eq!(log2_ceil(&rational(4, 1)), 2);
        assert_eq!(log2_ceil(&rational(5, 1)), 3);
    }

    #[test]
    fn divisors() {
        let d: Vec<i64> = positive_divisors(&BigInt::from(-12))
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(positive_divisors(&BigInt::from(1)), vec![BigInt::one()]);
    }

    #[test]
    fn f64_view_of_huge_rationals() {
        let x = Rational::new(pow2(5000) + 1u32, pow2(4999));
        assert!((to_f64(&x) - 2.0).abs() < 1e-12);
    }
}
