//! The b-transformation `T_b(x) = b x mod 1` on exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{serde_rational, BoundedReal, Rational};

/// Exact orbit `x_1, x_2, ...` of `T_b` with digits `d_n = b x_{n-1} - x_n`.
///
/// `remainders[i]` is `x_{i+1}` and `digits[i]` is `d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadixOrbit {
    pub base: u64,
    #[serde(with = "serde_rational")]
    pub initial: Rational,
    #[serde(with = "serde_rational::vec")]
    pub remainders: Vec<Rational>,
    pub digits: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub preperiod_length: u64,
    pub period_length: u64,
    #[serde(with = "serde_rational::vec")]
    pub cycle: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigitFlag {
    Confident,
    Indeterminate,
}

/// Leading digits of the fractional part of an enclosed real.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitReading {
    pub base: u64,
    pub digits: Vec<u64>,
    pub flags: Vec<DigitFlag>,
}

impl DigitReading {
    /// Number of leading digits flagged confident.
    pub fn confident_prefix(&self) -> usize {
        self.flags.iter().take_while(|f| **f == DigitFlag::Confident).count()
    }
}

fn check_base(base: u64) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    Ok(())
}

fn check_unit(x: &Rational) -> Result<()> {
    if x.is_negative() || *x >= Rational::one() {
        return Err(Error::OutOfUnitInterval(x.to_string()));
    }
    Ok(())
}

pub fn b_orbit(x0: &Rational, base: u64, steps: usize) -> Result<RadixOrbit> {
    check_base(base)?;
    check_unit(x0)?;
    let den = x0.denom().clone();
    let b = BigInt::from(base);
    let mut num = x0.numer().clone();
    let mut remainders = Vec::with_capacity(steps);
    let mut digits = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (d, r) = (&num * &b).div_mod_floor(&den);
        digits.push(d.to_u64().expect("digit below base"));
        remainders.push(Rational::new(r.clone(), den.clone()));
        num = r;
    }
    Ok(RadixOrbit { base, initial: x0.clone(), remainders, digits })
}

/// Minimal preperiod and period of the orbit of `x0 = a/D`.
///
/// Split `D = D' D''` with `D'` built from primes dividing `b` and
/// `gcd(D'', b) = 1`; the preperiod is the least `m` with `D' | b^m` and the
/// period is the multiplicative order of `b` modulo `D''`.
pub fn detect_period(x0: &Rational, base: u64) -> Result<PeriodReport> {
    check_base(base)?;
    check_unit(x0)?;
    let b = BigInt::from(base);
    let den = x0.denom().clone();
    let mut coprime_part = den.clone();
    loop {
        let g = coprime_part.gcd(&b);
        if g.is_one() {
            break;
        }
        coprime_part /= g;
    }
    let smooth_part = &den / &coprime_part;
    let mut preperiod = 0u64;
    let mut acc = BigInt::one() % &smooth_part;
    while !acc.is_zero() {
        acc = (acc * &b) % &smooth_part;
        preperiod += 1;
    }
    let mut period = 1u64;
    if !coprime_part.is_one() {
        let one = BigInt::one();
        let mut acc = &b % &coprime_part;
        while acc != one {
            acc = (acc * &b) % &coprime_part;
            period += 1;
        }
    }
    let mut num = (x0.numer() * num_traits::pow(b.clone(), preperiod as usize)).mod_floor(&den);
    let mut cycle = Vec::with_capacity(period as usize);
    for _ in 0..period {
        cycle.push(Rational::new(num.clone(), den.clone()));
        num = (num * &b).mod_floor(&den);
    }
    Ok(PeriodReport { preperiod_length: preperiod, period_length: period, cycle })
}

/// Reads `count` base-`b` digits of the fractional part of `theta`.
///
/// Digit `j` is taken from the midpoint; it is confident when the whole
/// enclosure of `b^j theta` lies strictly inside one cell, i.e. when
/// `floor(b^j lo) = floor(b^j hi)` and `b^j lo` is not an integer. An exact
/// enclosure (radius 0) is confident throughout.
pub fn digits_of_real(theta: &BoundedReal, base: u64, count: usize) -> Result<DigitReading> {
    check_base(base)?;
    if count == 0 {
        return Err(Error::Malformed("digit count must be at least 1".into()));
    }
    let b = BigInt::from(base);
    let lo = theta.lower();
    let mid = theta.midpoint().clone();
    let width = theta.radius() * Rational::from_integer(BigInt::from(2));
    if &width * Rational::from_integer(b.clone()) >= Rational::one() {
        return Err(Error::InsufficientPrecision);
    }
    // Put everything over one denominator and iterate with integers.
    let den = lo.denom().lcm(mid.denom()).lcm(width.denom());
    let over = |x: &Rational| x.numer() * (&den / x.denom());
    let mut lo_num = over(&lo).mod_floor(&den);
    let mut mid_num = over(&mid).mod_floor(&den);
    let mut span = over(&width);
    let exact = theta.is_exact();
    let mut confident = true;
    let mut digits = Vec::with_capacity(count);
    let mut flags = Vec::with_capacity(count);
    for _ in 0..count {
        let (d, r) = (&mid_num * &b).div_mod_floor(&den);
        digits.push(d.to_u64().expect("digit below base"));
        mid_num = r;
        if !exact && confident {
            lo_num = (&lo_num * &b).mod_floor(&den);
            span *= &b;
            confident = !lo_num.is_zero() && &lo_num + &span < den;
        }
        flags.push(if exact || confident { DigitFlag::Confident } else { DigitFlag::Indeterminate });
    }
    Ok(DigitReading { base, digits, flags })
}
