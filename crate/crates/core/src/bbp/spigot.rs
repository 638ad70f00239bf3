use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{tail_enclosure, BbpSpec};
use crate::error::{Error, Result};
use crate::numerics::{dyadic, mod_pow, mod_pow_u64, serde_rational, BoundedReal, Rational};
use crate::radix_dynamics::{digits_of_real, DigitFlag};

pub const DEFAULT_GUARD_BITS: u64 = 64;
const CHUNK: u64 = 2048;

/// Digits `position + 1 ..= position + count` of `theta` in base `b`, i.e. the
/// leading digits of `frac(b^position theta)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitExtraction {
    pub base: u64,
    pub position: u64,
    pub digits: Vec<u64>,
    pub flags: Vec<DigitFlag>,
    #[serde(with = "serde_rational")]
    pub error_radius: Rational,
    /// Enclosure of `frac(b^position theta)` up to an integer shift.
    pub enclosure: BoundedReal,
    /// Bit length of the largest integer held during the head sum.
    pub peak_integer_bits: u64,
}

/// Spigot extraction: the head `sum_{n <= d} b^(d-n) p(n)/q(n)` is only needed
/// mod 1, so each term is reduced with `b^(d-n) mod q(n)` and kept in a
/// fixed-point accumulator of `guard_bits + count * ceil(log2 b)` bits.
pub fn extract_digits(spec: &BbpSpec, position: u64, count: usize, guard_bits: u64) -> Result<DigitExtraction> {
    if !spec.is_vanishing() {
        return Err(Error::PerturbationDoesNotVanish);
    }
    if count == 0 {
        return Err(Error::Malformed("digit count must be at least 1".into()));
    }
    let base = spec.base();
    let digit_bits = 64 - (base - 1).leading_zeros() as u64;
    let w = guard_bits + count as u64 * digit_bits;
    let start = spec.start_index() as u64;

    let (head, peak) = if position >= start && !spec.p().is_zero() {
        let chunks: Vec<(u64, u64)> = (start..=position)
            .step_by(CHUNK as usize)
            .map(|a| (a, (a + CHUNK - 1).min(position)))
            .collect();
        let parts: Vec<(BigUint, u64)> = chunks
            .par_iter()
            .map(|&(a, b)| head_chunk(spec, position, a, b, w))
            .collect();
        let mut acc = BigUint::zero();
        let mut peak = 0u64;
        for (sum, bits) in parts {
            acc += sum;
            peak = peak.max(bits);
        }
        peak = peak.max(acc.bits());
        let modulus = BigUint::from(1u32) << w;
        let acc = acc % &modulus;
        let terms = BigInt::from(position - start + 1);
        let lower = BigInt::from_biguint(Sign::Plus, acc);
        (BoundedReal::new(dyadic(lower * 2 + &terms, w + 1), dyadic(terms, w + 1)), peak)
    } else {
        (BoundedReal::zero(), 0)
    };
    let tail = tail_enclosure(spec, position, w);
    let enclosure = &head + &tail;
    let radius = enclosure.radius().clone();
    let b = Rational::from_integer(BigInt::from(base));
    if &radius * Rational::from_integer(BigInt::from(2)) * num_traits::pow(b, count) >= Rational::from_integer(1.into()) {
        return Err(Error::InsufficientGuardBits);
    }
    let reading = digits_of_real(&enclosure, base, count)?;
    Ok(DigitExtraction {
        base,
        position,
        digits: reading.digits,
        flags: reading.flags,
        error_radius: radius,
        enclosure,
        peak_integer_bits: peak,
    })
}

/// Sum of `floor(2^w frac(b^(d-n) p(n)/q(n)))` over `n in [lo, hi]` and the
/// widest intermediate integer.
fn head_chunk(spec: &BbpSpec, d: u64, lo: u64, hi: u64, w: u64) -> (BigUint, u64) {
    let base = spec.base();
    let mut sum = BigUint::zero();
    let mut peak = 0u64;
    for n in lo..=hi {
        let x = BigInt::from(n);
        let mut p = spec.p().eval(&x);
        let mut q = spec.q().eval(&x);
        if q.sign() == Sign::Minus {
            p = -p;
            q = -q;
        }
        let residue = p.mod_floor(&q);
        let e = d - n;
        let reduced: BigUint = match (q.to_u64(), residue.to_u64()) {
            (Some(qm), Some(r)) => {
                let pw = mod_pow_u64(base % qm, e, qm) as u128;
                BigUint::from(pw * r as u128 % qm as u128)
            }
            _ => {
                let qm = q.to_biguint().expect("positive modulus");
                let pw = mod_pow(&BigUint::from(base), &BigUint::from(e), &qm).expect("nonzero modulus");
                peak = peak.max(2 * qm.bits());
                pw * residue.to_biguint().expect("nonnegative residue") % qm
            }
        };
        let shifted = reduced << w;
        peak = peak.max(shifted.bits());
        sum += shifted / q.to_biguint().expect("positive modulus");
    }
    peak = peak.max(sum.bits());
    (sum, peak)
}
