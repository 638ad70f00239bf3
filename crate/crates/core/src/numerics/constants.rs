use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{log2_ceil, pow2_signed, ulp, BoundedReal, Rational, GUARD_BITS};
use crate::bbp::presets;
use crate::error::{Error, Result};

/// Enclosure of π with radius at most `2^-precision_bits`, produced by the
/// base-16 BBP preset.
pub fn const_pi(precision_bits: u64) -> BoundedReal {
    presets::pi_base16()
        .eval_theta(precision_bits)
        .expect("built-in pi preset is valid")
}

/// Enclosure of `e^x` with radius at most `2^-precision_bits`.
pub fn exp_real(x: &Rational, precision_bits: u64) -> BoundedReal {
    if x.is_zero() {
        return BoundedReal::one();
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    // Halve until |y| <= 1/2, then square back up.
    let halvings = (log2_ceil(&x.abs()) + 1).max(0) as u64;
    let y = x / pow2_signed(halvings as i64);
    debug_assert!(y.abs() <= half);
    // log2(e^|x|) < 1.5 |x|
    let magnitude_bits = super::ceil(&(x.abs() * Rational::new(BigInt::from(3), BigInt::from(2))))
        .try_into()
        .unwrap_or(u64::MAX / 4)
        + 1u64;
    let target = ulp(precision_bits);
    let mut guard = GUARD_BITS;
    loop {
        let w = precision_bits + halvings + magnitude_bits + guard;
        let y_enc = BoundedReal::exact(y.clone());
        let mut sum = BoundedReal::one();
        let mut term = BoundedReal::one();
        let mut k = 1u64;
        loop {
            term = (&term * &y_enc)
                .scale(&Rational::new(BigInt::one(), BigInt::from(k)))
                .round_outward(w);
            // |sum_{j>=k} y^j/j!| <= 2 |y^k/k!| when |y| <= 1/2
            let tail = term.abs_upper() * BigInt::from(2);
            // rounding keeps at least one ulp of radius, so stop a few bits early
            if tail <= ulp(w - 3) {
                sum = sum.widen(&tail);
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = (&sum * &sum).round_outward(w);
        }
        let out = sum.round_outward(precision_bits + GUARD_BITS);
        if *out.radius() <= target {
            return out;
        }
        guard *= 2;
    }
}

/// `e^X` for an enclosure `X` with radius below 1/2.
pub fn exp_bounded(x: &BoundedReal, precision_bits: u64) -> Result<BoundedReal> {
    let r = x.radius();
    if *r >= Rational::new(BigInt::one(), BigInt::from(2)) {
        return Err(Error::InsufficientPrecision);
    }
    let center = exp_real(x.midpoint(), precision_bits + GUARD_BITS);
    if r.is_zero() {
        return Ok(center);
    }
    // e^d - 1 <= r / (1 - r) and 1 - e^-d <= r for |d| <= r < 1
    let spread = r / (Rational::one() - r);
    let factor = BoundedReal::new(Rational::one(), spread);
    Ok((&center * &factor).round_outward(precision_bits + GUARD_BITS))
}

/// Natural logarithm of a positive rational with radius at most `2^-precision_bits`.
pub fn ln_rational(x: &Rational, precision_bits: u64) -> Result<BoundedReal> {
    if !x.is_positive() {
        return Err(Error::OutsideConvergenceDomain);
    }
    if x.is_one() {
        return Ok(BoundedReal::zero());
    }
    // x = 2^k y with y in (1/2, 1]
    let k = log2_ceil(x);
    let y = x / pow2_signed(k);
    let u = (&y - Rational::one()) / (&y + Rational::one());
    let target = ulp(precision_bits);
    let k_bits = 64 - k.unsigned_abs().leading_zeros() as u64;
    let mut guard = GUARD_BITS;
    loop {
        let w = precision_bits + k_bits + guard;
        let u_enc = BoundedReal::exact(u.clone());
        let u_sq = (&u_enc * &u_enc).round_outward(w);
        let mut power = u_enc.clone();
        let mut sum = BoundedReal::zero();
        let mut j = 0u64;
        loop {
            let tail = power.abs_upper() * BigInt::from(3);
            if tail <= ulp(w - 3) {
                sum = sum.widen(&tail);
                break;
            }
            sum = &sum + &power.scale(&Rational::new(BigInt::one(), BigInt::from(2 * j + 1)));
            sum = sum.round_outward(w);
            power = (&power * &u_sq).round_outward(w);
            j += 1;
        }
        let ln_y = sum.scale(&Rational::from_integer(BigInt::from(2)));
        let ln2 = presets::log2_base2()
            .eval_theta(w)
            .expect("built-in log 2 preset is valid");
        let out = (&ln2.scale(&Rational::from_integer(BigInt::from(k))) + &ln_y)
            .round_outward(precision_bits + GUARD_BITS);
        if *out.radius() <= target {
            return Ok(out);
        }
        guard *= 2;
    }
}
