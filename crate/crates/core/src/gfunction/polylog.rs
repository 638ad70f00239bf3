use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{ulp, BoundedReal, Rational, GUARD_BITS};

/// `Li_k(z) = sum_{n >= 1} z^n / n^k` for rational `|z| < 1`, with the tail
/// `|z|^(N+1) / ((N+1)^k (1 - |z|))` added to the radius.
pub fn polylog(order: u32, z: &Rational, precision_bits: u64) -> Result<BoundedReal> {
    if order == 0 {
        return Err(Error::Malformed("polylogarithm order must be at least 1".into()));
    }
    if z.abs() >= Rational::one() {
        return Err(Error::OutsideConvergenceDomain);
    }
    if z.is_zero() {
        return Ok(BoundedReal::zero());
    }
    let wp = precision_bits + GUARD_BITS;
    let target = ulp(precision_bits + 1);
    let az = z.abs();
    let gap = Rational::one() - &az;
    let mut sum = BoundedReal::zero();
    let mut power = BoundedReal::one();
    let mut abs_power = Rational::one();
    let mut n: u64 = 0;
    loop {
        n += 1;
        power = (&power * &BoundedReal::exact(z.clone())).round_outward(wp);
        abs_power *= &az;
        let nk = Rational::from_integer(BigInt::from(n).pow(order));
        sum = (&sum + &power.scale(&nk.recip())).round_outward(wp);
        let next = Rational::from_integer(BigInt::from(n + 1).pow(order));
        let tail = &abs_power * &az / (next * &gap);
        if tail <= target || n > 1 << 24 {
            return Ok(sum.widen(&tail));
        }
        // keep the exact power from growing without bound
        if n.is_multiple_of(64) {
            abs_power = crate::numerics::dyadic(crate::numerics::ceil_scaled(&abs_power, wp), wp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ln_rational, rational};

    #[test]
    fn li1_is_log() {
        let li = polylog(1, &rational(1, 2), 120).unwrap();
        let log2 = ln_rational(&rational(2, 1), 120).unwrap();
        assert!(li.intersects(&log2));
        assert!(*li.radius() <= ulp(120));
    }

    #[test]
    fn dilog_half() {
        let li = polylog(2, &rational(1, 2), 100).unwrap();
        // independent direct summation with its own tail bound
        let mut s = Rational::zero();
        let mut p = Rational::one();
        for n in 1..=200i64 {
            p /= Rational::from_integer(2.into());
            s += &p / Rational::from_integer(BigInt::from(n * n));
        }
        let oracle = BoundedReal::new(s, rational(1, 1) / Rational::from_integer(BigInt::one() << 200usize));
        assert!(li.intersects(&oracle));
        // 0.58224052646501250590265632015968
        let reference = Rational::new(BigInt::from(58224052646501250590265632015968u128), BigInt::from(10u8).pow(32));
        assert!(li.widen(&Rational::new(BigInt::one(), BigInt::from(10u8).pow(31))).contains(&reference));
    }

    #[test]
    fn negative_argument() {
        let li = polylog(1, &rational(-1, 3), 80).unwrap();
        // -log(1 + 1/3) = -log(4/3)
        let expected = ln_rational(&rational(4, 3), 80).unwrap();
        assert!(li.intersects(&-&expected));
    }

    #[test]
    fn domain() {
        for k in 1..5 {
            assert!(polylog(k, &Rational::zero(), 64).unwrap().is_exact());
        }
        assert_eq!(polylog(2, &rational(1, 1), 64), Err(Error::OutsideConvergenceDomain));
        assert_eq!(polylog(2, &rational(-3, 2), 64), Err(Error::OutsideConvergenceDomain));
        assert!(polylog(0, &rational(1, 2), 64).is_err());
    }
}
