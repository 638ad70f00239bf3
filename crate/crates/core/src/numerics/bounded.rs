use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ceil_scaled, checked_div, dyadic, floor, frac, pow2, to_f64, Rational};
use crate::error::{Error, Result};

/// The closed interval `[mid - rad, mid + rad]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedReal {
    #[serde(with = "super::serde_rational")]
    mid: Rational,
    #[serde(with = "super::serde_rational")]
    rad: Rational,
}

impl BoundedReal {
    /// Panics if `rad` is negative.
    pub fn new(mid: Rational, rad: Rational) -> Self {
        assert!(!rad.is_negative(), "enclosure radius must be nonnegative");
        Self { mid, rad }
    }

    pub fn exact(mid: Rational) -> Self {
        Self { mid, rad: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rational::one())
    }

    /// Enclosure of `[lo, hi]`; the endpoints may come in either order.
    pub fn from_endpoints(lo: Rational, hi: Rational) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let two = Rational::from_integer(BigInt::from(2));
        Self { mid: (&lo + &hi) / &two, rad: (hi - lo) / two }
    }

    pub fn midpoint(&self) -> &Rational {
        &self.mid
    }

    pub fn radius(&self) -> &Rational {
        &self.rad
    }

    pub fn lower(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Upper bound on `|x|` over the enclosure.
    pub fn abs_upper(&self) -> Rational {
        self.mid.abs() + &self.rad
    }

    pub fn contains(&self, x: &Rational) -> bool {
        (x - &self.mid).abs() <= self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn intersects(&self, other: &BoundedReal) -> bool {
        (&self.mid - &other.mid).abs() <= &self.rad + &other.rad
    }

    pub fn is_subset_of(&self, other: &BoundedReal) -> bool {
        other.lower() <= self.lower() && self.upper() <= other.upper()
    }

    /// Does the enclosure contain an integer? Used for congruences mod 1.
    pub fn contains_integer(&self) -> bool {
        let nearest = floor(&(&self.mid + Rational::new(BigInt::one(), BigInt::from(2))));
        self.contains(&Rational::from_integer(nearest))
    }

    /// Distance from the enclosure to the nearest integer, as an enclosure of
    /// `d_T(x, 0)` evaluated at the midpoint with the same radius.
    pub fn toroidal_offset(&self) -> BoundedReal {
        let f = frac(&self.mid);
        let g = Rational::one() - &f;
        BoundedReal::new(if f <= g { f } else { g }, self.rad.clone())
    }

    pub fn widen(&self, extra: &Rational) -> Self {
        Self::new(self.mid.clone(), &self.rad + extra.abs())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self { mid: &self.mid * k, rad: &self.rad * k.abs() }
    }

    pub fn recip(&self) -> Result<Self> {
        let lo = self.lower();
        let hi = self.upper();
        if !lo.is_positive() && !hi.is_negative() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_endpoints(checked_div(&Rational::one(), &hi)?, checked_div(&Rational::one(), &lo)?))
    }

    pub fn div(&self, other: &BoundedReal) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// Rounds the midpoint to a multiple of `2^-bits` and grows the radius to
    /// stay sound; the result always contains `self`.
    pub fn round_outward(&self, bits: u64) -> Self {
        let scale = pow2(bits);
        let scaled = &self.mid * Rational::from_integer(scale.clone());
        let m = floor(&(scaled + Rational::new(BigInt::one(), BigInt::from(2))));
        let mid = dyadic(m, bits);
        let err = (&self.mid - &mid).abs();
        let rad = dyadic(ceil_scaled(&(&self.rad + err), bits), bits);
        Self { mid, rad }
    }

    /// Smallest enclosure containing both.
    pub fn hull(&self, other: &BoundedReal) -> Self {
        let lo = std::cmp::min(self.lower(), other.lower());
        let hi = std::cmp::max(self.upper(), other.upper());
        Self::from_endpoints(lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.mid)
    }
}

impl fmt::Display for BoundedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} ± {:.3e}", to_f64(&self.mid), to_f64(&self.rad))
    }
}

impl<'a> Add<&'a BoundedReal> for &'a BoundedReal {
    type Output = BoundedReal;
    fn add(self, rhs: &BoundedReal) -> BoundedReal {
        BoundedReal { mid: &self.mid + &rhs.mid, rad: &self.rad + &rhs.rad }
    }
}

impl<'a> Sub<&'a BoundedReal> for &'a BoundedReal {
    type Output = BoundedReal;
    fn sub(self, rhs: &BoundedReal) -> BoundedReal {
        BoundedReal { mid: &self.mid - &rhs.mid, rad: &self.rad + &rhs.rad }
    }
}

impl<'a> Mul<&'a BoundedReal> for &'a BoundedReal {
    type Output = BoundedReal;
    fn mul(self, rhs: &BoundedReal) -> BoundedReal {
        // |xy - ab| <= |a| s + |b| r + r s
        let rad = self.mid.abs() * &rhs.rad + rhs.mid.abs() * &self.rad + &self.rad * &rhs.rad;
        BoundedReal { mid: &self.mid * &rhs.mid, rad }
    }
}

impl Neg for &BoundedReal {
    type Output = BoundedReal;
    fn neg(self) -> BoundedReal {
        BoundedReal { mid: -&self.mid, rad: self.rad.clone() }
    }
}

impl Add for BoundedReal {
    type Output = BoundedReal;
    fn add(self, rhs: BoundedReal) -> BoundedReal {
        &self + &rhs
    }
}

impl Sub for BoundedReal {
    type Output = BoundedReal;
    fn sub(self, rhs: BoundedReal) -> BoundedReal {
        &self - &rhs
    }
}

impl Mul for BoundedReal {
    type Output = BoundedReal;
    fn mul(self, rhs: BoundedReal) -> BoundedReal {
        &self * &rhs
    }
}

impl Neg for BoundedReal {
    type Output = BoundedReal;
    fn neg(self) -> BoundedReal {
        -&self
    }
}
