use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{BbpSpec, RationalFunction};
use crate::error::{Error, Result};
use crate::numerics::{ceil, dyadic, pow2, ulp, BoundedReal, Rational, GUARD_BITS};
use crate::poly::IntPoly;

/// Hard cap on directly summed terms of a boundary series.
const MAX_BOUNDARY_TERMS: u64 = 1 << 22;
const CHUNK: u64 = 4096;

/// `|p(m)/q(m)| <= c * m^growth` for every `m >= m0`.
///
/// With `A = sum |p_i|`, `B = sum_{i<d} |q_i|` and leading coefficient `q_d`:
/// `|p(m)| <= A m^l` and `|q(m)| >= |q_d| m^d / 2` once `m >= 2B/|q_d|`.
#[derive(Clone, Debug)]
struct DecayBound {
    c: Rational,
    m0: u64,
    growth: u32,
}

fn decay_bound(r: &RationalFunction) -> DecayBound {
    let lead = r.q.leading().expect("validated q is nonzero").abs();
    let rest = r.q.l1_norm() - &lead;
    let m0 = ceil(&Rational::new(BigInt::from(2) * rest, lead.clone())).to_u64().unwrap_or(u64::MAX).max(1);
    let l = r.p.degree().unwrap_or(0);
    let d = r.q.degree().unwrap_or(0);
    DecayBound {
        c: Rational::new(BigInt::from(2) * r.p.l1_norm(), lead),
        m0,
        growth: l.saturating_sub(d) as u32,
    }
}

/// Bound on `sum_{j > k} |eps_{n+j}| b^-j`, if the decay estimate applies.
fn remainder_bound(bound: &DecayBound, base: u64, n: u64, k: u64) -> Option<Rational> {
    let first_index = n.checked_add(k)?.checked_add(1)?;
    if first_index < bound.m0 {
        return None;
    }
    let m1 = BigInt::from(first_index);
    let b = BigInt::from(base);
    let growth_ratio = num_traits::pow(Rational::new(&m1 + 1u32, m1.clone()), bound.growth as usize);
    let rho = growth_ratio / Rational::from_integer(b.clone());
    if rho >= Rational::one() {
        return None;
    }
    let first = &bound.c * Rational::new(num_traits::pow(m1, bound.growth as usize), num_traits::pow(b, k as usize + 1));
    Some(first / (Rational::one() - rho))
}

/// Enclosure of `t_n = sum_{j >= 1} eps_{n+j} b^-j` with radius below `2^-precision_bits`.
pub fn tail_enclosure(spec: &BbpSpec, n: u64, precision_bits: u64) -> BoundedReal {
    let r = spec.rational_function();
    if r.p.is_zero() {
        return BoundedReal::zero();
    }
    let base = spec.base();
    let bound = decay_bound(r);
    let target = ulp(precision_bits + 2);
    let log2b = (63 - base.leading_zeros()) as u64;
    let c_bits = bound.c.numer().bits().saturating_sub(bound.c.denom().bits());
    let mut k = (precision_bits + 2 + c_bits) / log2b + 1;
    let rem = loop {
        if let Some(rem) = remainder_bound(&bound, base, n, k) {
            if rem <= target {
                break rem;
            }
        }
        k += k / 4 + 1;
    };
    let w = precision_bits + 4 + (64 - k.leading_zeros() as u64);
    let b = BigInt::from(base);
    let mut scale = BigInt::one();
    let mut acc = BigInt::zero();
    for j in 1..=k {
        scale *= &b;
        let m = BigInt::from(n + j);
        let mut num = r.p.eval(&m) << w;
        let mut den = r.q.eval(&m) * &scale;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        acc += num.div_floor(&den);
    }
    // every floor loses less than one unit of 2^-w
    let terms = BigInt::from(k);
    let mid = dyadic(acc * 2 + &terms, w + 1);
    let rad = dyadic(terms, w + 1) + rem;
    BoundedReal::new(mid, rad).round_outward(precision_bits + GUARD_BITS)
}

/// Enclosure of `theta` with radius at most `2^-precision_bits`.
pub fn eval_theta(spec: &BbpSpec, precision_bits: u64) -> Result<BoundedReal> {
    let t0 = tail_enclosure(spec, 0, precision_bits);
    if spec.start_index() == 0 {
        let head = BoundedReal::exact(spec.epsilon(0));
        return Ok((&head + &t0).round_outward(precision_bits + GUARD_BITS));
    }
    Ok(t0)
}

/// Enclosure of `sum_{n >= start} r(n) z^n` for `z = +1` or `z = -1`.
///
/// Needs `deg q >= deg p + 2`. The `z = -1` case pairs consecutive terms into a
/// rational function of faster decay and reuses the `z = +1` summation.
pub fn eval_boundary(r: &RationalFunction, z: i64, start: u32, precision_bits: u64) -> Result<BoundedReal> {
    let mut problems = Vec::new();
    if start > 1 {
        problems.push(format!("start index must be 0 or 1, got {start}"));
    }
    problems.extend(r.problems(start.min(1)));
    if !problems.is_empty() {
        return Err(Error::InvalidSpec(problems));
    }
    if z != 1 && z != -1 {
        return Err(Error::InvalidBoundaryPoint(z));
    }
    if r.p.is_zero() {
        return Ok(BoundedReal::zero());
    }
    let dp = r.p.degree().expect("nonzero");
    let dq = r.q.degree().unwrap_or(0);
    if dq < dp + 2 {
        return Err(Error::BoundaryNotConvergent);
    }
    if z == 1 {
        return Ok(sum_positive_side(&r.p, &r.q, start as u64, precision_bits));
    }
    let s = BigInt::from(start);
    let two = BigInt::from(2);
    let even_q = r.q.compose_linear(&two, &s);
    let odd_q = r.q.compose_linear(&two, &(&s + 1u32));
    let even_p = r.p.compose_linear(&two, &s);
    let odd_p = r.p.compose_linear(&two, &(&s + 1u32));
    let num = &(&even_p * &odd_q) - &(&odd_p * &even_q);
    let den = &even_q * &odd_q;
    if num.is_zero() {
        return Ok(BoundedReal::zero());
    }
    let paired = sum_positive_side(&num, &den, 0, precision_bits);
    Ok(if start % 2 == 1 { -paired } else { paired })
}

/// `sum_{n >= start} num(n)/den(n)` where `den` has no roots `n >= start` and
/// `deg den - deg num = e >= 2`.
///
/// Kummer acceleration: with `c = lead(num)/lead(den)` the differences
/// `num(n)/den(n) - c/(n)_e` decay like `n^-(e+1)`, and the subtracted part
/// telescopes: `sum_{n > N} 1/(n)_e = 1/((e-1) (N+1)_{e-1})`.
fn sum_positive_side(num: &IntPoly, den: &IntPoly, start: u64, precision_bits: u64) -> BoundedReal {
    let d = den.degree().expect("nonzero denominator");
    let l = num.degree().expect("nonzero numerator");
    let e = (d - l) as u32;
    debug_assert!(e >= 2);
    let lead_den = den.leading().expect("nonzero").clone();
    let lead_num = num.leading().expect("nonzero").clone();
    let c = Rational::new(lead_num.clone(), lead_den.clone());
    let diff_num = &(&num.scale(&lead_den) * &IntPoly::rising_factorial(e)) - &den.scale(&lead_num);
    // |diff(n)| <= c' n^-(e+1) for n >= n0
    let lead_abs = lead_den.abs();
    let rest = den.l1_norm() - &lead_abs;
    let n0 = ceil(&Rational::new(BigInt::from(2) * rest, lead_abs.clone()))
        .to_u64()
        .unwrap_or(u64::MAX)
        .max(1)
        .max(start);
    let c_prime = Rational::new(BigInt::from(2) * diff_num.l1_norm(), &lead_abs * &lead_abs);
    let scaled = &c_prime * Rational::from_integer(pow2(precision_bits + 2)) / Rational::from_integer(BigInt::from(e));
    let root = ceil(&scaled).nth_root(e) + 1u32;
    let big_n = root.to_u64().unwrap_or(u64::MAX).max(n0).min(MAX_BOUNDARY_TERMS.max(n0));
    let head = fixed_point_sum(num, den, start, big_n, precision_bits + 2);
    let mut telescoped_den = BigInt::from(e - 1);
    for i in 0..(e - 1) {
        telescoped_den *= BigInt::from(big_n + 1 + i as u64);
    }
    let telescoped = c / Rational::from_integer(telescoped_den);
    let remainder = c_prime / Rational::from_integer(BigInt::from(e) * num_traits::pow(BigInt::from(big_n), e as usize));
    (&head + &BoundedReal::exact(telescoped))
        .widen(&remainder)
        .round_outward(precision_bits + GUARD_BITS)
}

/// `sum_{n = lo}^{hi} num(n)/den(n)` with each term floored to `2^-w`,
/// `w = bits + log2(#terms)`, so the result has radius below `2^-bits`.
fn fixed_point_sum(num: &IntPoly, den: &IntPoly, lo: u64, hi: u64, bits: u64) -> BoundedReal {
    if hi < lo {
        return BoundedReal::zero();
    }
    let count = hi - lo + 1;
    let w = bits + 1 + (64 - count.leading_zeros() as u64);
    let chunks: Vec<(u64, u64)> = (0..count.div_ceil(CHUNK))
        .map(|i| (lo + i * CHUNK, (lo + (i + 1) * CHUNK - 1).min(hi)))
        .collect();
    let acc: BigInt = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut part = BigInt::zero();
            for n in a..=b {
                let x = BigInt::from(n);
                let mut p = num.eval(&x) << w;
                let mut q = den.eval(&x);
                if q.is_negative() {
                    p = -p;
                    q = -q;
                }
                part += p.div_floor(&q);
            }
            part
        })
        .sum();
    let terms = BigInt::from(count);
    BoundedReal::new(dyadic(acc * 2 + &terms, w + 1), dyadic(terms, w + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    /// Exact partial sum of `eps_n b^-n` plus the crude bound
    /// `sum_{n > N} |eps_n| b^-n <= max|eps| b^-N/(b-1)` valid when `|eps_n| <= max`.
    fn direct_oracle(spec: &BbpSpec, terms: u64, eps_max: Rational) -> BoundedReal {
        let b = Rational::from_integer(BigInt::from(spec.base()));
        let mut sum = Rational::zero();
        let mut scale = Rational::one();
        for n in 0..=terms {
            sum += spec.epsilon(n) * &scale;
            scale /= &b;
        }
        let tail = eps_max * &scale * &b / (&b - Rational::one());
        BoundedReal::new(sum, tail)
    }

    #[test]
    fn log2_matches_direct_summation() {
        let spec = BbpSpec::from_i64(2, &[1], &[0, 1], 1).unwrap();
        let theta = spec.eval_theta(128).unwrap();
        assert!(*theta.radius() <= ulp(128));
        let oracle = direct_oracle(&spec, 200, rational(1, 1));
        assert!(theta.intersects(&oracle));
        let reference = Rational::new(BigInt::from(69314718055994530941723212145817656807u128), num_traits::pow(BigInt::from(10), 38));
        assert!((theta.midpoint() - reference).abs() < rational(1, 1_000_000_000_000_000_000));
    }

    #[test]
    fn telescoping_spec_encloses_one() {
        let spec = BbpSpec::from_i64(2, &[2, 1], &[0, 1, 1], 1).unwrap();
        let theta = spec.eval_theta(100).unwrap();
        assert!(theta.contains(&Rational::one()));
        assert!(*theta.radius() <= ulp(100));
    }

    #[test]
    fn zero_numerator_is_exact() {
        let spec = BbpSpec::from_i64(5, &[], &[1, 1], 1).unwrap();
        assert_eq!(spec.eval_theta(64).unwrap(), BoundedReal::zero());
    }

    #[test]
    fn non_vanishing_spec_still_converges() {
        // sum_{n >= 1} n 2^-n = 2
        let spec = BbpSpec::from_i64(2, &[0, 1], &[1], 1).unwrap();
        let theta = spec.eval_theta(80).unwrap();
        assert!(theta.contains(&rational(2, 1)));
        // sum_{n >= 0} n^2 3^-n = 3/2
        let spec = BbpSpec::from_i64(3, &[0, 0, 1], &[1], 0).unwrap();
        assert!(spec.eval_theta(80).unwrap().contains(&rational(3, 2)));
    }

    #[test]
    fn refinement_never_disjoint() {
        let spec = BbpSpec::from_i64(9, &[6], &[-1, 2], 1).unwrap();
        let coarse = spec.eval_theta(40).unwrap();
        let fine = spec.eval_theta(80).unwrap();
        assert!(coarse.intersects(&fine));
        assert!(*fine.radius() <= ulp(80));
    }

    #[test]
    fn boundary_telescoping_sums() {
        // sum_{n >= 1} 1/(n(n+1)) = 1
        let r = RationalFunction::from_i64(&[1], &[0, 1, 1]);
        let s = eval_boundary(&r, 1, 1, 40).unwrap();
        assert!(s.contains(&Rational::one()));
        assert!(*s.radius() <= ulp(40));
        // sum_{n >= 1} (-1)^(n+1)/(n(n+1)) = 2 log 2 - 1
        let alt = eval_boundary(&r, -1, 1, 40).unwrap();
        let two_log2_minus_1 = rational(386294361119890618, 1_000_000_000_000_000_000);
        assert!((-alt.midpoint() - two_log2_minus_1).abs() < rational(1, 1_000_000_000));
    }

    #[test]
    fn boundary_errors() {
        let r = RationalFunction::from_i64(&[1], &[0, 1]);
        assert_eq!(eval_boundary(&r, 1, 1, 20), Err(Error::BoundaryNotConvergent));
        assert_eq!(eval_boundary(&r, 2, 1, 20), Err(Error::InvalidBoundaryPoint(2)));
        let zero = RationalFunction::from_i64(&[], &[1, 0, 1]);
        assert_eq!(eval_boundary(&zero, -1, 1, 20).unwrap(), BoundedReal::zero());
    }
}
