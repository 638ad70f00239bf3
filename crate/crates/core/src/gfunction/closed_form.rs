//! `sum_{n >= s} R(n) z^n` for `0 < z < 1` as a rational number plus logarithms
//! `log(1 - zeta * t)` of roots of unity times a radical `t`, plus polylogarithms.
//!
//! A simple pole `c/(n - u/v)` is summed with the roots-of-unity filter
//! `sum_{m = a mod v} w^m/m = -(1/v) sum_k zeta_v^(-ka) log(1 - zeta_v^k w)`,
//! `w = z^(1/v)`. Every filter is then lifted to the common modulus `V` through
//! `1 - x^E = prod_j (1 - zeta_E^j x)`, so that coefficients of equal logarithms
//! can be added and tested for zero exactly in `Q(zeta_V)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::cyclotomic::CyclotomicField;
use super::partial_fractions::partial_fractions;
use super::polylog::polylog;
use crate::bbp::{BbpSpec, RationalFunction};
use crate::error::{Error, Result};
use crate::numerics::{
    ceil, const_pi, dyadic, pow2, pow_rational, serde_rational, ulp, BoundedReal, Rational, GUARD_BITS,
};
use crate::poly::Poly;

/// `(sum_i coefficient[i] zeta_V^i) * y^(scale_power / root_degree) * log(1 - zeta_V^zeta_power * y^(1/root_degree))`
/// with `V = modulus` and `y = radicand`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogTerm {
    /// Coordinates over `1, zeta_V, ..., zeta_V^(phi(V) - 1)`.
    #[serde(with = "serde_rational::vec")]
    pub coefficient: Vec<Rational>,
    pub modulus: u64,
    pub zeta_power: u64,
    #[serde(with = "serde_rational")]
    pub radicand: Rational,
    pub root_degree: u64,
    pub scale_power: u64,
}

/// `coefficient * Li_order(argument)`
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolylogTerm {
    #[serde(with = "serde_rational")]
    pub coefficient: Rational,
    pub order: u32,
    #[serde(with = "serde_rational")]
    pub argument: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    #[serde(with = "serde_rational")]
    pub z: Rational,
    pub start: u32,
    #[serde(with = "serde_rational")]
    pub rational_part: Rational,
    pub log_terms: Vec<LogTerm>,
    pub polylog_terms: Vec<PolylogTerm>,
    pub numeric_value: BoundedReal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RationalityVerdict {
    /// Every logarithm coefficient vanished exactly.
    Rational {
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    /// The logarithm part is numerically bounded away from zero.
    TranscendentalNumeric { log_part: BoundedReal },
    Undecided { log_part: BoundedReal },
}

const MAX_RETRIES: u32 = 8;

pub fn closed_form_eval(spec: &BbpSpec, precision_bits: u64) -> Result<ClosedForm> {
    let z = Rational::new(BigInt::one(), BigInt::from(spec.base()));
    closed_form_at(spec.rational_function(), &z, spec.start_index(), precision_bits)
}

fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `sum_{n >= start} P(n) z^n` through `P(n) = sum_j a'_j C(n, j)` and
/// `sum_n C(n, j) z^n = z^j / (1 - z)^(j + 1)`.
fn polynomial_part(poly: &Poly, z: &Rational, start: u32) -> Rational {
    let Some(deg) = poly.degree() else { return Rational::zero() };
    let mut values: Vec<Rational> = (0..=deg).map(|k| poly.eval(&rat(k as u64))).collect();
    let gap = Rational::one() - z;
    let mut total = Rational::zero();
    let mut zj = Rational::one();
    let mut gap_pow = gap.clone();
    for _ in 0..=deg {
        total += &values[0] * &zj / &gap_pow;
        values = values.windows(2).map(|w| &w[1] - &w[0]).collect();
        zj *= z;
        gap_pow *= &gap;
    }
    if start == 1 {
        total -= poly.eval(&Rational::zero());
    }
    total
}

/// Largest `d` dividing `n` with `z` a `d`-th power of a rational, and that root.
fn radical_reduction(z: &Rational, n: u64) -> (u64, Rational) {
    for d in (1..=n).rev() {
        if !n.is_multiple_of(d) {
            continue;
        }
        let d32 = d as u32;
        let (a, b) = (z.numer().nth_root(d32), z.denom().nth_root(d32));
        if num_traits::pow(a.clone(), d as usize) == *z.numer() && num_traits::pow(b.clone(), d as usize) == *z.denom() {
            return (d, Rational::new(a, b));
        }
    }
    (1, z.clone())
}

pub fn closed_form_at(r: &RationalFunction, z: &Rational, start: u32, precision_bits: u64) -> Result<ClosedForm> {
    if start > 1 {
        return Err(Error::Malformed(format!("start index must be 0 or 1, got {start}")));
    }
    if !z.is_positive() || *z >= Rational::one() {
        return Err(Error::OutsideConvergenceDomain);
    }
    let problems: Vec<String> = r.problems(start);
    if !problems.is_empty() {
        return Err(Error::InvalidSpec(problems));
    }
    if r.p.is_zero() {
        return Ok(ClosedForm {
            z: z.clone(),
            start,
            rational_part: Rational::zero(),
            log_terms: Vec::new(),
            polylog_terms: Vec::new(),
            numeric_value: BoundedReal::zero(),
        });
    }
    let pf = partial_fractions(r)?;
    for t in &pf.terms {
        if t.multiplicity > 1 && !t.root.is_integer() {
            return Err(Error::UnsupportedRootPattern(format!(
                "repeated non-integer root {} of multiplicity {}",
                t.root, t.multiplicity
            )));
        }
    }
    let s = start as i64;
    let mut rational_part = polynomial_part(&pf.poly_part, z, start);

    let modulus = pf
        .terms
        .iter()
        .filter(|t| t.multiplicity == 1)
        .fold(BigInt::one(), |acc, t| acc.lcm(t.root.denom()))
        .to_u64()
        .filter(|v| *v <= 1 << 12)
        .ok_or_else(|| Error::UnsupportedRootPattern("root denominators too large".into()))?;
    let (d, y) = radical_reduction(z, modulus);
    let root_degree = modulus / d;
    let field = CyclotomicField::new(modulus);
    let mut logs: BTreeMap<(u64, u64), Vec<Rational>> = BTreeMap::new();
    let mut polylogs: BTreeMap<u32, Rational> = BTreeMap::new();

    for t in &pf.terms {
        let c = &t.coefficient;
        if t.multiplicity == 1 {
            let u = t.root.numer().to_i64().ok_or(Error::UnsupportedRootPattern("root too large".into()))?;
            let v = t.root.denom().to_i64().expect("denominator divides the modulus");
            let a = (-u).rem_euclid(v);
            let n1 = s.max(Integer::div_ceil(&(u + 1), &v));
            for n in s..n1 {
                rational_part += c * pow_rational(z, n) / (rat(n) - &t.root);
            }
            let m1 = v * n1 - u;
            for m in (1..m1).filter(|m| m.rem_euclid(v) == a) {
                rational_part -= c * rat(v) * pow_rational(z, (m + u) / v) / rat(m);
            }
            let e = modulus as i64 / v;
            let shifted = u * e;
            let (qq, rr) = (shifted.div_euclid(root_degree as i64), shifted.rem_euclid(root_degree as i64));
            let scalar = -c * pow_rational(&y, qq);
            for k in 0..v {
                for j in 0..e {
                    let key = ((k + j * v).rem_euclid(modulus as i64) as u64, rr as u64);
                    let coords = logs.entry(key).or_insert_with(|| vec![Rational::zero(); field.dimension()]);
                    field.add_monomial(coords, &scalar, -k * a * e);
                }
            }
        } else {
            // c / (n + s')^k summed from n = start: z^(-s') (Li_k(z) - sum_{m < start + s'} z^m / m^k)
            let shift = -t.root.to_integer().to_i64().ok_or(Error::UnsupportedRootPattern("root too large".into()))?;
            let scale = c * pow_rational(z, -shift);
            let k = t.multiplicity;
            for m in 1..(s + shift) {
                rational_part -= &scale * pow_rational(z, m) / rat(BigInt::from(m).pow(k));
            }
            *polylogs.entry(k).or_insert_with(Rational::zero) += scale;
        }
    }

    let log_terms: Vec<LogTerm> = logs
        .into_iter()
        .filter(|(_, c)| c.iter().any(|x| !x.is_zero()))
        .map(|((k, rr), coefficient)| LogTerm {
            coefficient,
            modulus,
            zeta_power: k,
            radicand: y.clone(),
            root_degree,
            scale_power: rr,
        })
        .collect();
    let polylog_terms: Vec<PolylogTerm> = polylogs
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(order, coefficient)| PolylogTerm { coefficient, order, argument: z.clone() })
        .collect();

    let mut cf = ClosedForm {
        z: z.clone(),
        start,
        rational_part,
        log_terms,
        polylog_terms,
        numeric_value: BoundedReal::zero(),
    };
    cf.numeric_value = evaluate(&cf, precision_bits)?;
    Ok(cf)
}

/// Re-evaluates the terms with growing working precision until the radius is at most `2^-bits`.
fn evaluate(cf: &ClosedForm, bits: u64) -> Result<BoundedReal> {
    let target = ulp(bits);
    let mut wp = bits + GUARD_BITS;
    for _ in 0..MAX_RETRIES {
        let mut total = BoundedReal::exact(cf.rational_part.clone()) + log_part(&cf.log_terms, wp)?;
        for t in &cf.polylog_terms {
            total = total + polylog(t.order, &t.argument, wp)?.scale(&t.coefficient);
        }
        if *total.radius() <= target {
            return Ok(total);
        }
        wp += 64;
    }
    Err(Error::InsufficientPrecision)
}

/// `y^(1/k)` enclosed to `2^-bits`.
fn real_root(y: &Rational, k: u64, bits: u64) -> BoundedReal {
    if k == 1 {
        return BoundedReal::exact(y.clone());
    }
    let scaled = (y.numer() << (bits * k) as usize) / y.denom();
    let lo = scaled.nth_root(k as u32);
    BoundedReal::from_endpoints(dyadic(lo.clone(), bits), dyadic(lo + 1, bits))
}

/// `cos(2 pi j / n)`, exact at multiples of a sixth and a quarter turn.
fn cos_turn(j: u64, n: u64, pi: &BoundedReal, bits: u64) -> BoundedReal {
    let j = j % n;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if j == 0 {
        return BoundedReal::one();
    }
    if 2 * j == n {
        return BoundedReal::exact(-Rational::one());
    }
    if 4 * j == n || 4 * j == 3 * n {
        return BoundedReal::zero();
    }
    if 6 * j == n || 6 * j == 5 * n {
        return BoundedReal::exact(half);
    }
    if 3 * j == n || 3 * j == 2 * n {
        return BoundedReal::exact(-half);
    }
    let signed = if 2 * j > n { j as i64 - n as i64 } else { j as i64 };
    let theta = pi.scale(&Rational::new(BigInt::from(2 * signed), BigInt::from(n)));
    let minus_sq = -&(&theta * &theta);
    let mut term = BoundedReal::one();
    let mut sum = BoundedReal::one();
    let four = rat(4);
    let mut bound = Rational::one();
    let mut k: u64 = 0;
    loop {
        k += 1;
        let denom = Rational::from_integer(BigInt::from((2 * k - 1) * (2 * k)));
        term = (&term * &minus_sq).scale(&denom.recip()).round_outward(bits);
        sum = (&sum + &term).round_outward(bits);
        // |theta| < 4: Lagrange remainder after the x^(2k) term
        bound = bound * &four * &four / Rational::from_integer(BigInt::from((2 * k + 1) * (2 * k + 2)));
        if bound < ulp(bits) {
            return sum.widen(&bound);
        }
    }
}

/// Real part of the sum of the logarithm terms (the imaginary parts cancel).
fn log_part(terms: &[LogTerm], wp: u64) -> Result<BoundedReal> {
    let Some(first) = terms.first() else { return Ok(BoundedReal::zero()) };
    let (v, k_root) = (first.modulus, first.root_degree);
    let t = real_root(&first.radicand, k_root, wp);
    let t_hi = t.upper();
    if t_hi >= Rational::one() {
        return Err(Error::InsufficientPrecision);
    }
    let gap = Rational::one() - &t_hi;
    let pi = if v > 2 { const_pi(wp) } else { BoundedReal::zero() };
    let cos: Vec<BoundedReal> = (0..v).map(|j| cos_turn(j, v, &pi, wp)).collect();

    // bucket[c] = sum over m <= N with K m = c (mod V) of t^m / m
    let mut n_terms = 0u64;
    let mut t_pow = Rational::one();
    let tail = loop {
        n_terms += 1;
        t_pow *= &t_hi;
        let tail = &t_pow * &t_hi / (rat(n_terms + 1) * &gap);
        if tail <= ulp(wp) {
            break tail;
        }
        if n_terms.is_multiple_of(64) {
            t_pow = dyadic(ceil(&(&t_pow * rat(pow2(wp)))), wp);
        }
    };
    let mut powers = Vec::with_capacity(n_terms as usize);
    let mut p = BoundedReal::one();
    for m in 1..=n_terms {
        p = (&p * &t).round_outward(wp);
        powers.push(p.scale(&rat(m).recip()));
    }
    let mut t_scale = vec![BoundedReal::one()];
    for _ in 1..k_root {
        let last = t_scale.last().expect("nonempty");
        t_scale.push((last * &t).round_outward(wp));
    }

    let mut total = BoundedReal::zero();
    let mut error = Rational::zero();
    let mut buckets_by_k: BTreeMap<u64, Vec<BoundedReal>> = BTreeMap::new();
    for term in terms {
        let buckets = buckets_by_k.entry(term.zeta_power).or_insert_with(|| {
            let mut b = vec![BoundedReal::zero(); v as usize];
            for (i, pm) in powers.iter().enumerate() {
                let c = (term.zeta_power * (i as u64 + 1)) % v;
                b[c as usize] = (&b[c as usize] + pm).round_outward(wp);
            }
            b
        });
        let mut re = BoundedReal::zero();
        for (i, coord) in term.coefficient.iter().enumerate() {
            if coord.is_zero() {
                continue;
            }
            for (c, bucket) in buckets.iter().enumerate() {
                let angle = &cos[(i + c) % v as usize];
                re = (&re + &(bucket * angle).scale(coord)).round_outward(wp);
            }
            error += coord.abs() * &tail;
        }
        total = (&total - &(&re * &t_scale[term.scale_power as usize])).round_outward(wp);
    }
    Ok(total.widen(&error))
}

/// Exact verdict when every logarithm coefficient cancels; otherwise a numeric one.
pub fn rationality_probe(spec: &BbpSpec, precision_bits: u64) -> Result<RationalityVerdict> {
    if spec.p().is_zero() {
        return Ok(RationalityVerdict::Rational { value: Rational::zero() });
    }
    let pf = partial_fractions(spec.rational_function())?;
    if pf.terms.iter().any(|t| t.multiplicity > 1) {
        return Err(Error::RepeatedRoots);
    }
    let cf = closed_form_eval(spec, precision_bits)?;
    if cf.log_terms.is_empty() {
        return Ok(RationalityVerdict::Rational { value: cf.rational_part });
    }
    let mut wp = precision_bits + GUARD_BITS;
    let log = loop {
        let log = log_part(&cf.log_terms, wp)?;
        if *log.radius() <= ulp(precision_bits) || wp > precision_bits + 64 * MAX_RETRIES as u64 {
            break log;
        }
        wp += 64;
    };
    let threshold = ulp(precision_bits / 2);
    if log.lower() > threshold || log.upper() < -threshold {
        Ok(RationalityVerdict::TranscendentalNumeric { log_part: log })
    } else {
        Ok(RationalityVerdict::Undecided { log_part: log })
    }
}
