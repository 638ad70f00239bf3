//! The power series `f(z) = sum p(n)/q(n) z^n`: G-series classification by
//! factoring `q`, lcm growth of denominators, annihilating differential
//! operators, partial fractions and closed forms in logarithms and polylogarithms.

mod annihilator;
mod closed_form;
mod cyclotomic;
mod partial_fractions;
mod polylog;

pub use annihilator::{build_annihilator, AnnihilatorOperator, OperatorTerm};
pub use closed_form::{closed_form_at, closed_form_eval, rationality_probe, ClosedForm, LogTerm, PolylogTerm, RationalityVerdict};
pub use cyclotomic::cyclotomic_polynomial;
pub use partial_fractions::{partial_fractions, PartialFraction, PartialFractions};
pub use polylog::polylog;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bbp::RationalFunction;
use crate::error::{Error, Result};
use crate::numerics::{ln_rational, serde_bigint, serde_rational, BoundedReal, Rational};
use crate::poly::{rational_roots, serialize_wire_int, IntPoly};

/// Default length of the lcm profile.
pub const DEFAULT_PROFILE_LEN: u64 = 500;

/// The factor `(l x + m)^multiplicity` with `gcd(l, m) = 1` and `l > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearFactor {
    #[serde(serialize_with = "serialize_wire_int")]
    pub l: BigInt,
    #[serde(serialize_with = "serialize_wire_int")]
    pub m: BigInt,
    pub multiplicity: u32,
}

impl LinearFactor {
    pub fn root(&self) -> Rational {
        Rational::new(-self.m.clone(), self.l.clone())
    }
}

/// `q = constant * prod (l x + m)^mult * nonlinear_remainder`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    #[serde(with = "serde_rational")]
    pub constant: Rational,
    pub linear_factors: Vec<LinearFactor>,
    /// Primitive with positive leading coefficient and no rational roots; `1` when `q` splits.
    pub nonlinear_remainder: IntPoly,
}

impl Factorization {
    pub fn splits(&self) -> bool {
        self.nonlinear_remainder.degree() == Some(0)
    }

    /// Multiplies the factors back together.
    pub fn expand(&self) -> crate::poly::Poly {
        let mut out = self.nonlinear_remainder.to_poly().scale(&self.constant);
        for f in &self.linear_factors {
            let lin = IntPoly::new(vec![f.m.clone(), f.l.clone()]).to_poly();
            out = &out * &lin.pow(f.multiplicity);
        }
        out
    }
}

/// Splits off every rational root of `q` (rational root theorem plus deflation).
pub fn factor_denominator(q: &IntPoly) -> Result<Factorization> {
    let (roots, rest) = rational_roots(q)?;
    let linear_factors = roots
        .iter()
        .map(|r| LinearFactor { l: r.root.denom().clone(), m: -r.root.numer().clone(), multiplicity: r.multiplicity })
        .collect();
    let mut content = rest.content();
    if rest.leading().is_some_and(|l| l.is_negative()) {
        content = -content;
    }
    let nonlinear_remainder = IntPoly::new(rest.coeffs().iter().map(|c| c / &content).collect());
    Ok(Factorization { constant: Rational::from_integer(content), linear_factors, nonlinear_remainder })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LcmPoint {
    pub n: u64,
    /// Natural log of `g_n`.
    pub log_g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub n: u64,
    /// `log g_n / n`
    pub linear_slope: f64,
    /// `log g_n / (n log n)`
    pub superlinear_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub is_g_series: bool,
    pub reason: String,
    pub factorization: Factorization,
    pub lcm_profile: Vec<LcmPoint>,
    pub growth_fit: GrowthFit,
    /// `(1/n) sum_{j <= n} log gcd(p(j), q(j))` at the end of the profile.
    pub cancellation_log_mean: f64,
}

/// Natural log of a positive integer as an `f64`.
pub fn ln_integer(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (x >> shift as usize).to_f64().expect("64-bit head").ln() + shift as f64 * std::f64::consts::LN_2
}

/// G-series verdict (`q` splits into linear factors over the rationals) plus
/// the growth of `g_n = lcm` of the reduced denominators of `p(k)/q(k)`, `k = 1..n`.
pub fn classify_g(r: &RationalFunction, profile_len: u64) -> Result<ClassificationReport> {
    if r.q.is_zero() {
        return Err(Error::InvalidPolynomial("q is the zero polynomial".into()));
    }
    let profile_len = profile_len.max(1);
    let factorization = factor_denominator(&r.q)?;
    let is_g_series = factorization.splits();
    let reason = match (r.q.degree(), is_g_series) {
        (Some(0), _) => "q is constant".to_string(),
        (_, true) => "q factors into linear factors over Q".to_string(),
        (_, false) => format!(
            "q has a factor of degree {} without rational roots",
            factorization.nonlinear_remainder.degree().unwrap_or(0)
        ),
    };
    let mut g = BigInt::one();
    let mut log_cancel = 0f64;
    let mut lcm_profile = Vec::with_capacity(profile_len as usize);
    for k in 1..=profile_len {
        let x = BigInt::from(k);
        let qk = r.q.eval(&x);
        if qk.is_zero() {
            return Err(Error::PoleInPerturbation(k.to_string()));
        }
        let pk = r.p.eval(&x);
        let common = pk.gcd(&qk);
        let reduced = if pk.is_zero() { BigInt::one() } else { (&qk / &common).abs() };
        if !pk.is_zero() {
            log_cancel += ln_integer(&common);
        }
        g = g.lcm(&reduced);
        lcm_profile.push(LcmPoint { n: k, log_g: ln_integer(&g) });
    }
    let n = profile_len as f64;
    let last = lcm_profile.last().expect("nonempty profile").log_g;
    Ok(ClassificationReport {
        is_g_series,
        reason,
        factorization,
        growth_fit: GrowthFit {
            n: profile_len,
            linear_slope: last / n,
            superlinear_ratio: if profile_len > 1 { last / (n * n.ln()) } else { 0.0 },
        },
        lcm_profile,
        cancellation_log_mean: log_cancel / n,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LcmGrowth {
    pub m: u64,
    #[serde(with = "serde_bigint")]
    pub lcm: BigInt,
    pub log: BoundedReal,
}

/// `lcm(1, ..., m)` and an enclosure of its natural log.
pub fn lcm_growth_integers(m: u64, precision_bits: u64) -> Result<LcmGrowth> {
    if m == 0 {
        return Err(Error::Malformed("m must be at least 1".into()));
    }
    let lcm = (1..=m).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)));
    let log = ln_rational(&Rational::from_integer(lcm.clone()), precision_bits)?;
    Ok(LcmGrowth { m, lcm, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rational, ulp};

    fn q(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn factor_examples() {
        let f = factor_denominator(&q(&[0, 1, 1])).unwrap();
        assert!(f.splits());
        let pairs: Vec<(i64, i64, u32)> = f
            .linear_factors
            .iter()
            .map(|l| (l.l.to_i64().unwrap(), l.m.to_i64().unwrap(), l.multiplicity))
            .collect();
        assert_eq!(pairs, vec![(1, 1, 1), (1, 0, 1)]);

        let f = factor_denominator(&q(&[1, 0, 1])).unwrap();
        assert!(f.linear_factors.is_empty());
        assert_eq!(f.nonlinear_remainder, q(&[1, 0, 1]));

        let lehmer = q(&[0, 1, 6, 8]);
        let f = factor_denominator(&lehmer).unwrap();
        assert_eq!(f.linear_factors.len(), 3);
        assert_eq!(f.expand(), lehmer.to_poly());
        // polynomial expansion oracle: x (2x + 1)(4x + 1)
        let by_hand = &(&q(&[0, 1]) * &q(&[1, 2])) * &q(&[1, 4]);
        assert_eq!(by_hand, lehmer);
    }

    #[test]
    fn factor_keeps_constants() {
        let poly = q(&[-6, 0, -6]); // -6 (x^2 + 1)
        let f = factor_denominator(&poly).unwrap();
        assert_eq!(f.constant, rational(-6, 1));
        assert_eq!(f.expand(), poly.to_poly());
    }

    #[test]
    fn classification_verdicts() {
        let split = classify_g(&RationalFunction::from_i64(&[1], &[0, 1]), 200).unwrap();
        assert!(split.is_g_series);
        assert!(split.growth_fit.linear_slope < 1.2);
        let bombieri = classify_g(&RationalFunction::from_i64(&[1], &[1, 0, 1]), 200).unwrap();
        assert!(!bombieri.is_g_series);
        let constant = classify_g(&RationalFunction::from_i64(&[1], &[1]), 10).unwrap();
        assert!(constant.is_g_series);
        assert_eq!(constant.reason, "q is constant");
        let g: Vec<f64> = split.lcm_profile.iter().map(|p| p.log_g).collect();
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn lcm_of_small_ranges() {
        let g = lcm_growth_integers(10, 40).unwrap();
        assert_eq!(g.lcm, BigInt::from(2520));
        assert!(*g.log.radius() <= ulp(40));
        let one = lcm_growth_integers(1, 40).unwrap();
        assert_eq!(one.lcm, BigInt::one());
        assert!(one.log.is_exact() && one.log.midpoint().is_zero());
        assert!(lcm_growth_integers(0, 40).is_err());
    }

    #[test]
    fn ln_of_huge_integer() {
        let x = BigInt::one() << 5000usize;
        assert!((ln_integer(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
