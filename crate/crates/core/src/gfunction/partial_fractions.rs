use num_traits::Zero;
use serde::Serialize;

use super::factor_denominator;
use crate::bbp::RationalFunction;
use crate::error::{Error, Result};
use crate::numerics::{serde_rational, Rational};
use crate::poly::Poly;

/// `coefficient / (x - root)^multiplicity`
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialFraction {
    #[serde(with = "serde_rational")]
    pub coefficient: Rational,
    #[serde(with = "serde_rational")]
    pub root: Rational,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialFractions {
    pub poly_part: Poly,
    pub terms: Vec<PartialFraction>,
}

impl PartialFractions {
    /// Common denominator and numerator of the recombined sum.
    pub fn recombine(&self) -> (Poly, Poly) {
        let mut num = self.poly_part.clone();
        let mut den = Poly::one();
        for t in &self.terms {
            let d = Poly::linear_root(&t.root).pow(t.multiplicity);
            num = &(&num * &d) + &(&den * &Poly::constant(t.coefficient.clone()));
            den = &den * &d;
        }
        (num, den)
    }
}

/// Leading `len` coefficients of `a(t) / b(t)` as a power series; `b(0) != 0`.
fn series_quotient(a: &Poly, b: &Poly, len: usize) -> Vec<Rational> {
    let b0 = b.coeff(0);
    let mut out: Vec<Rational> = Vec::with_capacity(len);
    for k in 0..len {
        let mut c = a.coeff(k);
        for (i, prev) in out.iter().enumerate() {
            c -= prev * b.coeff(k - i);
        }
        out.push(c / &b0);
    }
    out
}

/// Exact decomposition `R = poly_part + sum c / (x - r)^k` when `q` splits over Q.
pub fn partial_fractions(r: &RationalFunction) -> Result<PartialFractions> {
    let fac = factor_denominator(&r.q)?;
    if !fac.splits() {
        return Err(Error::NonlinearDenominator);
    }
    let q = r.q.to_poly();
    let (poly_part, rem) = r.p.to_poly().div_rem(&q)?;
    let mut terms = Vec::new();
    for f in &fac.linear_factors {
        let root = f.root();
        let k = f.multiplicity;
        let (cofactor, zero) = q.div_rem(&Poly::linear_root(&root).pow(k))?;
        debug_assert!(zero.is_zero());
        // rem/q = (1/(x-r)^k) * rem/cofactor, expanded around x = r
        let local = series_quotient(&rem.shift(&root), &cofactor.shift(&root), k as usize);
        for (i, c) in local.into_iter().enumerate() {
            if !c.is_zero() {
                terms.push(PartialFraction { coefficient: c, root: root.clone(), multiplicity: k - i as u32 });
            }
        }
    }
    terms.sort_by(|a, b| a.root.cmp(&b.root).then(a.multiplicity.cmp(&b.multiplicity)));
    Ok(PartialFractions { poly_part, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;
    use crate::poly::IntPoly;
    use proptest::prelude::*;

    fn term(c: Rational, root: Rational, k: u32) -> PartialFraction {
        PartialFraction { coefficient: c, root, multiplicity: k }
    }

    #[test]
    fn rational_one_decomposes() {
        let pf = partial_fractions(&RationalFunction::from_i64(&[2, 1], &[0, 1, 1])).unwrap();
        assert!(pf.poly_part.is_zero());
        assert_eq!(pf.terms, vec![term(rational(-1, 1), rational(-1, 1), 1), term(rational(2, 1), rational(0, 1), 1)]);
        // clear denominators: 2 (x + 1) - x = x + 2
        let lhs = &Poly::constant(rational(2, 1)) * &Poly::new(vec![rational(1, 1), rational(1, 1)]);
        let rhs = &lhs - &Poly::new(vec![rational(0, 1), rational(1, 1)]);
        assert_eq!(rhs, IntPoly::from_i64(&[2, 1]).to_poly());
    }

    #[test]
    fn trivial_cases() {
        let pf = partial_fractions(&RationalFunction::from_i64(&[1], &[0, 1])).unwrap();
        assert_eq!(pf.terms, vec![term(rational(1, 1), rational(0, 1), 1)]);
        let pf = partial_fractions(&RationalFunction::from_i64(&[1], &[0, 0, 1])).unwrap();
        assert_eq!(pf.terms, vec![term(rational(1, 1), rational(0, 1), 2)]);
        let pf = partial_fractions(&RationalFunction::from_i64(&[0, 0, 0, 1], &[0, 1])).unwrap();
        assert_eq!(pf.poly_part, IntPoly::from_i64(&[0, 0, 1]).to_poly());
        assert!(pf.terms.is_empty());
    }

    #[test]
    fn non_split_denominator() {
        let err = partial_fractions(&RationalFunction::from_i64(&[1], &[1, 0, 1])).unwrap_err();
        assert_eq!(err, Error::NonlinearDenominator);
    }

    proptest! {
        #[test]
        fn recombination_is_exact(
            p in proptest::collection::vec(-6i64..=6, 1..=7),
            factors in proptest::collection::vec((1i64..=3, -4i64..=4), 1..=5),
            lead in prop_oneof![Just(1i64), Just(-2), Just(3)],
        ) {
            let q = factors.iter().fold(IntPoly::from_i64(&[lead]), |acc, (l, m)| &acc * &IntPoly::from_i64(&[*m, *l]));
            let r = RationalFunction::new(IntPoly::from_i64(&p), q.clone());
            let pf = partial_fractions(&r).unwrap();
            let (num, den) = pf.recombine();
            // num/den == p/q  <=>  num * q - p * den == 0
            let diff = &(&num * &q.to_poly()) - &(&r.p.to_poly() * &den);
            prop_assert!(diff.is_zero());
        }
    }
}
