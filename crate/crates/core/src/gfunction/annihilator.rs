use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bbp::RationalFunction;
use crate::error::{Error, Result};
use crate::numerics::{serde_bigint, Rational};
use crate::poly::IntPoly;

/// `coefficient(z) * (d/dz)^derivative_order`
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorTerm {
    pub derivative_order: u32,
    pub coefficient: IntPoly,
}

/// `D = (d/dz)^outer_order (1 - z)^(l+1) sum_j b_j (z d/dz)^j` in normal order,
/// where `q = sum b_j x^j`, `l = deg p`, `m = deg q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnnihilatorOperator {
    pub l: u32,
    pub m: u32,
    /// `l + 1`, or `l + 2` when the series starts at `n = 1` and `p(0) != 0`
    /// (the missing constant term leaves one extra polynomial degree).
    pub outer_order: u32,
    pub terms: Vec<OperatorTerm>,
    /// `p(x) = sum_j a'_j C(x, j)`
    #[serde(with = "serde_bigint::vec")]
    pub binomial_coefficients: Vec<BigInt>,
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Stirling numbers of the second kind `S(j, i)` for `j, i <= n`:
/// `(z d/dz)^j = sum_i S(j, i) z^i (d/dz)^i`.
fn stirling2(n: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
    s[0][0] = BigInt::one();
    for j in 1..=n {
        for i in 1..=j {
            s[j][i] = &s[j - 1][i - 1] + BigInt::from(i) * &s[j - 1][i];
        }
    }
    s
}

/// Forward differences `Delta^j p(0)`.
pub(crate) fn binomial_basis(p: &IntPoly) -> Vec<BigInt> {
    let Some(l) = p.degree() else { return Vec::new() };
    let mut values: Vec<BigInt> = (0..=l as u64).map(|k| p.eval_u64(k)).collect();
    let mut out = Vec::with_capacity(l + 1);
    for _ in 0..=l {
        out.push(values[0].clone());
        values = values.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

pub fn build_annihilator(r: &RationalFunction, start: u32) -> Result<AnnihilatorOperator> {
    if start > 1 {
        return Err(Error::Malformed(format!("start index must be 0 or 1, got {start}")));
    }
    let m = r.q.degree().ok_or_else(|| Error::InvalidPolynomial("q is the zero polynomial".into()))?;
    let l = r.p.degree().unwrap_or(0);
    let outer = if start == 1 && !r.p.eval_u64(0).is_zero() { l + 2 } else { l + 1 };

    let stirling = stirling2(m);
    let mut inner = vec![BigInt::zero(); m + 1];
    for (j, b) in r.q.coeffs().iter().enumerate() {
        for (i, s) in stirling[j].iter().enumerate().take(j + 1) {
            inner[i] += b * s;
        }
    }
    let one_minus_z = IntPoly::from_i64(&[1, -1]);
    let damping = (0..=l).fold(IntPoly::one(), |acc, _| &acc * &one_minus_z);

    let mut by_order: Vec<IntPoly> = vec![IntPoly::zero(); m + outer + 1];
    for (i, c) in inner.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut monomial = vec![BigInt::zero(); i];
        monomial.push(c.clone());
        let mut coeff = &damping * &IntPoly::new(monomial);
        // Leibniz: D^L (c D^i) = sum_t C(L, t) c^(t) D^(i + L - t)
        for t in 0..=outer {
            let slot = i + outer - t;
            by_order[slot] = &by_order[slot] + &coeff.scale(&binomial(outer as u64, t as u64));
            coeff = coeff.derivative();
        }
    }
    let terms = by_order
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, coefficient)| OperatorTerm { derivative_order: k as u32, coefficient })
        .collect();
    Ok(AnnihilatorOperator {
        l: l as u32,
        m: m as u32,
        outer_order: outer as u32,
        terms,
        binomial_coefficients: binomial_basis(&r.p),
    })
}

impl AnnihilatorOperator {
    pub fn order(&self) -> u32 {
        self.terms.iter().map(|t| t.derivative_order).max().unwrap_or(0)
    }

    /// Applies the operator to the truncated series `sum a_n z^n`; only the
    /// first `len - order` coefficients of the result are determined, and
    /// only those are returned.
    pub fn apply(&self, series: &[Rational]) -> Vec<Rational> {
        let order = self.order() as usize;
        let len = series.len().saturating_sub(order);
        let mut out = vec![Rational::zero(); len];
        for term in &self.terms {
            let k = term.derivative_order as usize;
            // (D^k f)_j = a_{j+k} (j+1)...(j+k)
            let derived: Vec<Rational> = (0..len)
                .map(|j| {
                    let falling: BigInt = (1..=k).fold(BigInt::one(), |acc, t| acc * BigInt::from(j + t));
                    &series[j + k] * Rational::from_integer(falling)
                })
                .collect();
            for (e, c) in term.coefficient.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let c = Rational::from_integer(c.clone());
                for n in e..len {
                    out[n] += &c * &derived[n - e];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(r: &RationalFunction, start: u64, len: u64) -> Vec<Rational> {
        (0..len)
            .map(|n| if n < start { Rational::zero() } else { r.eval(&BigInt::from(n)).unwrap() })
            .collect()
    }

    #[test]
    fn log_series_operator() {
        let r = RationalFunction::from_i64(&[1], &[0, 1]);
        let op = build_annihilator(&r, 1).unwrap();
        // (d/dz)^2 (1 - z) z d/dz = (z - z^2) D^3 + (2 - 4z) D^2 - 2 D
        assert_eq!(op.outer_order, 2);
        let got: Vec<(u32, IntPoly)> = op.terms.iter().map(|t| (t.derivative_order, t.coefficient.clone())).collect();
        assert_eq!(
            got,
            vec![
                (1, IntPoly::from_i64(&[-2])),
                (2, IntPoly::from_i64(&[2, -4])),
                (3, IntPoly::from_i64(&[0, 1, -1])),
            ]
        );
        let out = op.apply(&series(&r, 1, 51));
        assert_eq!(out.len(), 48);
        assert!(out.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn first_order_part_leaves_a_constant() {
        // d/dz (1 - z) z d/dz sends sum z^n/n to the constant 1
        let r = RationalFunction::from_i64(&[1], &[0, 1]);
        let op = AnnihilatorOperator {
            outer_order: 1,
            terms: vec![
                OperatorTerm { derivative_order: 1, coefficient: IntPoly::from_i64(&[1, -2]) },
                OperatorTerm { derivative_order: 2, coefficient: IntPoly::from_i64(&[0, 1, -1]) },
            ],
            ..build_annihilator(&r, 1).unwrap()
        };
        let out = op.apply(&series(&r, 1, 20));
        assert_eq!(out[0], Rational::one());
        assert!(out[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn geometric_series() {
        let r = RationalFunction::from_i64(&[1], &[1]);
        let op = build_annihilator(&r, 0).unwrap();
        let out = op.apply(&vec![Rational::one(); 40]);
        assert!(out.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn binomial_basis_of_square() {
        assert_eq!(binomial_basis(&IntPoly::from_i64(&[0, 0, 1])), vec![BigInt::from(0), BigInt::from(1), BigInt::from(2)]);
        assert!(binomial_basis(&IntPoly::zero()).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn annihilates_random_series(
            p in proptest::collection::vec(-5i64..=5, 1..=4),
            roots in proptest::collection::vec(1i64..=6, 1..=3),
            lead in 1i64..=3,
        ) {
            // q = lead * prod (x + root) has no root at n >= 0
            let q = roots.iter().fold(IntPoly::from_i64(&[lead]), |acc, r| &acc * &IntPoly::from_i64(&[*r, 1]));
            let r = RationalFunction::new(IntPoly::from_i64(&p), q);
            let op = build_annihilator(&r, 0).unwrap();
            let out = op.apply(&series(&r, 0, 51 + op.order() as u64));
            prop_assert!(out.len() >= 51);
            prop_assert!(out.iter().all(|c| c.is_zero()));
        }
    }
}
