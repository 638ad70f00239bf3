use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numerics::Rational;
use crate::poly::{IntPoly, Poly};

/// The `n`-th cyclotomic polynomial, by dividing `x^n - 1` by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(n: u64) -> IntPoly {
    assert!(n >= 1, "cyclotomic index must be positive");
    let mut coeffs = vec![BigInt::zero(); n as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[n as usize] = BigInt::one();
    let mut poly = IntPoly::new(coeffs).to_poly();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let (quot, _) = poly.div_rem(&cyclotomic_polynomial(d).to_poly()).expect("nonzero divisor");
            poly = quot;
        }
    }
    poly.to_primitive().1
}

/// Arithmetic in `Q(zeta_n)` on coordinates over `1, zeta, ..., zeta^(phi(n) - 1)`.
pub(crate) struct CyclotomicField {
    pub modulus: u64,
    /// Coordinates of `zeta^e` for `e < modulus`.
    powers: Vec<Vec<Rational>>,
}

impl CyclotomicField {
    pub fn new(modulus: u64) -> Self {
        let phi = cyclotomic_polynomial(modulus).to_poly();
        let dim = phi.degree().expect("nonzero");
        let powers = (0..modulus as usize)
            .map(|e| {
                let mut mono = vec![Rational::zero(); e];
                mono.push(Rational::one());
                let (_, rem) = Poly::new(mono).div_rem(&phi).expect("nonzero modulus");
                (0..dim).map(|i| rem.coeff(i)).collect()
            })
            .collect();
        Self { modulus, powers }
    }

    pub fn dimension(&self) -> usize {
        self.powers[0].len()
    }

    /// Adds `c * zeta^e` into `acc`.
    pub fn add_monomial(&self, acc: &mut [Rational], c: &Rational, e: i64) {
        let e = e.rem_euclid(self.modulus as i64) as usize;
        for (a, z) in acc.iter_mut().zip(&self.powers[e]) {
            if !z.is_zero() {
                *a += c * z;
            }
        }
    }
}
