//! BBP-type series `theta = sum_{n >= start} p(n)/q(n) b^-n`: validation,
//! rigorous evaluation, boundary sums at `z = +-1` and spigot digit extraction.

mod eval;
pub mod presets;
mod spigot;

pub use eval::{eval_boundary, eval_theta, tail_enclosure};
pub use spigot::{extract_digits, DigitExtraction, DEFAULT_GUARD_BITS};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{BoundedReal, Rational};
use crate::poly::{rational_roots, IntPoly, Poly};

/// `p(x)/q(x)` with integer coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFunction {
    pub p: IntPoly,
    pub q: IntPoly,
}

impl RationalFunction {
    pub fn new(p: IntPoly, q: IntPoly) -> Self {
        Self { p, q }
    }

    pub fn from_i64(p: &[i64], q: &[i64]) -> Self {
        Self::new(IntPoly::from_i64(p), IntPoly::from_i64(q))
    }

    /// `p(n)/q(n)`, or `None` at a pole.
    pub fn eval(&self, n: &BigInt) -> Option<Rational> {
        let den = self.q.eval(n);
        if den.is_zero() {
            return None;
        }
        Some(Rational::new(self.p.eval(n), den))
    }

    /// `deg q > deg p`, i.e. `p(n)/q(n) -> 0`.
    pub fn is_vanishing(&self) -> bool {
        match (self.p.degree(), self.q.degree()) {
            (None, _) => true,
            (Some(dp), Some(dq)) => dq > dp,
            (Some(_), None) => false,
        }
    }

    /// Problems that disqualify `p/q` as a series generator starting at `start`.
    pub fn problems(&self, start: u32) -> Vec<String> {
        let mut out = Vec::new();
        if self.q.is_zero() {
            out.push("q is the zero polynomial".to_string());
            return out;
        }
        if let Ok((roots, _)) = rational_roots(&self.q) {
            for r in roots {
                if r.root.is_integer() && !r.root.is_negative() && r.root >= Rational::from_integer(start.into()) {
                    out.push(format!("q has nonnegative integer root n={}", r.root.numer()));
                }
            }
        }
        if !self.p.is_zero() {
            let g = Poly::gcd(&self.p.to_poly(), &self.q.to_poly());
            if g.degree().unwrap_or(0) > 0 {
                out.push("p,q not coprime".to_string());
            }
        }
        out
    }
}

/// Wire form of a spec, shared by the library and the command line:
/// `{"base": 2, "p": [1], "q": [0, 1], "start": 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDescriptor {
    pub base: u64,
    pub p: IntPoly,
    pub q: IntPoly,
    #[serde(default = "default_start")]
    pub start: u32,
}

fn default_start() -> u32 {
    1
}

/// A validated base together with its generator `p/q` and start index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BbpSpec {
    base: u64,
    r: RationalFunction,
    start_index: u32,
}

impl BbpSpec {
    pub fn new(base: u64, p: IntPoly, q: IntPoly, start_index: u32) -> Result<Self> {
        validate_spec(&SpecDescriptor { base, p, q, start: start_index })
    }

    pub fn from_i64(base: u64, p: &[i64], q: &[i64], start_index: u32) -> Result<Self> {
        Self::new(base, IntPoly::from_i64(p), IntPoly::from_i64(q), start_index)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn rational_function(&self) -> &RationalFunction {
        &self.r
    }

    pub fn p(&self) -> &IntPoly {
        &self.r.p
    }

    pub fn q(&self) -> &IntPoly {
        &self.r.q
    }

    pub fn start_index(&self) -> u32 {
        self.start_index
    }

    pub fn is_vanishing(&self) -> bool {
        self.r.is_vanishing()
    }

    /// `epsilon_n = p(n)/q(n)` in lowest terms; terms before the start index are zero.
    pub fn epsilon(&self, n: u64) -> Rational {
        if n < self.start_index as u64 || self.r.p.is_zero() {
            return Rational::zero();
        }
        self.r.eval(&BigInt::from(n)).expect("validated spec has no poles from its start index")
    }

    pub fn eval_theta(&self, precision_bits: u64) -> Result<BoundedReal> {
        eval_theta(self, precision_bits)
    }

    pub fn descriptor(&self) -> SpecDescriptor {
        SpecDescriptor { base: self.base, p: self.r.p.clone(), q: self.r.q.clone(), start: self.start_index }
    }
}

impl Serialize for BbpSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptor().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BbpSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = SpecDescriptor::deserialize(d)?;
        validate_spec(&desc).map_err(serde::de::Error::custom)
    }
}

/// Checks every condition on a spec and reports all failures at once.
pub fn validate_spec(desc: &SpecDescriptor) -> Result<BbpSpec> {
    let mut problems = Vec::new();
    if desc.base < 2 {
        problems.push("base < 2".to_string());
    }
    if desc.start > 1 {
        problems.push(format!("start index must be 0 or 1, got {}", desc.start));
    }
    let r = RationalFunction::new(desc.p.clone(), desc.q.clone());
    problems.extend(r.problems(desc.start.min(1)));
    if !problems.is_empty() {
        return Err(Error::InvalidSpec(problems));
    }
    Ok(BbpSpec { base: desc.base, r, start_index: desc.start })
}

/// Parses a JSON spec document and validates it.
pub fn parse_spec_json(text: &str) -> Result<BbpSpec> {
    let desc: SpecDescriptor = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    validate_spec(&desc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;

    #[test]
    fn log2_generator_is_valid() {
        let spec = BbpSpec::from_i64(2, &[1], &[0, 1], 1).unwrap();
        assert!(spec.is_vanishing());
        assert_eq!(spec.epsilon(3), rational(1, 3));
        assert_eq!(spec.epsilon(0), rational(0, 1));
    }

    #[test]
    fn validation_errors() {
        let err = BbpSpec::from_i64(2, &[1], &[-3, 1], 1).unwrap_err();
        assert_eq!(err, Error::InvalidSpec(vec!["q has nonnegative integer root n=3".into()]));
        let err = BbpSpec::from_i64(2, &[0, 1], &[0, 0, 1], 1).unwrap_err();
        assert_eq!(err, Error::InvalidSpec(vec!["p,q not coprime".into()]));
        let err = BbpSpec::from_i64(1, &[1], &[0, 1], 1).unwrap_err();
        assert_eq!(err, Error::InvalidSpec(vec!["base < 2".into()]));
        // x = 0 is a pole only when the series starts at 0
        let err = BbpSpec::from_i64(2, &[1], &[0, 1], 0).unwrap_err();
        assert_eq!(err, Error::InvalidSpec(vec!["q has nonnegative integer root n=0".into()]));
    }

    #[test]
    fn epsilon_examples() {
        let spec = BbpSpec::from_i64(9, &[6], &[-1, 2], 1).unwrap();
        assert_eq!(spec.epsilon(2), rational(2, 1));
        let zero = BbpSpec::from_i64(3, &[], &[1], 1).unwrap();
        assert_eq!(zero.epsilon(17), rational(0, 1));
    }

    #[test]
    fn json_round_trip() {
        let spec = parse_spec_json(r#"{"base": 2, "p": [1], "q": [0, 1]}"#).unwrap();
        assert_eq!(spec.start_index(), 1);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"base":2,"p":[1],"q":[0,1],"start":1}"#);
        assert!(matches!(parse_spec_json("{\"base\": 2}"), Err(Error::Malformed(_))));
    }
}
