//! Named specs for the classical constants.

use serde::Serialize;

use super::{BbpSpec, RationalFunction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresetKind {
    /// `sum_{n >= start} p(n)/q(n) b^-n`
    Series { spec: BbpSpec },
    /// `sum_{n >= start} p(n)/q(n) z^n` with `z = +-1`
    Boundary { r: RationalFunction, z: i64, start: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    #[serde(flatten)]
    pub kind: PresetKind,
}

fn series(base: u64, p: &[i64], q: &[i64], start: u32) -> BbpSpec {
    BbpSpec::from_i64(base, p, q, start).expect("built-in preset is valid")
}

/// `log 2 = sum_{n >= 1} 1/n 2^-n`
pub fn log2_base2() -> BbpSpec {
    series(2, &[1], &[0, 1], 1)
}

/// `log 2 = sum_{n >= 1} 6/(2n - 1) 9^-n`
pub fn log2_base9() -> BbpSpec {
    series(9, &[6], &[-1, 2], 1)
}

/// `pi = sum_{n >= 0} 16^-n (4/(8n+1) - 2/(8n+4) - 1/(8n+5) - 1/(8n+6))` over a common denominator.
pub fn pi_base16() -> BbpSpec {
    series(16, &[47, 151, 120], &[15, 194, 712, 1024, 512], 0)
}

/// `1 = sum_{n >= 1} (n + 2)/(n (n + 1)) 2^-n`
pub fn rational_one() -> BbpSpec {
    series(2, &[2, 1], &[0, 1, 1], 1)
}

/// `Li_2(1/2) = sum_{n >= 1} 1/n^2 2^-n`
pub fn li2_half() -> BbpSpec {
    series(2, &[1], &[0, 0, 1], 1)
}

/// `pi/3 = sum_{n >= 0} 1/((n + 1)(2n + 1)(4n + 1))`
pub fn lehmer() -> (RationalFunction, i64, u32) {
    (RationalFunction::from_i64(&[1], &[1, 7, 14, 8]), 1, 0)
}

/// `sum_{n >= 1} (-1)^n/(n^2 + 1)`
pub fn flajolet_salvy() -> (RationalFunction, i64, u32) {
    (RationalFunction::from_i64(&[1], &[1, 0, 1]), -1, 1)
}

/// `h(1) = sum_{n >= 1} 1/(n (n^2 + 1))`
pub fn bombieri_h() -> (RationalFunction, i64, u32) {
    (RationalFunction::from_i64(&[1], &[0, 1, 0, 1]), 1, 1)
}

pub fn all() -> Vec<Preset> {
    let boundary = |(r, z, start): (RationalFunction, i64, u32)| PresetKind::Boundary { r, z, start };
    vec![
        Preset { name: "log2-base2", description: "log 2 in base 2", kind: PresetKind::Series { spec: log2_base2() } },
        Preset { name: "log2-base9", description: "log 2 in base 9", kind: PresetKind::Series { spec: log2_base9() } },
        Preset { name: "pi-base16", description: "pi in base 16", kind: PresetKind::Series { spec: pi_base16() } },
        Preset { name: "rational-one", description: "the rational number 1", kind: PresetKind::Series { spec: rational_one() } },
        Preset { name: "li2-half", description: "dilogarithm at 1/2", kind: PresetKind::Series { spec: li2_half() } },
        Preset { name: "lehmer", description: "pi/3 as a sum at z = 1", kind: boundary(lehmer()) },
        Preset { name: "flajolet-salvy", description: "alternating sum of 1/(n^2 + 1)", kind: boundary(flajolet_salvy()) },
        Preset { name: "bombieri-h", description: "h(1) = sum 1/(n (n^2 + 1))", kind: boundary(bombieri_h()) },
    ]
}

pub fn by_name(name: &str) -> Result<Preset> {
    all()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

/// The series spec behind a preset name; boundary presets are rejected.
pub fn series_by_name(name: &str) -> Result<BbpSpec> {
    match by_name(name)?.kind {
        PresetKind::Series { spec } => Ok(spec),
        PresetKind::Boundary { .. } => Err(Error::Malformed(format!("preset {name:?} is a boundary sum, not a base-b series"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rational, BoundedReal, Rational};
    use num_bigint::BigInt;
    use num_traits::Zero;

    #[test]
    fn pi_preset_matches_four_term_form() {
        let spec = pi_base16();
        for n in 0..50u64 {
            let k = n as i64;
            let four = rational(4, 8 * k + 1) - rational(2, 8 * k + 4) - rational(1, 8 * k + 5) - rational(1, 8 * k + 6);
            assert_eq!(spec.epsilon(n), four);
        }
    }

    /// Machin's arctangent formula with alternating-series error bounds.
    fn machin(terms: u64) -> BoundedReal {
        let atan_inv = |m: i64| {
            let x = rational(1, m);
            let mut sum = Rational::zero();
            let mut power = x.clone();
            for k in 0..terms {
                let t = &power / Rational::from_integer(BigInt::from(2 * k + 1));
                if k % 2 == 0 {
                    sum += t;
                } else {
                    sum -= t;
                }
                power = power * &x * &x;
            }
            (sum, power / Rational::from_integer(BigInt::from(2 * terms + 1)))
        };
        let (a, ea) = atan_inv(5);
        let (b, eb) = atan_inv(239);
        BoundedReal::new(rational(16, 1) * a - rational(4, 1) * b, rational(16, 1) * ea + rational(4, 1) * eb)
    }

    #[test]
    fn pi_preset_against_arctangent_oracle() {
        let pi = pi_base16().eval_theta(200).unwrap();
        assert!(pi.intersects(&machin(90)));
    }

    #[test]
    fn lookup() {
        assert_eq!(series_by_name("log2-base9").unwrap(), log2_base9());
        assert!(matches!(by_name("zeta5"), Err(Error::UnknownPreset(_))));
        assert!(series_by_name("lehmer").is_err());
        assert_eq!(all().len(), 8);
    }
}
