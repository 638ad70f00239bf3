use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use normality_lab::bbp::{extract_digits, presets, BbpSpec, RationalFunction, DEFAULT_GUARD_BITS};
use normality_lab::gfunction::{closed_form_eval, partial_fractions};
use normality_lab::numerics::{frac, rational, Rational};
use normality_lab::perturbed_dynamics::{canonical_initial, perturbed_orbit};
use normality_lab::poly::IntPoly;
use normality_lab::radix_dynamics::{b_orbit, detect_period, digits_of_real, DigitFlag};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn period_matches_orbit(num in 0i64..500, den in 1i64..500, base in 2u64..13) {
        prop_assume!(num < den);
        let x0 = rational(num, den);
        let report = detect_period(&x0, base).unwrap();
        let pre = report.preperiod_length as usize;
        let per = report.period_length as usize;
        let orbit = b_orbit(&x0, base, pre + 2 * per + 1).unwrap();
        let mut states = vec![x0.clone()];
        states.extend(orbit.remainders.iter().cloned());
        prop_assert_eq!(&states[pre], &states[pre + per]);
        prop_assert_eq!(&states[pre..pre + per], &report.cycle[..]);
    }

    #[test]
    fn orbit_digits_are_in_range(num in 0i64..10_000, den in 1i64..10_000, base in 2u64..40) {
        prop_assume!(num < den);
        let orbit = b_orbit(&rational(num, den), base, 64).unwrap();
        prop_assert!(orbit.digits.iter().all(|d| *d < base));
        prop_assert!(orbit.remainders.iter().all(|x| *x >= Rational::zero() && *x < rational(1, 1)));
    }

    #[test]
    fn spigot_agrees_with_enclosure(position in 0u64..300) {
        let spec = presets::log2_base2();
        let theta = spec.eval_theta(position + 200).unwrap();
        let reading = digits_of_real(&theta, 2, position as usize + 16).unwrap();
        let ex = extract_digits(&spec, position, 16, DEFAULT_GUARD_BITS).unwrap();
        for i in 0..16 {
            let j = position as usize + i;
            if ex.flags[i] == DigitFlag::Confident && reading.flags[j] == DigitFlag::Confident {
                prop_assert_eq!(ex.digits[i], reading.digits[j]);
            }
        }
    }

    #[test]
    fn perturbed_remainders_stay_in_unit_interval(base in 2u64..11, a in 1i64..6, c in 0i64..6, steps in 1usize..80) {
        let spec = BbpSpec::from_i64(base, &[1], &[c * a, a], 1);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let orbit = perturbed_orbit(&spec, &canonical_initial(&spec), steps).unwrap();
        for n in 1..=steps {
            let y = frac(&orbit.remainder(n));
            prop_assert!(y >= Rational::zero() && y < rational(1, 1));
        }
    }

    #[test]
    fn partial_fraction_terms_recombine(roots in proptest::collection::vec(-6i64..0, 1..4), p0 in -9i64..10, p1 in -9i64..10) {
        let q = roots.iter().fold(IntPoly::one(), |acc, r| &acc * &IntPoly::from_i64(&[-r, 1]));
        let r = RationalFunction::new(IntPoly::from_i64(&[p0, p1]), q.clone());
        prop_assume!(!r.p.is_zero());
        let (num, den) = partial_fractions(&r).unwrap().recombine();
        prop_assert!((&(&num * &q.to_poly()) - &(&r.p.to_poly() * &den)).is_zero());
    }
}

#[test]
fn closed_form_matches_series_across_bases() {
    for base in [2u64, 3, 5, 10] {
        let spec = BbpSpec::from_i64(base, &[1], &[0, 1], 1).unwrap();
        let closed = closed_form_eval(&spec, 96).unwrap().numeric_value;
        let direct = spec.eval_theta(96).unwrap();
        let gap = (closed.midpoint() - direct.midpoint()).abs();
        assert!(gap <= closed.radius() + direct.radius(), "base {base}");
    }
}

#[test]
fn epsilon_vanishes_before_start() {
    let spec = BbpSpec::from_i64(2, &[1], &[0, 1], 1).unwrap();
    assert_eq!(spec.epsilon(0), Rational::zero());
    assert_eq!(spec.epsilon(3), rational(1, 3));
    let r = spec.rational_function();
    assert_eq!(r.eval(&BigInt::from(4)), Some(rational(1, 4)));
}
