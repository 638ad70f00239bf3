//! The perturbed b-transformation `y_{n+1} = b y_n + eps_{n+1} mod 1` driven by
//! `eps_n = p(n)/q(n)`, the tails `t_n`, and the correlation
//! `x_n = y_n* + t_n (mod 1)` between the orbit of `theta` and the perturbed orbit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bbp::{eval_theta, tail_enclosure, BbpSpec};
use crate::error::{Error, Result};
use crate::numerics::{
    ceil_scaled, dyadic, floor_scaled, frac, pow2, serde_rational, BoundedReal, Rational, GUARD_BITS,
};
use crate::radix_dynamics::{digits_of_real, DigitFlag};
use crate::stats::{cluster_limit_points, Cluster};

/// Largest step count accepted by [`verify_correlation`].
pub const MAX_CORRELATION_STEPS: u64 = 5000;
/// Bits kept when remainders are handed to the statistics routines.
pub const SAMPLE_BITS: u64 = 64;
/// Cluster count above which a sample is not treated as having finitely many limit points.
pub const MAX_CLUSTERS: usize = 64;

/// Exact perturbed orbit. Remainder `y_n` is stored unreduced as
/// `numerators[n-1] / denominators[denominator_of[n-1]]`, where the
/// denominators are running lcms of the `eps` denominators; reducing every
/// step would spend most of the time in gcds of huge integers.
#[derive(Clone, Debug)]
pub struct PerturbedOrbit {
    base: u64,
    y0: Rational,
    numerators: Vec<BigInt>,
    denominator_of: Vec<usize>,
    denominators: Vec<BigInt>,
    digits: Vec<i64>,
}

impl PerturbedOrbit {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn y0(&self) -> &Rational {
        &self.y0
    }

    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `digits()[i]` is the digit `d_{i+1}`.
    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    /// Unreduced `(numerator, denominator)` of `y_n`, `0 <= n <= len`.
    pub fn remainder_parts(&self, n: usize) -> (BigInt, BigInt) {
        if n == 0 {
            return (self.y0.numer().clone(), self.y0.denom().clone());
        }
        (self.numerators[n - 1].clone(), self.denominators[self.denominator_of[n - 1]].clone())
    }

    /// `y_n` in lowest terms, `0 <= n <= len`.
    pub fn remainder(&self, n: usize) -> Rational {
        let (num, den) = self.remainder_parts(n);
        Rational::new(num, den)
    }

    /// `y_1, ..., y_len` in lowest terms.
    pub fn remainders(&self) -> Vec<Rational> {
        (1..=self.len()).map(|n| self.remainder(n)).collect()
    }

    /// `floor(2^bits y_n) / 2^bits`, within `2^-bits` below `y_n`.
    pub fn truncated_remainder(&self, n: usize, bits: u64) -> Rational {
        let (num, den) = self.remainder_parts(n);
        dyadic((num << bits).div_floor(&den), bits)
    }

    /// Truncations of `y_from, ..., y_to` (inclusive).
    pub fn truncated_range(&self, from: usize, to: usize, bits: u64) -> Vec<Rational> {
        (from..=to).into_par_iter().map(|n| self.truncated_remainder(n, bits)).collect()
    }
}

impl Serialize for PerturbedOrbit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let remainders: Vec<String> = self.remainders().iter().map(crate::numerics::format_rational).collect();
        let mut st = s.serialize_struct("PerturbedOrbit", 5)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("y0", &crate::numerics::format_rational(&self.y0))?;
        st.serialize_field("steps", &self.len())?;
        st.serialize_field("remainders", &remainders)?;
        st.serialize_field("digits", &self.digits)?;
        st.end()
    }
}

/// The initial value whose perturbed orbit tracks `theta`: `frac(eps_0)` for
/// series starting at 0, and 0 otherwise.
pub fn canonical_initial(spec: &BbpSpec) -> Rational {
    frac(&spec.epsilon(0))
}

pub fn perturbed_orbit(spec: &BbpSpec, y0: &Rational, steps: usize) -> Result<PerturbedOrbit> {
    if y0.is_negative() || *y0 >= Rational::one() {
        return Err(Error::OutOfUnitInterval(y0.to_string()));
    }
    let b = BigInt::from(spec.base());
    let mut den = y0.denom().clone();
    let mut num = y0.numer().clone();
    let mut denominators = vec![den.clone()];
    let mut numerators = Vec::with_capacity(steps);
    let mut denominator_of = Vec::with_capacity(steps);
    let mut digits = Vec::with_capacity(steps);
    for n in 1..=steps as u64 {
        let eps = spec.epsilon(n);
        let eps_den = eps.denom();
        let g = eps_den.gcd(&(&den % eps_den));
        let growth = eps_den / &g;
        let scaled_num = if growth.is_one() {
            &num * &b
        } else {
            den *= &growth;
            denominators.push(den.clone());
            &num * &b * &growth
        };
        let value = scaled_num + eps.numer() * (&den / eps_den);
        let (d, r) = value.div_mod_floor(&den);
        digits.push(d.to_i64().ok_or_else(|| Error::Malformed(format!("digit {d} at step {n} exceeds 64 bits")))?);
        numerators.push(r.clone());
        denominator_of.push(denominators.len() - 1);
        num = r;
    }
    Ok(PerturbedOrbit { base: spec.base(), y0: y0.clone(), numerators, denominator_of, denominators, digits })
}

/// The orbit `y_n*` started from [`canonical_initial`].
pub fn canonical_orbit(spec: &BbpSpec, steps: usize) -> Result<PerturbedOrbit> {
    perturbed_orbit(spec, &canonical_initial(spec), steps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailBound {
    pub index: u64,
    pub enclosure: BoundedReal,
}

/// Enclosure of `t_n = sum_{j >= 1} eps_{n+j} b^-j`.
pub fn tail(spec: &BbpSpec, n: u64, precision_bits: u64) -> Result<TailBound> {
    if !spec.is_vanishing() {
        return Err(Error::PerturbationDoesNotVanish);
    }
    Ok(TailBound { index: n, enclosure: tail_enclosure(spec, n, precision_bits) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitAgreement {
    pub compared: u64,
    pub agreeing: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub checked_range: u64,
    pub precision_bits: u64,
    /// Encloses `max_n d_T(x_n, y_n* + t_n)`.
    pub max_toroidal_defect: BoundedReal,
    /// Upper bounds on `|t_n|` for `n = 0..=checked_range`.
    #[serde(with = "serde_rational::vec")]
    pub tail_magnitudes: Vec<Rational>,
    pub failures: Vec<u64>,
    /// Agreement between the digits of `theta` and the perturbed digits; reported only.
    pub digit_agreement: DigitAgreement,
    pub verdict: Verdict,
}

/// Checks `x_n = y_n* + t_n (mod 1)` for `n = 0..=steps`.
///
/// `x_n` is read off a `steps * log2 b + precision_bits` bit enclosure of
/// `theta` (`x_n = frac(b^n theta)`), `y_n*` comes from the exact perturbed
/// orbit and `t_n` from its own tail enclosure, so the two sides share no
/// computation.
pub fn verify_correlation(spec: &BbpSpec, steps: u64, precision_bits: u64) -> Result<CorrelationReport> {
    if !spec.is_vanishing() {
        return Err(Error::PerturbationDoesNotVanish);
    }
    if steps > MAX_CORRELATION_STEPS {
        return Err(Error::InsufficientPrecisionForSteps);
    }
    let base = spec.base();
    let digit_bits = 64 - (base - 1).leading_zeros() as u64;
    let theta = eval_theta(spec, steps * digit_bits + precision_bits + GUARD_BITS)?;
    let orbit = canonical_orbit(spec, steps as usize)?;

    // theta's midpoint is dyadic, so frac(b^n mid) is an exact shift-and-mask.
    let mid = theta.midpoint();
    let mid_bits = mid.denom().bits() - 1;
    debug_assert_eq!(*mid.denom(), pow2(mid_bits));
    let modulus = pow2(mid_bits);
    let b = BigInt::from(base);
    let mut x_num = mid.numer().mod_floor(&modulus);
    let mut x_rad = theta.radius().clone();
    let mut xs = Vec::with_capacity(steps as usize + 1);
    for _ in 0..=steps {
        xs.push((x_num.clone(), x_rad.clone()));
        x_num = (&x_num * &b).mod_floor(&modulus);
        x_rad *= Rational::from_integer(b.clone());
    }

    let checks: Vec<(bool, Rational, Rational)> = (0..=steps)
        .into_par_iter()
        .map(|n| {
            let t = tail_enclosure(spec, n, precision_bits);
            let (x_num, x_rad) = &xs[n as usize];
            let (y_num, y_den) = orbit.remainder_parts(n as usize);
            let x_minus_t = dyadic(x_num.clone(), mid_bits) - t.midpoint();
            let radius = x_rad + t.radius();
            let offset = distance_to_integer(&x_minus_t, &y_num, &y_den);
            let ok = offset.le(&radius);
            let defect = dyadic(ceil_scaled(&offset.upper_bound(), SAMPLE_BITS), SAMPLE_BITS) + &radius;
            let magnitude = dyadic(ceil_scaled(&t.abs_upper(), SAMPLE_BITS), SAMPLE_BITS);
            (ok, defect, magnitude)
        })
        .collect();

    let failures: Vec<u64> = checks.iter().enumerate().filter(|(_, c)| !c.0).map(|(n, _)| n as u64).collect();
    let max_defect = checks.iter().map(|c| c.1.clone()).max().unwrap_or_else(Rational::zero);
    let tail_magnitudes = checks.into_iter().map(|c| c.2).collect();

    let reading = digits_of_real(&theta, base, steps.max(1) as usize)?;
    let mut compared = 0u64;
    let mut agreeing = 0u64;
    for (i, d) in orbit.digits().iter().enumerate() {
        if reading.flags[i] == DigitFlag::Confident {
            compared += 1;
            if *d == reading.digits[i] as i64 {
                agreeing += 1;
            }
        }
    }
    let rate = if compared == 0 { 0.0 } else { agreeing as f64 / compared as f64 };

    Ok(CorrelationReport {
        checked_range: steps,
        precision_bits,
        max_toroidal_defect: BoundedReal::from_endpoints(Rational::zero(), max_defect),
        tail_magnitudes,
        verdict: if failures.is_empty() { Verdict::Pass } else { Verdict::Fail },
        failures,
        digit_agreement: DigitAgreement { compared, agreeing, rate },
    })
}

/// Distance from `a - num/den` to the nearest integer, as the exact fraction
/// `gap / (den * a.denom())` without any gcd work.
struct IntegerOffset {
    gap: BigInt,
    den: BigInt,
}

impl IntegerOffset {
    fn le(&self, bound: &Rational) -> bool {
        &self.gap * bound.denom() <= bound.numer() * &self.den
    }

    fn upper_bound(&self) -> Rational {
        dyadic(ceil_scaled(&Rational::new(self.gap.clone(), self.den.clone()), SAMPLE_BITS), SAMPLE_BITS)
    }
}

fn distance_to_integer(a: &Rational, num: &BigInt, den: &BigInt) -> IntegerOffset {
    let total_den = a.denom() * den;
    let value = a.numer() * den - num * a.denom();
    let r = value.mod_floor(&total_den);
    let other = &total_den - &r;
    IntegerOffset { gap: if r <= other { r } else { other }, den: total_den }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DichotomyClass {
    FiniteLimitPoints,
    ApparentlyDense,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub classification: DichotomyClass,
    pub steps: u64,
    #[serde(with = "serde_rational")]
    pub cluster_radius: Rational,
    pub late_sample_size: usize,
    /// Clusters of the last half of the orbit.
    pub clusters: Vec<Cluster>,
    /// Largest cluster diameter over the third and the fourth quarter of the orbit.
    #[serde(with = "serde_rational::vec")]
    pub diameter_trend: Vec<Rational>,
    pub covered_cells: usize,
    pub total_cells: usize,
    pub note: String,
}

/// Empirical look at the limit points of `y_n*` over the last half of the orbit.
///
/// * apparently-dense: the late points meet every one of the `ceil(1/r)` cells of `[0, 1)`;
/// * finite-limit-points: at most [`MAX_CLUSTERS`] clusters at radius `r`, and the
///   largest diameter over the fourth quarter is below `r` and no larger than over the third;
/// * inconclusive otherwise.
pub fn dichotomy_probe(spec: &BbpSpec, steps: u64, cluster_radius: &Rational) -> Result<DichotomyReport> {
    if !spec.is_vanishing() {
        return Err(Error::PerturbationDoesNotVanish);
    }
    if steps < 16 {
        return Err(Error::TooFewSteps { min: 16, got: steps as usize });
    }
    if !cluster_radius.is_positive() || *cluster_radius >= Rational::one() {
        return Err(Error::Malformed(format!("cluster radius {cluster_radius} must lie in (0, 1)")));
    }
    let orbit = canonical_orbit(spec, steps as usize)?;
    let n = steps as usize;
    let half = n / 2;
    let three_quarters = n - n / 4;
    let late = orbit.truncated_range(half + 1, n, SAMPLE_BITS);
    let third = orbit.truncated_range(half + 1, three_quarters, SAMPLE_BITS);
    let fourth = orbit.truncated_range(three_quarters + 1, n, SAMPLE_BITS);

    let total_cells = ceil_scaled(&cluster_radius.recip(), 0).to_usize().unwrap_or(usize::MAX);
    let mut seen = vec![false; total_cells];
    for y in &late {
        let cell = floor_scaled(&(y * Rational::from_integer(BigInt::from(total_cells))), 0);
        seen[cell.to_usize().expect("cell index in range").min(total_cells - 1)] = true;
    }
    let covered_cells = seen.iter().filter(|s| **s).count();

    let clusters = cluster_limit_points(&late, cluster_radius)?;
    let widest = |c: &[Cluster]| c.iter().map(|c| c.diameter.clone()).max().unwrap_or_else(Rational::zero);
    let third_clusters = cluster_limit_points(&third, cluster_radius)?;
    let fourth_clusters = cluster_limit_points(&fourth, cluster_radius)?;
    let (d3, d4) = (widest(&third_clusters), widest(&fourth_clusters));

    let classification = if covered_cells == total_cells {
        DichotomyClass::ApparentlyDense
    } else if clusters.len() <= MAX_CLUSTERS && d4 <= d3 && d4 < *cluster_radius {
        DichotomyClass::FiniteLimitPoints
    } else {
        DichotomyClass::Inconclusive
    };
    Ok(DichotomyReport {
        classification,
        steps,
        cluster_radius: cluster_radius.clone(),
        late_sample_size: late.len(),
        clusters,
        diameter_trend: vec![d3, d4],
        covered_cells,
        total_cells,
        note: "empirical classification of a finite orbit; not a proof of either alternative".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbp::presets;
    use crate::numerics::{rational, toroidal_distance, ulp};
    use crate::radix_dynamics::b_orbit;

    #[test]
    fn log2_first_steps() {
        let orbit = perturbed_orbit(&presets::log2_base2(), &Rational::zero(), 3).unwrap();
        assert_eq!(orbit.remainders(), vec![rational(0, 1), rational(1, 2), rational(1, 3)]);
        assert_eq!(orbit.digits(), &[1, 0, 1]);
    }

    /// Straightforward re-implementation with reduced rationals at every step.
    fn naive_orbit(spec: &BbpSpec, y0: &Rational, steps: u64) -> (Vec<Rational>, Vec<i64>) {
        let b = Rational::from_integer(BigInt::from(spec.base()));
        let mut y = y0.clone();
        let mut ys = Vec::new();
        let mut ds = Vec::new();
        for n in 1..=steps {
            let v = &b * &y + spec.epsilon(n);
            let d = v.floor();
            y = v - &d;
            ys.push(y.clone());
            ds.push(d.to_integer().to_i64().unwrap());
        }
        (ys, ds)
    }

    #[test]
    fn matches_naive_recurrence() {
        for spec in [presets::log2_base2(), presets::log2_base9(), presets::pi_base16(), presets::rational_one()] {
            let y0 = canonical_initial(&spec);
            let orbit = perturbed_orbit(&spec, &y0, 120).unwrap();
            let (ys, ds) = naive_orbit(&spec, &y0, 120);
            assert_eq!(orbit.remainders(), ys);
            assert_eq!(orbit.digits(), ds.as_slice());
        }
    }

    #[test]
    fn zero_perturbation_reduces_to_radix_orbit() {
        let spec = BbpSpec::from_i64(3, &[], &[1], 1).unwrap();
        let y0 = rational(5, 17);
        let orbit = perturbed_orbit(&spec, &y0, 40).unwrap();
        let plain = b_orbit(&y0, 3, 40).unwrap();
        assert_eq!(orbit.remainders(), plain.remainders);
        let digits: Vec<i64> = plain.digits.iter().map(|&d| d as i64).collect();
        assert_eq!(orbit.digits(), digits.as_slice());
        let report = verify_correlation(&spec, 50, 64).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.tail_magnitudes.iter().all(|t| t.is_zero()));
    }

    #[test]
    fn tail_examples() {
        let spec = presets::log2_base2();
        let t0 = tail(&spec, 0, 64).unwrap();
        assert!(t0.enclosure.intersects(&spec.eval_theta(64).unwrap()));
        let mut previous = None;
        for n in 0..=50 {
            let bound = tail(&spec, n, 64).unwrap().enclosure.abs_upper();
            if let Some(p) = previous {
                assert!(bound < p);
            }
            previous = Some(bound);
        }
        let non_vanishing = BbpSpec::from_i64(2, &[0, 1], &[1], 1).unwrap();
        assert_eq!(tail(&non_vanishing, 0, 10), Err(Error::PerturbationDoesNotVanish));
    }

    #[test]
    fn correlation_log2() {
        let report = verify_correlation(&presets::log2_base2(), 200, 64).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.max_toroidal_defect.contains_zero());
        assert_eq!(report.tail_magnitudes.len(), 201);
        assert!(report.max_toroidal_defect.upper() < ulp(32));
    }

    #[test]
    fn correlation_step_cap() {
        assert_eq!(
            verify_correlation(&presets::log2_base2(), MAX_CORRELATION_STEPS + 1, 64),
            Err(Error::InsufficientPrecisionForSteps)
        );
    }

    #[test]
    fn dichotomy_rational_theta() {
        let report = dichotomy_probe(&presets::rational_one(), 400, &rational(1, 64)).unwrap();
        assert_eq!(report.classification, DichotomyClass::FiniteLimitPoints);
        assert_eq!(report.clusters.len(), 1);
        assert!(toroidal_distance(&report.clusters[0].center, &Rational::zero()) < rational(1, 64));
        assert!(report.diameter_trend[1] <= report.diameter_trend[0]);
    }

    #[test]
    fn dichotomy_zero_perturbation() {
        let spec = BbpSpec::from_i64(2, &[], &[1], 1).unwrap();
        let report = dichotomy_probe(&spec, 32, &rational(1, 64)).unwrap();
        assert_eq!(report.classification, DichotomyClass::FiniteLimitPoints);
        assert_eq!(report.clusters.len(), 1);
        assert_eq!(report.clusters[0].center, Rational::zero());
        assert_eq!(dichotomy_probe(&spec, 15, &rational(1, 64)).unwrap_err(), Error::TooFewSteps { min: 16, got: 15 });
    }

    #[test]
    fn limit_points_of_both_orbits_agree() {
        // theta = 1: x_n = 0 for all n, so the late y_n* must cluster at 0 as well
        let spec = presets::rational_one();
        let radius = rational(1, 64);
        let report = dichotomy_probe(&spec, 256, &radius).unwrap();
        let xs = vec![Rational::zero(); 128];
        let x_clusters = cluster_limit_points(&xs, &radius).unwrap();
        assert_eq!(x_clusters.len(), report.clusters.len());
        for (a, b) in x_clusters.iter().zip(&report.clusters) {
            assert!(toroidal_distance(&a.center, &b.center) < radius);
        }
    }
}
