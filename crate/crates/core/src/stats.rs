//! Equidistribution diagnostics on exact samples from `[0, 1)`.
//!
//! Nothing here decides whether a sequence is uniformly distributed; the
//! routines return numbers and leave thresholds to the caller.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bbp::{extract_digits, BbpSpec, DEFAULT_GUARD_BITS};
use crate::error::{Error, Result};
use crate::numerics::{frac, serde_rational, BoundedReal, Rational};
use crate::perturbed_dynamics::{canonical_orbit, SAMPLE_BITS};

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact star discrepancy `max_i max(i/N - u_(i), u_(i) - (i-1)/N)` of the sorted sample.
pub fn star_discrepancy(samples: &[Rational]) -> Result<Rational> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort();
    let n = int(sorted.len());
    let mut worst = Rational::zero();
    for (i, u) in sorted.iter().enumerate() {
        let above = int(i + 1) / &n - u;
        let below = u - int(i) / &n;
        if above > worst {
            worst = above;
        }
        if below > worst {
            worst = below;
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub sample_size: usize,
    #[serde(with = "serde_rational")]
    pub star_discrepancy: Rational,
    pub star_discrepancy_approx: String,
    pub uniform_verdict_note: String,
}

pub fn discrepancy_report(samples: &[Rational]) -> Result<DiscrepancyReport> {
    let d = star_discrepancy(samples)?;
    Ok(DiscrepancyReport {
        sample_size: samples.len(),
        star_discrepancy_approx: format!("{:.6}", crate::numerics::to_f64(&d)),
        star_discrepancy: d,
        uniform_verdict_note: "empirical statistic of a finite sample; no uniformity verdict is implied".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockCensus {
    pub base: u64,
    pub block_length: usize,
    /// Keys are the blocks written with `0-9a-z` for bases up to 36, otherwise as dot-separated numbers.
    pub counts: BTreeMap<String, u64>,
    pub total_windows: u64,
    pub chi_square: BoundedReal,
    pub all_blocks_present: bool,
}

fn block_key(block: &[u64], base: u64) -> String {
    if base <= 36 {
        block.iter().map(|&d| std::char::from_digit(d as u32, 36).expect("digit below 36")).collect()
    } else {
        block.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Sliding-window counts of length-`m` blocks and Pearson's chi-square
/// against the uniform expectation `total_windows / b^m` over all `b^m` blocks.
pub fn block_census(digits: &[u64], base: u64, m: usize) -> Result<BlockCensus> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    if m == 0 {
        return Err(Error::Malformed("block length must be at least 1".into()));
    }
    if digits.len() < m {
        return Err(Error::SampleTooShort { min: m, got: digits.len() });
    }
    if let Some(d) = digits.iter().find(|&&d| d >= base) {
        return Err(Error::Malformed(format!("digit {d} is not below base {base}")));
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for window in digits.windows(m) {
        *counts.entry(block_key(window, base)).or_insert(0) += 1;
    }
    let total_windows = (digits.len() - m + 1) as u64;
    let blocks = num_traits::pow(BigInt::from(base), m);
    let expected = Rational::new(BigInt::from(total_windows), blocks.clone());
    let mut chi = Rational::zero();
    for c in counts.values() {
        let diff = Rational::from_integer(BigInt::from(*c)) - &expected;
        chi += &diff * &diff / &expected;
    }
    let absent = &blocks - BigInt::from(counts.len());
    chi += Rational::from_integer(absent.clone()) * &expected;
    Ok(BlockCensus {
        base,
        block_length: m,
        counts,
        total_windows,
        chi_square: BoundedReal::exact(chi),
        all_blocks_present: absent.is_zero(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    #[serde(with = "serde_rational")]
    pub center: Rational,
    pub count: usize,
    /// Length of the arc spanned by the cluster.
    #[serde(with = "serde_rational")]
    pub diameter: Rational,
}

/// Single-linkage clustering on the circle `R/Z`: neighbours (in circular
/// order) closer than `radius` share a cluster. Clusters are sorted by center.
pub fn cluster_limit_points(samples: &[Rational], radius: &Rational) -> Result<Vec<Cluster>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut points: Vec<Rational> = samples.iter().map(frac).collect();
    points.sort();
    let n = points.len();
    let one = Rational::one();
    // gap[i] runs from points[i] to points[i+1], wrapping at the end
    let gaps: Vec<Rational> = (0..n)
        .map(|i| if i + 1 < n { &points[i + 1] - &points[i] } else { &one - &points[n - 1] + &points[0] })
        .collect();
    let cuts: Vec<usize> = (0..n).filter(|&i| gaps[i] > *radius).collect();
    let arc = |first: usize, len: usize| {
        let last = (first + len - 1) % n;
        let span = frac(&(&points[last] - &points[first]));
        let center = frac(&(&points[first] + &span / Rational::from_integer(BigInt::from(2))));
        Cluster { center, count: len, diameter: span }
    };
    let mut clusters = Vec::new();
    if cuts.is_empty() {
        // everything is linked around the circle; report the arc left after the widest gap
        let widest = (0..n).max_by(|&a, &b| gaps[a].cmp(&gaps[b]).then(b.cmp(&a))).expect("nonempty");
        clusters.push(arc((widest + 1) % n, n));
    } else {
        for (k, &cut) in cuts.iter().enumerate() {
            let next_cut = cuts[(k + 1) % cuts.len()];
            let first = (cut + 1) % n;
            let len = (next_cut + n - cut - 1) % n + 1;
            clusters.push(arc(first, len));
        }
    }
    clusters.sort_by(|a, b| a.center.cmp(&b.center).then(a.count.cmp(&b.count)));
    Ok(clusters)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityPoint {
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub distance: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub distances: Vec<StabilityPoint>,
}

/// Kolmogorov distance between the empirical measures of the first `n` and
/// the first `ceil(n/2)` samples, for `n = 4, 8, 16, ...`.
pub fn measure_stability(samples: &[Rational]) -> Result<StabilityReport> {
    if samples.len() < 4 {
        return Err(Error::SampleTooShort { min: 4, got: samples.len() });
    }
    let mut distances = Vec::new();
    let mut n = 4;
    while n <= samples.len() {
        let distance = kolmogorov(&samples[..n], &samples[..n.div_ceil(2)]);
        distances.push(StabilityPoint { n, distance });
        n *= 2;
    }
    Ok(StabilityReport { distances })
}

fn kolmogorov(a: &[Rational], b: &[Rational]) -> Rational {
    let mut a: Vec<&Rational> = a.iter().collect();
    let mut b: Vec<&Rational> = b.iter().collect();
    a.sort();
    b.sort();
    let (na, nb) = (int(a.len()), int(b.len()));
    let (mut i, mut j) = (0usize, 0usize);
    let mut worst = Rational::zero();
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => std::cmp::min(*x, *y),
            (Some(x), None) => *x,
            (None, Some(y)) => *y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let gap = (int(i) / &na - int(j) / &nb).abs();
        if gap > worst {
            worst = gap;
        }
    }
    worst
}


/// `(c, k)` with `n = c^k` and `k` maximal.
pub fn perfect_power_root(n: u64) -> (u64, u32) {
    let mut best = (n, 1);
    for k in 2..64u32 {
        let c = n.nth_root(k);
        if c < 2 {
            break;
        }
        if c.checked_pow(k) == Some(n) {
            best = (c, k);
        }
    }
    best
}

/// Integers `a, b >= 2` are multiplicatively dependent iff they are powers of one common integer.
pub fn multiplicatively_independent(a: u64, b: u64) -> bool {
    perfect_power_root(a).0 != perfect_power_root(b).0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseReport {
    pub spec: BbpSpec,
    pub theta: BoundedReal,
    /// Discrepancy of the perturbed remainders `y_1*, ..., y_N*`.
    pub discrepancy: DiscrepancyReport,
    /// Census of the first `N` base-`b` digits of `theta`.
    pub census: BlockCensus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JointReport {
    pub agree: bool,
    pub reports: [BaseReport; 2],
    pub note: String,
}

/// Two expansions of one constant in multiplicatively independent bases:
/// checks that both specs enclose the same value, then reports discrepancy and
/// block censuses for each.
pub fn joint_base_report(a: &BbpSpec, b: &BbpSpec, n: usize, precision_bits: u64, block_length: usize) -> Result<JointReport> {
    if !multiplicatively_independent(a.base(), b.base()) {
        return Err(Error::BasesDependent);
    }
    let ta = a.eval_theta(precision_bits)?;
    let tb = b.eval_theta(precision_bits)?;
    if !ta.intersects(&tb) {
        return Err(Error::SpecsDisagree);
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    Ok(JointReport {
        agree: true,
        reports: [report_for(a, ta, n, block_length)?, report_for(b, tb, n, block_length)?],
        note: "empirical statistics; equidistribution is not asserted".into(),
    })
}

fn report_for(spec: &BbpSpec, theta: BoundedReal, n: usize, block_length: usize) -> Result<BaseReport> {
    let orbit = canonical_orbit(spec, n)?;
    let samples = orbit.truncated_range(1, n, SAMPLE_BITS);
    let digits = extract_digits(spec, 0, n, DEFAULT_GUARD_BITS)?;
    let confident = digits
        .flags
        .iter()
        .take_while(|f| **f == crate::radix_dynamics::DigitFlag::Confident)
        .count();
    Ok(BaseReport {
        spec: spec.clone(),
        theta,
        discrepancy: discrepancy_report(&samples)?,
        census: block_census(&digits.digits[..confident], spec.base(), block_length)?,
    })
}

/// Discrepancy of `y_1*, ..., y_n*` and the census of the first `n` digits of `theta`.
pub fn base_report(spec: &BbpSpec, n: usize, precision_bits: u64, block_length: usize) -> Result<BaseReport> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let theta = spec.eval_theta(precision_bits)?;
    report_for(spec, theta, n, block_length)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyntheticReport {
    pub seed: u64,
    pub discrepancy: DiscrepancyReport,
    pub census: BlockCensus,
}

/// Reference statistics of `n` pseudo-random points (64-bit dyadics) and `n`
/// pseudo-random base-`base` digits from a seeded ChaCha stream.
pub fn synthetic_report(seed: u64, n: usize, base: u64, block_length: usize) -> Result<SyntheticReport> {
    use rand::{Rng, SeedableRng};
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Rational> = (0..n)
        .map(|_| Rational::new(BigInt::from(rng.gen::<u64>()), BigInt::one() << 64usize))
        .collect();
    let digits: Vec<u64> = (0..n).map(|_| rng.gen_range(0..base)).collect();
    Ok(SyntheticReport {
        seed,
        discrepancy: discrepancy_report(&samples)?,
        census: block_census(&digits, base, block_length)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational;
    use proptest::prelude::*;

    #[test]
    fn discrepancy_extremes() {
        let grid: Vec<Rational> = (1..=10).map(|i| rational(2 * i - 1, 20)).collect();
        assert_eq!(star_discrepancy(&grid).unwrap(), rational(1, 20));
        assert_eq!(star_discrepancy(&vec![Rational::zero(); 4]).unwrap(), Rational::one());
        assert_eq!(star_discrepancy(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn census_of_one_third() {
        let digits: Vec<u64> = (0..20).map(|i| (i % 2) as u64).collect();
        let census = block_census(&digits, 2, 2).unwrap();
        assert_eq!(census.counts.keys().cloned().collect::<Vec<_>>(), vec!["01".to_string(), "10".to_string()]);
        assert!(!census.all_blocks_present);
        assert_eq!(census.counts.values().sum::<u64>(), census.total_windows);
        assert_eq!(census.total_windows, 19);
        assert!(block_census(&digits[..1], 2, 2).is_err());
    }

    #[test]
    fn census_chi_square_by_hand() {
        // blocks 0,0,1 in base 2: counts {0: 2, 1: 1}, expected 3/2 each
        let census = block_census(&[0, 0, 1], 2, 1).unwrap();
        assert_eq!(*census.chi_square.midpoint(), rational(1, 3));
        let big = block_census(&[37, 0], 40, 1).unwrap();
        assert!(big.counts.contains_key("37"));
    }

    #[test]
    fn two_clusters_from_alternation() {
        let samples: Vec<Rational> = (1..200i64)
            .map(|n| if n % 2 == 0 { rational(1, 3) + rational(1, n * n) } else { rational(2, 3) - rational(1, n * n) })
            .collect();
        let clusters = cluster_limit_points(&samples[20..], &rational(1, 64)).unwrap();
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn cluster_wrapping_zero() {
        let samples = vec![rational(1, 100), rational(99, 100), rational(0, 1)];
        let clusters = cluster_limit_points(&samples, &rational(1, 64)).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].center, rational(0, 1));
        assert_eq!(clusters[0].diameter, rational(1, 50));
    }

    #[test]
    fn stability_examples() {
        let constant = vec![rational(1, 7); 64];
        assert!(measure_stability(&constant).unwrap().distances.iter().all(|p| p.distance.is_zero()));
        let alternating: Vec<Rational> = (0..256).map(|i| if i % 2 == 0 { rational(1, 3) } else { rational(2, 3) }).collect();
        assert!(measure_stability(&alternating).unwrap().distances.iter().all(|p| p.distance.is_zero()));
        assert_eq!(measure_stability(&constant[..3]), Err(Error::SampleTooShort { min: 4, got: 3 }));
    }

    #[test]
    fn independence() {
        assert!(!multiplicatively_independent(2, 8));
        assert!(!multiplicatively_independent(4, 8));
        assert!(multiplicatively_independent(2, 9));
        assert!(multiplicatively_independent(6, 12));
        assert_eq!(perfect_power_root(1 << 60), (2, 60));
    }

    proptest! {
        #[test]
        fn discrepancy_bounds(raw in proptest::collection::vec((0i64..1000, 1i64..1000), 1..60)) {
            let samples: Vec<Rational> = raw.iter().map(|&(a, d)| frac(&rational(a, d))).collect();
            let d = star_discrepancy(&samples).unwrap();
            prop_assert!(d >= rational(1, 2 * samples.len() as i64));
            prop_assert!(d <= Rational::one());
        }

        #[test]
        fn clustering_is_permutation_invariant(raw in proptest::collection::vec(0i64..1000, 1..60), seed in 0u64..1000) {
            let samples: Vec<Rational> = raw.iter().map(|&a| rational(a, 1000)).collect();
            let mut shuffled = samples.clone();
            let len = shuffled.len();
            for i in 0..len {
                shuffled.swap(i, (seed as usize * 31 + i * 17) % len);
            }
            let r = rational(1, 64);
            prop_assert_eq!(cluster_limit_points(&samples, &r).unwrap(), cluster_limit_points(&shuffled, &r).unwrap());
        }

        #[test]
        fn census_counts_sum(digits in proptest::collection::vec(0u64..3, 1..200), m in 1usize..4) {
            prop_assume!(digits.len() >= m);
            let census = block_census(&digits, 3, m).unwrap();
            prop_assert_eq!(census.counts.values().sum::<u64>(), census.total_windows);
            prop_assert_eq!(census.total_windows as usize, digits.len() - m + 1);
        }
    }
}
