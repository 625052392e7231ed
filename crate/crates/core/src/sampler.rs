//! Per-column sample sizing, uniform reservoir sampling and histogram SSE.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform, Zipf};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Reservoir size of the fixed-size baseline.
pub const BASELINE_RESERVOIR: u64 = 30_000;
pub const DEFAULT_ROWS_MIN: u64 = 15_000;
pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_LAUNCHES: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("undefined bins: population is empty")]
    UndefinedBins,
    #[error("histogram needs at least one bin")]
    ZeroBins,
    #[error("rows_min must be at least 1")]
    ZeroRowsMin,
    #[error("fixed reservoir size must be at least 1")]
    ZeroReservoir,
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("invalid sampling policy '{0}' (expected literal, calibrated, fixed:N or full)")]
    Policy(String),
}

/// How many rows of a column to sample once it exceeds `rows_min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingPolicy {
    /// `rows_min + sqrt(rows_uq / rows_all * rows_min + rows_all / rows_min)`.
    #[default]
    LiteralEq1,
    /// `rows_min + rows_all / sqrt(rows_min)`; tracks the published sample
    /// counts for large columns.
    CalibratedTable1,
    /// Classic fixed-size reservoir.
    FixedReservoir(u64),
    /// Every row.
    Full,
}

impl fmt::Display for SamplingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingPolicy::LiteralEq1 => f.write_str("literal"),
            SamplingPolicy::CalibratedTable1 => f.write_str("calibrated"),
            SamplingPolicy::FixedReservoir(n) => write!(f, "fixed:{n}"),
            SamplingPolicy::Full => f.write_str("full"),
        }
    }
}

impl FromStr for SamplingPolicy {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "literal" => Ok(SamplingPolicy::LiteralEq1),
            "calibrated" => Ok(SamplingPolicy::CalibratedTable1),
            "full" => Ok(SamplingPolicy::Full),
            "fixed" => Ok(SamplingPolicy::FixedReservoir(BASELINE_RESERVOIR)),
            _ => match lower.strip_prefix("fixed:").map(str::parse::<u64>) {
                Some(Ok(0)) => Err(SamplerError::ZeroReservoir),
                Some(Ok(n)) => Ok(SamplingPolicy::FixedReservoir(n)),
                _ => Err(SamplerError::Policy(s.to_string())),
            },
        }
    }
}

impl Serialize for SamplingPolicy {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SamplingPolicy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub rows_min: u64,
    pub policy: SamplingPolicy,
    pub seed: u64,
    pub histogram_bins: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            rows_min: DEFAULT_ROWS_MIN,
            policy: SamplingPolicy::default(),
            seed: 0,
            histogram_bins: DEFAULT_BINS,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.rows_min == 0 {
            return Err(SamplerError::ZeroRowsMin);
        }
        if self.policy == SamplingPolicy::FixedReservoir(0) {
            return Err(SamplerError::ZeroReservoir);
        }
        if self.histogram_bins == 0 {
            return Err(SamplerError::ZeroBins);
        }
        Ok(())
    }
}

/// Number of rows to sample from a column with `rows_all` rows of which
/// `rows_uq` are distinct. Columns no larger than `rows_min` are taken
/// whole; fractional sizes truncate; the result never exceeds `rows_all`.
pub fn compute_sample_size(rows_all: u64, rows_uq: u64, config: &SamplerConfig) -> u64 {
    let rows_min = config.rows_min.max(1);
    if rows_all <= rows_min {
        return rows_all;
    }
    let rows_uq = rows_uq.min(rows_all);
    let size = match config.policy {
        SamplingPolicy::Full => rows_all,
        SamplingPolicy::FixedReservoir(n) => n,
        SamplingPolicy::LiteralEq1 => {
            // sqrt(uq/all * min + all/min) = sqrt(p / q)
            let (p, q) = (
                (rows_uq as u128)
                    .checked_mul(rows_min as u128 * rows_min as u128)
                    .and_then(|a| a.checked_add(rows_all as u128 * rows_all as u128)),
                rows_all as u128 * rows_min as u128,
            );
            let approx = (rows_uq as f64 / rows_all as f64 * rows_min as f64 + rows_all as f64 / rows_min as f64).sqrt();
            rows_min.saturating_add(match p {
                Some(p) => floor_sqrt_ratio(p, q, approx),
                None => approx as u64,
            })
        }
        SamplingPolicy::CalibratedTable1 => {
            // all / sqrt(min) = sqrt(all^2 / min)
            let approx = rows_all as f64 / (rows_min as f64).sqrt();
            let p = rows_all as u128 * rows_all as u128;
            rows_min.saturating_add(floor_sqrt_ratio(p, rows_min as u128, approx))
        }
    };
    size.min(rows_all)
}

/// `floor(sqrt(p / q))`, starting from a floating-point estimate and
/// correcting it with exact integer comparisons.
fn floor_sqrt_ratio(p: u128, q: u128, approx: f64) -> u64 {
    let fits = |k: u64| (k as u128).checked_mul(k as u128).and_then(|s| s.checked_mul(q)).is_some_and(|v| v <= p);
    let mut k = approx.max(0.0) as u64;
    while k > 0 && !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k
}

/// Single-pass uniform sampling without replacement (Algorithm R).
#[derive(Debug, Clone)]
pub struct Reservoir<T> {
    capacity: usize,
    seen: u64,
    items: Vec<T>,
    rng: ChaCha8Rng,
}

impl<T> Reservoir<T> {
    pub fn new(capacity: usize, seed: u64) -> Self {
        Reservoir {
            capacity,
            seen: 0,
            items: Vec::with_capacity(capacity.min(1 << 20)),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn push(&mut self, item: T) {
        self.seen += 1;
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else if self.capacity > 0 {
            let j = self.rng.random_range(0..self.seen);
            if j < self.capacity as u64 {
                self.items[j as usize] = item;
            }
        }
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn into_items(self) -> Vec<T> {
        self.items
    }
}

/// A column's sampled values plus its size counters.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SampleSummary {
    pub rows_all: u64,
    /// Distinct non-null values over the whole column.
    pub rows_uq: u64,
    pub rows_sampled: u64,
    /// Distinct non-null values among the sampled rows.
    pub values: BTreeSet<String>,
    /// NULLs over the whole column.
    pub null_count: u64,
}

/// Streaming form of [`draw_sample`], for feeding several columns from one scan.
#[derive(Debug, Clone)]
pub struct ColumnSampler {
    reservoir: Reservoir<Option<String>>,
    distinct: HashSet<String>,
    nulls: u64,
}

impl ColumnSampler {
    pub fn new(target: u64, seed: u64) -> Self {
        ColumnSampler {
            reservoir: Reservoir::new(usize::try_from(target).unwrap_or(usize::MAX), seed),
            distinct: HashSet::new(),
            nulls: 0,
        }
    }

    pub fn push(&mut self, value: Option<&str>) {
        match value {
            Some(v) => {
                if !self.distinct.contains(v) {
                    self.distinct.insert(v.to_string());
                }
            }
            None => self.nulls += 1,
        }
        self.reservoir.push(value.map(str::to_string));
    }

    pub fn finish(self) -> SampleSummary {
        let rows_all = self.reservoir.seen();
        let sampled = self.reservoir.into_items();
        SampleSummary {
            rows_all,
            rows_uq: self.distinct.len() as u64,
            rows_sampled: sampled.len() as u64,
            values: sampled.into_iter().flatten().collect(),
            null_count: self.nulls,
        }
    }
}

/// Draws `min(target, rows)` rows uniformly without replacement in one pass.
/// NULLs (`None`) are counted and may be sampled but never enter `values`.
pub fn draw_sample<I, S>(stream: I, target: u64, seed: u64) -> SampleSummary
where
    I: IntoIterator<Item = Option<S>>,
    S: AsRef<str>,
{
    let mut sampler = ColumnSampler::new(target, seed);
    for v in stream {
        sampler.push(v.as_ref().map(AsRef::as_ref));
    }
    sampler.finish()
}

/// Equal-width histogram over a population's range.
#[derive(Debug, Clone)]
struct Histogram {
    min: f64,
    width: f64,
    bins: usize,
    freq: Vec<f64>,
}

impl Histogram {
    fn of_population(population: &[f64], bins: usize) -> Result<Self, SamplerError> {
        if bins == 0 {
            return Err(SamplerError::ZeroBins);
        }
        let (min, max) = population
            .iter()
            .filter(|v| v.is_finite())
            .fold(None, |acc: Option<(f64, f64)>, &v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
            .ok_or(SamplerError::UndefinedBins)?;
        let mut h = Histogram { min, width: (max - min) / bins as f64, bins, freq: Vec::new() };
        h.freq = h.frequencies(population);
        Ok(h)
    }

    fn bin(&self, v: f64) -> usize {
        if self.width <= 0.0 {
            return 0;
        }
        (((v - self.min) / self.width).floor().max(0.0) as usize).min(self.bins - 1)
    }

    fn frequencies(&self, values: &[f64]) -> Vec<f64> {
        let mut counts = vec![0u64; self.bins];
        let mut n = 0u64;
        for &v in values.iter().filter(|v| v.is_finite()) {
            counts[self.bin(v)] += 1;
            n += 1;
        }
        if n == 0 {
            return vec![0.0; self.bins];
        }
        counts.into_iter().map(|c| c as f64 / n as f64).collect()
    }

    fn sse(&self, sample: &[f64]) -> f64 {
        self.frequencies(sample).iter().zip(&self.freq).map(|(s, p)| (s - p) * (s - p)).sum()
    }
}

/// Sum over bins of the squared difference between the sample's and the
/// population's normalized bin frequencies. Bin edges come from the
/// population's range.
pub fn histogram_sse(sample: &[f64], population: &[f64], bins: usize) -> Result<f64, SamplerError> {
    Ok(Histogram::of_population(population, bins)?.sse(sample))
}

/// Synthetic value distributions for sampling experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ValueDistribution {
    Normal { mean: f64, std_dev: f64 },
    Uniform { low: f64, high: f64 },
    Zipf { n: u64, exponent: f64 },
}

impl FromStr for ValueDistribution {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(ValueDistribution::Normal { mean: 0.0, std_dev: 1.0 }),
            "uniform" => Ok(ValueDistribution::Uniform { low: 0.0, high: 1.0 }),
            "zipf" => Ok(ValueDistribution::Zipf { n: 1000, exponent: 1.1 }),
            other => Err(SamplerError::Distribution(format!("unknown distribution '{other}'"))),
        }
    }
}

impl ValueDistribution {
    pub fn name(&self) -> &'static str {
        match self {
            ValueDistribution::Normal { .. } => "normal",
            ValueDistribution::Uniform { .. } => "uniform",
            ValueDistribution::Zipf { .. } => "zipf",
        }
    }

    pub fn generate<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>, SamplerError> {
        let err = |e: &dyn fmt::Display| SamplerError::Distribution(e.to_string());
        Ok(match *self {
            ValueDistribution::Normal { mean, std_dev } => {
                let d = Normal::new(mean, std_dev).map_err(|e| err(&e))?;
                d.sample_iter(rng).take(n).collect()
            }
            ValueDistribution::Uniform { low, high } => {
                let d = Uniform::new(low, high).map_err(|e| err(&e))?;
                d.sample_iter(rng).take(n).collect()
            }
            ValueDistribution::Zipf { n: domain, exponent } => {
                let d = Zipf::new(domain as f64, exponent).map_err(|e| err(&e))?;
                d.sample_iter(rng).take(n).collect()
            }
        })
    }
}

/// Outcome of the dynamic-vs-baseline fidelity experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SseReport {
    pub distribution: ValueDistribution,
    pub rows_all: u64,
    pub rows_uq: u64,
    pub policy: SamplingPolicy,
    pub rows_min: u64,
    pub bins: usize,
    pub launches: usize,
    pub rows_sampled_dynamic: u64,
    pub rows_sampled_baseline: u64,
    /// Mean over launches.
    pub sse_dynamic: f64,
    /// Mean over launches.
    pub sse_baseline: f64,
    /// `sse_baseline / sse_dynamic`; absent when the dynamic error is zero.
    pub improvement: Option<f64>,
    pub per_launch_dynamic: Vec<f64>,
    pub per_launch_baseline: Vec<f64>,
    pub notes: Vec<String>,
}

impl SseReport {
    /// Report for a column with no rows: nothing to compare.
    pub fn empty(distribution: ValueDistribution, config: &SamplerConfig) -> Self {
        SseReport {
            distribution,
            rows_all: 0,
            rows_uq: 0,
            policy: config.policy,
            rows_min: config.rows_min,
            bins: config.histogram_bins,
            launches: 0,
            rows_sampled_dynamic: 0,
            rows_sampled_baseline: 0,
            sse_dynamic: 0.0,
            sse_baseline: 0.0,
            improvement: None,
            per_launch_dynamic: Vec::new(),
            per_launch_baseline: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// splitmix64 step, for deriving independent per-launch seeds.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed.wrapping_add(salt.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates `rows_all` values from `distribution`, then compares the
/// configured policy against a fixed reservoir of [`BASELINE_RESERVOIR`]
/// rows by histogram SSE, averaged over `launches`.
pub fn run_sse_experiment(
    distribution: ValueDistribution,
    rows_all: u64,
    config: &SamplerConfig,
    launches: usize,
) -> Result<SseReport, SamplerError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let population = distribution.generate(rows_all as usize, &mut rng)?;
    compare_on_population(distribution, &population, config, launches)
}

/// The experiment body for an existing population.
pub fn compare_on_population(
    distribution: ValueDistribution,
    population: &[f64],
    config: &SamplerConfig,
    launches: usize,
) -> Result<SseReport, SamplerError> {
    config.validate()?;
    if population.is_empty() {
        return Ok(SseReport::empty(distribution, config));
    }
    let rows_all = population.len() as u64;
    let rows_uq = {
        let mut bits: Vec<u64> = population.iter().map(|v| v.to_bits()).collect();
        bits.sort_unstable();
        bits.dedup();
        bits.len() as u64
    };
    let baseline_config = SamplerConfig { policy: SamplingPolicy::FixedReservoir(BASELINE_RESERVOIR), ..config.clone() };
    let dynamic_target = compute_sample_size(rows_all, rows_uq, config);
    let baseline_target = compute_sample_size(rows_all, rows_uq, &baseline_config);
    let histogram = Histogram::of_population(population, config.histogram_bins)?;

    let draw = |target: u64, seed: u64| {
        let mut r = Reservoir::new(target as usize, seed);
        population.iter().for_each(|&v| r.push(v));
        r.into_items()
    };
    let mut per_launch_dynamic = Vec::with_capacity(launches);
    let mut per_launch_baseline = Vec::with_capacity(launches);
    for launch in 0..launches as u64 {
        per_launch_dynamic.push(histogram.sse(&draw(dynamic_target, mix_seed(config.seed, 2 * launch))));
        per_launch_baseline.push(histogram.sse(&draw(baseline_target, mix_seed(config.seed, 2 * launch + 1))));
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let sse_dynamic = mean(&per_launch_dynamic);
    let sse_baseline = mean(&per_launch_baseline);
    let mut notes = Vec::new();
    if config.policy == SamplingPolicy::LiteralEq1 && rows_all > config.rows_min {
        notes.push(format!(
            "literal policy: the square-root term adds only {} rows above rows_min; \
             use the calibrated policy (rows_min + rows_all/sqrt(rows_min)) for sample sizes that grow with the column",
            dynamic_target - config.rows_min.min(dynamic_target)
        ));
    }
    Ok(SseReport {
        distribution,
        rows_all,
        rows_uq,
        policy: config.policy,
        rows_min: config.rows_min,
        bins: config.histogram_bins,
        launches,
        rows_sampled_dynamic: dynamic_target,
        rows_sampled_baseline: baseline_target,
        sse_dynamic,
        sse_baseline,
        improvement: (sse_dynamic > 0.0).then(|| sse_baseline / sse_dynamic),
        per_launch_dynamic,
        per_launch_baseline,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(policy: SamplingPolicy) -> SamplerConfig {
        SamplerConfig { policy, ..SamplerConfig::default() }
    }

    /// Exact `floor(sqrt(p/q))` by binary search over integers.
    fn oracle_floor_sqrt(p: u128, q: u128) -> u128 {
        let (mut lo, mut hi) = (0u128, 1u128 << 64);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if mid.checked_mul(mid).and_then(|s| s.checked_mul(q)).is_some_and(|v| v <= p) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    fn oracle_literal(all: u64, uq: u64, min: u64) -> u64 {
        if all <= min {
            return all;
        }
        let (a, u, m) = (all as u128, uq as u128, min as u128);
        let size = m + oracle_floor_sqrt(u * m * m + a * a, a * m);
        size.min(a) as u64
    }

    #[test]
    fn small_columns_are_taken_whole() {
        for policy in [SamplingPolicy::LiteralEq1, SamplingPolicy::CalibratedTable1, SamplingPolicy::Full] {
            assert_eq!(compute_sample_size(10_000, 3, &cfg(policy)), 10_000);
            assert_eq!(compute_sample_size(15_000, 15_000, &cfg(policy)), 15_000);
        }
    }

    #[test]
    fn literal_formula_example() {
        // 15000 + trunc(sqrt(0.5 * 15000 + 100000 / 15000)) = 15000 + trunc(86.64)
        assert_eq!(compute_sample_size(100_000, 50_000, &cfg(SamplingPolicy::LiteralEq1)), 15_086);
        assert_eq!(oracle_literal(100_000, 50_000, 15_000), 15_086);
    }

    #[test]
    fn calibrated_formula_example() {
        let c = cfg(SamplingPolicy::CalibratedTable1);
        // 10^7 / sqrt(15000) = 81649.66
        assert_eq!(compute_sample_size(10_000_000, 10_000_000, &c), 96_649);
        let published: f64 = 96_697.0;
        assert!((96_649.0 - published).abs() / published < 0.0005);
    }

    #[test]
    fn fixed_and_full_policies() {
        assert_eq!(compute_sample_size(1_000_000, 5, &cfg(SamplingPolicy::FixedReservoir(30_000))), 30_000);
        assert_eq!(compute_sample_size(20_000, 5, &cfg(SamplingPolicy::FixedReservoir(30_000))), 20_000);
        assert_eq!(compute_sample_size(1_000_000, 5, &cfg(SamplingPolicy::Full)), 1_000_000);
    }

    #[test]
    fn sample_size_clamps_to_column_size() {
        // sqrt term exceeds the one extra row
        assert_eq!(compute_sample_size(15_001, 15_001, &cfg(SamplingPolicy::LiteralEq1)), 15_001);
    }

    #[test]
    fn sampled_fraction_decreases_with_column_size() {
        for policy in [SamplingPolicy::LiteralEq1, SamplingPolicy::CalibratedTable1] {
            let fractions: Vec<f64> = [100_000u64, 1_000_000, 10_000_000]
                .iter()
                .map(|&n| compute_sample_size(n, n, &cfg(policy)) as f64 / n as f64)
                .collect();
            assert!(fractions.windows(2).all(|w| w[0] > w[1]), "{policy}: {fractions:?}");
        }
    }

    proptest! {
        #[test]
        fn literal_matches_integer_oracle(all in 1u64..2_000_000_000, uq_frac in 0.0f64..=1.0, min in 1u64..100_000) {
            let uq = ((all as f64) * uq_frac) as u64;
            let c = SamplerConfig { rows_min: min, ..cfg(SamplingPolicy::LiteralEq1) };
            prop_assert_eq!(compute_sample_size(all, uq, &c), oracle_literal(all, uq, min));
        }

        #[test]
        fn size_never_exceeds_rows(all in 0u64..10_000_000, uq in 0u64..10_000_000, min in 1u64..50_000, n in 1u64..100_000) {
            let uq = uq.min(all);
            for policy in [SamplingPolicy::LiteralEq1, SamplingPolicy::CalibratedTable1, SamplingPolicy::FixedReservoir(n), SamplingPolicy::Full] {
                let c = SamplerConfig { rows_min: min, ..cfg(policy) };
                let s = compute_sample_size(all, uq, &c);
                prop_assert!(s <= all);
                if all <= min { prop_assert_eq!(s, all); }
            }
        }
    }

    #[test]
    fn target_above_population_takes_everything() {
        let s = draw_sample((0..100).map(|i| Some(i.to_string())), 200, 7);
        assert_eq!(s.rows_sampled, 100);
        assert_eq!(s.values.len(), 100);
        assert_eq!(s.rows_uq, 100);
    }

    #[test]
    fn same_seed_same_sample() {
        let stream = || (0..10_000).map(|i| Some((i % 977).to_string()));
        assert_eq!(draw_sample(stream(), 500, 42), draw_sample(stream(), 500, 42));
        assert_ne!(draw_sample(stream(), 500, 42).values, draw_sample(stream(), 500, 43).values);
    }

    #[test]
    fn nulls_are_counted_not_collected() {
        let stream = vec![Some("a"), None, Some("b"), None, Some("a")];
        let s = draw_sample(stream, 10, 1);
        assert_eq!(s.rows_all, 5);
        assert_eq!(s.null_count, 2);
        assert_eq!(s.rows_uq, 2);
        assert_eq!(s.rows_sampled, 5);
        assert_eq!(s.values.len(), 2);
    }

    #[test]
    fn inclusion_probability_is_uniform() {
        // each of 1000 rows should be kept with probability 500/1000
        let trials = 1000u64;
        let mut hits = vec![0u64; 1000];
        for t in 0..trials {
            let s = draw_sample((1..=1000).map(|i: u32| Some(i.to_string())), 500, mix_seed(99, t));
            assert_eq!(s.rows_sampled, 500);
            for v in &s.values {
                hits[v.parse::<usize>().unwrap() - 1] += 1;
            }
        }
        let p = 0.5;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for (i, &h) in hits.iter().enumerate() {
            let freq = h as f64 / trials as f64;
            assert!((freq - p).abs() <= 5.0 * sigma, "row {} kept {freq}", i + 1);
        }
    }

    #[test]
    fn sse_of_identical_histograms_is_zero() {
        let pop: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        assert_eq!(histogram_sse(&pop, &pop, 50).unwrap(), 0.0);
    }

    #[test]
    fn sse_two_bin_example() {
        // population split evenly over two bins, sample entirely in the first
        let pop = [0.0, 0.1, 0.9, 1.0];
        let sample = [0.0, 0.1];
        let expected = (1.0f64 - 0.5).powi(2) + (0.0f64 - 0.5).powi(2);
        assert!((histogram_sse(&sample, &pop, 2).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sse_errors_on_empty_population() {
        assert_eq!(histogram_sse(&[1.0], &[], 10), Err(SamplerError::UndefinedBins));
        assert_eq!(histogram_sse(&[1.0], &[1.0], 0), Err(SamplerError::ZeroBins));
    }

    #[test]
    fn sse_shrinks_in_expectation_with_larger_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pop = ValueDistribution::Normal { mean: 0.0, std_dev: 1.0 }.generate(50_000, &mut rng).unwrap();
        let h = Histogram::of_population(&pop, 50).unwrap();
        let mean_sse = |target: usize| {
            (0..20u64)
                .map(|t| {
                    let mut r = Reservoir::new(target, mix_seed(target as u64, t));
                    pop.iter().for_each(|&v| r.push(v));
                    h.sse(&r.into_items())
                })
                .sum::<f64>()
                / 20.0
        };
        let errors: Vec<f64> = [100, 1_000, 10_000, 50_000].iter().map(|&t| mean_sse(t)).collect();
        assert!(errors.windows(2).all(|w| w[0] >= w[1]), "{errors:?}");
        assert_eq!(errors[3], 0.0);
    }

    #[test]
    fn full_policy_reproduces_population() {
        let c = SamplerConfig { policy: SamplingPolicy::Full, rows_min: 100, seed: 3, ..Default::default() };
        let r = run_sse_experiment(ValueDistribution::Normal { mean: 0.0, std_dev: 1.0 }, 5_000, &c, 3).unwrap();
        assert_eq!(r.sse_dynamic, 0.0);
        assert_eq!(r.per_launch_dynamic.len(), 3);
        assert!(r.improvement.is_none());
    }

    #[test]
    fn column_at_rows_min_is_sampled_fully() {
        let c = SamplerConfig { policy: SamplingPolicy::CalibratedTable1, rows_min: 2_000, seed: 3, ..Default::default() };
        let r = run_sse_experiment(ValueDistribution::Uniform { low: 0.0, high: 1.0 }, 2_000, &c, 2).unwrap();
        assert_eq!(r.rows_sampled_dynamic, 2_000);
        assert_eq!(r.sse_dynamic, 0.0);
    }

    #[test]
    fn experiment_reports_launch_means() {
        let c = SamplerConfig { policy: SamplingPolicy::CalibratedTable1, rows_min: 1_000, seed: 11, ..Default::default() };
        let r = run_sse_experiment("zipf".parse().unwrap(), 50_000, &c, 10).unwrap();
        assert_eq!(r.launches, 10);
        let mean = r.per_launch_baseline.iter().sum::<f64>() / 10.0;
        assert!((mean - r.sse_baseline).abs() < 1e-15);
        assert_eq!(r.rows_sampled_baseline, 30_000);
    }

    #[test]
    fn policy_strings_round_trip() {
        for s in ["literal", "calibrated", "fixed:30000", "full"] {
            assert_eq!(s.parse::<SamplingPolicy>().unwrap().to_string(), s);
        }
        assert!("fixed:0".parse::<SamplingPolicy>().is_err());
        assert!("bogus".parse::<SamplingPolicy>().is_err());
    }
}
