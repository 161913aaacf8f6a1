//! Uniform random grid links and Monte Carlo estimates of `E[lk^u]`.
//!
//! Samples are drawn in fixed-size chunks. Chunk `c` uses its own ChaCha8
//! stream (`seed`, stream `c`), so results depend only on
//! `(seed, n, samples)` and never on the number of worker threads.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, GridLink, Permutation};
use crate::linking::linking_number_raw;
use crate::moments::{format_rational, moment_polynomial, EngineConfig, MomentError, Rational};

pub type Seed = u64;

/// Samples per chunk.
pub const CHUNK_SIZE: u64 = 1 << 14;

pub const RNG_FAMILY: &str = "chacha8-stream-per-chunk";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("n must be at least {min}, got {n}")]
    NTooSmall { n: usize, min: usize },
    #[error("sample count must be positive")]
    NoSamples,
    #[error("moment order must be positive")]
    ZeroOrder,
    #[error("bin width must be positive and finite")]
    BadBinWidth,
    #[error("n list must be nonempty, strictly ascending and every entry > 4")]
    BadNList,
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: Seed, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn shuffled<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<u32> {
    let mut v: Vec<u32> = (1..=size as u32).collect();
    v.shuffle(rng);
    v
}

/// Uniform permutation of `1..=size` (Fisher-Yates).
pub fn random_permutation<R: Rng + ?Sized>(
    size: usize,
    rng: &mut R,
) -> Result<Permutation, SamplerError> {
    if !size.is_multiple_of(2) || size < 4 {
        return Err(GridError::OddLength { len: size }.into());
    }
    Ok(Permutation::from_trusted(shuffled(size, rng)))
}

/// Grid link from two independent uniform permutations of `1..=2n`.
pub fn sample_link<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GridLink, SamplerError> {
    if n < 2 {
        return Err(SamplerError::NTooSmall { n, min: 2 });
    }
    let sigma = random_permutation(2 * n, rng)?;
    let pi = random_permutation(2 * n, rng)?;
    Ok(GridLink::new(sigma, pi)?)
}

/// Run identification emitted with every randomized output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: Seed,
    pub rng_family: String,
    pub chunk_size: u64,
    pub version: String,
}

impl RunMetadata {
    pub fn new(seed: Seed) -> Self {
        Self {
            seed,
            rng_family: RNG_FAMILY.into(),
            chunk_size: CHUNK_SIZE,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("metadata serializes")
    }
}

/// Exact tally of sampled `lk` values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LkCounts {
    pub n: usize,
    /// Diagrams drawn.
    pub draws: u64,
    /// Whether each draw also contributed its mirror image.
    pub antithetic: bool,
    pub counts: BTreeMap<i64, u64>,
}

impl LkCounts {
    /// Number of recorded values (`2 * draws` in antithetic mode).
    pub fn count(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `sum lk^j`.
    pub fn power_sum(&self, j: u32) -> BigInt {
        self.counts
            .iter()
            .map(|(&v, &c)| BigInt::from(v).pow(j) * BigInt::from(c))
            .sum()
    }

    /// Empirical `j`-th raw moment of `lk`, exactly.
    pub fn raw_moment(&self, j: u32) -> Rational {
        Rational::new(self.power_sum(j), BigInt::from(self.count()))
    }

    fn merge(&mut self, other: &BTreeMap<i64, u64>) {
        for (&v, &c) in other {
            *self.counts.entry(v).or_insert(0) += c;
        }
    }

    /// Sample skewness of `lk` and its large-sample standard error `sqrt(6/N)`.
    pub fn skewness(&self) -> (f64, f64) {
        let m1 = self.raw_moment(1);
        let m2 = self.raw_moment(2);
        let m3 = self.raw_moment(3);
        let var = &m2 - &m1 * &m1;
        let third = &m3 - Rational::from_integer(3.into()) * &m1 * &m2
            + Rational::from_integer(2.into()) * &m1 * &m1 * &m1;
        let var = var.to_f64().unwrap_or(0.0);
        let skew = if var > 0.0 {
            third.to_f64().unwrap_or(0.0) / var.powf(1.5)
        } else {
            0.0
        };
        (skew, (6.0 / self.draws as f64).sqrt())
    }
}

/// Draws `samples` links of order `n` and tallies their linking numbers.
pub fn sample_lk_counts(
    n: usize,
    samples: u64,
    seed: Seed,
    antithetic: bool,
) -> Result<LkCounts, SamplerError> {
    if n < 2 {
        return Err(SamplerError::NTooSmall { n, min: 2 });
    }
    if samples == 0 {
        return Err(SamplerError::NoSamples);
    }
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let per_chunk: Vec<BTreeMap<i64, u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK_SIZE.min(samples - c * CHUNK_SIZE);
            let mut hist = BTreeMap::new();
            for _ in 0..len {
                let sigma = shuffled(2 * n, &mut rng);
                let pi = shuffled(2 * n, &mut rng);
                let lk = linking_number_raw(&sigma, &pi);
                *hist.entry(lk).or_insert(0) += 1;
                if antithetic {
                    // The mirror image has linking number -lk.
                    *hist.entry(-lk).or_insert(0) += 1;
                }
            }
            hist
        })
        .collect();
    let mut out = LkCounts {
        n,
        draws: samples,
        antithetic,
        counts: BTreeMap::new(),
    };
    for hist in &per_chunk {
        out.merge(hist);
    }
    Ok(out)
}

/// Estimate of one moment, raw and normalized by `n^u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub u: u32,
    pub mean: f64,
    pub se: f64,
    pub normalized_mean: f64,
    pub normalized_se: f64,
}

/// Power sums and derived estimates for `u = 1..=u_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub u_max: u32,
    pub draws: u64,
    pub count: u64,
    pub antithetic: bool,
    /// `sum lk^j` for `j = 1..=2 u_max`, as decimal strings.
    pub power_sums: Vec<String>,
    pub estimates: Vec<MomentEstimate>,
}

impl SampleStats {
    pub fn from_counts(counts: &LkCounts, u_max: u32) -> Self {
        let estimates = (1..=u_max).map(|u| estimate(counts, u)).collect();
        Self {
            n: counts.n,
            u_max,
            draws: counts.draws,
            count: counts.count(),
            antithetic: counts.antithetic,
            power_sums: (1..=2 * u_max)
                .map(|j| counts.power_sum(j).to_string())
                .collect(),
            estimates,
        }
    }

    pub fn estimate(&self, u: u32) -> Option<&MomentEstimate> {
        self.estimates.get((u as usize).checked_sub(1)?)
    }
}

/// `SE = sqrt((m_{2u} - m_u^2) / N)`. In antithetic mode the two members of
/// a pair are dependent, so `N` is the number of draws, and odd moments are
/// exactly zero with zero error.
fn estimate(counts: &LkCounts, u: u32) -> MomentEstimate {
    let mu = counts.raw_moment(u);
    let m2u = counts.raw_moment(2 * u);
    let var = &m2u - &mu * &mu;
    let se = if counts.antithetic && u % 2 == 1 {
        0.0
    } else {
        (var.to_f64().unwrap_or(f64::NAN).max(0.0) / counts.draws as f64).sqrt()
    };
    let scale = BigInt::from(counts.n).pow(u);
    let normalized = &mu / Rational::from_integer(scale.clone());
    MomentEstimate {
        u,
        mean: mu.to_f64().unwrap_or(f64::NAN),
        se,
        normalized_mean: normalized.to_f64().unwrap_or(f64::NAN),
        normalized_se: se / scale.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn estimate_moments(
    n: usize,
    u_max: u32,
    samples: u64,
    seed: Seed,
    antithetic: bool,
) -> Result<SampleStats, SamplerError> {
    if u_max == 0 {
        return Err(SamplerError::ZeroOrder);
    }
    let counts = sample_lk_counts(n, samples, seed, antithetic)?;
    Ok(SampleStats::from_counts(&counts, u_max))
}

/// Histogram of `lk/n`. Bin `j` is centered at `j * bin_width` and covers
/// `[(j - 1/2) w, (j + 1/2) w)`; bins run symmetrically from `-J` to `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub n: usize,
    pub bin_width: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn from_counts(counts: &LkCounts, bin_width: f64) -> Result<Self, SamplerError> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(SamplerError::BadBinWidth);
        }
        let n = counts.n as f64;
        // Rounding half away from zero keeps the binning symmetric.
        let bin = |v: i64| (v as f64 / n / bin_width).round() as i64;
        let half = counts
            .counts
            .keys()
            .map(|&v| bin(v).abs())
            .max()
            .unwrap_or(0);
        let mut bins = vec![0u64; (2 * half + 1) as usize];
        for (&v, &c) in &counts.counts {
            bins[(bin(v) + half) as usize] += c;
        }
        let edges = (-half..=half + 1)
            .map(|j| (j as f64 - 0.5) * bin_width)
            .collect();
        Ok(Self {
            n: counts.n,
            bin_width,
            edges,
            counts: bins,
            total: counts.count(),
        })
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| (w[0] + w[1]) / 2.0)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// Second moment of the binned distribution, using bin centers.
    pub fn second_moment(&self) -> f64 {
        self.centers()
            .zip(self.frequencies())
            .map(|(x, p)| x * x * p)
            .sum()
    }

    /// `bin_lo,bin_hi,count` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (w, c) in self.edges.windows(2).zip(&self.counts) {
            out.push_str(&format!("{},{},{}\n", w[0], w[1], c));
        }
        out
    }
}

/// Histogram of `lk/n`; `bin_width` defaults to `1/n`.
pub fn histogram_normalized_lk(
    n: usize,
    samples: u64,
    bin_width: Option<f64>,
    seed: Seed,
) -> Result<(Histogram, LkCounts), SamplerError> {
    let counts = sample_lk_counts(n, samples, seed, false)?;
    let w = bin_width.unwrap_or(1.0 / n as f64);
    Ok((Histogram::from_counts(&counts, w)?, counts))
}

/// Kolmogorov distance between the empirical laws of `lk_a/n_a` and `lk_b/n_b`.
pub fn ks_distance(a: &LkCounts, b: &LkCounts) -> f64 {
    let point = |v: i64, n: usize| Rational::new(BigInt::from(v), BigInt::from(n));
    let mut jumps: BTreeMap<Rational, (f64, f64)> = BTreeMap::new();
    let (ta, tb) = (a.count() as f64, b.count() as f64);
    for (&v, &c) in &a.counts {
        jumps.entry(point(v, a.n)).or_default().0 += c as f64 / ta;
    }
    for (&v, &c) in &b.counts {
        jumps.entry(point(v, b.n)).or_default().1 += c as f64 / tb;
    }
    let (mut fa, mut fb, mut best) = (0.0f64, 0.0f64, 0.0f64);
    for (pa, pb) in jumps.values() {
        fa += pa;
        fb += pb;
        best = best.max((fa - fb).abs());
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub samples: u64,
    /// `(mean, se)` of `E[(lk/n)^u]` for `u = 1..=4`.
    pub moments: Vec<(f64, f64)>,
    /// Distance to the previous row; absent on the first row.
    pub ks_prev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub metadata: RunMetadata,
    /// Exact limits of `E[(lk/n)^2]` and `E[(lk/n)^4]`.
    pub limit_2: String,
    pub limit_4: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,samples,m1,se1,m2,se2,m3,se3,m4,se4,ks_prev\n");
        for row in &self.rows {
            out.push_str(&format!("{},{}", row.n, row.samples));
            for (m, se) in &row.moments {
                out.push_str(&format!(",{m},{se}"));
            }
            match row.ks_prev {
                Some(ks) => out.push_str(&format!(",{ks}\n")),
                None => out.push_str(",\n"),
            }
        }
        out
    }

    /// Metadata line carrying the engine limits alongside the run identity.
    pub fn metadata_line(&self) -> String {
        let mut meta = serde_json::to_value(&self.metadata).expect("metadata serializes");
        meta["limit_2"] = self.limit_2.clone().into();
        meta["limit_4"] = self.limit_4.clone().into();
        meta.to_string()
    }
}

/// Moments `u = 1..=4` of `lk/n` along `n_list`, with Kolmogorov distances
/// between consecutive rows. Every row uses the same seed.
pub fn convergence_report(
    n_list: &[usize],
    samples: u64,
    seed: Seed,
) -> Result<ConvergenceReport, SamplerError> {
    if n_list.is_empty()
        || n_list.iter().any(|&n| n <= 4)
        || n_list.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(SamplerError::BadNList);
    }
    let cfg = EngineConfig::default();
    let limit_2 = moment_polynomial(2, &cfg)?.leading();
    let limit_4 = moment_polynomial(4, &cfg)?.leading();
    let mut rows = Vec::with_capacity(n_list.len());
    let mut prev: Option<LkCounts> = None;
    for &n in n_list {
        let counts = sample_lk_counts(n, samples, seed, false)?;
        let stats = SampleStats::from_counts(&counts, 4);
        rows.push(ConvergenceRow {
            n,
            samples,
            moments: stats
                .estimates
                .iter()
                .map(|e| (e.normalized_mean, e.normalized_se))
                .collect(),
            ks_prev: prev.as_ref().map(|p| ks_distance(p, &counts)),
        });
        prev = Some(counts);
    }
    Ok(ConvergenceReport {
        metadata: RunMetadata::new(seed),
        limit_2: format_rational(&limit_2),
        limit_4: format_rational(&limit_4),
        rows,
    })
}

/// Empirical frequency of each value in `counts`, for comparison with an
/// exact distribution.
pub fn empirical_frequencies(counts: &LkCounts) -> BTreeMap<i64, f64> {
    let total = counts.count() as f64;
    counts
        .counts
        .iter()
        .map(|(&v, &c)| (v, c as f64 / total))
        .collect()
}

/// `true` when every recorded odd power sum is exactly zero.
pub fn odd_sums_vanish(counts: &LkCounts, u_max: u32) -> bool {
    (1..=u_max)
        .step_by(2)
        .all(|j| counts.power_sum(j).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::linking_number;

    #[test]
    fn permutation_is_deterministic() {
        let a = random_permutation(10, &mut chunk_rng(42, 0)).unwrap();
        let b = random_permutation(10, &mut chunk_rng(42, 0)).unwrap();
        assert_eq!(a, b);
        let c = random_permutation(10, &mut chunk_rng(42, 1)).unwrap();
        assert_ne!(a, c);
        assert!(matches!(
            random_permutation(3, &mut chunk_rng(0, 0)),
            Err(SamplerError::Grid(GridError::OddLength { len: 3 }))
        ));
    }

    #[test]
    fn permutations_are_uniform_at_size_4() {
        let draws = 100_000u64;
        let mut rng = chunk_rng(2024, 0);
        let mut freq: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for _ in 0..draws {
            let p = random_permutation(4, &mut rng).unwrap();
            *freq.entry(p.as_slice().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(freq.len(), 24);
        let p = 1.0 / 24.0;
        let expect = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        let mut chi2 = 0.0;
        for &c in freq.values() {
            assert!((c as f64 - expect).abs() <= 5.0 * sd, "count {c}");
            chi2 += (c as f64 - expect).powi(2) / expect;
        }
        // 23 degrees of freedom; 0.999 quantile is about 49.7.
        assert!(chi2 < 49.7, "chi2 = {chi2}");
    }

    #[test]
    fn sample_link_is_deterministic() {
        let a = sample_link(2, &mut chunk_rng(5, 0)).unwrap();
        let b = sample_link(2, &mut chunk_rng(5, 0)).unwrap();
        assert_eq!(a, b);
        assert!(sample_link(1, &mut chunk_rng(5, 0)).is_err());
    }

    #[test]
    fn raw_sampler_matches_public_linking_number() {
        // The chunk loop inlines sample_link; both must see the same stream.
        let mut rng = chunk_rng(9, 0);
        let mut expected = BTreeMap::new();
        for _ in 0..50 {
            let link = sample_link(4, &mut rng).unwrap();
            *expected.entry(linking_number(&link)).or_insert(0u64) += 1;
        }
        let counts = sample_lk_counts(4, 50, 9, false).unwrap();
        assert_eq!(counts.counts, expected);
    }

    #[test]
    fn se_matches_two_pass() {
        let n = 5;
        let samples = 3000;
        let mut values = Vec::new();
        let mut rng = chunk_rng(11, 0);
        for _ in 0..samples {
            values.push(linking_number(&sample_link(n, &mut rng).unwrap()) as f64);
        }
        let stats = estimate_moments(n, 4, samples, 11, false).unwrap();
        for u in 1..=4u32 {
            let xs: Vec<f64> = values.iter().map(|v| v.powi(u as i32)).collect();
            let mean = xs.iter().sum::<f64>() / samples as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / samples as f64;
            let se = (var / samples as f64).sqrt();
            let est = stats.estimate(u).unwrap();
            assert!((est.mean - mean).abs() <= 1e-9 * mean.abs().max(1.0));
            assert!((est.se - se).abs() <= 1e-9 * se.max(1.0), "u={u}");
        }
    }

    #[test]
    fn antithetic_zeroes_odd_moments() {
        let counts = sample_lk_counts(6, 2000, 3, true).unwrap();
        assert_eq!(counts.count(), 4000);
        assert!(odd_sums_vanish(&counts, 7));
        let stats = SampleStats::from_counts(&counts, 4);
        assert_eq!(stats.estimate(1).unwrap().mean, 0.0);
        assert_eq!(stats.estimate(3).unwrap().se, 0.0);
        assert!(stats.estimate(2).unwrap().se > 0.0);
    }

    #[test]
    fn chunking_is_stable_across_pool_sizes() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_lk_counts(3, 3 * CHUNK_SIZE + 17, 77, false).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn histogram_shape() {
        let (h, counts) = histogram_normalized_lk(4, 5000, None, 1).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), h.total);
        assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(h.edges.len(), h.counts.len() + 1);
        assert!((h.edges[0] + h.edges[h.edges.len() - 1]).abs() < 1e-12);
        let m2 = counts.raw_moment(2).to_f64().unwrap() / 16.0;
        assert!((h.second_moment() - m2).abs() < 1e-12);
        assert!(Histogram::from_counts(&counts, 0.0).is_err());
        assert!(h.to_csv().starts_with("bin_lo,bin_hi,count\n"));
    }

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let a = sample_lk_counts(5, 1000, 4, false).unwrap();
        assert_eq!(ks_distance(&a, &a), 0.0);
        let b = sample_lk_counts(6, 1000, 4, false).unwrap();
        let d = ks_distance(&a, &b);
        assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn convergence_report_layout() {
        assert!(convergence_report(&[4, 6], 10, 0).is_err());
        assert!(convergence_report(&[8, 6], 10, 0).is_err());
        let r = convergence_report(&[5, 6], 200, 8).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,samples,m1,se1,m2,se2,m3,se3,m4,se4,ks_prev");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(','));
        assert_eq!(lines[2].split(',').count(), 11);
        assert_eq!(r.limit_2, "1/36");
        let meta: serde_json::Value = serde_json::from_str(&r.metadata_line()).unwrap();
        assert_eq!(meta["seed"], 8);
        assert_eq!(meta["rng_family"], RNG_FAMILY);
    }
}
