use gridlink::oracle::{exact_lk_distribution, exact_moment_bruteforce, OracleOptions};
use gridlink::sampler::{
    empirical_frequencies, estimate_moments, histogram_normalized_lk, sample_lk_counts,
};
use num_traits::ToPrimitive;

#[test]
fn n2_frequencies_match_exact_distribution() {
    let samples = 100_000u64;
    let exact = exact_lk_distribution(2, &OracleOptions::default()).unwrap();
    let counts = sample_lk_counts(2, samples, 101, false).unwrap();
    let freq = empirical_frequencies(&counts);
    for (v, p) in exact.probabilities() {
        let p = p.to_f64().unwrap();
        let f = freq.get(&v).copied().unwrap_or(0.0);
        let sd = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((f - p).abs() <= 5.0 * sd, "lk={v}: {f} vs {p}");
    }
    assert!(freq.keys().all(|v| exact.counts.contains_key(v)));
}

#[test]
fn n3_moments_match_oracle() {
    let stats = estimate_moments(3, 2, 100_000, 102, false).unwrap();
    let m1 = stats.estimate(1).unwrap();
    assert!(m1.mean.abs() <= 3.0 * m1.se, "{m1:?}");
    let exact = exact_moment_bruteforce(3, 2, &OracleOptions::default())
        .unwrap()
        .to_f64()
        .unwrap();
    let m2 = stats.estimate(2).unwrap();
    assert!((m2.mean - exact).abs() <= 3.0 * m2.se, "{m2:?} vs {exact}");
}

#[test]
fn histogram_is_symmetric_and_consistent() {
    let n = 10;
    let (hist, counts) = histogram_normalized_lk(n, 100_000, None, 103).unwrap();
    let (skew, se) = counts.skewness();
    assert!(skew.abs() <= 3.0 * se, "skewness {skew} se {se}");
    let stats = estimate_moments(n, 2, 100_000, 103, false).unwrap();
    let m2 = stats.estimate(2).unwrap().normalized_mean;
    assert!((hist.second_moment() - m2).abs() < 1e-9);
}

#[test]
fn n2_histogram_converges_to_exact_distribution() {
    let exact = exact_lk_distribution(2, &OracleOptions::default()).unwrap();
    let (hist, _) = histogram_normalized_lk(2, 100_000, None, 104).unwrap();
    for (center, f) in hist.centers().zip(hist.frequencies()) {
        let v = (center * 2.0).round() as i64;
        let p = exact.probability(v).to_f64().unwrap();
        let sd = (p * (1.0 - p) / 100_000.0).sqrt().max(1e-12);
        assert!((f - p).abs() <= 5.0 * sd, "lk={v}: {f} vs {p}");
    }
}
