//! Ground truth by exhaustive enumeration of `(sigma, pi)` in `S_{2n}^2`.
//!
//! Only feasible for `n <= 3` (`6!^2 = 518400` diagrams); `n = 4`
//! (`8!^2 ~ 1.6e9`) is available behind an explicit opt-in.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linking::{a_state, b_state, epsilon_raw, linking_number_raw};
use crate::moments::{format_rational, Rational, SignVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} is too large for exhaustive enumeration{hint}")]
    TooLarge { n: usize, hint: &'static str },
    #[error("index sequences must have equal length with entries in 1..={n}")]
    BadInput { n: usize },
    #[error("direct count {direct} differs from factorized count {factorized}")]
    FactorizationMismatch {
        direct: BigUint,
        factorized: BigUint,
    },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleOptions {
    /// Permit `n = 4`.
    pub allow_long_run: bool,
    /// Report progress on stderr.
    pub progress: bool,
}

fn check_size(n: usize, opts: &OracleOptions) -> Result<(), OracleError> {
    match n {
        2 | 3 => Ok(()),
        4 if opts.allow_long_run => Ok(()),
        4 => Err(OracleError::TooLarge {
            n,
            hint: " without the long-run flag",
        }),
        _ => Err(OracleError::TooLarge { n, hint: "" }),
    }
}

/// All permutations of `1..=len` in lexicographic order.
pub fn all_permutations(len: usize) -> Vec<Vec<u32>> {
    (1..=len as u32).permutations(len).collect()
}

/// Exact distribution of `lk` over all `(2n)!^2` diagrams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LkDistribution {
    pub n: usize,
    pub counts: BTreeMap<i64, u64>,
    pub total: u64,
}

impl LkDistribution {
    pub fn probability(&self, v: i64) -> Rational {
        let c = self.counts.get(&v).copied().unwrap_or(0);
        Rational::new(BigInt::from(c), BigInt::from(self.total))
    }

    pub fn probabilities(&self) -> BTreeMap<i64, Rational> {
        self.counts
            .keys()
            .map(|&v| (v, self.probability(v)))
            .collect()
    }

    /// `E[lk^u]`.
    pub fn moment(&self, u: u32) -> Rational {
        let num: BigInt = self
            .counts
            .iter()
            .map(|(&v, &c)| BigInt::from(v).pow(u) * BigInt::from(c))
            .sum();
        Rational::new(num, BigInt::from(self.total))
    }

    /// `{"n": .., "total": .., "probabilities": {"-1": "num/den", ..}}`
    pub fn to_json(&self) -> serde_json::Value {
        let probs: serde_json::Map<String, serde_json::Value> = self
            .probabilities()
            .into_iter()
            .map(|(v, p)| (v.to_string(), format_rational(&p).into()))
            .collect();
        serde_json::json!({
            "n": self.n,
            "total": self.total,
            "probabilities": probs,
        })
    }
}

pub fn exact_lk_distribution(
    n: usize,
    opts: &OracleOptions,
) -> Result<LkDistribution, OracleError> {
    check_size(n, opts)?;
    let perms = all_permutations(2 * n);
    let outer = perms.len();
    let per_sigma: Vec<BTreeMap<i64, u64>> = perms
        .par_iter()
        .enumerate()
        .map(|(i, sigma)| {
            let mut hist = BTreeMap::new();
            for pi in &perms {
                *hist.entry(linking_number_raw(sigma, pi)).or_insert(0) += 1;
            }
            if opts.progress && i % 1000 == 0 {
                eprintln!("oracle n={n}: sigma {i}/{outer}");
            }
            hist
        })
        .collect();
    let mut counts = BTreeMap::new();
    for hist in per_sigma {
        for (v, c) in hist {
            *counts.entry(v).or_insert(0) += c;
        }
    }
    Ok(LkDistribution {
        n,
        counts,
        total: (outer * outer) as u64,
    })
}

/// `E[lk^u]` from the definition: the mean of `lk^u` over every diagram.
pub fn exact_moment_bruteforce(
    n: usize,
    u: u32,
    opts: &OracleOptions,
) -> Result<Rational, OracleError> {
    Ok(exact_lk_distribution(n, opts)?.moment(u))
}

/// Both sides of the sigma/pi factorization for explicit `k`, `l`, `eps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCount {
    /// `#{(sigma, pi) : (eps_{k_i,l_i}) = eps}` by direct enumeration.
    pub direct: BigUint,
    /// `sum_eta #{sigma : A^eta} #{pi : B^(eta eps)}`.
    pub factorized: BigUint,
}

/// Counts configurations realizing `eps` at `(k_i, l_i)`, for `n <= 3`,
/// `u <= 2`. Fails if the two sides disagree.
pub fn count_condition_configs(
    n: usize,
    k: &[usize],
    l: &[usize],
    eps: &SignVector,
) -> Result<ConditionCount, OracleError> {
    check_size(n, &OracleOptions::default())?;
    let u = k.len();
    if u == 0
        || u > 2
        || l.len() != u
        || eps.len() != u
        || k.iter().chain(l).any(|&v| v == 0 || v > n)
    {
        return Err(OracleError::BadInput { n });
    }
    let k0: Vec<usize> = k.iter().map(|v| v - 1).collect();
    let l0: Vec<usize> = l.iter().map(|v| v - 1).collect();
    let e = eps.entries();
    let perms = all_permutations(2 * n);

    let direct: u64 = perms
        .par_iter()
        .map(|sigma| {
            perms
                .iter()
                .filter(|pi| (0..u).all(|i| epsilon_raw(sigma, pi, n, k0[i], l0[i]) == e[i]))
                .count() as u64
        })
        .sum();

    let mut factorized = BigUint::zero();
    for eta in SignVector::all(u) {
        let h = eta.entries();
        let sigmas = perms
            .iter()
            .filter(|s| (0..u).all(|i| a_state(s, n, k0[i], l0[i]) == h[i]))
            .count();
        let pis = perms
            .iter()
            .filter(|p| (0..u).all(|i| b_state(p, n, k0[i], l0[i]) == h[i] * e[i]))
            .count();
        factorized += BigUint::from(sigmas) * BigUint::from(pis);
    }
    let direct = BigUint::from(direct);
    if direct != factorized {
        return Err(OracleError::FactorizationMismatch { direct, factorized });
    }
    Ok(ConditionCount { direct, factorized })
}
