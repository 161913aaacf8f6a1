//! Self-check suites run by `gridlink verify`.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::grid::GridLink;
use crate::linking::{linking_number, linking_number_geometric};
use crate::moments::{
    format_rational, leading_coefficient, moment_bound_check, moment_polynomial, EngineConfig,
    Rational,
};
use crate::oracle::{exact_lk_distribution, OracleOptions};
use crate::sampler::{chunk_rng, estimate_moments, sample_link};
use crate::types::{cardinality, enumerate_types, type_of, SequenceType, TypeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub type LkFn = fn(&GridLink) -> i64;

/// What the suites check against. Swapping `lk_formula` lets tests confirm
/// that a broken sign table is caught.
#[derive(Debug, Clone, Copy)]
pub struct VerifyContext {
    pub lk_formula: LkFn,
    pub seed: u64,
}

impl Default for VerifyContext {
    fn default() -> Self {
        Self {
            lk_formula: linking_number,
            seed: 20_240_601,
        }
    }
}

fn run(name: &str, f: impl FnOnce() -> Result<String, String>) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult {
        name: name.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub const FORMULA_GEOMETRY: &str = "formula_geometry";

fn formula_geometry(ctx: &VerifyContext, links: usize) -> CheckResult {
    run(FORMULA_GEOMETRY, || {
        let mut rng = chunk_rng(ctx.seed, 0);
        for i in 0..links {
            let n = 2 + i % 19;
            let link = sample_link(n, &mut rng).map_err(|e| e.to_string())?;
            let formula = (ctx.lk_formula)(&link);
            let geometric = linking_number_geometric(&link).map_err(|e| e.to_string())?;
            ensure(formula == geometric, || {
                format!(
                    "link {i} (sigma {}, pi {}): formula {formula}, geometric {geometric}",
                    link.sigma(),
                    link.pi()
                )
            })?;
        }
        Ok(format!("{links} random links agree"))
    })
}

fn hopf_link(ctx: &VerifyContext) -> CheckResult {
    run("hopf_link", || {
        let link =
            GridLink::from_slices(&[1, 3, 2, 4], &[2, 4, 1, 3]).map_err(|e| e.to_string())?;
        let lk = (ctx.lk_formula)(&link);
        let mirrored = (ctx.lk_formula)(&link.mirror());
        ensure(lk == 1 && mirrored == -1, || {
            format!("lk = {lk}, mirror lk = {mirrored}")
        })?;
        Ok("lk = 1, mirror lk = -1".into())
    })
}

fn second_moment_limit() -> CheckResult {
    run("a2", || {
        let lead = leading_coefficient(2, &EngineConfig::default()).map_err(|e| e.to_string())?;
        let got = format_rational(&lead.value);
        ensure(got == "1/36", || format!("a2 = {got}"))?;
        Ok(format!("a2 = {got}"))
    })
}

fn type_examples() -> CheckResult {
    run("type_examples", || {
        let cases: [(&[usize], &str); 3] = [
            (&[2, 5, 5, 1], "{({2,3},{4},{1})}"),
            (&[2, 4, 4, 1], "{({2,3});({4},{1})}"),
            (&[4, 2, 1, 4], "{({1,4});({3},{2})}"),
        ];
        for (k, want) in cases {
            let got = type_of(k, 5).map_err(|e| e.to_string())?;
            let want: SequenceType = want.parse().map_err(|e: TypeError| e.to_string())?;
            ensure(got == want, || {
                format!("type_of({k:?}, 5) = {got}, want {want}")
            })?;
        }
        let filtered = enumerate_types(2).with_min_sequence_size(2).len();
        ensure(filtered == 3, || format!("{filtered} filtered u=2 types"))?;
        Ok("3 examples, 3 filtered u=2 types".into())
    })
}

fn odd_polynomials() -> CheckResult {
    run("odd_moments_exact", || {
        let cfg = EngineConfig::default();
        for u in [1, 3] {
            let p =
                crate::moments::moment_polynomial_unfiltered(u, &cfg).map_err(|e| e.to_string())?;
            ensure(p.is_zero(), || format!("E[lk^{u}] = {}", p.pretty()))?;
        }
        Ok("E[lk] and E[lk^3] vanish identically".into())
    })
}

fn partition_identity() -> CheckResult {
    run("partition_identity", || {
        for u in 1..=3usize {
            let census = enumerate_types(u);
            for n in (u + 1)..=8 {
                let total = census
                    .types
                    .iter()
                    .try_fold(BigUint::zero(), |acc, t| cardinality(t, n).map(|c| acc + c));
                let total = total.map_err(|e| e.to_string())?;
                ensure(total == BigUint::from(n).pow(u as u32), || {
                    format!("u={u}, n={n}: sum {total}")
                })?;
            }
        }
        Ok("sum of |S_{n,P}| = n^u for u <= 3, n <= 8".into())
    })
}

fn oracle_engine() -> CheckResult {
    run("oracle_engine_n3", || {
        let dist =
            exact_lk_distribution(3, &OracleOptions::default()).map_err(|e| e.to_string())?;
        let poly = moment_polynomial(2, &EngineConfig::default()).map_err(|e| e.to_string())?;
        let (brute, engine) = (dist.moment(2), poly.eval(3));
        ensure(brute == engine, || {
            format!(
                "brute force {} vs engine {}",
                format_rational(&brute),
                format_rational(&engine)
            )
        })?;
        for u in [1, 3] {
            ensure(dist.moment(u).is_zero(), || format!("E[lk^{u}](3) nonzero"))?;
        }
        Ok(format!("E[lk^2](3) = {}", format_rational(&brute)))
    })
}

fn fourth_moment() -> CheckResult {
    run("moment_u4", || {
        let cfg = EngineConfig::default();
        let poly = moment_polynomial(4, &cfg).map_err(|e| e.to_string())?;
        let bounded = moment_bound_check(2, &cfg).map_err(|e| e.to_string())?;
        ensure(bounded, || "a4 exceeds the growth bound".into())?;
        Ok(format!("E[lk^4] = {}", poly.pretty()))
    })
}

fn within_three_se(
    name: &str,
    n: usize,
    u: u32,
    samples: u64,
    target: Rational,
    seed: u64,
) -> CheckResult {
    run(name, || {
        let stats = estimate_moments(n, u, samples, seed, false).map_err(|e| e.to_string())?;
        let est = stats.estimate(u).expect("u <= u_max");
        let target = crate::moments::rational_to_f64(&target);
        let z = (est.normalized_mean - target) / est.normalized_se;
        ensure(z.abs() <= 3.0, || {
            format!(
                "n={n} u={u}: {} +- {} vs {target}",
                est.normalized_mean, est.normalized_se
            )
        })?;
        Ok(format!(
            "n={n} u={u}: {} +- {} (target {target}, z = {z:.2})",
            est.normalized_mean, est.normalized_se
        ))
    })
}

pub fn run_suite(suite: Suite, ctx: &VerifyContext) -> VerifyReport {
    let mut checks = vec![
        formula_geometry(ctx, 1000),
        hopf_link(ctx),
        second_moment_limit(),
        type_examples(),
        odd_polynomials(),
    ];
    if suite == Suite::Full {
        checks.push(partition_identity());
        checks.push(oracle_engine());
        checks.push(fourth_moment());
        let a2 = Rational::new(1.into(), 36.into());
        checks.push(within_three_se(
            "mc_second_moment",
            50,
            2,
            100_000,
            a2,
            ctx.seed,
        ));
        checks.push(within_three_se(
            "mc_first_moment",
            50,
            1,
            100_000,
            Rational::zero(),
            ctx.seed,
        ));
    }
    VerifyReport {
        suite,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linking::epsilon_table;

    fn flipped_signs(link: &GridLink) -> i64 {
        // Sign table with one case negated: contributions with k == l flip.
        epsilon_table(link)
            .iter()
            .enumerate()
            .flat_map(|(k, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(l, &e)| if k == l { -(e as i64) } else { e as i64 })
            })
            .sum()
    }

    #[test]
    fn quick_suite_passes() {
        let report = run_suite(Suite::Quick, &VerifyContext::default());
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.checks.len(), 5);
    }

    #[test]
    fn tampered_sign_table_fails_formula_geometry() {
        let ctx = VerifyContext {
            lk_formula: flipped_signs,
            ..VerifyContext::default()
        };
        let report = run_suite(Suite::Quick, &ctx);
        assert!(!report.passed);
        assert!(report.failures().any(|c| c.name == FORMULA_GEOMETRY));
    }
}
