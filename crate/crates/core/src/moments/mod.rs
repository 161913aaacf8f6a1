//! Exact moments of the linking number.
//!
//! For a pair of index-sequence types `(P, Q)` of order `u`, the crossing
//! conditions of `u` summands of `lk^u` involve a fixed set of abstract
//! x-coordinates (chains `x_k, x_{k+1}, ...` from `P`, one `x'_l` per block of
//! `Q`) and y-coordinates (one `y_{k+1}` per block of `P`, chains
//! `y'_l, y'_{l+1}, ...` from `Q`). Counting the linear orders of those
//! symbols that realize a sign pattern gives `N_{P,Q,eps}`, and
//!
//! ```text
//! E[lk^u](n) = sum_{P,Q} |S_{n,P}| |S_{n,Q}| sum_eps (prod eps) N_{P,Q,eps} / (#X! #Y!)
//! ```
//!
//! where only types whose sequences all hold at least two indices contribute.

mod order;
mod poly;

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{cardinality_coefficients, enumerate_types, SequenceType};

pub use order::{OrderingMethod, SymbolOrder, DP_HARD_LIMIT, EXHAUSTIVE_LIMIT};
pub use poly::{
    factorial, format_rational, parse_rational, rational_to_f64, MomentPolynomial, MomentReport,
    PairEntry, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MomentError {
    #[error("types have different orders ({p} vs {q})")]
    OrderMismatch { p: usize, q: usize },
    #[error("{count} symbols exceed the limit of {limit}")]
    TooManySymbols { count: usize, limit: usize },
    #[error("odd moment u = {u} came out nonzero")]
    OddMomentNonzero { u: usize },
    #[error("the leading coefficient is only defined for even u (got {u})")]
    OddOrder { u: usize },
    #[error("u must be at least 1")]
    ZeroOrder,
    #[error("sign vector entries must be +1 or -1")]
    InvalidSign,
    #[error("sign vector has length {got}, expected {expected}")]
    SignLength { got: usize, expected: usize },
    #[error("downset count {dp} disagrees with permutation scan {scan}")]
    CountMismatch { dp: u128, scan: u128 },
    #[error("filtered and unfiltered sums disagree for u = {u}")]
    FilterMismatch { u: usize },
    #[error("index sequences must have equal positive length with entries in 1..={n}")]
    BadSequence { n: usize },
}

/// A vector over `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self, MomentError> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(MomentError::InvalidSign);
        }
        Ok(Self(entries))
    }

    pub fn ones(u: usize) -> Self {
        Self(vec![1; u])
    }

    /// Bit `i` of `mask` set means entry `i` is -1.
    pub fn from_mask(mask: usize, u: usize) -> Self {
        Self(
            (0..u)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn mask(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e < 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// All `2^u` vectors in mask order.
    pub fn all(u: usize) -> impl Iterator<Item = SignVector> {
        (0..1usize << u).map(move |m| SignVector::from_mask(m, u))
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> i8 {
        self.0.iter().product()
    }

    /// Entrywise product.
    pub fn times(&self, other: &SignVector) -> SignVector {
        SignVector(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|e| -e).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Largest symbol set the engine will count orders on.
    pub symbol_limit: usize,
    pub method: OrderingMethod,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            symbol_limit: 14,
            method: OrderingMethod::DownsetDp,
        }
    }
}

/// Symbols of one axis plus, per index `i`, the triple `(lo, mid, hi)` such
/// that sign `+1` means `lo < mid < hi` and `-1` means `hi < mid < lo`.
#[derive(Debug, Clone)]
struct AxisLayout {
    symbols: Vec<String>,
    triples: Vec<(usize, usize, usize)>,
}

impl AxisLayout {
    fn system(&self, delta: usize) -> SymbolOrder {
        let mut order = SymbolOrder::new(self.symbols.clone());
        for (i, &(lo, mid, hi)) in self.triples.iter().enumerate() {
            if delta >> i & 1 == 0 {
                order.chain3(lo, mid, hi);
            } else {
                order.chain3(hi, mid, lo);
            }
        }
        order
    }

    fn counts(&self, cfg: &EngineConfig) -> Result<Vec<u128>, MomentError> {
        let u = self.triples.len();
        (0..1usize << u)
            .map(|d| self.system(d).count(cfg.method))
            .collect()
    }
}

fn offset_name(base: &str, shift: usize) -> String {
    if shift == 0 {
        base.to_string()
    } else {
        format!("{base}+{shift}")
    }
}

/// First index of the first block names a sequence.
fn anchor(seq: &crate::types::BlockSequence) -> usize {
    seq.blocks()[0][0]
}

fn x_layout(p: &SequenceType, q: &SequenceType) -> AxisLayout {
    let u = p.order();
    let mut symbols = Vec::new();
    let mut chain = Vec::new();
    for seq in p.sequences() {
        chain.push(symbols.len());
        let a = anchor(seq);
        for m in 0..=seq.length() {
            symbols.push(offset_name(&format!("x_k{a}"), m));
        }
    }
    let mut prime = vec![0; u + 1];
    for seq in q.sequences() {
        let b = anchor(seq);
        for (m, block) in seq.blocks().iter().enumerate() {
            for &i in block {
                prime[i] = symbols.len();
            }
            symbols.push(offset_name(&format!("x'_l{b}"), m));
        }
    }
    let loc = p.locate();
    let triples = (1..=u)
        .map(|i| {
            let (h, m) = loc[i - 1];
            (chain[h] + m, prime[i], chain[h] + m + 1)
        })
        .collect();
    AxisLayout { symbols, triples }
}

fn y_layout(p: &SequenceType, q: &SequenceType) -> AxisLayout {
    let u = p.order();
    let mut symbols = Vec::new();
    let mut block_sym = vec![0; u + 1];
    for seq in p.sequences() {
        let a = anchor(seq);
        for (m, block) in seq.blocks().iter().enumerate() {
            for &i in block {
                block_sym[i] = symbols.len();
            }
            symbols.push(format!("y_k{a}+{}", m + 1));
        }
    }
    let mut chain = Vec::new();
    for seq in q.sequences() {
        chain.push(symbols.len());
        let b = anchor(seq);
        for m in 0..=seq.length() {
            symbols.push(offset_name(&format!("y'_l{b}"), m));
        }
    }
    let loc = q.locate();
    // B: y'_{l+1} < y_{k+1} < y'_l
    let triples = (1..=u)
        .map(|i| {
            let (g, m) = loc[i - 1];
            (chain[g] + m + 1, block_sym[i], chain[g] + m)
        })
        .collect();
    AxisLayout { symbols, triples }
}

fn check_orders(p: &SequenceType, q: &SequenceType) -> Result<usize, MomentError> {
    if p.order() != q.order() {
        return Err(MomentError::OrderMismatch {
            p: p.order(),
            q: q.order(),
        });
    }
    Ok(p.order())
}

fn check_limit(len: usize, cfg: &EngineConfig) -> Result<(), MomentError> {
    if len > cfg.symbol_limit {
        return Err(MomentError::TooManySymbols {
            count: len,
            limit: cfg.symbol_limit,
        });
    }
    Ok(())
}

/// The abstract coordinate symbols for `(P, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSets {
    pub x: Vec<String>,
    pub y: Vec<String>,
}

pub fn build_symbols(p: &SequenceType, q: &SequenceType) -> Result<SymbolSets, MomentError> {
    check_orders(p, q)?;
    Ok(SymbolSets {
        x: x_layout(p, q).symbols,
        y: y_layout(p, q).symbols,
    })
}

/// The constraint system realizing `A^delta` (axis X) or `B^delta` (axis Y).
pub fn constraint_system(
    p: &SequenceType,
    q: &SequenceType,
    delta: &SignVector,
    axis: Axis,
) -> Result<SymbolOrder, MomentError> {
    let u = check_orders(p, q)?;
    if delta.len() != u {
        return Err(MomentError::SignLength {
            got: delta.len(),
            expected: u,
        });
    }
    let layout = match axis {
        Axis::X => x_layout(p, q),
        Axis::Y => y_layout(p, q),
    };
    Ok(layout.system(delta.mask()))
}

/// `#X_{P,Q,delta}` or `#Y_{P,Q,delta}`.
pub fn count_orderings(
    p: &SequenceType,
    q: &SequenceType,
    delta: &SignVector,
    axis: Axis,
    cfg: &EngineConfig,
) -> Result<BigUint, MomentError> {
    let system = constraint_system(p, q, delta, axis)?;
    check_limit(system.len(), cfg)?;
    system.count(cfg.method).map(BigUint::from)
}

/// Symbol count and per-mask counts, keyed by (type, partition class).
type AxisCache = HashMap<(usize, usize), (usize, Vec<u128>)>;

/// Per-sign-vector counts for both axes, indexed by mask.
#[derive(Debug, Clone)]
struct PairCounts {
    x_len: usize,
    y_len: usize,
    x: Vec<u128>,
    y: Vec<u128>,
}

impl PairCounts {
    fn compute(
        p: &SequenceType,
        q: &SequenceType,
        cfg: &EngineConfig,
    ) -> Result<Self, MomentError> {
        check_orders(p, q)?;
        let xl = x_layout(p, q);
        let yl = y_layout(p, q);
        check_limit(xl.symbols.len(), cfg)?;
        check_limit(yl.symbols.len(), cfg)?;
        Ok(Self {
            x_len: xl.symbols.len(),
            y_len: yl.symbols.len(),
            x: xl.counts(cfg)?,
            y: yl.counts(cfg)?,
        })
    }

    fn n_of(&self, eps: usize) -> BigUint {
        self.x
            .iter()
            .enumerate()
            .map(|(eta, &cx)| BigUint::from(cx) * BigUint::from(self.y[eta ^ eps]))
            .sum()
    }

    /// `sum_eps (prod eps) N_eps`.
    fn signed_sum(&self) -> BigInt {
        (0..self.x.len())
            .map(|eps| {
                let n = BigInt::from(self.n_of(eps));
                if eps.count_ones() % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    fn inner_sum(&self) -> Rational {
        Rational::new(
            self.signed_sum(),
            factorial(self.x_len) * factorial(self.y_len),
        )
    }
}

/// `N_{P,Q,eps} = sum_eta #X_eta #Y_{eta*eps}`.
pub fn count_n(
    p: &SequenceType,
    q: &SequenceType,
    eps: &SignVector,
    cfg: &EngineConfig,
) -> Result<BigUint, MomentError> {
    let u = check_orders(p, q)?;
    if eps.len() != u {
        return Err(MomentError::SignLength {
            got: eps.len(),
            expected: u,
        });
    }
    Ok(PairCounts::compute(p, q, cfg)?.n_of(eps.mask()))
}

/// `sum_eps (prod eps) N_{P,Q,eps}`; zero whenever `P` or `Q` has a
/// single-index sequence.
pub fn signed_count_sum(
    p: &SequenceType,
    q: &SequenceType,
    cfg: &EngineConfig,
) -> Result<BigInt, MomentError> {
    Ok(PairCounts::compute(p, q, cfg)?.signed_sum())
}

/// `sum_eps (prod eps) N_{P,Q,eps} / (#X! #Y!)`.
pub fn inner_sum(
    p: &SequenceType,
    q: &SequenceType,
    cfg: &EngineConfig,
) -> Result<Rational, MomentError> {
    Ok(PairCounts::compute(p, q, cfg)?.inner_sum())
}

/// One `(P, Q)` contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTerm {
    pub p: SequenceType,
    pub q: SequenceType,
    pub inner: Rational,
}

impl PairTerm {
    pub fn entry(&self) -> PairEntry {
        PairEntry {
            p: self.p.to_string(),
            q: self.q.to_string(),
            inner_sum: format_rational(&self.inner),
        }
    }
}

/// Inner sums for every pair in `types x types`, in row-major order.
///
/// Order counts depend on `P` and the block partition of `Q` on the x axis
/// (and symmetrically on y), so each distinct system is counted once.
fn pair_terms_for(
    types: &[SequenceType],
    cfg: &EngineConfig,
) -> Result<Vec<PairTerm>, MomentError> {
    let partitions: Vec<Vec<Vec<usize>>> = types.iter().map(SequenceType::partition).collect();
    let mut part_ids: HashMap<&Vec<Vec<usize>>, usize> = HashMap::new();
    let mut part_rep = Vec::new();
    let part_of: Vec<usize> = partitions
        .iter()
        .enumerate()
        .map(|(i, part)| {
            *part_ids.entry(part).or_insert_with(|| {
                part_rep.push(i);
                part_rep.len() - 1
            })
        })
        .collect();

    let keys: Vec<(usize, usize)> = (0..types.len())
        .flat_map(|t| (0..part_rep.len()).map(move |c| (t, c)))
        .collect();
    let count_axis = |axis: Axis| -> Result<AxisCache, MomentError> {
        keys.par_iter()
            .map(|&(t, c)| {
                let other = &types[part_rep[c]];
                let layout = match axis {
                    Axis::X => x_layout(&types[t], other),
                    Axis::Y => y_layout(other, &types[t]),
                };
                check_limit(layout.symbols.len(), cfg)?;
                Ok(((t, c), (layout.symbols.len(), layout.counts(cfg)?)))
            })
            .collect()
    };
    // x counts keyed by (P, partition of Q); y counts by (Q, partition of P)
    let x_counts = count_axis(Axis::X)?;
    let y_counts = count_axis(Axis::Y)?;

    let terms = (0..types.len() * types.len())
        .into_par_iter()
        .map(|idx| {
            let (pi, qi) = (idx / types.len(), idx % types.len());
            let (x_len, x) = &x_counts[&(pi, part_of[qi])];
            let (y_len, y) = &y_counts[&(qi, part_of[pi])];
            let counts = PairCounts {
                x_len: *x_len,
                y_len: *y_len,
                x: x.clone(),
                y: y.clone(),
            };
            PairTerm {
                p: types[pi].clone(),
                q: types[qi].clone(),
                inner: counts.inner_sum(),
            }
        })
        .collect();
    Ok(terms)
}

fn polynomial_from_terms(u: usize, terms: &[PairTerm]) -> MomentPolynomial {
    let mut acc: Vec<Rational> = Vec::new();
    for t in terms {
        if t.inner.is_zero() {
            continue;
        }
        add_scaled(&mut acc, t);
    }
    MomentPolynomial::new(u, acc)
}

fn add_scaled(acc: &mut Vec<Rational>, t: &PairTerm) {
    poly::add_scaled_product(
        acc,
        &t.inner,
        &cardinality_coefficients(&t.p),
        &cardinality_coefficients(&t.q),
    );
}

/// Pair contributions over types whose sequences all hold at least two
/// indices.
pub fn pair_terms(u: usize, cfg: &EngineConfig) -> Result<Vec<PairTerm>, MomentError> {
    if u == 0 {
        return Err(MomentError::ZeroOrder);
    }
    let types = enumerate_types(u).with_min_sequence_size(2).types;
    pair_terms_for(&types, cfg)
}

/// `E[lk^u](n)` as an exact polynomial, valid for `n > u`.
pub fn moment_polynomial(u: usize, cfg: &EngineConfig) -> Result<MomentPolynomial, MomentError> {
    let terms = pair_terms(u, cfg)?;
    let poly = polynomial_from_terms(u, &terms);
    if u % 2 == 1 && !poly.is_zero() {
        return Err(MomentError::OddMomentNonzero { u });
    }
    Ok(poly)
}

/// The same sum over every type pair, without dropping types that contain a
/// single-index sequence.
pub fn moment_polynomial_unfiltered(
    u: usize,
    cfg: &EngineConfig,
) -> Result<MomentPolynomial, MomentError> {
    if u == 0 {
        return Err(MomentError::ZeroOrder);
    }
    let types = enumerate_types(u).types;
    let terms = pair_terms_for(&types, cfg)?;
    Ok(polynomial_from_terms(u, &terms))
}

/// Runs both sums and fails unless they agree.
pub fn verify_filter(u: usize, cfg: &EngineConfig) -> Result<MomentPolynomial, MomentError> {
    let filtered = moment_polynomial(u, cfg)?;
    if moment_polynomial_unfiltered(u, cfg)? != filtered {
        return Err(MomentError::FilterMismatch { u });
    }
    Ok(filtered)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingCoefficient {
    pub u: usize,
    pub value: Rational,
    /// Pairs with `s = t = u/2` and every sequence of size two.
    pub terms: Vec<PairTerm>,
}

/// `a_u`, the coefficient of `n^u`.
pub fn leading_coefficient(
    u: usize,
    cfg: &EngineConfig,
) -> Result<LeadingCoefficient, MomentError> {
    if u == 0 {
        return Err(MomentError::ZeroOrder);
    }
    if u % 2 == 1 {
        return Err(MomentError::OddOrder { u });
    }
    let types: Vec<SequenceType> = enumerate_types(u)
        .types
        .into_iter()
        .filter(|t| t.count() == u / 2 && t.sequences().iter().all(|s| s.size() == 2))
        .collect();
    let terms = pair_terms_for(&types, cfg)?;
    let value = terms.iter().map(|t| t.inner.clone()).sum();
    Ok(LeadingCoefficient { u, value, terms })
}

/// `(2u)!^2 3^(2u) / u!^2`, the growth bound on `a_{2u}`.
pub fn moment_bound(u: usize) -> Rational {
    let num = factorial(2 * u).pow(2) * BigInt::from(3).pow(2 * u as u32);
    Rational::new(num, factorial(u).pow(2))
}

/// True iff `a_{2u}` is within [`moment_bound`].
pub fn moment_bound_check(u: usize, cfg: &EngineConfig) -> Result<bool, MomentError> {
    let a = leading_coefficient(2 * u, cfg)?.value;
    Ok(a <= moment_bound(u))
}

/// Constraint system for explicit index sequences `k`, `l` on `{1..n}`.
///
/// Symbols are the concrete coordinates `x_j`, `x'_j` (or `y_j`, `y'_j`) that
/// occur, in order of first use. For sequences of types `P` and `Q` the
/// count of linear orders equals the abstract one.
pub fn concrete_system(
    k: &[usize],
    l: &[usize],
    n: usize,
    delta: &SignVector,
    axis: Axis,
) -> Result<SymbolOrder, MomentError> {
    let u = k.len();
    if u == 0 || l.len() != u || k.iter().chain(l).any(|&v| v == 0 || v > n) || n < 2 {
        return Err(MomentError::BadSequence { n });
    }
    if delta.len() != u {
        return Err(MomentError::SignLength {
            got: delta.len(),
            expected: u,
        });
    }
    let next = |v: usize| v % n + 1;
    let mut names: Vec<String> = Vec::new();
    let mut id = |name: String| -> usize {
        match names.iter().position(|s| *s == name) {
            Some(i) => i,
            None => {
                names.push(name);
                names.len() - 1
            }
        }
    };
    let mut triples = Vec::with_capacity(u);
    for i in 0..u {
        let t = match axis {
            Axis::X => (
                id(format!("x_{}", k[i])),
                id(format!("x'_{}", l[i])),
                id(format!("x_{}", next(k[i]))),
            ),
            Axis::Y => (
                id(format!("y'_{}", next(l[i]))),
                id(format!("y_{}", next(k[i]))),
                id(format!("y'_{}", l[i])),
            ),
        };
        triples.push(t);
    }
    let layout = AxisLayout {
        symbols: names,
        triples,
    };
    Ok(layout.system(delta.mask()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> SequenceType {
        s.parse().unwrap()
    }

    fn sv(v: &[i8]) -> SignVector {
        SignVector::new(v.to_vec()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn cross() -> EngineConfig {
        EngineConfig {
            method: OrderingMethod::CrossCheck,
            ..EngineConfig::default()
        }
    }

    #[test]
    fn sign_vectors() {
        assert_eq!(SignVector::from_mask(0b10, 2).entries(), &[1, -1]);
        assert_eq!(sv(&[1, -1, -1]).mask(), 0b110);
        assert_eq!(sv(&[1, -1]).times(&sv(&[-1, -1])), sv(&[-1, 1]));
        assert_eq!(sv(&[1, -1, -1]).product(), 1);
        assert!(SignVector::new(vec![1, 0]).is_err());
        assert_eq!(SignVector::all(3).count(), 8);
    }

    #[test]
    fn symbol_sets_of_worked_pair() {
        let s = build_symbols(&lit("{({1,2})}"), &lit("{({1},{2})}")).unwrap();
        assert_eq!(s.x, vec!["x_k1", "x_k1+1", "x'_l1", "x'_l1+1"]);
        assert_eq!(s.y, vec!["y_k1+1", "y'_l1", "y'_l1+1", "y'_l1+2"]);

        let same = build_symbols(&lit("{({1,2})}"), &lit("{({1,2})}")).unwrap();
        assert_eq!((same.x.len(), same.y.len()), (3, 3));
        let sep = build_symbols(&lit("{({1},{2})}"), &lit("{({1},{2})}")).unwrap();
        assert_eq!((sep.x.len(), sep.y.len()), (5, 5));

        assert_eq!(
            build_symbols(&lit("{({1})}"), &lit("{({1,2})}")),
            Err(MomentError::OrderMismatch { p: 1, q: 2 })
        );
    }

    #[test]
    fn symbol_count_formula() {
        for u in 1..=3 {
            let types = enumerate_types(u).types;
            for p in &types {
                for q in &types {
                    let s = build_symbols(p, q).unwrap();
                    let lp = p.total_length();
                    let lq = q.total_length();
                    assert_eq!(s.x.len(), lp + p.count() + lq);
                    assert_eq!(s.y.len(), lp + lq + q.count());
                }
            }
        }
    }

    #[test]
    fn worked_counts_case_one() {
        let (p, q, cfg) = (lit("{({1,2})}"), lit("{({1,2})}"), cross());
        let c = |d: &[i8], a| count_orderings(&p, &q, &sv(d), a, &cfg).unwrap();
        assert_eq!(c(&[1, 1], Axis::X), BigUint::from(1u8));
        assert_eq!(c(&[-1, 1], Axis::X), BigUint::from(0u8));
        assert_eq!(c(&[1, 1], Axis::Y), BigUint::from(1u8));
        assert_eq!(c(&[-1, 1], Axis::Y), BigUint::from(0u8));
        assert_eq!(
            count_n(&p, &q, &sv(&[1, 1]), &cfg).unwrap(),
            BigUint::from(2u8)
        );
        assert_eq!(
            count_n(&p, &q, &sv(&[-1, 1]), &cfg).unwrap(),
            BigUint::from(0u8)
        );
        assert_eq!(inner_sum(&p, &q, &cfg).unwrap(), r(1, 9));
    }

    #[test]
    fn worked_counts_case_two() {
        let (p, q, cfg) = (lit("{({1,2})}"), lit("{({1},{2})}"), cross());
        let c = |d: &[i8], a| count_orderings(&p, &q, &sv(d), a, &cfg).unwrap();
        assert_eq!(c(&[1, 1], Axis::X), BigUint::from(2u8));
        assert_eq!(c(&[-1, 1], Axis::X), BigUint::from(0u8));
        assert_eq!(c(&[1, 1], Axis::Y), BigUint::from(0u8));
        assert_eq!(c(&[-1, 1], Axis::Y), BigUint::from(2u8));
        assert_eq!(
            count_n(&p, &q, &sv(&[1, 1]), &cfg).unwrap(),
            BigUint::from(0u8)
        );
        assert_eq!(
            count_n(&p, &q, &sv(&[-1, 1]), &cfg).unwrap(),
            BigUint::from(8u8)
        );
        assert_eq!(
            count_n(&p, &q, &sv(&[1, -1]), &cfg).unwrap(),
            BigUint::from(8u8)
        );
        assert_eq!(inner_sum(&p, &q, &cfg).unwrap(), r(-1, 36));
    }

    #[test]
    fn worked_counts_case_three() {
        let (p, q, cfg) = (lit("{({1},{2})}"), lit("{({1},{2})}"), cross());
        let c = |d: &[i8], a| count_orderings(&p, &q, &sv(d), a, &cfg).unwrap();
        assert_eq!(c(&[1, 1], Axis::X), BigUint::from(1u8));
        assert_eq!(c(&[-1, 1], Axis::X), BigUint::from(6u8));
        assert_eq!(c(&[1, 1], Axis::Y), BigUint::from(1u8));
        assert_eq!(c(&[-1, 1], Axis::Y), BigUint::from(6u8));
        assert_eq!(
            count_n(&p, &q, &sv(&[1, 1]), &cfg).unwrap(),
            BigUint::from(74u8)
        );
        assert_eq!(
            count_n(&p, &q, &sv(&[-1, 1]), &cfg).unwrap(),
            BigUint::from(24u8)
        );
        assert_eq!(inner_sum(&p, &q, &cfg).unwrap(), r(1, 144));
    }

    #[test]
    fn reversal_symmetry_of_counts() {
        let cfg = EngineConfig::default();
        for u in 1..=3 {
            let types = enumerate_types(u).types;
            for p in &types {
                for q in &types {
                    for d in SignVector::all(u) {
                        for axis in [Axis::X, Axis::Y] {
                            assert_eq!(
                                count_orderings(p, q, &d, axis, &cfg).unwrap(),
                                count_orderings(p, q, &d.negated(), axis, &cfg).unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dp_and_scan_agree_on_all_small_systems() {
        let cfg = cross();
        for u in 1..=3 {
            let types = enumerate_types(u).types;
            for p in &types {
                for q in &types {
                    PairCounts::compute(p, q, &cfg).unwrap();
                }
            }
        }
    }

    #[test]
    fn singleton_sequences_cancel() {
        let cfg = EngineConfig::default();
        for u in 1..=3 {
            let types = enumerate_types(u).types;
            for p in types.iter().filter(|t| t.has_singleton_sequence()) {
                for q in &types {
                    assert!(signed_count_sum(p, q, &cfg).unwrap().is_zero(), "{p} {q}");
                    assert!(signed_count_sum(q, p, &cfg).unwrap().is_zero(), "{q} {p}");
                }
            }
        }
    }

    #[test]
    fn second_moment() {
        let cfg = EngineConfig::default();
        let poly = verify_filter(2, &cfg).unwrap();
        assert_eq!(poly.coefficients, vec![r(0, 1), r(0, 1), r(1, 36)]);
        let lead = leading_coefficient(2, &cfg).unwrap();
        assert_eq!(lead.value, r(1, 36));
        assert_eq!(lead.terms.len(), 9);
        let count = |v: Rational| lead.terms.iter().filter(|t| t.inner == v).count();
        assert_eq!(count(r(1, 9)), 1);
        assert_eq!(count(r(-1, 36)), 4);
        assert_eq!(count(r(1, 144)), 4);
    }

    #[test]
    fn odd_moments_vanish() {
        let cfg = EngineConfig::default();
        assert!(moment_polynomial(1, &cfg).unwrap().is_zero());
        assert!(moment_polynomial(3, &cfg).unwrap().is_zero());
        assert!(moment_polynomial_unfiltered(3, &cfg).unwrap().is_zero());
        assert_eq!(
            leading_coefficient(3, &cfg),
            Err(MomentError::OddOrder { u: 3 })
        );
    }

    #[test]
    fn symbol_limit_is_enforced() {
        let cfg = EngineConfig {
            symbol_limit: 4,
            ..EngineConfig::default()
        };
        let p = lit("{({1},{2})}");
        assert_eq!(
            inner_sum(&p, &p, &cfg),
            Err(MomentError::TooManySymbols { count: 5, limit: 4 })
        );
    }

    #[test]
    fn bound_values() {
        assert_eq!(moment_bound(1), r(36, 1));
        assert_eq!(moment_bound(2), r(11664, 1));
        assert!(moment_bound_check(1, &EngineConfig::default()).unwrap());
    }

    #[test]
    fn concrete_systems_match_types() {
        let cfg = EngineConfig::default();
        let n = 6;
        let seqs: Vec<Vec<usize>> = (1..=n)
            .flat_map(|a| (1..=n).map(move |b| vec![a, b]))
            .collect();
        for k in &seqs {
            for l in &seqs {
                let p = crate::types::type_of(k, n).unwrap();
                let q = crate::types::type_of(l, n).unwrap();
                for d in SignVector::all(2) {
                    for axis in [Axis::X, Axis::Y] {
                        let concrete = concrete_system(k, l, n, &d, axis).unwrap();
                        let abstract_ = constraint_system(&p, &q, &d, axis).unwrap();
                        assert_eq!(concrete.len(), abstract_.len());
                        assert_eq!(
                            concrete.count(cfg.method).unwrap(),
                            abstract_.count(cfg.method).unwrap(),
                            "k={k:?} l={l:?} d={d:?} {axis:?}"
                        );
                    }
                }
            }
        }
    }
}
