//! Types of index sequences.
//!
//! For a sequence `k = (k_1, ..., k_u)` on `{1..n}` with `u < n`, indices with
//! equal values share a block, and a block whose value is `v` is followed by
//! the block whose value is `v + 1 (mod n)`. Maximal runs of consecutive
//! values become block sequences; the type is the set of those sequences.
//! Values further apart than one land in different sequences.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("entry {value} at position {index} is outside 1..={n}")]
    EntryOutOfRange {
        index: usize,
        value: usize,
        n: usize,
    },
    #[error("values wrap all the way around 1..={n}; the sequence length must be below n")]
    CyclicChain { n: usize },
    #[error("empty sequence")]
    Empty,
    #[error("n = {n} must exceed the order u = {u}")]
    OrderTooLarge { u: usize, n: usize },
    #[error("bad type literal at byte {position}: {message}")]
    Literal { position: usize, message: String },
}

/// An ordered list of disjoint, non-empty index blocks. Blocks are stored
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSequence {
    blocks: Vec<Vec<usize>>,
}

impl BlockSequence {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `l(p)`.
    pub fn length(&self) -> usize {
        self.blocks.len()
    }

    /// Number of indices, `|p|`.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn min_index(&self) -> usize {
        self.blocks.iter().flatten().copied().min().unwrap_or(0)
    }
}

/// A type: a set of block sequences covering `{1..u}` exactly once, kept in
/// canonical order (by smallest contained index).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SequenceType {
    sequences: Vec<BlockSequence>,
}

impl SequenceType {
    /// Canonicalizes and checks that `1..=u` is covered exactly once.
    pub fn new(mut sequences: Vec<BlockSequence>) -> Result<Self, TypeError> {
        if sequences.is_empty() {
            return Err(TypeError::Empty);
        }
        let mut all: Vec<usize> = sequences
            .iter()
            .flat_map(|s| s.blocks.iter().flatten().copied())
            .collect();
        all.sort_unstable();
        let u = all.len();
        if sequences.iter().any(|s| s.blocks.iter().any(Vec::is_empty))
            || all.iter().copied().ne(1..=u)
        {
            return Err(TypeError::Literal {
                position: 0,
                message: format!("indices must cover 1..={u} exactly once in non-empty blocks"),
            });
        }
        sequences.sort_by_key(BlockSequence::min_index);
        Ok(Self { sequences })
    }

    fn from_canonical(sequences: Vec<BlockSequence>) -> Self {
        Self { sequences }
    }

    pub fn sequences(&self) -> &[BlockSequence] {
        &self.sequences
    }

    /// The order `u`.
    pub fn order(&self) -> usize {
        self.sequences.iter().map(BlockSequence::size).sum()
    }

    /// Number of sequences `s`.
    pub fn count(&self) -> usize {
        self.sequences.len()
    }

    /// `sum_h l(p_h)`.
    pub fn total_length(&self) -> usize {
        self.sequences.iter().map(BlockSequence::length).sum()
    }

    /// Smallest `n` with a non-empty `S_{n,P}`: `s + sum_h l(p_h)`.
    pub fn n_min(&self) -> usize {
        self.count() + self.total_length()
    }

    /// True when every sequence holds at least `k` indices.
    pub fn all_sizes_at_least(&self, k: usize) -> bool {
        self.sequences.iter().all(|s| s.size() >= k)
    }

    /// Sequences whose only block is a single index.
    pub fn has_singleton_sequence(&self) -> bool {
        self.sequences.iter().any(|s| s.size() == 1)
    }

    /// For index `i` (1-based): `(sequence, block)` positions, both 0-based.
    pub fn locate(&self) -> Vec<(usize, usize)> {
        let mut loc = vec![(0, 0); self.order() + 1];
        for (h, seq) in self.sequences.iter().enumerate() {
            for (m, block) in seq.blocks.iter().enumerate() {
                for &i in block {
                    loc[i] = (h, m);
                }
            }
        }
        loc.remove(0);
        loc
    }

    /// The blocks with sequence structure forgotten, sorted.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = self
            .sequences
            .iter()
            .flat_map(|s| s.blocks.iter().cloned())
            .collect();
        blocks.sort();
        blocks
    }
}

impl fmt::Display for SequenceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (h, seq) in self.sequences.iter().enumerate() {
            if h > 0 {
                f.write_str(";")?;
            }
            f.write_str("(")?;
            for (m, block) in seq.blocks.iter().enumerate() {
                if m > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{{{}}}", block.iter().join(","))?;
            }
            f.write_str(")")?;
        }
        f.write_str("}")
    }
}

impl FromStr for SequenceType {
    type Err = TypeError;

    /// Parses `{({1},{2,3});({4})}`. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = LiteralParser {
            chars: s
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            end: s.len(),
        };
        p.expect('{')?;
        let mut sequences = Vec::new();
        loop {
            p.expect('(')?;
            let mut blocks = Vec::new();
            loop {
                p.expect('{')?;
                let mut block = Vec::new();
                loop {
                    block.push(p.number()?);
                    if p.eat(',') {
                        continue;
                    }
                    p.expect('}')?;
                    break;
                }
                blocks.push(block);
                if p.eat(',') {
                    continue;
                }
                p.expect(')')?;
                break;
            }
            sequences.push(BlockSequence::new(blocks));
            if p.eat(';') {
                continue;
            }
            p.expect('}')?;
            break;
        }
        if p.pos != p.chars.len() {
            return Err(p.error("trailing input"));
        }
        SequenceType::new(sequences)
    }
}

struct LiteralParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl LiteralParser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |c| c.0)
    }

    fn error(&self, message: &str) -> TypeError {
        TypeError::Literal {
            position: self.offset(),
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.chars.get(self.pos).map(|x| x.1) == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TypeError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn number(&mut self) -> Result<usize, TypeError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.1.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an index"));
        }
        let digits: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        digits.parse().map_err(|_| self.error("index too large"))
    }
}

/// The type of `k` (values in `1..=n`).
pub fn type_of(k: &[usize], n: usize) -> Result<SequenceType, TypeError> {
    if k.is_empty() {
        return Err(TypeError::Empty);
    }
    for (i, &v) in k.iter().enumerate() {
        if v == 0 || v > n {
            return Err(TypeError::EntryOutOfRange {
                index: i + 1,
                value: v,
                n,
            });
        }
    }
    let mut present = vec![false; n + 1];
    for &v in k {
        present[v] = true;
    }
    let prev = |v: usize| if v == 1 { n } else { v - 1 };
    let next = |v: usize| if v == n { 1 } else { v + 1 };

    let mut sequences = Vec::new();
    let mut covered = 0;
    for start in 1..=n {
        if !present[start] || present[prev(start)] {
            continue;
        }
        let mut blocks = Vec::new();
        let mut v = start;
        while present[v] {
            let block: Vec<usize> = (1..=k.len()).filter(|&i| k[i - 1] == v).collect();
            covered += block.len();
            blocks.push(block);
            v = next(v);
            if v == start {
                break;
            }
        }
        sequences.push(BlockSequence { blocks });
    }
    if covered != k.len() {
        return Err(TypeError::CyclicChain { n });
    }
    sequences.sort_by_key(BlockSequence::min_index);
    Ok(SequenceType::from_canonical(sequences))
}

/// All abstract types of order `u`, sorted and de-duplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCensus {
    pub u: usize,
    pub types: Vec<SequenceType>,
}

impl TypeCensus {
    /// Keeps only types whose sequences all hold at least `k` indices.
    pub fn with_min_sequence_size(&self, k: usize) -> TypeCensus {
        TypeCensus {
            u: self.u,
            types: self
                .types
                .iter()
                .filter(|t| t.all_sizes_at_least(k))
                .cloned()
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

pub fn enumerate_types(u: usize) -> TypeCensus {
    let mut found = BTreeSet::new();
    if u > 0 {
        for partition in set_partitions(u) {
            let mut lists: Vec<Vec<Vec<usize>>> = Vec::new();
            arrange_blocks(&partition, 0, &mut lists, &mut |lists| {
                let seqs = lists
                    .iter()
                    .map(|l| BlockSequence::new(l.clone()))
                    .collect();
                found.insert(SequenceType::new(seqs).expect("generated types cover 1..=u"));
            });
        }
    }
    TypeCensus {
        u,
        types: found.into_iter().collect(),
    }
}

/// Set partitions of `1..=u` via restricted growth strings; blocks ordered by
/// their smallest element.
fn set_partitions(u: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; u];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == rgs.len() {
            let mut blocks = vec![Vec::new(); max + 1];
            for (idx, &b) in rgs.iter().enumerate() {
                blocks[b].push(idx + 1);
            }
            out.push(blocks);
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            rec(i + 1, max.max(b), rgs, out);
        }
    }
    rgs[0] = 0;
    rec(1, 0, &mut rgs, &mut out);
    out
}

/// Places blocks `i..` into unordered lists: each block starts a new list or
/// is inserted at any position of an existing one.
fn arrange_blocks(
    blocks: &[Vec<usize>],
    i: usize,
    lists: &mut Vec<Vec<Vec<usize>>>,
    emit: &mut impl FnMut(&[Vec<Vec<usize>>]),
) {
    if i == blocks.len() {
        emit(lists);
        return;
    }
    lists.push(vec![blocks[i].clone()]);
    arrange_blocks(blocks, i + 1, lists, emit);
    lists.pop();
    for li in 0..lists.len() {
        for pos in 0..=lists[li].len() {
            lists[li].insert(pos, blocks[i].clone());
            arrange_blocks(blocks, i + 1, lists, emit);
            lists[li].remove(pos);
        }
    }
}

/// `|S_{n,P}| = n (n-1-L)! / (n-s-L)!` with `L = sum l(p_h)`, evaluated as
/// `n` times `s - 1` consecutive descending factors.
pub fn cardinality(ty: &SequenceType, n: usize) -> Result<BigUint, TypeError> {
    let u = ty.order();
    if n <= u {
        return Err(TypeError::OrderTooLarge { u, n });
    }
    if n < ty.n_min() {
        return Ok(BigUint::from(0u32));
    }
    let l = ty.total_length();
    let mut acc = BigUint::from(n);
    for j in 1..ty.count() {
        acc *= BigUint::from(n - l - j);
    }
    Ok(acc)
}

/// Coefficients (ascending degree) of `n * prod_{j=1}^{s-1} (n - L - j)` as a
/// polynomial in `n`. Agrees with [`cardinality`] for every `n > u`.
pub fn cardinality_coefficients(ty: &SequenceType) -> Vec<BigInt> {
    let l = ty.total_length() as i64;
    let mut coeffs = vec![BigInt::from(0), BigInt::from(1)];
    for j in 1..ty.count() as i64 {
        let shift = BigInt::from(-(l + j));
        let mut next = vec![BigInt::from(0); coeffs.len() + 1];
        for (d, c) in coeffs.iter().enumerate() {
            next[d + 1] += c;
            next[d] += c * &shift;
        }
        coeffs = next;
    }
    coeffs
}

/// Every length-`u` sequence on `{1..n}` of type `ty`.
///
/// Each sequence's first block is placed at every start value and the
/// remaining values follow from the block positions; candidates whose
/// computed type differs from `ty` are dropped.
pub fn sequences_of_type(
    ty: &SequenceType,
    n: usize,
) -> Result<impl Iterator<Item = Vec<usize>> + '_, TypeError> {
    let u = ty.order();
    if n <= u {
        return Err(TypeError::OrderTooLarge { u, n });
    }
    let loc = ty.locate();
    let iter = (0..ty.count())
        .map(|_| 1..=n)
        .multi_cartesian_product()
        .filter_map(move |starts| {
            let k: Vec<usize> = loc
                .iter()
                .map(|&(h, m)| (starts[h] - 1 + m) % n + 1)
                .collect();
            match type_of(&k, n) {
                Ok(t) if &t == ty => Some(k),
                _ => None,
            }
        });
    Ok(iter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> SequenceType {
        s.parse().unwrap()
    }

    #[test]
    fn worked_type_examples() {
        assert_eq!(
            type_of(&[2, 5, 5, 1], 5).unwrap().to_string(),
            "{({2,3},{4},{1})}"
        );
        assert_eq!(
            type_of(&[2, 4, 4, 1], 5).unwrap(),
            lit("{({2,3});({4},{1})}")
        );
        assert_eq!(
            type_of(&[4, 2, 1, 4], 5).unwrap(),
            lit("{({1,4});({3},{2})}")
        );
    }

    #[test]
    fn type_of_errors() {
        assert_eq!(
            type_of(&[1, 6], 5),
            Err(TypeError::EntryOutOfRange {
                index: 2,
                value: 6,
                n: 5
            })
        );
        assert_eq!(type_of(&[1, 2, 3], 3), Err(TypeError::CyclicChain { n: 3 }));
        assert_eq!(type_of(&[], 3), Err(TypeError::Empty));
    }

    #[test]
    fn literal_round_trip_and_errors() {
        let t = lit(" { ( {3} , {2,1} ) ; ({4}) } ");
        assert_eq!(t.to_string(), "{({3},{1,2});({4})}");
        assert!("{({1},{3})}".parse::<SequenceType>().is_err());
        assert!("{({1},{1})}".parse::<SequenceType>().is_err());
        assert!("{({1})".parse::<SequenceType>().is_err());
        assert!("{({})}".parse::<SequenceType>().is_err());
    }

    #[test]
    fn small_censuses() {
        let one = enumerate_types(1);
        assert_eq!(one.len(), 1);
        assert_eq!(one.types[0].to_string(), "{({1})}");
        assert!(one.with_min_sequence_size(2).is_empty());

        let two = enumerate_types(2);
        let names: Vec<String> = two.types.iter().map(ToString::to_string).collect();
        assert_eq!(names.len(), 4);
        for expected in ["{({1,2})}", "{({1},{2})}", "{({2},{1})}", "{({1});({2})}"] {
            assert!(names.contains(&expected.to_string()), "{expected} missing");
        }
        let filtered: BTreeSet<String> = two
            .with_min_sequence_size(2)
            .types
            .iter()
            .map(ToString::to_string)
            .collect();
        let expected: BTreeSet<String> = ["{({1,2})}", "{({1},{2})}", "{({2},{1})}"]
            .map(String::from)
            .into();
        assert_eq!(filtered, expected);
        assert!(enumerate_types(0).is_empty());
    }

    #[test]
    fn census_sizes_follow_lah_sums() {
        // sum over set partitions into j blocks of the number of ways to
        // arrange j labelled blocks into unordered lists: 1, 4, 23, 173
        let sizes: Vec<usize> = (1..=4).map(|u| enumerate_types(u).len()).collect();
        assert_eq!(sizes, vec![1, 4, 23, 173]);
    }

    #[test]
    fn n_min_and_cardinality() {
        let p = lit("{({1});({2,3},{4})}");
        assert_eq!(p.n_min(), 5);
        assert_eq!(cardinality(&p, 5).unwrap(), BigUint::from(5u32));
        let q = lit("{({1,2})}");
        for n in 3..10 {
            assert_eq!(cardinality(&q, n).unwrap(), BigUint::from(n));
        }
        let r = lit("{({1});({2})}");
        assert_eq!(cardinality(&r, 3).unwrap(), BigUint::from(0u32));
        assert_eq!(cardinality(&r, 7).unwrap(), BigUint::from(28u32));
        assert_eq!(
            cardinality(&r, 2),
            Err(TypeError::OrderTooLarge { u: 2, n: 2 })
        );
    }

    #[test]
    fn listing_of_s5p() {
        let p = lit("{({1});({2,3},{4})}");
        let mut got: Vec<Vec<usize>> = sequences_of_type(&p, 5).unwrap().collect();
        got.sort();
        assert_eq!(
            got,
            vec![
                vec![1, 3, 3, 4],
                vec![2, 4, 4, 5],
                vec![3, 5, 5, 1],
                vec![4, 1, 1, 2],
                vec![5, 2, 2, 3]
            ]
        );
        assert!(sequences_of_type(&p, 6)
            .unwrap()
            .any(|k| k == vec![1, 4, 4, 5]));
    }

    #[test]
    fn coefficients_match_cardinality() {
        for u in 1..=4 {
            for t in enumerate_types(u).types {
                let c = cardinality_coefficients(&t);
                for n in (u + 1)..(u + 8) {
                    let val: BigInt = c
                        .iter()
                        .enumerate()
                        .map(|(d, a)| a * BigInt::from(n).pow(d as u32))
                        .sum();
                    assert_eq!(val, BigInt::from(cardinality(&t, n).unwrap()), "{t} n={n}");
                }
            }
        }
    }

    #[test]
    fn locate_and_partition() {
        let p = lit("{({1});({2,3},{4})}");
        assert_eq!(p.locate(), vec![(0, 0), (1, 0), (1, 0), (1, 1)]);
        assert_eq!(p.partition(), vec![vec![1], vec![2, 3], vec![4]]);
        assert!(p.has_singleton_sequence());
    }
}
