//! Permutations and 2-component grid link diagrams.
//!
//! A pair `(sigma, pi)` of permutations of `{1..2n}` describes a diagram on a
//! `2n x 2n` grid. Component 1 visits
//! `(sigma(1), pi(1)) -> (sigma(1), pi(2)) -> (sigma(2), pi(2)) -> ...`
//! using indices `1..=n`, component 2 does the same with `n+1..=2n`. Each
//! component closes on itself, so index arithmetic wraps inside its own block.
//!
//! Everything public is 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("entry {value} at position {index} appears more than once")]
    DuplicateEntry { index: usize, value: i64 },
    #[error("entry {value} at position {index} is outside 1..={len}")]
    OutOfRange {
        index: usize,
        value: i64,
        len: usize,
    },
    #[error("permutation has length {len}; an even length of at least 4 is required")]
    OddLength { len: usize },
    #[error("sigma has length {sigma} but pi has length {pi}")]
    LengthMismatch { sigma: usize, pi: usize },
    #[error("line {line}, position {position}: {message}")]
    Parse {
        line: usize,
        position: usize,
        message: String,
    },
}

/// A bijection on `{1..2n}` with `2n >= 4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<u32>")]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    /// Validates `values` as a permutation of `1..=values.len()`.
    ///
    /// Positions in errors are 1-based.
    pub fn new(values: &[i64]) -> Result<Self, GridError> {
        let len = values.len();
        if !len.is_multiple_of(2) || len < 4 {
            return Err(GridError::OddLength { len });
        }
        let mut seen = vec![false; len + 1];
        let mut out = Vec::with_capacity(len);
        for (i, &v) in values.iter().enumerate() {
            if v < 1 || v > len as i64 {
                return Err(GridError::OutOfRange {
                    index: i + 1,
                    value: v,
                    len,
                });
            }
            if seen[v as usize] {
                return Err(GridError::DuplicateEntry {
                    index: i + 1,
                    value: v,
                });
            }
            seen[v as usize] = true;
            out.push(v as u32);
        }
        Ok(Self { values: out })
    }

    pub fn identity(len: usize) -> Result<Self, GridError> {
        let v: Vec<i64> = (1..=len as i64).collect();
        Self::new(&v)
    }

    /// Wraps values already known to be a valid permutation.
    pub(crate) fn from_trusted(values: Vec<u32>) -> Self {
        debug_assert!(Self::new(&values.iter().map(|&v| v as i64).collect::<Vec<_>>()).is_ok());
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based position `i`.
    pub fn get(&self, i: usize) -> u32 {
        self.values[i - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }

    /// Entrywise `len - v + 1`.
    pub fn reversed_values(&self) -> Permutation {
        let len = self.values.len() as u32;
        Self {
            values: self.values.iter().map(|&v| len - v + 1).collect(),
        }
    }
}

impl TryFrom<Vec<i64>> for Permutation {
    type Error = GridError;

    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        Permutation::new(&v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_permutation_line(s, 1)
    }
}

fn parse_permutation_line(line: &str, line_no: usize) -> Result<Permutation, GridError> {
    let mut values = Vec::new();
    for (i, field) in line.trim().split(',').enumerate() {
        let field = field.trim();
        let v: i64 = field.parse().map_err(|_| GridError::Parse {
            line: line_no,
            position: i + 1,
            message: format!("expected an integer, found {field:?}"),
        })?;
        values.push(v);
    }
    Permutation::new(&values).map_err(|e| match e {
        GridError::DuplicateEntry { index, .. } | GridError::OutOfRange { index, .. } => {
            GridError::Parse {
                line: line_no,
                position: index,
                message: e.to_string(),
            }
        }
        other => GridError::Parse {
            line: line_no,
            position: 0,
            message: other.to_string(),
        },
    })
}

/// Which of the two link components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    First,
    Second,
}

impl Component {
    pub fn number(self) -> u8 {
        match self {
            Component::First => 1,
            Component::Second => 2,
        }
    }
}

/// A 2-component grid link diagram of order `2n`, `n >= 2`.
///
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridLink {
    n: usize,
    sigma: Permutation,
    pi: Permutation,
}

impl GridLink {
    pub fn new(sigma: Permutation, pi: Permutation) -> Result<Self, GridError> {
        if sigma.len() != pi.len() {
            return Err(GridError::LengthMismatch {
                sigma: sigma.len(),
                pi: pi.len(),
            });
        }
        Ok(Self {
            n: sigma.len() / 2,
            sigma,
            pi,
        })
    }

    pub fn from_slices(sigma: &[i64], pi: &[i64]) -> Result<Self, GridError> {
        Self::new(Permutation::new(sigma)?, Permutation::new(pi)?)
    }

    /// Per-component edge count `n`; the grid is `2n` wide.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid_size(&self) -> usize {
        2 * self.n
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    /// `x_k = sigma(k)`, with `k` wrapped into `1..=n`.
    pub fn x(&self, k: usize) -> u32 {
        self.sigma.get(wrap(k, self.n))
    }

    /// `x'_l = sigma(n + l)`, with `l` wrapped into `1..=n`.
    pub fn x_prime(&self, l: usize) -> u32 {
        self.sigma.get(self.n + wrap(l, self.n))
    }

    pub fn y(&self, k: usize) -> u32 {
        self.pi.get(wrap(k, self.n))
    }

    pub fn y_prime(&self, l: usize) -> u32 {
        self.pi.get(self.n + wrap(l, self.n))
    }

    /// Closed vertex path of one component, in traversal order.
    pub fn component_path(&self, which: Component) -> LatticePath {
        let n = self.n;
        let (xs, ys) = match which {
            Component::First => (&self.sigma.as_slice()[..n], &self.pi.as_slice()[..n]),
            Component::Second => (&self.sigma.as_slice()[n..], &self.pi.as_slice()[n..]),
        };
        let mut vertices = Vec::with_capacity(2 * n);
        for k in 0..n {
            let next = (k + 1) % n;
            vertices.push((xs[k], ys[k]));
            vertices.push((xs[k], ys[next]));
        }
        LatticePath { vertices }
    }

    /// Reflection across the vertical center line: `sigma_i -> 2n - sigma_i + 1`.
    pub fn mirror(&self) -> GridLink {
        GridLink {
            n: self.n,
            sigma: self.sigma.reversed_values(),
            pi: self.pi.clone(),
        }
    }

    /// Two lines, sigma then pi.
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.sigma, self.pi)
    }

    /// Parses the two-line text format. Blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self, GridError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (sl, sigma) = lines.next().ok_or(GridError::Parse {
            line: 1,
            position: 0,
            message: "missing sigma line".into(),
        })?;
        let (pl, pi) = lines.next().ok_or(GridError::Parse {
            line: sl + 1,
            position: 0,
            message: "missing pi line".into(),
        })?;
        if let Some((extra, _)) = lines.next() {
            return Err(GridError::Parse {
                line: extra,
                position: 0,
                message: "unexpected third line".into(),
            });
        }
        let sigma = parse_permutation_line(sigma, sl)?;
        let pi = parse_permutation_line(pi, pl)?;
        GridLink::new(sigma, pi).map_err(|e| GridError::Parse {
            line: pl,
            position: 0,
            message: e.to_string(),
        })
    }
}

/// Maps any positive index onto `1..=n` cyclically.
pub(crate) fn wrap(k: usize, n: usize) -> usize {
    (k - 1) % n + 1
}

/// A closed axis-parallel polygon; the edge from the last vertex back to the
/// first is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    /// `(column, row)` pairs.
    pub vertices: Vec<(u32, u32)>,
}

/// An oriented edge of a component path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: (u32, u32),
    pub to: (u32, u32),
}

impl Edge {
    pub fn is_vertical(&self) -> bool {
        self.from.0 == self.to.0
    }
}

impl LatticePath {
    /// Edges in traversal order, starting with the vertical edge out of the
    /// first vertex.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let len = self.vertices.len();
        (0..len).map(move |i| Edge {
            from: self.vertices[i],
            to: self.vertices[(i + 1) % len],
        })
    }
}
