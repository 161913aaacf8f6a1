//! Linking numbers of grid links.
//!
//! Two independent routes: the closed formula summing `epsilon(k, l)` over the
//! horizontal edges of component 1 against the vertical edges of component 2,
//! and a geometric scan of every inter-component crossing whose signed sum is
//! halved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Component, GridLink};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkingError {
    #[error("index ({k}, {l}) outside 1..={n}")]
    IndexOutOfRange { k: usize, l: usize, n: usize },
    #[error("signed crossing sum {sum} is odd")]
    HalfSumNotInteger { sum: i64 },
}

/// Sign of the crossing between horizontal edge `k` of component 1 and
/// vertical edge `l` of component 2, with the order conditions that produced
/// it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingSign {
    pub value: i8,
    /// `x_k < x'_l < x_{k+1}`
    pub a: bool,
    /// `x_{k+1} < x'_l < x_k`
    pub a_inv: bool,
    /// `y'_{l+1} < y_{k+1} < y'_l`
    pub b: bool,
    /// `y'_l < y_{k+1} < y'_{l+1}`
    pub b_inv: bool,
}

impl CrossingSign {
    fn from_flags(a: bool, a_inv: bool, b: bool, b_inv: bool) -> Self {
        let value = match (a, a_inv, b, b_inv) {
            (true, _, true, _) | (_, true, _, true) => 1,
            (true, _, _, true) | (_, true, true, _) => -1,
            _ => 0,
        };
        Self {
            value,
            a,
            a_inv,
            b,
            b_inv,
        }
    }
}

/// +1 if `lo < mid < hi`, -1 if `hi < mid < lo`, else 0.
#[inline]
fn between(lo: u32, mid: u32, hi: u32) -> i8 {
    if lo < mid && mid < hi {
        1
    } else if hi < mid && mid < lo {
        -1
    } else {
        0
    }
}

/// Horizontal order condition on `sigma`: +1 for A, -1 for A^-1, 0 for neither.
/// `k0`, `l0` are 0-based.
#[inline]
pub(crate) fn a_state(sigma: &[u32], n: usize, k0: usize, l0: usize) -> i8 {
    let k1 = if k0 + 1 == n { 0 } else { k0 + 1 };
    between(sigma[k0], sigma[n + l0], sigma[k1])
}

/// Vertical order condition on `pi`: +1 for B, -1 for B^-1, 0 for neither.
#[inline]
pub(crate) fn b_state(pi: &[u32], n: usize, k0: usize, l0: usize) -> i8 {
    let k1 = if k0 + 1 == n { 0 } else { k0 + 1 };
    let l1 = if l0 + 1 == n { 0 } else { l0 + 1 };
    between(pi[n + l1], pi[k1], pi[n + l0])
}

#[inline]
pub(crate) fn epsilon_raw(sigma: &[u32], pi: &[u32], n: usize, k0: usize, l0: usize) -> i8 {
    let a = a_state(sigma, n, k0, l0);
    if a == 0 {
        return 0;
    }
    a * b_state(pi, n, k0, l0)
}

/// Linking number straight from the permutation slices.
pub(crate) fn linking_number_raw(sigma: &[u32], pi: &[u32]) -> i64 {
    let n = sigma.len() / 2;
    let mut total = 0i64;
    for k0 in 0..n {
        for l0 in 0..n {
            total += epsilon_raw(sigma, pi, n, k0, l0) as i64;
        }
    }
    total
}

/// `epsilon_{k,l}` for 1-based `k, l` in `1..=n`.
pub fn epsilon(link: &GridLink, k: usize, l: usize) -> Result<CrossingSign, LinkingError> {
    let n = link.n();
    if k == 0 || l == 0 || k > n || l > n {
        return Err(LinkingError::IndexOutOfRange { k, l, n });
    }
    let (s, p) = (link.sigma().as_slice(), link.pi().as_slice());
    let a = a_state(s, n, k - 1, l - 1);
    let b = b_state(p, n, k - 1, l - 1);
    Ok(CrossingSign::from_flags(a == 1, a == -1, b == 1, b == -1))
}

/// `n x n` table of epsilon values, row `k - 1`, column `l - 1`.
pub fn epsilon_table(link: &GridLink) -> Vec<Vec<i8>> {
    let n = link.n();
    let (s, p) = (link.sigma().as_slice(), link.pi().as_slice());
    (0..n)
        .map(|k0| (0..n).map(|l0| epsilon_raw(s, p, n, k0, l0)).collect())
        .collect()
}

pub fn linking_number(link: &GridLink) -> i64 {
    linking_number_raw(link.sigma().as_slice(), link.pi().as_slice())
}

/// One crossing between edges of different components. The vertical edge is
/// always over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub over: Component,
    /// Position of the vertical edge in the over component's edge list.
    pub over_edge: usize,
    pub under: Component,
    pub under_edge: usize,
    /// `(column, row)` of the crossing point.
    pub at: (u32, u32),
    pub sign: i8,
}

/// Every crossing between a vertical edge of one component and a horizontal
/// edge of the other.
///
/// Sign is `det(d_over, d_under)` with unit directions, which is +1 for a
/// horizontal edge heading +x under a vertical edge heading -y.
pub fn geometric_crossings(link: &GridLink) -> Vec<Crossing> {
    let paths = [
        (Component::First, link.component_path(Component::First)),
        (Component::Second, link.component_path(Component::Second)),
    ];
    let mut out = Vec::new();
    for (over, over_path) in &paths {
        for (under, under_path) in &paths {
            if over == under {
                continue;
            }
            for (oi, v) in over_path.edges().enumerate() {
                if !v.is_vertical() {
                    continue;
                }
                let col = v.from.0;
                let (r_lo, r_hi) = (v.from.1.min(v.to.1), v.from.1.max(v.to.1));
                let over_dy: i8 = if v.to.1 > v.from.1 { 1 } else { -1 };
                for (ui, h) in under_path.edges().enumerate() {
                    if h.is_vertical() {
                        continue;
                    }
                    let row = h.from.1;
                    let (c_lo, c_hi) = (h.from.0.min(h.to.0), h.from.0.max(h.to.0));
                    if c_lo < col && col < c_hi && r_lo < row && row < r_hi {
                        let under_dx: i8 = if h.to.0 > h.from.0 { 1 } else { -1 };
                        // d_over = (0, dy), d_under = (dx, 0)
                        let sign = -over_dy * under_dx;
                        out.push(Crossing {
                            over: *over,
                            over_edge: oi,
                            under: *under,
                            under_edge: ui,
                            at: (col, row),
                            sign,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Half the signed sum over all inter-component crossings.
pub fn linking_number_geometric(link: &GridLink) -> Result<i64, LinkingError> {
    let sum: i64 = geometric_crossings(link)
        .iter()
        .map(|c| c.sign as i64)
        .sum();
    if sum % 2 != 0 {
        return Err(LinkingError::HalfSumNotInteger { sum });
    }
    Ok(sum / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Permutation;

    fn hopf_link() -> GridLink {
        GridLink::from_slices(&[1, 3, 2, 4], &[2, 4, 1, 3]).unwrap()
    }

    fn split() -> GridLink {
        let id = Permutation::identity(4).unwrap();
        GridLink::new(id.clone(), id).unwrap()
    }

    #[test]
    fn hopf_link_linking_number() {
        let link = hopf_link();
        assert_eq!(linking_number(&link), 1);
        assert_eq!(linking_number(&link.mirror()), -1);
        assert_eq!(linking_number_geometric(&link), Ok(1));
    }

    #[test]
    fn hopf_link_epsilon_table() {
        // Component 1 horizontals: row 4 from 1 to 3 (k=1), row 2 from 3 to 1 (k=2).
        // Component 2 verticals: column 2 from 1 up to 3 (l=1), column 4 (l=2).
        // Only column 2 meets the horizontals, and only row 2 lies in 1..3.
        let link = hopf_link();
        assert_eq!(epsilon_table(&link), vec![vec![0, 0], vec![1, 0]]);
        let e = epsilon(&link, 2, 1).unwrap();
        assert!(e.a_inv && e.b_inv && !e.a && !e.b);
    }

    #[test]
    fn split_diagram_has_no_crossings() {
        let link = split();
        assert!(epsilon_table(&link).iter().flatten().all(|&e| e == 0));
        assert_eq!(linking_number(&link), 0);
        assert!(geometric_crossings(&link).is_empty());
        assert_eq!(linking_number_geometric(&link), Ok(0));
    }

    #[test]
    fn epsilon_index_bounds() {
        let link = hopf_link();
        assert_eq!(
            epsilon(&link, 3, 1),
            Err(LinkingError::IndexOutOfRange { k: 3, l: 1, n: 2 })
        );
        assert!(epsilon(&link, 0, 1).is_err());
    }

    #[test]
    fn geometric_sign_calibration() {
        // Two inter-component crossings, both positive.
        let crossings = geometric_crossings(&hopf_link());
        assert_eq!(crossings.len(), 2);
        assert_eq!(crossings.iter().map(|c| c.sign as i64).sum::<i64>(), 2);

        // A∧B: k=1 horizontal at row 3 from column 1 to 3 (heading +x),
        // l=1 vertical at column 2 from row 4 down to 2 (heading -y).
        let link = GridLink::from_slices(&[1, 3, 2, 4], &[1, 3, 4, 2]).unwrap();
        let e = epsilon(&link, 1, 1).unwrap();
        assert!(e.a && e.b);
        assert_eq!(e.value, 1);
        let c = geometric_crossings(&link)
            .into_iter()
            .find(|c| c.under == Component::First && c.at == (2, 3))
            .unwrap();
        assert_eq!(c.sign, 1);
    }

    #[test]
    fn under_crossings_match_epsilon_support() {
        let link = GridLink::from_slices(&[3, 6, 1, 5, 2, 4], &[2, 5, 4, 1, 6, 3]).unwrap();
        let under_one = geometric_crossings(&link)
            .into_iter()
            .filter(|c| c.under == Component::First)
            .count();
        let support = epsilon_table(&link)
            .iter()
            .flatten()
            .filter(|&&e| e != 0)
            .count();
        assert_eq!(under_one, support);
    }
}
