//! Random 2-component links in the grid model.
//!
//! A link is given by two permutations of `{1..2n}`. This crate computes
//! linking numbers two ways, enumerates index-sequence types, derives the
//! exact moment polynomials `E[lk^u](n)`, and estimates the same moments by
//! Monte Carlo sampling, with a brute-force oracle for small `n`.

pub mod grid;
pub mod linking;
pub mod moments;
pub mod oracle;
pub mod render;
pub mod sampler;
pub mod types;
pub mod verify;

pub use grid::{Component, GridError, GridLink, LatticePath, Permutation};
pub use linking::{linking_number, linking_number_geometric, CrossingSign, LinkingError};
pub use types::{enumerate_types, type_of, SequenceType, TypeCensus, TypeError};
