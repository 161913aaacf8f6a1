//! Counting linear orders of a finite symbol set under strict `a < b`
//! constraints.

use serde::{Deserialize, Serialize};

use super::MomentError;

/// Hard ceiling for the downset table (`2^22` counters).
pub const DP_HARD_LIMIT: usize = 22;

/// Largest symbol count the permutation scan accepts.
pub const EXHAUSTIVE_LIMIT: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OrderingMethod {
    /// Downset dynamic programming.
    #[default]
    DownsetDp,
    /// Scan every permutation of the symbols.
    Exhaustive,
    /// Run both and fail on disagreement.
    CrossCheck,
}

/// Named symbols with strict-inequality constraints between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolOrder {
    pub symbols: Vec<String>,
    /// `(a, b)` means `symbols[a] < symbols[b]`.
    pub constraints: Vec<(usize, usize)>,
}

impl SymbolOrder {
    pub fn new(symbols: Vec<String>) -> Self {
        Self {
            symbols,
            constraints: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Adds `a < b < c`.
    pub fn chain3(&mut self, a: usize, b: usize, c: usize) {
        self.constraints.push((a, b));
        self.constraints.push((b, c));
    }

    pub fn count(&self, method: OrderingMethod) -> Result<u128, MomentError> {
        self.validate()?;
        match method {
            OrderingMethod::DownsetDp => self.count_dp(),
            OrderingMethod::Exhaustive => self.count_exhaustive(),
            OrderingMethod::CrossCheck => {
                let dp = self.count_dp()?;
                let scan = self.count_exhaustive()?;
                if dp != scan {
                    return Err(MomentError::CountMismatch { dp, scan });
                }
                Ok(dp)
            }
        }
    }

    fn validate(&self) -> Result<(), MomentError> {
        for &(a, b) in &self.constraints {
            assert!(
                a < self.len() && b < self.len() && a != b,
                "constraint ({a}, {b}) on {} symbols",
                self.len()
            );
        }
        Ok(())
    }

    /// `dp[S]` counts orderings of the symbols in `S` that can open a valid
    /// full order, i.e. `S` is a downset.
    pub fn count_dp(&self) -> Result<u128, MomentError> {
        let m = self.len();
        if m > DP_HARD_LIMIT {
            return Err(MomentError::TooManySymbols {
                count: m,
                limit: DP_HARD_LIMIT,
            });
        }
        let mut preds = vec![0u32; m];
        for &(a, b) in &self.constraints {
            preds[b] |= 1 << a;
        }
        let full = (1usize << m) - 1;
        let mut dp = vec![0u128; full + 1];
        dp[0] = 1;
        for mask in 0..full {
            let ways = dp[mask];
            if ways == 0 {
                continue;
            }
            for (j, &p) in preds.iter().enumerate() {
                let bit = 1usize << j;
                if mask & bit == 0 && (p as usize) & !mask == 0 {
                    dp[mask | bit] += ways;
                }
            }
        }
        Ok(dp[full])
    }

    /// Brute force over all `m!` orders (Heap's algorithm).
    pub fn count_exhaustive(&self) -> Result<u128, MomentError> {
        let m = self.len();
        if m > EXHAUSTIVE_LIMIT {
            return Err(MomentError::TooManySymbols {
                count: m,
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        let mut order: Vec<usize> = (0..m).collect();
        let mut pos = vec![0usize; m];
        let mut count = 0u128;
        let mut check = |order: &[usize]| {
            for (p, &s) in order.iter().enumerate() {
                pos[s] = p;
            }
            if self.constraints.iter().all(|&(a, b)| pos[a] < pos[b]) {
                count += 1;
            }
        };
        check(&order);
        let mut c = vec![0usize; m];
        let mut i = 1;
        while i < m {
            if c[i] < i {
                if i % 2 == 0 {
                    order.swap(0, i);
                } else {
                    order.swap(c[i], i);
                }
                check(&order);
                c[i] += 1;
                i = 1;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn named(m: usize) -> SymbolOrder {
        SymbolOrder::new((0..m).map(|i| format!("s{i}")).collect())
    }

    #[test]
    fn unconstrained_is_factorial() {
        for m in 0..8 {
            let f: u128 = (1..=m as u128).product();
            assert_eq!(named(m).count_dp().unwrap(), f);
            assert_eq!(named(m).count_exhaustive().unwrap(), f);
        }
    }

    #[test]
    fn chains_and_cycles() {
        let mut s = named(3);
        s.chain3(0, 1, 2);
        assert_eq!(s.count(OrderingMethod::CrossCheck).unwrap(), 1);
        s.constraints.push((2, 0));
        assert_eq!(s.count(OrderingMethod::CrossCheck).unwrap(), 0);
    }

    #[test]
    fn limits() {
        assert!(matches!(
            named(EXHAUSTIVE_LIMIT + 1).count_exhaustive(),
            Err(MomentError::TooManySymbols { .. })
        ));
        assert!(matches!(
            named(DP_HARD_LIMIT + 1).count_dp(),
            Err(MomentError::TooManySymbols { .. })
        ));
    }

    proptest! {
        #[test]
        fn dp_agrees_with_scan(
            m in 1usize..8,
            raw in proptest::collection::vec((0usize..8, 0usize..8), 0..10)
        ) {
            let mut s = named(m);
            s.constraints = raw
                .into_iter()
                .map(|(a, b)| (a % m, b % m))
                .filter(|(a, b)| a != b)
                .collect();
            prop_assert_eq!(s.count_dp().unwrap(), s.count_exhaustive().unwrap());
        }
    }
}
