//! Exact rationals and moment polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// Canonical `num/den` form; zero is `0/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(m: usize) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `E[lk^u](n)` as an exact polynomial in `n`, valid for `n >= n_valid`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    pub u: usize,
    /// Ascending degree, trailing zeros trimmed.
    pub coefficients: Vec<Rational>,
    pub n_valid: usize,
}

impl MomentPolynomial {
    pub fn new(u: usize, mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Self {
            u,
            coefficients,
            n_valid: u + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficient(&self, d: usize) -> Rational {
        self.coefficients
            .get(d)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `n^u`, the limit of `E[(lk/n)^u]`.
    pub fn leading(&self) -> Rational {
        self.coefficient(self.u)
    }

    pub fn eval(&self, n: usize) -> Rational {
        let x = Rational::from_integer(BigInt::from(n));
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &x + c)
    }

    /// Human-readable form such as `1/36 n^2`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (d, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let body = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            match d {
                0 => out.push_str(&body),
                1 => out.push_str(&format!("{body} n")),
                _ => out.push_str(&format!("{body} n^{d}")),
            }
        }
        out
    }
}

/// Adds `scale * prod(factors)` into `acc`, where each factor is an integer
/// polynomial in ascending degree.
pub(crate) fn add_scaled_product(
    acc: &mut Vec<Rational>,
    scale: &Rational,
    a: &[BigInt],
    b: &[BigInt],
) {
    let need = a.len() + b.len() - 1;
    if acc.len() < need {
        acc.resize(need, Rational::zero());
    }
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc[i + j] += scale * Rational::from_integer(ai * bj);
        }
    }
}

/// JSON shape for moment reports: exact values as `num/den` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentReport {
    pub u: usize,
    pub coefficients: Vec<String>,
    pub n_valid: usize,
    pub a_u: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PairEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub p: String,
    pub q: String,
    pub inner_sum: String,
}

impl MomentReport {
    pub fn from_polynomial(poly: &MomentPolynomial) -> Self {
        Self {
            u: poly.u,
            coefficients: poly.coefficients.iter().map(format_rational).collect(),
            n_valid: poly.n_valid,
            a_u: format_rational(&poly.leading()),
            pairs: None,
        }
    }
}
