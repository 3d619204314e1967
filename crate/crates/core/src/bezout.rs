//! Shared pieces of the generalized Bezout equation
//! `a(z) p(z) ⋆ a(-z) p(-z) = 2 z^(2i - ℓ)` with `ℓ = 2` for `⋆ = +` and `ℓ = 1` for `⋆ = -`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPolynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BezoutError {
    #[error("symbol has degree zero; the equation needs degree >= 1")]
    DegreeZero,
    #[error("resultant system is singular (coprime margin {margin:e})")]
    SingularSystem { margin: f64 },
    #[error("symbol is not shift-normalized (lowest exponent {low})")]
    NotNormalized { low: i64 },
    #[error("cofactor index {i} outside 1..={n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("Hermite node {node} appears more than once")]
    DuplicateNode { node: Complex64 },
    #[error("Hermite node {node} needs at least one prescribed value")]
    MissingValues { node: Complex64 },
    #[error("roots {a} and {b} are reflections of each other; a(z) and a(-z) share a root")]
    CommonRoot { a: Complex64, b: Complex64 },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// The sign `⋆` joining the two halves of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Star {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Star {
    pub fn ell(self) -> i64 {
        match self {
            Star::Plus => 2,
            Star::Minus => 1,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Star::Plus => 1.0,
            Star::Minus => -1.0,
        }
    }

    /// Exponent `2i - ℓ` of the right-hand side monomial.
    pub fn rhs_exponent(self, i: usize) -> i64 {
        2 * i as i64 - self.ell()
    }
}

impl fmt::Display for Star {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Star::Plus => "+",
            Star::Minus => "-",
        })
    }
}

impl FromStr for Star {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" => Ok(Star::Plus),
            "-" | "minus" => Ok(Star::Minus),
            other => Err(format!("unknown sign {other:?}, expected \"+\" or \"-\"")),
        }
    }
}

/// Largest coefficient of `a(z)p(z) ⋆ a(-z)p(-z) - 2z^(2i-ℓ)`.
pub fn bezout_residual(a_hat: &LaurentPolynomial, p: &LaurentPolynomial, i: usize, star: Star) -> f64 {
    let q = a_hat * p;
    let lhs = &q + &q.reflect().scale(Complex64::new(star.sign(), 0.0));
    let rhs = LaurentPolynomial::monomial(Complex64::new(2.0, 0.0), star.rhs_exponent(i));
    (&lhs - &rhs).max_abs()
}
