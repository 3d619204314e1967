//! Laurent polynomials with complex coefficients.
//!
//! Masks, symbols, sub-symbols and Bezout cofactors are all stored as a dense
//! coefficient vector together with the exponent of the first coefficient.
//! Leading and trailing coefficients below [`TRIM_TOL`] are dropped on
//! construction, so the stored span is always tight.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Absolute threshold used to trim leading/trailing coefficients.
pub const TRIM_TOL: f64 = 1e-13;

/// Largest imaginary part tolerated by [`LaurentPolynomial::realify`].
pub const REAL_TOL: f64 = 1e-12;

/// Default threshold on [`LaurentPolynomial::coprime_margin`] below which a
/// symbol and its reflection are treated as sharing a root.
pub const COPRIME_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error("cannot evaluate at z = 0: polynomial has negative exponents (low = {low})")]
    ZeroArgument { low: i64 },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("coefficient at z^{exponent} has imaginary part {imag:e}, above the realification tolerance")]
    NotReal { exponent: i64, imag: f64 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division needs non-negative exponents")]
    NotPolynomial,
}

/// A finite Laurent polynomial `sum_j coeffs[j] z^(low + j)`.
#[derive(Clone, PartialEq, Default)]
pub struct LaurentPolynomial {
    low: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentPolynomial {
    /// Builds a polynomial, trimming with the default threshold.
    pub fn new(low: i64, coeffs: Vec<Complex64>) -> Self {
        Self::with_trim(low, coeffs, TRIM_TOL)
    }

    pub fn with_trim(low: i64, mut coeffs: Vec<Complex64>, tol: f64) -> Self {
        let Some(last) = coeffs.iter().rposition(|c| c.norm() > tol) else {
            return Self::zero();
        };
        coeffs.truncate(last + 1);
        let first = coeffs.iter().position(|c| c.norm() > tol).unwrap_or(0);
        coeffs.drain(..first);
        Self {
            low: low + first as i64,
            coeffs,
        }
    }

    pub fn from_real(low: i64, coeffs: &[f64]) -> Self {
        Self::new(low, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            low: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(0, vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `c z^exponent`
    pub fn monomial(c: Complex64, exponent: i64) -> Self {
        Self::new(exponent, vec![c])
    }

    /// The monic linear factor `z - root`.
    pub fn linear(root: Complex64) -> Self {
        Self::new(0, vec![-root, Complex64::new(1.0, 0.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first stored coefficient.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Exponent of the last stored coefficient (equal to `low` for the zero polynomial).
    pub fn high(&self) -> i64 {
        self.low + (self.coeffs.len() as i64 - 1).max(0)
    }

    /// `high - low`, i.e. the degree once shifted to start at `z^0`.
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^exponent` (zero outside the stored window).
    pub fn coeff(&self, exponent: i64) -> Complex64 {
        let idx = exponent - self.low;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `z^e · p(z)`
    pub fn shift(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            low: self.low + e,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `p(-z)`
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| if (self.low + j as i64) % 2 == 0 { c } else { -c })
            .collect();
        Self {
            low: self.low,
            coeffs,
        }
    }

    /// `p(1/z)`
    pub fn invert_argument(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            low: -self.high(),
            coeffs,
        }
    }

    /// Coefficient convolution.
    pub fn multiply(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.low + other.low, out)
    }

    /// `p^e` by repeated multiplication.
    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.multiply(self))
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.is_zero() {
            return other.scale(Complex64::new(sign, 0.0));
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        let coeffs = (low..=high)
            .map(|e| self.coeff(e) + other.coeff(e) * sign)
            .collect();
        Self::new(low, coeffs)
    }

    /// r-th derivative at `z`, computed term by term with falling-factorial weights.
    pub fn evaluate(&self, z: Complex64, r: usize) -> Result<Complex64, LaurentError> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if z == Complex64::new(0.0, 0.0) {
            if self.low < 0 {
                return Err(LaurentError::ZeroArgument { low: self.low });
            }
            // only the z^r term survives
            return Ok(self.coeff(r as i64) * falling_factorial(r as i64, r));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in self.coeffs.iter().enumerate() {
            let e = self.low + j as i64;
            let w = falling_factorial(e, r);
            if w != 0.0 {
                acc += c * w * z.powi((e - r as i64) as i32);
            }
        }
        Ok(acc)
    }

    /// Value at `z` (shorthand for `evaluate(z, 0)`).
    pub fn value(&self, z: Complex64) -> Result<Complex64, LaurentError> {
        self.evaluate(z, 0)
    }

    /// Splits `p(z) = even(z^2) + z·odd(z^2)`.
    pub fn sub_symbols(&self) -> (Self, Self) {
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let even_low = self.low.div_euclid(2) + self.low.rem_euclid(2);
        let odd_low = (self.low - 1).div_euclid(2) + (self.low - 1).rem_euclid(2);
        let even_high = self.high().div_euclid(2);
        let odd_high = (self.high() - 1).div_euclid(2);
        let even = (even_low..=even_high).map(|j| self.coeff(2 * j)).collect();
        let odd = (odd_low..=odd_high).map(|j| self.coeff(2 * j + 1)).collect();
        (
            Self::with_trim(even_low, even, 0.0),
            Self::with_trim(odd_low, odd, 0.0),
        )
    }

    /// Residual of `p(z) + p(-z) - 2`, as the largest coefficient magnitude,
    /// and whether it is within `tol`.
    pub fn is_interpolatory(&self, tol: f64) -> (bool, f64) {
        let residual = interpolation_residual(self);
        (residual <= tol, residual)
    }

    /// Shifts so the first coefficient sits at `z^0`; returns `(z^kappa p, kappa)`.
    pub fn shift_normalize(&self) -> Result<(Self, i64), LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        let kappa = -self.low;
        Ok((self.shift(kappa), kappa))
    }

    /// Ratio of smallest to largest singular value of the resultant matrix of
    /// `(a(z), a(-z))`. Values near zero mean the pair shares a root.
    ///
    /// The polynomial is shift-normalized first, so a factor `z^j` does not
    /// count as a common root. Constants have no roots and get margin 1.
    pub fn coprime_margin(&self) -> Result<f64, LaurentError> {
        let (a_hat, _) = self.shift_normalize()?;
        if a_hat.span() == 0 {
            return Ok(1.0);
        }
        let r = reflection_resultant(&a_hat, 1.0);
        Ok(singular_value_ratio(&r))
    }

    /// Drops imaginary parts, failing if any exceeds [`REAL_TOL`].
    pub fn realify(&self) -> Result<Self, LaurentError> {
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.im.abs() > REAL_TOL {
                return Err(LaurentError::NotReal {
                    exponent: self.low + j as i64,
                    imag: c.im,
                });
            }
        }
        Ok(Self::new(
            self.low,
            self.coeffs.iter().map(|c| Complex64::new(c.re, 0.0)).collect(),
        ))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    /// Real parts of the coefficients.
    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    /// Largest coefficientwise distance to `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let low = if self.is_zero() {
            other.low
        } else if other.is_zero() {
            self.low
        } else {
            self.low.min(other.low)
        };
        let high = self.high().max(other.high());
        (low..=high)
            .map(|e| (self.coeff(e) - other.coeff(e)).norm())
            .fold(0.0, f64::max)
    }

    /// Polynomial long division; both operands must have `low >= 0`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), LaurentError> {
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok((Self::zero(), Self::zero()));
        }
        if self.low < 0 || divisor.low < 0 {
            return Err(LaurentError::NotPolynomial);
        }
        let num: Vec<Complex64> = (0..=self.high()).map(|e| self.coeff(e)).collect();
        let den: Vec<Complex64> = (0..=divisor.high()).map(|e| divisor.coeff(e)).collect();
        let dn = den.len() - 1;
        if num.len() <= dn {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = den[dn];
        let mut rem = num;
        let mut quot = vec![Complex64::new(0.0, 0.0); rem.len() - dn];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dn] / lead;
            quot[i] = q;
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= q * d;
            }
        }
        rem.truncate(dn);
        Ok((Self::new(0, quot), Self::new(0, rem)))
    }
}

fn interpolation_residual(p: &LaurentPolynomial) -> f64 {
    // p(z) + p(-z) - 2 keeps only even exponents, each doubled.
    let mut worst = (2.0 * p.coeff(0) - Complex64::new(2.0, 0.0)).norm();
    for (j, &c) in p.coeffs.iter().enumerate() {
        let e = p.low + j as i64;
        if e % 2 == 0 && e != 0 {
            worst = worst.max(2.0 * c.norm());
        }
    }
    worst
}

/// `j (j-1) ... (j-r+1)`, valid for negative `j`.
pub(crate) fn falling_factorial(j: i64, r: usize) -> f64 {
    (0..r as i64).map(|t| (j - t) as f64).product()
}

/// Resultant matrix `[R_+ | sign·R_-]` of `(a(z), a(-z))` for a polynomial of
/// degree `n`: `2n × 2n`, column `j < n` holds the coefficients of `a` shifted
/// down by `j`, column `n + j` those of `a(-z)` (times `sign`) shifted by `j`.
pub(crate) fn reflection_resultant(a_hat: &LaurentPolynomial, sign: f64) -> DMatrix<Complex64> {
    let n = a_hat.high() as usize;
    let size = 2 * n;
    let plus: Vec<Complex64> = (0..=n as i64).map(|e| a_hat.coeff(e)).collect();
    let minus: Vec<Complex64> = plus
        .iter()
        .enumerate()
        .map(|(e, &c)| if e % 2 == 0 { c } else { -c })
        .collect();
    let mut r = DMatrix::zeros(size, size);
    for j in 0..n {
        for (e, (&cp, &cm)) in plus.iter().zip(&minus).enumerate() {
            r[(e + j, j)] = cp;
            r[(e + j, n + j)] = cm * sign;
        }
    }
    r
}

pub(crate) fn singular_value_ratio(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent[low={}; ", self.low)?;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "{}{:+}i", c.re, c.im)?;
            }
        }
        write!(f, "]")
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        self.multiply(rhs)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    low: i64,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LaurentRepr {
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = LaurentRepr::deserialize(deserializer)?;
        Ok(Self::new(
            repr.low,
            repr.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dd4() -> LaurentPolynomial {
        LaurentPolynomial::from_real(-3, &[-1.0, 0.0, 9.0, 16.0, 9.0, 0.0, -1.0]).scale(c(1.0 / 16.0))
    }

    #[test]
    fn multiply_examples() {
        let a = LaurentPolynomial::from_real(0, &[1.0, 1.0]);
        let b = LaurentPolynomial::from_real(0, &[1.0, -1.0]);
        assert_eq!(&a * &b, LaurentPolynomial::from_real(0, &[1.0, 0.0, -1.0]));

        let sq = LaurentPolynomial::from_real(0, &[1.0, 2.0, 1.0]);
        assert_eq!(a.pow(2).multiply(&sq), a.pow(4));

        let half_sq = sq.scale(c(0.5));
        let lin = LaurentPolynomial::from_real(0, &[-1.0, 2.0]);
        let expected = LaurentPolynomial::from_real(0, &[-0.5, 0.0, 1.5, 1.0]);
        assert!((&half_sq * &lin).max_diff(&expected) < 1e-15);
    }

    #[test]
    fn multiply_offsets_add() {
        let a = LaurentPolynomial::from_real(-2, &[1.0, 3.0]);
        let b = LaurentPolynomial::from_real(5, &[2.0]);
        let p = &a * &b;
        assert_eq!(p.low(), 3);
        assert_eq!(p.coeffs(), &[c(2.0), c(6.0)]);
    }

    #[test]
    fn evaluate_examples() {
        let dd = dd4();
        let d1 = dd.evaluate(c(1.0), 1).unwrap();
        assert!(d1.norm() < 1e-15);
        assert!((dd.evaluate(c(1.0), 0).unwrap() - c(2.0)).norm() < 1e-15);
        assert_eq!(
            LaurentPolynomial::zero().evaluate(c(3.0), 2).unwrap(),
            c(0.0)
        );
        // second derivative of z^-1 at 2 is 2 z^-3 = 1/4
        let inv = LaurentPolynomial::monomial(c(1.0), -1);
        assert!((inv.evaluate(c(2.0), 2).unwrap() - c(0.25)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_at_zero() {
        let p = LaurentPolynomial::from_real(0, &[1.0, 2.0, 3.0]);
        assert_eq!(p.evaluate(c(0.0), 0).unwrap(), c(1.0));
        assert_eq!(p.evaluate(c(0.0), 2).unwrap(), c(6.0));
        assert_eq!(
            dd4().evaluate(c(0.0), 0),
            Err(LaurentError::ZeroArgument { low: -3 })
        );
    }

    #[test]
    fn sub_symbol_examples() {
        let p = LaurentPolynomial::from_real(0, &[1.0, 1.0]);
        let (e, o) = p.sub_symbols();
        assert_eq!(e, LaurentPolynomial::one());
        assert_eq!(o, LaurentPolynomial::one());

        let (e, o) = dd4().sub_symbols();
        assert_eq!(e, LaurentPolynomial::one());
        assert_eq!(o.low(), -2);
        assert_eq!(o.span(), 3);
    }

    #[test]
    fn interpolatory_examples() {
        assert_eq!(dd4().is_interpolatory(1e-12), (true, 0.0));
        let b3 = LaurentPolynomial::from_real(0, &[1.0, 4.0, 6.0, 4.0, 1.0]).scale(c(0.125));
        let (flag, residual) = b3.is_interpolatory(1e-9);
        assert!(!flag);
        assert!((residual - 1.75).abs() < 1e-15);
        let m = LaurentPolynomial::from_real(-3, &[-1.0, 0.0, 3.0, 2.0]).scale(c(0.5));
        assert_eq!(m.is_interpolatory(1e-12), (true, 0.0));
    }

    #[test]
    fn shift_normalize_examples() {
        let m = LaurentPolynomial::from_real(-3, &[-1.0, 0.0, 3.0, 2.0]).scale(c(0.5));
        let (p, kappa) = m.shift_normalize().unwrap();
        assert_eq!(kappa, 3);
        assert_eq!(p.low(), 0);
        assert_eq!(p, LaurentPolynomial::from_real(0, &[-0.5, 0.0, 1.5, 1.0]));

        let q = LaurentPolynomial::from_real(0, &[1.0, 2.0]);
        assert_eq!(q.shift_normalize().unwrap(), (q.clone(), 0));
        assert_eq!(
            LaurentPolynomial::zero().shift_normalize(),
            Err(LaurentError::ZeroPolynomial)
        );
    }

    #[test]
    fn coprime_margin_examples() {
        let sq = LaurentPolynomial::from_real(0, &[1.0, 2.0, 1.0]);
        assert!(sq.coprime_margin().unwrap() > 1e-3);
        let even = LaurentPolynomial::from_real(0, &[1.0, 0.0, -1.0]);
        assert!(even.coprime_margin().unwrap() < 1e-12);
        // alpha = 0, beta = 1/2 five-term factor: z (1 + z^2) / 2
        let factor = LaurentPolynomial::from_real(0, &[0.0, 0.5, 0.0, 0.5, 0.0]);
        assert_eq!(factor.low(), 1);
        assert!(factor.coprime_margin().unwrap() < 1e-12);
    }

    #[test]
    fn div_rem_recovers_factors() {
        let a = LaurentPolynomial::from_real(0, &[1.0, 2.0, 1.0]);
        let b = LaurentPolynomial::from_real(0, &[-3.0, 0.5, 2.0]);
        let r = LaurentPolynomial::from_real(0, &[0.25, -1.0]);
        let n = &(&a * &b) + &r;
        let (q, rem) = n.div_rem(&a).unwrap();
        assert!(q.max_diff(&b) < 1e-14);
        assert!(rem.max_diff(&r) < 1e-14);
    }

    #[test]
    fn realify_rejects_complex() {
        let p = LaurentPolynomial::new(0, vec![c(1.0), Complex64::new(1.0, 1e-3)]);
        assert!(matches!(p.realify(), Err(LaurentError::NotReal { exponent: 1, .. })));
        let q = LaurentPolynomial::new(0, vec![c(1.0), Complex64::new(1.0, 1e-14)]);
        assert!(q.realify().unwrap().is_real(0.0));
    }

    #[test]
    fn json_shape() {
        let p = LaurentPolynomial::new(-1, vec![c(0.5), Complex64::new(1.0, -2.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"low":-1,"coeffs":[[0.5,0.0],[1.0,-2.0]]}"#);
        let back: LaurentPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    fn poly_strategy() -> impl Strategy<Value = LaurentPolynomial> {
        (
            -5i64..5,
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..13),
        )
            .prop_map(|(low, cs)| {
                LaurentPolynomial::new(low, cs.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
            })
    }

    fn nonzero_point() -> impl Strategy<Value = Complex64> {
        (0.3f64..1.7, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn multiply_commutes_and_associates(p in poly_strategy(), q in poly_strategy(), r in poly_strategy()) {
            prop_assert!((&p * &q).max_diff(&(&q * &p)) <= 1e-13);
            let left = &(&p * &q) * &r;
            let right = &p * &(&q * &r);
            prop_assert!(left.max_diff(&right) <= 1e-13 * (1.0 + left.max_abs()));
        }

        #[test]
        fn evaluation_is_multiplicative(p in poly_strategy(), q in poly_strategy(), z in nonzero_point()) {
            let lhs = (&p * &q).value(z).unwrap();
            let rhs = p.value(z).unwrap() * q.value(z).unwrap();
            let scale = rhs.norm().max(1e-3);
            prop_assert!((lhs - rhs).norm() / scale <= 1e-11);
        }

        #[test]
        fn sub_symbols_recombine(p in poly_strategy(), z in nonzero_point()) {
            let (even, odd) = p.sub_symbols();
            let z2 = z * z;
            let recombined = even.value(z2).unwrap() + z * odd.value(z2).unwrap();
            prop_assert!((recombined - p.value(z).unwrap()).norm() <= 1e-12 * (1.0 + p.max_abs()));
            // exact reindexing
            for e in p.low()..=p.high() {
                let expected = if e % 2 == 0 { even.coeff(e.div_euclid(2)) } else { odd.coeff((e - 1).div_euclid(2)) };
                prop_assert_eq!(p.coeff(e), expected);
            }
        }

        #[test]
        fn interpolatory_iff_even_part_is_one(p in poly_strategy(), flip in any::<bool>()) {
            // Make half of the samples interpolatory by overwriting the even part.
            let p = if flip {
                let (_, odd) = p.sub_symbols();
                let odd_part = LaurentPolynomial::new(
                    2 * odd.low() + 1,
                    odd.coeffs().iter().flat_map(|&c| [c, Complex64::new(0.0, 0.0)]).collect(),
                );
                &odd_part + &LaurentPolynomial::one()
            } else { p };
            let tol = 1e-9;
            let (flag, _) = p.is_interpolatory(tol);
            let (even, _) = p.sub_symbols();
            let even_is_one = even.max_diff(&LaurentPolynomial::one()) <= tol;
            prop_assert_eq!(flag, even_is_one);
        }

        #[test]
        fn margin_is_scale_invariant(p in poly_strategy(), s in 0.01f64..100.0) {
            prop_assume!(p.span() >= 1);
            let m1 = p.coprime_margin().unwrap();
            let m2 = p.scale(Complex64::new(s, 0.0)).coprime_margin().unwrap();
            prop_assert!((m1 - m2).abs() <= 1e-9 * m1.max(1e-6) + 1e-14);
        }
    }
}
