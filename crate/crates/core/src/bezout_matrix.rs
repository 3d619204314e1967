//! Matrix-path solver for `â(z)p(z) ⋆ â(-z)p(-z) = 2 z^(2i-ℓ)`.
//!
//! The full resultant `R^± = [R_+ | ±R_-]` is `2n × 2n`. Permuting its rows by
//! the perfect shuffle and multiplying by `G^(-1)` on the right splits it into
//! two `n × n` blocks, one of which (`H^⋆`) carries the whole equation. The
//! solver only ever factors `H^⋆`; the big matrices exist for inspection and
//! for [`ResultantSystem::block_defect`].

use nalgebra::{DMatrix, LU};
use num_complex::Complex64;

use crate::bezout::{bezout_residual, BezoutError, Star};
use crate::laurent::{reflection_resultant, LaurentPolynomial, COPRIME_THRESHOLD};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct ResultantSystem {
    a_hat: LaurentPolynomial,
    n: usize,
    star: Star,
    margin: f64,
    r_plus: DMatrix<Complex64>,
    r_minus: DMatrix<Complex64>,
    h_plus: Option<DMatrix<Complex64>>,
    h_minus: Option<DMatrix<Complex64>>,
}

/// Builds `R^+` and `R^-` for a shift-normalized symbol and records the
/// requested sign and the coprimality margin.
pub fn build_resultant(a_hat: &LaurentPolynomial, star: Star) -> Result<ResultantSystem, BezoutError> {
    if !a_hat.is_zero() && a_hat.low() != 0 {
        return Err(BezoutError::NotNormalized { low: a_hat.low() });
    }
    if a_hat.is_zero() || a_hat.high() < 1 {
        return Err(BezoutError::DegreeZero);
    }
    let n = a_hat.high() as usize;
    let r_plus = reflection_resultant(a_hat, 1.0);
    let r_minus = reflection_resultant(a_hat, -1.0);
    let margin = a_hat.coprime_margin()?;
    Ok(ResultantSystem {
        a_hat: a_hat.clone(),
        n,
        star,
        margin,
        r_plus,
        r_minus,
        h_plus: None,
        h_minus: None,
    })
}

/// Fills `H^+` and `H^-` from their stencils.
pub fn reduce_half(mut sys: ResultantSystem) -> ResultantSystem {
    let n = sys.n;
    let a = |e: i64| sys.a_hat.coeff(e);
    let stencil = |offset: i64| DMatrix::from_fn(n, n, |r, c| a(2 * r as i64 + offset - c as i64));
    sys.h_minus = Some(stencil(1));
    sys.h_plus = Some(stencil(0));
    sys
}

impl ResultantSystem {
    pub fn a_hat(&self) -> &LaurentPolynomial {
        &self.a_hat
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n - 1
    }

    pub fn star(&self) -> Star {
        self.star
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn r(&self, star: Star) -> &DMatrix<Complex64> {
        match star {
            Star::Plus => &self.r_plus,
            Star::Minus => &self.r_minus,
        }
    }

    /// `None` until [`reduce_half`] has run.
    pub fn h(&self, star: Star) -> Option<&DMatrix<Complex64>> {
        match star {
            Star::Plus => self.h_plus.as_ref(),
            Star::Minus => self.h_minus.as_ref(),
        }
    }

    /// Largest deviation of `P R^± G^(-1)` from the expected block layout:
    /// `H^- ⊕ H` for the minus sign, and `H^+` in the lower-left corner with
    /// vanishing diagonal blocks for the plus sign.
    pub fn block_defect(&self, star: Star) -> f64 {
        let n = self.n;
        let reduced = shuffle_matrix(n) * self.r(star) * g_inverse(n);
        let h = match star {
            Star::Minus => self.h_minus.clone(),
            Star::Plus => self.h_plus.clone(),
        }
        .unwrap_or_else(|| reduce_half(self.clone()).h(star).cloned().unwrap());
        let (zero_a, zero_b, h_at) = match star {
            Star::Minus => ((0, n), (n, 0), (0, 0)),
            Star::Plus => ((0, 0), (n, n), (n, 0)),
        };
        let block = |(r0, c0): (usize, usize)| reduced.view((r0, c0), (n, n)).into_owned();
        let mut worst = block(zero_a).iter().map(|c| c.norm()).fold(0.0, f64::max);
        worst = worst.max(block(zero_b).iter().map(|c| c.norm()).fold(0.0, f64::max));
        (block(h_at) - h).iter().map(|c| c.norm()).fold(worst, f64::max)
    }

    /// Dense LU of `H^⋆`, reusable across all indices `i`.
    pub fn factorize(&self, star: Star) -> Result<HalfFactorization, BezoutError> {
        if self.margin < COPRIME_THRESHOLD {
            return Err(BezoutError::SingularSystem { margin: self.margin });
        }
        let h = match self.h(star) {
            Some(h) => h.clone(),
            None => reduce_half(self.clone()).h(star).cloned().unwrap(),
        };
        Ok(HalfFactorization {
            lu: h.lu(),
            n: self.n,
            star,
        })
    }
}

/// Factorized `H^⋆`; column `i` of its inverse is the cofactor `p_i^⋆`.
pub struct HalfFactorization {
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
    star: Star,
}

impl HalfFactorization {
    pub fn solve(&self, i: usize) -> Result<LaurentPolynomial, BezoutError> {
        if i == 0 || i > self.n {
            return Err(BezoutError::IndexOutOfRange { i, n: self.n });
        }
        let mut e = DMatrix::from_element(self.n, 1, ZERO);
        e[(i - 1, 0)] = Complex64::new(1.0, 0.0);
        let x = self
            .lu
            .solve(&e)
            .ok_or(BezoutError::SingularSystem { margin: 0.0 })?;
        Ok(LaurentPolynomial::new(0, x.iter().copied().collect()))
    }

    pub fn star(&self) -> Star {
        self.star
    }
}

/// `p_i^⋆` from the half-size system `H^⋆`.
pub fn solve_matrix(sys: &ResultantSystem, i: usize, star: Star) -> Result<LaurentPolynomial, BezoutError> {
    sys.factorize(star)?.solve(i)
}

/// All cofactors `p_1^⋆ .. p_n^⋆` from one factorization.
pub fn solve_family(sys: &ResultantSystem, star: Star) -> Result<Vec<LaurentPolynomial>, BezoutError> {
    let f = sys.factorize(star)?;
    (1..=sys.n).map(|i| f.solve(i)).collect()
}

/// Convenience wrapper: build, reduce, solve, and report the residual.
pub fn solve_with_residual(a_hat: &LaurentPolynomial, i: usize, star: Star) -> Result<(LaurentPolynomial, f64), BezoutError> {
    let sys = reduce_half(build_resultant(a_hat, star)?);
    let p = solve_matrix(&sys, i, star)?;
    let r = bezout_residual(a_hat, &p, i, star);
    Ok((p, r))
}

/// Perfect shuffle `P = (δ_(i,σ(j)))`: odd positions go to the lower half,
/// even positions to the upper half (1-based).
pub(crate) fn shuffle_matrix(n: usize) -> DMatrix<Complex64> {
    let size = 2 * n;
    let mut p = DMatrix::from_element(size, size, ZERO);
    for j in 1..=size {
        let s = if j % 2 == 1 { (j + 1) / 2 + n } else { j / 2 };
        p[(s - 1, j - 1)] = Complex64::new(1.0, 0.0);
    }
    p
}

fn d_signs(n: usize) -> Vec<f64> {
    (1..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

#[cfg(test)]
/// `G = [[I, -D], [D, I]]` with `D = diag((-1)^1, ..., (-1)^n)`.
pub(crate) fn g_matrix(n: usize) -> DMatrix<Complex64> {
    let d = d_signs(n);
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let v = match (r < n, c < n) {
            (true, true) | (false, false) => f64::from(u8::from(r % n == c % n)),
            (true, false) => if r == c - n { -d[r] } else { 0.0 },
            (false, true) => if r - n == c { d[c] } else { 0.0 },
        };
        Complex64::new(v, 0.0)
    })
}

/// `G^(-1) = ½ [[I, D], [-D, I]]`, using `D² = I`.
pub(crate) fn g_inverse(n: usize) -> DMatrix<Complex64> {
    let d = d_signs(n);
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let v = match (r < n, c < n) {
            (true, true) | (false, false) => f64::from(u8::from(r % n == c % n)),
            (true, false) => if r == c - n { d[r] } else { 0.0 },
            (false, true) => if r - n == c { -d[c] } else { 0.0 },
        };
        Complex64::new(0.5 * v, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn hat_linear() -> LaurentPolynomial {
        LaurentPolynomial::from_real(0, &[0.5, 1.0, 0.5])
    }

    fn b3(v: f64) -> LaurentPolynomial {
        LaurentPolynomial::from_real(0, &[1.0, 2.0, 1.0])
            .multiply(&LaurentPolynomial::from_real(0, &[1.0, 2.0 * v, 1.0]))
            .scale(c(1.0 / (4.0 * (v + 1.0))))
    }

    #[test]
    fn resultant_columns() {
        let sys = build_resultant(&hat_linear(), Star::Minus).unwrap();
        let r = sys.r(Star::Minus);
        assert_eq!(r.shape(), (4, 4));
        let col = |m: &DMatrix<Complex64>, j: usize| m.column(j).iter().map(|z| z.re).collect::<Vec<_>>();
        assert_eq!(col(r, 0), vec![0.5, 1.0, 0.5, 0.0]);
        assert_eq!(col(r, 1), vec![0.0, 0.5, 1.0, 0.5]);
        // reflected block enters with the sign of ⋆
        assert_eq!(col(r, 2), vec![-0.5, 1.0, -0.5, 0.0]);
        assert_eq!(col(sys.r(Star::Plus), 2), vec![0.5, -1.0, 0.5, 0.0]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(
            build_resultant(&LaurentPolynomial::constant(c(2.0)), Star::Plus),
            Err(BezoutError::DegreeZero)
        ));
        assert!(matches!(
            build_resultant(&LaurentPolynomial::from_real(-1, &[1.0, 1.0]), Star::Plus),
            Err(BezoutError::NotNormalized { low: -1 })
        ));
    }

    #[test]
    fn half_system_example() {
        let sys = reduce_half(build_resultant(&hat_linear(), Star::Minus).unwrap());
        let h = sys.h(Star::Minus).unwrap();
        let expect = [[1.0, 0.5], [0.0, 0.5]];
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(h[(r, col)], c(expect[r][col]));
            }
        }
        assert!(sys.block_defect(Star::Minus) < 1e-12);
        assert!(sys.block_defect(Star::Plus) < 1e-12);
    }

    #[test]
    fn g_inverse_is_inverse() {
        for n in 1..6 {
            let prod = g_matrix(n) * g_inverse(n);
            let id = DMatrix::<Complex64>::identity(2 * n, 2 * n);
            assert!((prod - id).iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn shuffle_is_permutation() {
        let p = shuffle_matrix(3);
        for r in 0..6 {
            assert_eq!(p.row(r).iter().filter(|z| z.re == 1.0).count(), 1);
            assert_eq!(p.column(r).iter().filter(|z| z.re == 1.0).count(), 1);
        }
        // row 1 of R (exponent 0) lands in the lower half
        assert_eq!(p[(3, 0)], c(1.0));
        assert_eq!(p[(0, 1)], c(1.0));
    }

    #[test]
    fn linear_scheme_cofactors() {
        let sys = reduce_half(build_resultant(&hat_linear(), Star::Minus).unwrap());
        let fam = solve_family(&sys, Star::Minus).unwrap();
        assert!(fam[0].max_diff(&LaurentPolynomial::one()) < 1e-15);
        assert!(fam[1].max_diff(&LaurentPolynomial::from_real(0, &[-1.0, 2.0])) < 1e-15);
    }

    #[test]
    fn cubic_exponential_cofactor() {
        for v in [0.2, 0.9, 1.0, 3.0] {
            let (p, res) = solve_with_residual(&b3(v), 2, Star::Minus).unwrap();
            let expected = LaurentPolynomial::from_real(0, &[-1.0, 2.0 * (v + 1.0), -1.0]).scale(c(0.5 / v));
            assert!(p.max_diff(&expected) < 1e-13);
            assert!(res < 1e-13);
        }
    }

    #[test]
    fn singular_for_even_symbol() {
        let sys = reduce_half(build_resultant(&LaurentPolynomial::from_real(0, &[1.0, 0.0, -1.0]), Star::Minus).unwrap());
        assert!(sys.margin() < 1e-12);
        assert!(matches!(solve_matrix(&sys, 1, Star::Minus), Err(BezoutError::SingularSystem { .. })));
        let h = sys.h(Star::Minus).unwrap();
        assert!(h.determinant().norm() < 1e-14);
    }

    #[test]
    fn symmetric_symbol_reversal() {
        let a = b3(0.7);
        let sys = reduce_half(build_resultant(&a, Star::Minus).unwrap());
        let n = sys.n();
        let hm = sys.h(Star::Minus).unwrap();
        let hp = sys.h(Star::Plus).unwrap();
        for r in 0..n {
            for col in 0..n {
                assert!((hp[(r, col)] - hm[(n - 1 - r, n - 1 - col)]).norm() < 1e-15);
            }
        }
        let minus = solve_family(&sys, Star::Minus).unwrap();
        let plus = solve_family(&sys, Star::Plus).unwrap();
        for i in 1..=n {
            let mirrored = minus[n - i].invert_argument().shift(n as i64 - 1);
            assert!(plus[i - 1].max_diff(&mirrored) < 1e-12);
        }
    }

    #[test]
    fn index_bounds() {
        let sys = reduce_half(build_resultant(&hat_linear(), Star::Plus).unwrap());
        assert!(matches!(solve_matrix(&sys, 3, Star::Plus), Err(BezoutError::IndexOutOfRange { i: 3, n: 2 })));
    }
}
