//! Root-based solver for the Bezout equation when the symbol is known in
//! factored form `a(z) = a_n ∏ (z - z_j)^(k_j)`.
//!
//! Two backends are provided, plus [`RootBackend::Adaptive`] which runs the
//! first and falls back to the second when its residual is poor:
//!
//! * [`RootBackend::PartialFractions`]: closed-form partial fraction assembly.
//!   The coefficients `c_(i,j)` are Taylor coefficients of
//!   `2 z^s / ω_i(z)` at each root. Exact in exact arithmetic, but the
//!   coefficients blow up like `1/δ^k` when roots cluster.
//! * [`RootBackend::IncompletePartialFractions`]: the cofactor `k(z)` of
//!   `1/(a(z)a(-z)) = h/a + k/a(-z)` is obtained by Hermite interpolation of
//!   `1/a` on the zeros of `a(-z)`, then `p` by interpolating `2 z^s k(z)` on the
//!   same nodes. Divided differences are taken through the bidiagonal
//!   node matrix, so clustered roots of `a` cost nothing in accuracy as long
//!   as they stay away from the reflected nodes. Two rounds of iterative
//!   refinement with the same cofactor clean up the conversion from Newton
//!   to monomial form.

use num_complex::Complex64;

use crate::bezout::{bezout_residual, BezoutError, Star};
use crate::laurent::LaurentPolynomial;

/// Roots closer than this (relative to `max(1, |z|)`) are merged into one
/// root of the combined multiplicity.
pub const ROOT_MERGE_TOL: f64 = 1e-8;

/// Reflection pairs `z_i + z_j` smaller than this mean a common root.
pub const COMMON_ROOT_TOL: f64 = 1e-10;

/// Refinement rounds used by the cofactor backend.
pub const REFINEMENT_STEPS: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A polynomial symbol given by its leading coefficient and roots.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredSymbol {
    leading: Complex64,
    roots: Vec<(Complex64, usize)>,
    kappa: i64,
}

impl FactoredSymbol {
    /// Builds the symbol `leading · ∏ (z - root)^mult`, merging roots that
    /// agree within [`ROOT_MERGE_TOL`] at their multiplicity-weighted mean.
    /// Zero multiplicities are dropped.
    pub fn new(leading: Complex64, roots: impl IntoIterator<Item = (Complex64, usize)>, kappa: i64) -> Self {
        let mut merged: Vec<(Complex64, usize)> = Vec::new();
        for (z, k) in roots.into_iter().filter(|&(_, k)| k > 0) {
            let hit = merged
                .iter_mut()
                .find(|(w, _)| (*w - z).norm() <= ROOT_MERGE_TOL * w.norm().max(1.0));
            match hit {
                Some((w, m)) => {
                    let total = (*m + k) as f64;
                    *w = (*w * *m as f64 + z * k as f64) / total;
                    *m += k;
                }
                None => merged.push((z, k)),
            }
        }
        Self {
            leading,
            roots: merged,
            kappa,
        }
    }

    pub fn leading(&self) -> Complex64 {
        self.leading
    }

    pub fn roots(&self) -> &[(Complex64, usize)] {
        &self.roots
    }

    /// Shift recorded when the symbol was normalized from a Laurent form.
    pub fn kappa(&self) -> i64 {
        self.kappa
    }

    pub fn degree(&self) -> usize {
        self.roots.iter().map(|&(_, k)| k).sum()
    }

    /// Dense coefficient form (starting at `z^0`).
    pub fn expand(&self) -> LaurentPolynomial {
        self.roots
            .iter()
            .fold(LaurentPolynomial::constant(self.leading), |acc, &(z, k)| {
                acc.multiply(&LaurentPolynomial::linear(z).pow(k))
            })
    }

    /// Product with another factored symbol (roots concatenated and re-merged).
    pub fn times(&self, other: &FactoredSymbol) -> FactoredSymbol {
        FactoredSymbol::new(
            self.leading * other.leading,
            self.roots.iter().chain(other.roots.iter()).copied(),
            self.kappa + other.kappa,
        )
    }

    /// Drops roots at the origin, i.e. divides by `z^j`; returns the quotient
    /// and `j`. The recorded shift becomes `kappa - j`.
    pub fn strip_origin(&self) -> (FactoredSymbol, usize) {
        let (zero, rest): (Vec<_>, Vec<_>) = self.roots.iter().partition(|(z, _)| z.norm() < 1e-14);
        let j = zero.iter().map(|&(_, k)| k).sum();
        (
            FactoredSymbol {
                leading: self.leading,
                roots: rest,
                kappa: self.kappa - j as i64,
            },
            j,
        )
    }

    /// Fails with [`BezoutError::CommonRoot`] if some `z_i = -z_j`.
    pub fn check_coprime(&self) -> Result<(), BezoutError> {
        for &(a, _) in &self.roots {
            for &(b, _) in &self.roots {
                if (a + b).norm() < COMMON_ROOT_TOL {
                    return Err(BezoutError::CommonRoot { a, b });
                }
            }
        }
        Ok(())
    }

    /// Zeros of `a(-z)` with multiplicity, in Leja order (each next group
    /// maximizes the product of distances to the nodes already placed), which
    /// keeps the Newton form well conditioned.
    fn reflected_nodes(&self) -> Vec<Complex64> {
        let mut left: Vec<(Complex64, usize)> = self.roots.iter().map(|&(z, k)| (-z, k)).collect();
        let mut nodes: Vec<Complex64> = Vec::with_capacity(self.degree());
        while !left.is_empty() {
            let score = |x: Complex64| -> f64 {
                if nodes.is_empty() {
                    x.norm()
                } else {
                    nodes.iter().map(|&y| (x - y).norm().ln()).sum()
                }
            };
            let (best, _) = left
                .iter()
                .enumerate()
                .map(|(idx, &(x, _))| (idx, score(x)))
                .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let (x, k) = left.swap_remove(best);
            nodes.extend(std::iter::repeat(x).take(k));
        }
        nodes
    }

    fn check_index(&self, i: usize) -> Result<usize, BezoutError> {
        let n = self.degree();
        if n == 0 {
            return Err(BezoutError::DegreeZero);
        }
        if i == 0 || i > n {
            return Err(BezoutError::IndexOutOfRange { i, n });
        }
        Ok(n)
    }
}

/// One interpolation node with its prescribed derivatives
/// `values[j] = f^(j)(node)`; the multiplicity is `values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteNode {
    pub node: Complex64,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HermiteData {
    pub nodes: Vec<HermiteNode>,
}

impl HermiteData {
    /// Degree bound plus one (total number of conditions).
    pub fn conditions(&self) -> usize {
        self.nodes.iter().map(|n| n.values.len()).sum()
    }
}

/// Hermite–Lagrange interpolant in monomial form, via Newton divided
/// differences on the confluent node sequence.
pub fn hermite_lagrange(data: &HermiteData) -> Result<LaurentPolynomial, BezoutError> {
    for (a, na) in data.nodes.iter().enumerate() {
        if na.values.is_empty() {
            return Err(BezoutError::MissingValues { node: na.node });
        }
        if data.nodes[..a].iter().any(|nb| nb.node == na.node) {
            return Err(BezoutError::DuplicateNode { node: na.node });
        }
    }
    let mut xs = Vec::new();
    let mut group = Vec::new();
    for (g, n) in data.nodes.iter().enumerate() {
        for _ in 0..n.values.len() {
            xs.push(n.node);
            group.push(g);
        }
    }
    let len = xs.len();
    if len == 0 {
        return Ok(LaurentPolynomial::zero());
    }
    let mut dd: Vec<Complex64> = group.iter().map(|&g| data.nodes[g].values[0]).collect();
    let mut fact = 1.0;
    for j in 1..len {
        fact *= j as f64;
        for i in (j..len).rev() {
            dd[i] = if group[i] == group[i - j] {
                data.nodes[group[i]].values[j] / fact
            } else {
                (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
            };
        }
    }
    Ok(newton_to_monomial(&xs, &dd))
}

/// `d_0 + d_1 (z - x_0) + d_2 (z - x_0)(z - x_1) + ...` in monomial form.
pub(crate) fn newton_to_monomial(xs: &[Complex64], dd: &[Complex64]) -> LaurentPolynomial {
    let Some((&last, rest)) = dd.split_last() else {
        return LaurentPolynomial::zero();
    };
    // Horner in coefficient space, highest degree first
    let mut acc = vec![last];
    for (k, &d) in rest.iter().enumerate().rev() {
        let x = xs[k];
        let mut next = vec![ZERO; acc.len() + 1];
        for (e, &c) in acc.iter().enumerate() {
            next[e + 1] += c;
            next[e] -= c * x;
        }
        next[0] += d;
        acc = next;
    }
    LaurentPolynomial::new(0, acc)
}

/// Bidiagonal node matrix `J` (nodes on the diagonal, ones above) acting on
/// row vectors. The first row of `f(J)` lists the divided differences
/// `f[x_0], f[x_0,x_1], ...` of `f` on the node sequence, confluent or not.
struct NodeMatrix<'a> {
    xs: &'a [Complex64],
}

impl NodeMatrix<'_> {
    fn unit_row(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.xs.len()];
        if let Some(first) = v.first_mut() {
            *first = ONE;
        }
        v
    }

    /// `v · J`
    fn times_j(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..v.len())
            .map(|k| v[k] * self.xs[k] + if k > 0 { v[k - 1] } else { ZERO })
            .collect()
    }

    /// `v · (J - r I)^(-1)`
    fn times_resolvent(&self, v: &[Complex64], r: Complex64) -> Vec<Complex64> {
        let mut y = vec![ZERO; v.len()];
        for k in 0..v.len() {
            let prev = if k > 0 { y[k - 1] } else { ZERO };
            y[k] = (v[k] - prev) / (self.xs[k] - r);
        }
        y
    }

    /// `v · q(J)` by Horner.
    fn times_poly(&self, v: &[Complex64], q: &LaurentPolynomial) -> Vec<Complex64> {
        debug_assert!(q.low() >= 0);
        let mut w = vec![ZERO; v.len()];
        if q.is_zero() {
            return w;
        }
        for e in (0..=q.high()).rev() {
            w = self.times_j(&w);
            let c = q.coeff(e);
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk += vk * c;
            }
        }
        w
    }
}

/// Taylor coefficients `g_0..g_(order-1)` at `z0` of
/// `scale · ∏ (z - r)^e` over `factors = [(r, e)]`, via the logarithmic
/// derivative recursion `(k+1) g_(k+1) = Σ g_i L_(k-i)`.
pub(crate) fn factored_taylor(
    z0: Complex64,
    scale: Complex64,
    factors: &[(Complex64, i64)],
    order: usize,
) -> Vec<Complex64> {
    if order == 0 {
        return Vec::new();
    }
    let g0 = factors
        .iter()
        .fold(scale, |acc, &(r, e)| acc * (z0 - r).powi(e as i32));
    let log_coeffs: Vec<Complex64> = (0..order)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            factors
                .iter()
                .map(|&(r, e)| (z0 - r).powi(-(m as i32) - 1) * (sign * e as f64))
                .sum()
        })
        .collect();
    let mut g = vec![g0];
    for k in 0..order - 1 {
        let s: Complex64 = (0..=k).map(|i| g[i] * log_coeffs[k - i]).sum();
        g.push(s / (k + 1) as f64);
    }
    g
}

/// Partial-fraction coefficients `c[i][j] = (1/j!) (2 z^s / ω_i)^(j)` at
/// `z = z_i`, where `s = 2t - ℓ`, `ω` is the monic polynomial with the roots of
/// `a(z) a(-z)` and `ω_i = ω / (z - z_i)^(k_i)`.
pub fn pfd_coefficients(f: &FactoredSymbol, t: usize, star: Star) -> Result<Vec<Vec<Complex64>>, BezoutError> {
    f.check_index(t)?;
    f.check_coprime()?;
    let s = star.rhs_exponent(t);
    let roots = f.roots();
    Ok(roots
        .iter()
        .enumerate()
        .map(|(i, &(zi, ki))| {
            let mut factors = vec![(ZERO, s)];
            for (l, &(zl, kl)) in roots.iter().enumerate() {
                if l != i {
                    factors.push((zl, -(kl as i64)));
                }
                factors.push((-zl, -(kl as i64)));
            }
            factored_taylor(zi, Complex64::new(2.0, 0.0), &factors, ki)
        })
        .collect())
}

/// Which root-based algorithm [`solve_roots_with`] runs.
///
/// The partial fraction assembly is accurate for well separated roots and
/// degrades when roots cluster; the incomplete decomposition behaves the other
/// way round. `Adaptive` runs the former and falls back to the latter when its
/// residual exceeds [`ADAPTIVE_SWITCH_TOL`], keeping the better of the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootBackend {
    #[default]
    Adaptive,
    PartialFractions,
    IncompletePartialFractions,
}

/// Residual above which [`RootBackend::Adaptive`] tries the second backend.
pub const ADAPTIVE_SWITCH_TOL: f64 = 1e-12;

/// Solves `a(z)p(z) ⋆ a(-z)p(-z) = 2 z^(2i-ℓ)` from the roots of `a`.
pub fn solve_roots(f: &FactoredSymbol, i: usize, star: Star) -> Result<LaurentPolynomial, BezoutError> {
    solve_roots_with(f, i, star, RootBackend::Adaptive)
}

/// [`RootBackend::Adaptive`] with a precomputed cofactor `k` (from
/// [`incomplete_pfd_cofactor`]), for repeated solves on one symbol.
pub fn solve_roots_cached(
    f: &FactoredSymbol,
    k_poly: &LaurentPolynomial,
    i: usize,
    star: Star,
) -> Result<LaurentPolynomial, BezoutError> {
    let a = f.expand();
    let p = solve_partial_fractions(f, i, star)?;
    let r = bezout_residual(&a, &p, i, star);
    if r <= ADAPTIVE_SWITCH_TOL {
        return Ok(p);
    }
    let q = solve_refined(f, k_poly, i, star, REFINEMENT_STEPS)?;
    // NaN residuals lose against anything finite
    if bezout_residual(&a, &q, i, star) < r || r.is_nan() {
        Ok(q)
    } else {
        Ok(p)
    }
}

pub fn solve_roots_with(
    f: &FactoredSymbol,
    i: usize,
    star: Star,
    backend: RootBackend,
) -> Result<LaurentPolynomial, BezoutError> {
    match backend {
        RootBackend::Adaptive => {
            f.check_index(i)?;
            let (k_poly, _) = incomplete_pfd_cofactor(f)?;
            solve_roots_cached(f, &k_poly, i, star)
        }
        RootBackend::PartialFractions => solve_partial_fractions(f, i, star),
        RootBackend::IncompletePartialFractions => {
            let (k_poly, _) = incomplete_pfd_cofactor(f)?;
            solve_refined(f, &k_poly, i, star, REFINEMENT_STEPS)
        }
    }
}

fn solve_partial_fractions(f: &FactoredSymbol, i: usize, star: Star) -> Result<LaurentPolynomial, BezoutError> {
    let c = pfd_coefficients(f, i, star)?;
    let roots = f.roots();
    let shifted: Vec<LaurentPolynomial> = roots
        .iter()
        .map(|&(z, _)| LaurentPolynomial::linear(-z))
        .collect();
    let mut sum = LaurentPolynomial::zero();
    for (idx, &(_, k)) in roots.iter().enumerate() {
        let others = roots
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != idx)
            .fold(LaurentPolynomial::one(), |acc, (l, &(_, kl))| {
                acc.multiply(&shifted[l].pow(kl))
            });
        for sigma in 1..=k {
            let sign = if sigma % 2 == 0 { 1.0 } else { -1.0 };
            let term = others
                .multiply(&shifted[idx].pow(k - sigma))
                .scale(c[idx][k - sigma] * sign);
            sum = &sum + &term;
        }
    }
    let ell_sign = if star.ell() % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sum.scale(Complex64::new(ell_sign, 0.0) / f.leading()))
}

/// Cofactors `(k, h)`, both of degree `< n`, with
/// `1/(a(z)a(-z)) = h(z)/a(z) + k(z)/a(-z)`.
///
/// `k` interpolates `1/a` on the zeros of `a(-z)`; `h` follows from
/// `h = (1 - k a) / a(-z)`.
pub fn incomplete_pfd_cofactor(f: &FactoredSymbol) -> Result<(LaurentPolynomial, LaurentPolynomial), BezoutError> {
    if f.degree() == 0 {
        return Err(BezoutError::DegreeZero);
    }
    f.check_coprime()?;
    let k_poly = interpolate_inverse(f);
    let a = f.expand();
    let numerator = &LaurentPolynomial::one() - &a.multiply(&k_poly);
    let (h_poly, _) = numerator.div_rem(&a.reflect())?;
    Ok((k_poly, h_poly))
}

/// Hermite interpolant of `1/a(z)` on the zeros of `a(-z)`.
fn interpolate_inverse(f: &FactoredSymbol) -> LaurentPolynomial {
    let nodes = f.reflected_nodes();
    let j = NodeMatrix { xs: &nodes };
    let mut v = j.unit_row();
    for &(z, k) in f.roots() {
        for _ in 0..k {
            v = j.times_resolvent(&v, z);
        }
    }
    let inv_lead = ONE / f.leading();
    v.iter_mut().for_each(|c| *c *= inv_lead);
    newton_to_monomial(&nodes, &v)
}

/// Second interpolation step: `p` is the Hermite interpolant of
/// `2 z^(2i-ℓ) k(z)` on the zeros of `a(-z)`, i.e. the remainder of that
/// product modulo `a(-z)`.
pub fn solve_from_cofactor(
    f: &FactoredSymbol,
    k_poly: &LaurentPolynomial,
    i: usize,
    star: Star,
) -> Result<LaurentPolynomial, BezoutError> {
    f.check_index(i)?;
    let s = star.rhs_exponent(i);
    let nodes = f.reflected_nodes();
    let j = NodeMatrix { xs: &nodes };
    let mut v = j.unit_row();
    for _ in 0..s {
        v = j.times_j(&v);
    }
    let mut w = j.times_poly(&v, k_poly);
    w.iter_mut().for_each(|c| *c *= 2.0);
    Ok(newton_to_monomial(&nodes, &w))
}

/// Like [`solve_from_cofactor`], followed by `steps` rounds of iterative
/// refinement. Any right-hand side `r` of the same parity is solved by the
/// interpolant of `r k` on the zeros of `a(-z)`, so the residual of the
/// current iterate yields its correction with the same cofactor.
pub fn solve_refined(
    f: &FactoredSymbol,
    k_poly: &LaurentPolynomial,
    i: usize,
    star: Star,
    steps: usize,
) -> Result<LaurentPolynomial, BezoutError> {
    let mut p = solve_from_cofactor(f, k_poly, i, star)?;
    let a = f.expand();
    let a_ref = a.reflect();
    let nodes = f.reflected_nodes();
    let j = NodeMatrix { xs: &nodes };
    let rhs = LaurentPolynomial::monomial(Complex64::new(2.0, 0.0), star.rhs_exponent(i));
    for _ in 0..steps {
        let lhs = &a.multiply(&p) + &a_ref.multiply(&p.reflect()).scale(Complex64::new(star.sign(), 0.0));
        let r = &rhs - &lhs;
        if r.is_zero() {
            break;
        }
        let w = j.times_poly(&j.unit_row(), &r.multiply(k_poly));
        p = &p + &newton_to_monomial(&nodes, &w);
    }
    Ok(p)
}

/// Cofactor `k` for `a(z)·(z - root)` obtained from the cofactor `k_old` of
/// `a(z)`, without re-interpolating on the old nodes.
///
/// With `q(z) = (a(-r) - a(-z)) / (z - r)` one has `(z - r)^(-1) ≡ q / a(-r)`
/// modulo `a(-z)`, so `k_1 = k_old q / a(-r) mod a(-z)`, and the new cofactor is
/// `k_1 + ψ a(-z)` with the constant `ψ` fixed by the extra node `-root`.
/// The result is checked against the defining identity and recomputed from
/// scratch when the check fails or `root` is already a root of `a`.
pub fn update_cofactor_linear(
    f: &FactoredSymbol,
    k_old: &LaurentPolynomial,
    root: Complex64,
) -> Result<(FactoredSymbol, LaurentPolynomial), BezoutError> {
    let extended = f.times(&FactoredSymbol::new(ONE, [(root, 1)], 0));
    extended.check_coprime()?;
    let fresh = || incomplete_pfd_cofactor(&extended).map(|(k, _)| (extended.clone(), k));
    if extended.roots().len() == f.roots().len() {
        // multiplicity increase; the extra condition is on a derivative
        return fresh();
    }
    let a = f.expand();
    let a_ref = a.reflect();
    let a_ref_at_r = a_ref.value(root)?;
    let (q, _) = (&LaurentPolynomial::constant(a_ref_at_r) - &a_ref).div_rem(&LaurentPolynomial::linear(root))?;
    let (_, k1) = k_old.multiply(&q).scale(ONE / a_ref_at_r).div_rem(&a_ref)?;
    let a_new_at_minus_r = extended.expand().value(-root)?;
    let psi = (ONE / a_new_at_minus_r - k1.value(-root)?) / a.value(root)?;
    let k_new = &k1 + &a_ref.scale(psi);

    let a_new = extended.expand();
    let defect = &LaurentPolynomial::one() - &a_new.multiply(&k_new);
    let (_, rem) = defect.div_rem(&a_new.reflect())?;
    if rem.max_abs() <= 1e-9 {
        Ok((extended, k_new))
    } else {
        fresh()
    }
}
