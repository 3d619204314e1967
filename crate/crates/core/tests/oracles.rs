//! Library results checked against independent dense computations.

mod common;

use appint::bezout::{bezout_residual, Star};
use appint::bezout_matrix::{build_resultant, solve_matrix};
use appint::bezout_roots::{
    hermite_lagrange, incomplete_pfd_cofactor, pfd_coefficients, solve_roots, FactoredSymbol, HermiteData, HermiteNode,
};
use appint::laurent::LaurentPolynomial;
use common::{c, random_symbol};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn falling(j: usize, r: usize) -> f64 {
    (0..r).map(|t| j as f64 - t as f64).product()
}

// Confluent Vandermonde system for the Hermite conditions.
fn hermite_oracle(data: &HermiteData) -> Vec<Complex64> {
    let n = data.conditions();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut rhs = DVector::<Complex64>::zeros(n);
    let mut row = 0;
    for node in &data.nodes {
        for (r, &v) in node.values.iter().enumerate() {
            for j in r..n {
                m[(row, j)] = node.node.powi((j - r) as i32) * falling(j, r);
            }
            rhs[row] = v;
            row += 1;
        }
    }
    m.lu().solve(&rhs).expect("distinct nodes").iter().copied().collect()
}

#[test]
fn hermite_matches_confluent_vandermonde() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let count = rng.gen_range(1..5);
        let mut nodes: Vec<HermiteNode> = Vec::new();
        while nodes.len() < count {
            let z = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            if nodes.iter().any(|n| (n.node - z).norm() < 0.4) {
                continue;
            }
            let mult = rng.gen_range(1..4);
            let values = (0..mult).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            nodes.push(HermiteNode { node: z, values });
        }
        let data = HermiteData { nodes };
        let got = hermite_lagrange(&data).unwrap();
        let want = hermite_oracle(&data);
        let scale = want.iter().map(|w| w.norm()).fold(1.0, f64::max);
        for (e, w) in want.iter().enumerate() {
            assert!((got.coeff(e as i64) - w).norm() <= 1e-10 * scale, "coefficient {e}");
        }
    }
}

#[test]
fn hermite_rejects_repeated_node() {
    let node = HermiteNode { node: c(1.0), values: vec![c(1.0)] };
    assert!(hermite_lagrange(&HermiteData { nodes: vec![node.clone(), node] }).is_err());
}

// Polynomial in `w = z - z0`.
fn taylor_shift(p: &LaurentPolynomial, z0: Complex64) -> Vec<Complex64> {
    let mut q: Vec<Complex64> = (0..=p.high()).map(|e| p.coeff(e)).collect();
    // repeated synthetic division
    let n = q.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = q[j + 1] * z0;
            q[j] += t;
        }
    }
    q
}

fn series_quotient(num: &[Complex64], den: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(order);
    for j in 0..order {
        let mut s = num.get(j).copied().unwrap_or_default();
        for i in 0..j {
            s -= out[i] * den.get(j - i).copied().unwrap_or_default();
        }
        out.push(s / den[0]);
    }
    out
}

#[test]
fn partial_fraction_coefficients_match_series_division() {
    let f = FactoredSymbol::new(c(0.7), [(c(-0.5), 2), (Complex64::new(-1.0, 0.8), 1), (Complex64::new(-1.0, -0.8), 1), (c(1.3), 3)], 0);
    let roots = f.roots().to_vec();
    for star in [Star::Plus, Star::Minus] {
        for t in 1..=f.degree() {
            let s = star.rhs_exponent(t);
            let got = pfd_coefficients(&f, t, star).unwrap();
            for (i, &(zi, ki)) in roots.iter().enumerate() {
                let mut omega = LaurentPolynomial::one();
                for (l, &(zl, kl)) in roots.iter().enumerate() {
                    if l != i {
                        omega = omega.multiply(&LaurentPolynomial::linear(zl).pow(kl));
                    }
                    omega = omega.multiply(&LaurentPolynomial::linear(-zl).pow(kl));
                }
                let num = LaurentPolynomial::monomial(c(2.0), s);
                let want = series_quotient(&taylor_shift(&num, zi), &taylor_shift(&omega, zi), ki);
                for (j, w) in want.iter().enumerate() {
                    assert!((got[i][j] - w).norm() <= 1e-10 * w.norm().max(1.0), "root {i}, order {j}");
                }
            }
        }
    }
}

// Bezout equation as an overdetermined dense system in the coefficients of p.
fn bezout_oracle(a: &LaurentPolynomial, i: usize, star: Star) -> Vec<Complex64> {
    let n = a.high() as usize;
    let rows = 2 * n;
    let mut m = DMatrix::<Complex64>::zeros(rows, n);
    for j in 0..n {
        let basis = LaurentPolynomial::monomial(c(1.0), j as i64);
        let q = a.multiply(&basis);
        let col = &q + &q.reflect().scale(c(star.sign()));
        for r in 0..rows {
            m[(r, j)] = col.coeff(r as i64);
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(rows);
    rhs[star.rhs_exponent(i) as usize] = c(2.0);
    m.svd(true, true).solve(&rhs, 1e-14).unwrap().iter().copied().collect()
}

#[test]
fn both_solvers_match_dense_least_squares() {
    let mut rng = StdRng::seed_from_u64(5);
    for t in 0..30 {
        let n = 2 + t % 7;
        let f = random_symbol(&mut rng, n, t % 3 != 0);
        let a = f.expand();
        for star in [Star::Plus, Star::Minus] {
            let sys = build_resultant(&a, star).unwrap();
            for i in 1..=n {
                let want = bezout_oracle(&a, i, star);
                let pm = solve_matrix(&sys, i, star).unwrap();
                let pr = solve_roots(&f, i, star).unwrap();
                for (e, w) in want.iter().enumerate() {
                    assert!((pm.coeff(e as i64) - w).norm() < 1e-8, "matrix n={n} i={i} {star}");
                    assert!((pr.coeff(e as i64) - w).norm() < 1e-8, "roots n={n} i={i} {star}");
                }
                assert!(bezout_residual(&a, &pm, i, star) < 1e-10);
            }
        }
    }
}

#[test]
fn incomplete_decomposition_identity() {
    let mut rng = StdRng::seed_from_u64(9);
    for t in 0..20 {
        let f = random_symbol(&mut rng, 2 + t % 6, true);
        let a = f.expand();
        let a_ref = a.reflect();
        let (k, h) = incomplete_pfd_cofactor(&f).unwrap();
        assert!(k.high() < a.high() && h.high() < a.high());
        for _ in 0..5 {
            let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (az, arz) = (a.value(z).unwrap(), a_ref.value(z).unwrap());
            let lhs = h.value(z).unwrap() / az + k.value(z).unwrap() / arz;
            let rhs = 1.0 / (az * arz);
            assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0), "z = {z}");
        }
    }
}

#[test]
fn dd4_mask_direct_expansion() {
    // (1+z)^4 (-z^2 + 4z - 1) / (16 z^3), expanded by hand-rolled convolution
    let mut prod = vec![1.0f64];
    for factor in [[1.0, 1.0]; 4] {
        let mut next = vec![0.0; prod.len() + 1];
        for (i, &x) in prod.iter().enumerate() {
            next[i] += x * factor[0];
            next[i + 1] += x * factor[1];
        }
        prod = next;
    }
    let quad = [-1.0, 4.0, -1.0];
    let mut mask = vec![0.0; prod.len() + 2];
    for (i, &x) in prod.iter().enumerate() {
        for (j, &y) in quad.iter().enumerate() {
            mask[i + j] += x * y / 16.0;
        }
    }
    let seq = appint::appint::run_appint(
        &appint::spectra::SymbolProgram::cubic_exponential(1.0),
        &appint::appint::SelectionPlan::Constant(appint::appint::InterpolatorySelection::new(2, Star::Minus)),
        2,
        appint::appint::Solver::Both,
    )
    .unwrap();
    let m = &seq.levels[0].m;
    assert_eq!(m.low(), -3);
    for (j, w) in mask.iter().enumerate() {
        assert!((m.coeff(j as i64 - 3).re - w).abs() < 1e-12);
    }
}
