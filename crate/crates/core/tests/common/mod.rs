#![allow(dead_code)]

use appint::bezout_roots::FactoredSymbol;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn separated(roots: &[Complex64], z: Complex64) -> bool {
    z.norm() >= 0.3
        && z.re.abs() >= 0.15
        && roots.iter().all(|&w| (w - z).norm() >= 0.25 && (w + z).norm() >= 0.3)
}

/// Random symbol of degree `n` whose roots stay apart from each other, from
/// their reflections and from the origin. With `real` set, complex roots come
/// in conjugate pairs.
pub fn random_symbol(rng: &mut StdRng, n: usize, real: bool) -> FactoredSymbol {
    let mut roots: Vec<Complex64> = Vec::new();
    let mut tries = 0;
    while roots.len() < n {
        tries += 1;
        if tries % 500 == 0 {
            roots.clear();
        }
        let r = rng.gen_range(0.3..2.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let pair = real && roots.len() + 2 <= n && rng.gen_bool(0.5);
        let z = if real && !pair { c(if rng.gen_bool(0.5) { r } else { -r }) } else { Complex64::from_polar(r, phi) };
        if !separated(&roots, z) {
            continue;
        }
        if pair {
            if z.im.abs() < 0.15 || !separated(&[roots.clone(), vec![z]].concat(), z.conj()) {
                continue;
            }
            roots.push(z);
            roots.push(z.conj());
        } else {
            roots.push(z);
        }
    }
    let lead = c(rng.gen_range(0.5..2.0));
    FactoredSymbol::new(lead, roots.into_iter().map(|z| (z, 1)), 0)
}

/// Palindromic real symbol of degree `2 half`: negative real pairs `r, 1/r`
/// and conjugate pairs on the unit circle in the left half-plane.
pub fn random_symmetric(rng: &mut StdRng, half: usize) -> FactoredSymbol {
    let mut roots: Vec<Complex64> = Vec::new();
    let mut tries = 0;
    while roots.len() < 2 * half {
        tries += 1;
        if tries % 500 == 0 {
            roots.clear();
        }
        let cand = if rng.gen_bool(0.5) {
            let z = c(-rng.gen_range(0.3..0.8));
            [z, z.inv()]
        } else {
            let z = Complex64::from_polar(1.0, rng.gen_range(1.9..2.9));
            [z, z.conj()]
        };
        if cand.iter().all(|&w| separated(&roots, w)) && (cand[0] - cand[1]).norm() >= 0.25 {
            roots.extend(cand);
        }
    }
    FactoredSymbol::new(c(rng.gen_range(0.5..2.0)), roots.into_iter().map(|z| (z, 1)), 0)
}
