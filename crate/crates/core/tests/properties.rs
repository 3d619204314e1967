mod common;

use appint::appint::{run_appint, InterpolatorySelection, SelectionPlan, Solver};
use appint::bezout::{bezout_residual, Star};
use appint::bezout_matrix::{build_resultant, solve_matrix};
use appint::bezout_roots::{solve_roots, FactoredSymbol};
use appint::laurent::LaurentPolynomial;
use appint::spectra::SymbolProgram;
use appint::subdivision::{refine, run_scheme, DataSequence};
use common::{c, random_symbol, random_symmetric};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn small_poly() -> impl Strategy<Value = LaurentPolynomial> {
    (-3i64..3, prop::collection::vec(-2.0f64..2.0, 1..7)).prop_map(|(low, cs)| LaurentPolynomial::from_real(low, &cs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sub_symbols_recombine(p in small_poly()) {
        let (even, odd) = p.sub_symbols();
        let z = Complex64::new(0.7, -0.4);
        let lhs = even.value(z * z).unwrap() + z * odd.value(z * z).unwrap();
        prop_assert!((lhs - p.value(z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn product_evaluates_pointwise(p in small_poly(), q in small_poly(), re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let z = Complex64::new(re, im);
        prop_assume!(z.norm() > 0.2);
        let pq = p.multiply(&q).value(z).unwrap();
        let want = p.value(z).unwrap() * q.value(z).unwrap();
        prop_assert!((pq - want).norm() <= 1e-11 * want.norm().max(1.0));
    }

    #[test]
    fn derivative_matches_difference_quotient(p in small_poly(), x in 0.5f64..1.5) {
        let h = 1e-6;
        let z = c(x);
        let fd = (p.value(c(x + h)).unwrap() - p.value(c(x - h)).unwrap()) / (2.0 * h);
        let d = p.evaluate(z, 1).unwrap();
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0));
    }

    #[test]
    fn solvers_agree_on_random_symbols(seed in any::<u64>(), n in 2usize..=10, real in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_symbol(&mut rng, n, real);
        let a = f.expand();
        for star in [Star::Plus, Star::Minus] {
            let sys = build_resultant(&a, star).unwrap();
            for i in 1..=n {
                let pm = solve_matrix(&sys, i, star).unwrap();
                let pr = solve_roots(&f, i, star).unwrap();
                prop_assert!(bezout_residual(&a, &pm, i, star) <= 1e-10);
                prop_assert!(bezout_residual(&a, &pr, i, star) <= 1e-10);
                prop_assert!(pm.max_diff(&pr) <= 1e-9);
            }
        }
    }

    #[test]
    fn block_reductions_hold(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_symbol(&mut rng, n, true).expand();
        let sys = build_resultant(&a, Star::Minus).unwrap();
        prop_assert!(sys.block_defect(Star::Minus) <= 1e-12);
        prop_assert!(sys.block_defect(Star::Plus) <= 1e-12);
    }

    #[test]
    fn palindromic_reversal(seed in any::<u64>(), half in 1usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_symmetric(&mut rng, half).expand();
        let n = a.high() as usize;
        let sys = build_resultant(&a, Star::Minus).unwrap();
        for i in 1..=n {
            let plus = solve_matrix(&sys, i, Star::Plus).unwrap();
            let minus = solve_matrix(&sys, n + 1 - i, Star::Minus).unwrap();
            let reversed = minus.invert_argument().shift(n as i64 - 1);
            prop_assert!(plus.max_diff(&reversed) <= 1e-9 * plus.max_abs().max(1.0));
        }
    }

    #[test]
    fn centered_mask_of_palindromic_symbol_is_symmetric(seed in any::<u64>(), half in 1usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_symmetric(&mut rng, half).expand();
        let prog = SymbolProgram::Explicit { symbols: vec![a] };
        let seq = run_appint(&prog, &SelectionPlan::Centered, 1, Solver::Both).unwrap();
        let m = &seq.levels[0].m;
        prop_assert!(m.max_diff(&m.invert_argument()) <= 1e-9);
        prop_assert_eq!(m.low(), -m.high());
    }

    #[test]
    fn constructed_masks_have_unit_row_sums(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_symbol(&mut rng, n, true);
        // a root at -1 gives m(-1) = 0, hence unit sums for both parities
        prop_assume!(f.roots().iter().all(|&(z, _)| (z - 1.0).norm() > 0.3 && (z + 1.0).norm() > 0.25));
        let a = f.times(&FactoredSymbol::new(c(1.0), [(c(-1.0), 1)], 0)).expand();
        let prog = SymbolProgram::Explicit { symbols: vec![a] };
        for i in 1..=n + 1 {
            for star in [Star::Plus, Star::Minus] {
                let plan = SelectionPlan::Constant(InterpolatorySelection::new(i, star));
                let seq = run_appint(&prog, &plan, 1, Solver::Both).unwrap();
                let (even, odd) = seq.levels[0].m.sub_symbols();
                prop_assert!((even.value(c(1.0)).unwrap() - 1.0).norm() <= 1e-10);
                prop_assert!((odd.value(c(1.0)).unwrap() - 1.0).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn interpolatory_refinement_keeps_samples(
        seed in any::<u64>(),
        data in prop::collection::vec(-10.0f64..10.0, 1..12),
        offset in -5i64..5,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_symbol(&mut rng, 4, true).expand();
        let prog = SymbolProgram::Explicit { symbols: vec![a] };
        let m = run_appint(&prog, &SelectionPlan::Centered, 1, Solver::Both).unwrap().levels[0].m.clone();
        let input = DataSequence::scalar(offset, data.clone());
        let out = refine(&m, &input).unwrap();
        for (j, &x) in data.iter().enumerate() {
            prop_assert_eq!(out.get(0, 2 * (offset + j as i64)), x);
        }
    }

    #[test]
    fn valid_region_is_independent_of_extension(
        inner in prop::collection::vec(-5.0f64..5.0, 6..14),
        pad in prop::collection::vec(-50.0f64..50.0, 8),
    ) {
        let m = LaurentPolynomial::from_real(-2, &[1.0, 4.0, 6.0, 4.0, 1.0]).scale(c(0.125));
        let mut noisy = pad[..4].to_vec();
        noisy.extend(&inner);
        noisy.extend(&pad[4..]);
        let clean = run_scheme(&vec![m.clone(); 3], &DataSequence::scalar(0, inner), 3).unwrap();
        let dirty = run_scheme(&vec![m; 3], &DataSequence::scalar(-4, noisy), 3).unwrap();
        for k in 0..=3 {
            if let Some((lo, hi)) = clean.valid[k] {
                for i in lo..=hi {
                    prop_assert_eq!(clean.level(k).get(0, i), dirty.level(k).get(0, i));
                }
            }
        }
    }
}
