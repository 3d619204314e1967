//! Level-by-level conversion of approximating symbols into interpolatory ones.
//!
//! For each level the program symbol is shift-normalized (so vanishing
//! low-order coefficients drop the degree), checked for coprimality with its
//! reflection, and the cofactor `p` of the selected equation
//! `â(z)p(z) ⋆ â(-z)p(-z) = 2 z^(2i-ℓ)` is solved. The interpolatory symbol is
//! `m(z) = â(z) p(z) / z^(2i-ℓ)`, which makes `m(z) + m(-z) = 2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bezout::{bezout_residual, BezoutError, Star};
use crate::bezout_matrix::{build_resultant, reduce_half, HalfFactorization};
use crate::bezout_roots::{incomplete_pfd_cofactor, solve_roots_cached, FactoredSymbol};
use crate::laurent::{LaurentError, LaurentPolynomial, COPRIME_THRESHOLD};
use crate::spectra::{SpectrumError, SymbolProgram};

/// Largest accepted coefficient of the Bezout residual.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Largest accepted coefficientwise gap between the two solvers.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InterpolatorySelection {
    pub i: usize,
    pub star: Star,
}

impl InterpolatorySelection {
    pub fn new(i: usize, star: Star) -> Self {
        Self { i, star }
    }

    /// Symmetric choice for degree `n`: `(n/2, -)` for even `n`,
    /// `((n+1)/2, +)` for odd `n`.
    pub fn centered(n: usize) -> Self {
        if n % 2 == 0 {
            Self::new(n / 2, Star::Minus)
        } else {
            Self::new(n.div_ceil(2), Star::Plus)
        }
    }

    /// Exponent `2i - ℓ` of the divisor in `m = â p / z^(2i-ℓ)`.
    pub fn shift(&self) -> i64 {
        self.star.rhs_exponent(self.i)
    }
}

impl fmt::Display for InterpolatorySelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.star)
    }
}

/// Which selection to use at each level.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SelectionPlan {
    #[default]
    Centered,
    Constant(InterpolatorySelection),
    PerLevel(Vec<InterpolatorySelection>),
}

impl SelectionPlan {
    fn resolve(&self, k: usize, n: usize) -> Option<InterpolatorySelection> {
        match self {
            SelectionPlan::Centered => Some(InterpolatorySelection::centered(n)),
            SelectionPlan::Constant(s) => Some(*s),
            SelectionPlan::PerLevel(v) => v.get(k).copied(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Roots when the program carries factored symbols, matrix otherwise.
    #[default]
    Auto,
    Matrix,
    Roots,
    Both,
}

impl Solver {
    fn resolve(self, program: &SymbolProgram) -> Solver {
        match (self, program.has_factored_form()) {
            (Solver::Auto, true) => Solver::Roots,
            (Solver::Auto, false) | (Solver::Both, false) => Solver::Matrix,
            (s, _) => s,
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Auto => "auto",
            Solver::Matrix => "matrix",
            Solver::Roots => "roots",
            Solver::Both => "both",
        })
    }
}

impl FromStr for Solver {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Solver::Auto),
            "matrix" => Ok(Solver::Matrix),
            "roots" => Ok(Solver::Roots),
            "both" => Ok(Solver::Both),
            other => Err(format!("unknown solver {other:?}, expected matrix, roots, both or auto")),
        }
    }
}

/// Provenance of one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub k: usize,
    pub m: LaurentPolynomial,
    pub residual: f64,
    pub margin: f64,
    pub selection: InterpolatorySelection,
    pub a_hat: LaurentPolynomial,
    pub p: LaurentPolynomial,
    pub solver: Solver,
    /// Coefficientwise gap between the solvers when both ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
    /// Number of vanishing low-order coefficients removed from the symbol.
    #[serde(default)]
    pub reduced_by: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterpolatorySequence {
    pub levels: Vec<LevelRecord>,
}

impl InterpolatorySequence {
    pub fn symbols(&self) -> Vec<LaurentPolynomial> {
        self.levels.iter().map(|l| l.m.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AppintErrorKind {
    #[error("a(z) and a(-z) are not coprime (margin {margin:e})")]
    CoprimalityFailure { margin: f64 },
    #[error("selection i = {i} exceeds the degree n = {n}")]
    SelectionOutOfRange { i: usize, n: usize },
    #[error("no selection given for this level")]
    MissingSelection,
    #[error("matrix and root solvers disagree by {diff:e}")]
    SolverDisagreement { diff: f64 },
    #[error("Bezout residual {residual:e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },
    #[error("factored form does not match the dense symbol (gap {gap:e})")]
    FactoredMismatch { gap: f64 },
    #[error(transparent)]
    Program(#[from] SpectrumError),
    #[error(transparent)]
    Bezout(#[from] BezoutError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Failure at some level; `partial` holds the levels completed before it.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("level {level}: {kind}")]
pub struct AppintError {
    pub level: usize,
    pub kind: AppintErrorKind,
    pub partial: InterpolatorySequence,
}

/// `m(z) = â(z) p(z) / z^(2i-ℓ)`, after checking that `p` solves the
/// selected equation.
pub fn construct_interpolatory(
    a_hat: &LaurentPolynomial,
    p: &LaurentPolynomial,
    selection: InterpolatorySelection,
) -> Result<LaurentPolynomial, AppintErrorKind> {
    let residual = bezout_residual(a_hat, p, selection.i, selection.star);
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(AppintErrorKind::ResidualTooLarge { residual });
    }
    Ok(a_hat.multiply(p).shift(-selection.shift()))
}

/// Drops imaginary parts that are pure rounding noise relative to the
/// coefficient scale.
fn realify_scaled(p: &LaurentPolynomial) -> Result<LaurentPolynomial, LaurentError> {
    let tol = RESIDUAL_TOL * p.max_abs().max(1.0);
    if let Some((j, c)) = p.coeffs().iter().enumerate().find(|(_, c)| c.im.abs() > tol) {
        return Err(LaurentError::NotReal {
            exponent: p.low() + j as i64,
            imag: c.im,
        });
    }
    Ok(LaurentPolynomial::new(
        p.low(),
        p.coeffs().iter().map(|c| Complex64::new(c.re, 0.0)).collect(),
    ))
}

struct LevelSolution {
    p: LaurentPolynomial,
    solver: Solver,
    cross_check: Option<f64>,
}

/// Reusable per-level solver state: one factorization (matrix path) or one
/// cofactor `k` (root path) serves every index `i`.
pub struct LevelSolver {
    a_hat: LaurentPolynomial,
    margin: f64,
    matrix: Option<(HalfFactorization, HalfFactorization)>,
    roots: Option<(FactoredSymbol, LaurentPolynomial)>,
}

impl LevelSolver {
    pub fn new(a_hat: &LaurentPolynomial, factored: Option<&FactoredSymbol>, solver: Solver) -> Result<Self, AppintErrorKind> {
        let margin = a_hat.coprime_margin()?;
        if margin.is_nan() || margin < COPRIME_THRESHOLD {
            return Err(AppintErrorKind::CoprimalityFailure { margin });
        }
        let use_matrix = matches!(solver, Solver::Matrix | Solver::Both) || factored.is_none();
        let use_roots = matches!(solver, Solver::Roots | Solver::Both | Solver::Auto) && factored.is_some();
        let matrix = if use_matrix {
            let sys = reduce_half(build_resultant(a_hat, Star::Minus)?);
            Some((sys.factorize(Star::Plus)?, sys.factorize(Star::Minus)?))
        } else {
            None
        };
        let roots = match factored {
            Some(f) if use_roots => {
                let gap = f.expand().max_diff(a_hat);
                if gap > 1e-9 * a_hat.max_abs().max(1.0) {
                    return Err(AppintErrorKind::FactoredMismatch { gap });
                }
                let (k, _) = incomplete_pfd_cofactor(f)?;
                Some((f.clone(), k))
            }
            _ => None,
        };
        Ok(Self {
            a_hat: a_hat.clone(),
            margin,
            matrix,
            roots,
        })
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    fn solve(&self, sel: InterpolatorySelection) -> Result<LevelSolution, AppintErrorKind> {
        let n = self.a_hat.high() as usize;
        if sel.i == 0 || sel.i > n {
            return Err(AppintErrorKind::SelectionOutOfRange { i: sel.i, n });
        }
        let from_matrix = match &self.matrix {
            Some((plus, minus)) => Some(match sel.star {
                Star::Plus => plus.solve(sel.i)?,
                Star::Minus => minus.solve(sel.i)?,
            }),
            None => None,
        };
        let from_roots = match &self.roots {
            Some((f, k)) => Some(solve_roots_cached(f, k, sel.i, sel.star)?),
            None => None,
        };
        match (from_matrix, from_roots) {
            (Some(pm), Some(pr)) => {
                let diff = pm.max_diff(&pr);
                if diff.is_nan() || diff > CROSS_CHECK_TOL {
                    return Err(AppintErrorKind::SolverDisagreement { diff });
                }
                let rm = bezout_residual(&self.a_hat, &pm, sel.i, sel.star);
                let rr = bezout_residual(&self.a_hat, &pr, sel.i, sel.star);
                Ok(LevelSolution {
                    p: if rr < rm { pr } else { pm },
                    solver: Solver::Both,
                    cross_check: Some(diff),
                })
            }
            (Some(p), None) => Ok(LevelSolution { p, solver: Solver::Matrix, cross_check: None }),
            (None, Some(p)) => Ok(LevelSolution { p, solver: Solver::Roots, cross_check: None }),
            (None, None) => unreachable!("at least one backend is always prepared"),
        }
    }
}

/// Runs the conversion for levels `0..levels`.
pub fn run_appint(
    program: &SymbolProgram,
    selections: &SelectionPlan,
    levels: usize,
    solver: Solver,
) -> Result<InterpolatorySequence, AppintError> {
    let solver = solver.resolve(program);
    let mut seq = InterpolatorySequence::default();
    for k in 0..levels {
        match run_level(program, selections, k, solver) {
            Ok(rec) => seq.levels.push(rec),
            Err(kind) => {
                return Err(AppintError {
                    level: k,
                    kind,
                    partial: seq,
                })
            }
        }
    }
    Ok(seq)
}

fn run_level(
    program: &SymbolProgram,
    selections: &SelectionPlan,
    k: usize,
    solver: Solver,
) -> Result<LevelRecord, AppintErrorKind> {
    let level = program.level(k)?;
    let (a_hat, _) = level.symbol.shift_normalize()?;
    let reduced_by = level.symbol.low().max(0);
    let n = a_hat.high() as usize;
    if n == 0 {
        return Err(BezoutError::DegreeZero.into());
    }
    let factored = level.factored.as_ref().map(|f| f.strip_origin().0);
    let sel = selections.resolve(k, n).ok_or(AppintErrorKind::MissingSelection)?;
    if sel.i == 0 || sel.i > n {
        return Err(AppintErrorKind::SelectionOutOfRange { i: sel.i, n });
    }
    let ls = LevelSolver::new(&a_hat, factored.as_ref(), solver)?;
    let sol = ls.solve(sel)?;
    let real = a_hat.is_real(1e-12);
    let (a_hat, p) = if real {
        (a_hat.realify()?, realify_scaled(&sol.p)?)
    } else {
        (a_hat, sol.p)
    };
    let residual = bezout_residual(&a_hat, &p, sel.i, sel.star);
    let m = construct_interpolatory(&a_hat, &p, sel)?;
    Ok(LevelRecord {
        k,
        m,
        residual,
        margin: ls.margin(),
        selection: sel,
        a_hat,
        p,
        solver: sol.solver,
        cross_check: sol.cross_check,
        reduced_by,
        v: level.v,
    })
}
