//! Running subdivision on finite data and checking reproduction.
//!
//! Data is zero-extended outside its window. Every level keeps track of the
//! index interval whose values do not depend on that extension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appint::{run_appint, AppintError, SelectionPlan, Solver};
use crate::laurent::{LaurentPolynomial, REAL_TOL};
use crate::spectra::{sample_basis_real, SpectrumError, SpectrumSpec, SymbolProgram};

/// Even-slot tolerance under which a mask is treated as interpolatory and
/// even outputs are copied instead of computed.
pub const INTERPOLATORY_COPY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubdivisionError {
    #[error("mask is the zero polynomial")]
    ZeroMask,
    #[error("mask has non-real coefficients (imaginary part {imag:e})")]
    ComplexMask { imag: f64 },
    #[error("data columns have different lengths")]
    RaggedColumns,
    #[error("data needs 1 or 2 columns, got {0}")]
    ColumnCount(usize),
    #[error("requested {levels} levels but only {available} symbols")]
    NotEnoughSymbols { levels: usize, available: usize },
    #[error("basis index {index} out of range (spectrum has {count} basis functions)")]
    BasisIndex { index: usize, count: usize },
    #[error("no valid samples left after {levels} levels")]
    EmptyValidRegion { levels: usize },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Appint(#[from] Box<AppintError>),
}

/// Finite window of a real or planar sequence, starting at index `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSequence {
    pub offset: i64,
    pub columns: Vec<Vec<f64>>,
}

impl DataSequence {
    pub fn new(offset: i64, columns: Vec<Vec<f64>>) -> Result<Self, SubdivisionError> {
        if columns.is_empty() || columns.len() > 2 {
            return Err(SubdivisionError::ColumnCount(columns.len()));
        }
        if columns.iter().any(|c| c.len() != columns[0].len()) {
            return Err(SubdivisionError::RaggedColumns);
        }
        Ok(Self { offset, columns })
    }

    pub fn scalar(offset: i64, values: Vec<f64>) -> Self {
        Self { offset, columns: vec![values] }
    }

    pub fn points(offset: i64, pts: &[[f64; 2]]) -> Self {
        Self {
            offset,
            columns: vec![pts.iter().map(|p| p[0]).collect(), pts.iter().map(|p| p[1]).collect()],
        }
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Index of the last stored value.
    pub fn last_index(&self) -> i64 {
        self.offset + self.len() as i64 - 1
    }

    /// Value of column `c` at absolute index `i`, zero outside the window.
    pub fn get(&self, c: usize, i: i64) -> f64 {
        let j = i - self.offset;
        if j < 0 || j as usize >= self.len() {
            0.0
        } else {
            self.columns[c][j as usize]
        }
    }
}

// Real mask coefficients with per-parity support.
struct Mask {
    low: i64,
    coeffs: Vec<f64>,
    interpolatory: bool,
    // (min, max) exponent of the nonzero coefficients of each parity
    support: [Option<(i64, i64)>; 2],
}

impl Mask {
    fn new(m: &LaurentPolynomial) -> Result<Self, SubdivisionError> {
        if m.is_zero() {
            return Err(SubdivisionError::ZeroMask);
        }
        let imag = m.coeffs().iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        if imag > REAL_TOL * m.max_abs().max(1.0) {
            return Err(SubdivisionError::ComplexMask { imag });
        }
        let coeffs: Vec<f64> = m.coeffs().iter().map(|c| c.re).collect();
        let low = m.low();
        let mut support: [Option<(i64, i64)>; 2] = [None, None];
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let e = low + j as i64;
            let slot = &mut support[e.rem_euclid(2) as usize];
            *slot = Some(match *slot {
                None => (e, e),
                Some((a, b)) => (a.min(e), b.max(e)),
            });
        }
        let even_defect = coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| (low + *j as i64).rem_euclid(2) == 0)
            .map(|(j, &c)| if low + j as i64 == 0 { (c - 1.0).abs() } else { c.abs() })
            .fold(0.0, f64::max);
        let interpolatory = even_defect <= INTERPOLATORY_COPY_TOL && m.coeff(0).re != 0.0;
        if interpolatory {
            support[0] = Some((0, 0));
        }
        Ok(Self { low, coeffs, interpolatory, support })
    }

    fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    fn coeff(&self, e: i64) -> f64 {
        let j = e - self.low;
        if j < 0 || j as usize >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[j as usize]
        }
    }

    // Input indices that output `n` reads.
    fn reads(&self, n: i64) -> Option<(i64, i64)> {
        let (lo, hi) = self.support[n.rem_euclid(2) as usize]?;
        Some(((n - hi) / 2, (n - lo) / 2))
    }
}

/// One application of the subdivision operator `(S_a q)_n = Σ_j a_(n-2j) q_j`.
pub fn refine(mask: &LaurentPolynomial, data: &DataSequence) -> Result<DataSequence, SubdivisionError> {
    let mask = Mask::new(mask)?;
    Ok(refine_with(&mask, data))
}

fn refine_with(mask: &Mask, data: &DataSequence) -> DataSequence {
    if data.is_empty() {
        return DataSequence { offset: 2 * data.offset + mask.low, columns: vec![Vec::new(); data.dim()] };
    }
    let first = 2 * data.offset + mask.low;
    let last = 2 * data.last_index() + mask.high();
    let columns = (0..data.dim())
        .map(|c| {
            (first..=last)
                .map(|n| {
                    if mask.interpolatory && n.rem_euclid(2) == 0 {
                        return data.get(c, n / 2);
                    }
                    let j_lo = (n - mask.high()).div_euclid(2).max(data.offset);
                    let j_hi = (n - mask.low).div_euclid(2).min(data.last_index());
                    (j_lo..=j_hi).map(|j| mask.coeff(n - 2 * j) * data.get(c, j)).sum()
                })
                .collect()
        })
        .collect();
    DataSequence { offset: first, columns }
}

// Largest run of output indices whose reads stay inside `valid`.
fn next_valid(mask: &Mask, out: &DataSequence, valid: Option<(i64, i64)>) -> Option<(i64, i64)> {
    let (vlo, vhi) = valid?;
    let mut best: Option<(i64, i64)> = None;
    let mut run: Option<(i64, i64)> = None;
    for n in out.offset..=out.last_index() {
        let ok = match mask.reads(n) {
            Some((a, b)) => a >= vlo && b <= vhi,
            None => true,
        };
        if ok {
            run = Some(match run {
                None => (n, n),
                Some((a, _)) => (a, n),
            });
            if let Some((a, b)) = run {
                if best.is_none_or(|(c, d)| b - a > d - c) {
                    best = run;
                }
            }
        } else {
            run = None;
        }
    }
    best
}

/// Levels `0..=K` of a run. Level `k` lives on the grid `i / 2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementRun {
    pub levels: Vec<DataSequence>,
    /// Per level, the index interval unaffected by the zero extension.
    pub valid: Vec<Option<(i64, i64)>>,
}

impl RefinementRun {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &DataSequence {
        &self.levels[k]
    }

    pub fn grid(&self, k: usize) -> Vec<f64> {
        let d = &self.levels[k];
        (0..d.len()).map(|i| grid_point(d.offset + i as i64, k)).collect()
    }

    pub fn is_valid(&self, k: usize, index: i64) -> bool {
        matches!(self.valid[k], Some((a, b)) if a <= index && index <= b)
    }

    /// Piecewise-linear interpolant of the finest level, column `c`, at `t`.
    /// `None` outside the finest window.
    pub fn sample(&self, c: usize, t: f64) -> Option<f64> {
        let k = self.depth();
        let d = &self.levels[k];
        let x = t * 2f64.powi(k as i32);
        let lo = d.offset as f64;
        let hi = d.last_index() as f64;
        if d.is_empty() || x < lo || x > hi {
            return None;
        }
        let i = (x.floor() as i64).min(d.last_index());
        let frac = x - i as f64;
        let a = d.get(c, i);
        if frac == 0.0 {
            return Some(a);
        }
        Some(a + frac * (d.get(c, i + 1) - a))
    }
}

pub fn grid_point(index: i64, k: usize) -> f64 {
    index as f64 / 2f64.powi(k as i32)
}

/// Applies `symbols[k]` at level `k` for `k < levels`.
pub fn run_scheme(
    symbols: &[LaurentPolynomial],
    data: &DataSequence,
    levels: usize,
) -> Result<RefinementRun, SubdivisionError> {
    if levels > symbols.len() {
        return Err(SubdivisionError::NotEnoughSymbols { levels, available: symbols.len() });
    }
    let mut run = RefinementRun {
        levels: vec![data.clone()],
        valid: vec![if data.is_empty() { None } else { Some((data.offset, data.last_index())) }],
    };
    for sym in &symbols[..levels] {
        let mask = Mask::new(sym)?;
        let prev = run.levels.last().expect("at least level 0");
        let next = refine_with(&mask, prev);
        let valid = next_valid(&mask, &next, *run.valid.last().expect("at least level 0"));
        run.levels.push(next);
        run.valid.push(valid);
    }
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionMode {
    Generation,
    Reproduction,
}

/// Largest residual of each group of reproduction conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub k: usize,
    pub mode: ConditionMode,
    /// `|m(z_ℓ) - 2|`; zero in generation mode.
    pub value: f64,
    /// `|m(-z_ℓ)|`.
    pub zero: f64,
    /// Derivatives of order `1..τ_ℓ` at `-z_ℓ` (and at `z_ℓ` in reproduction mode).
    pub derivative: f64,
    pub tol: f64,
    pub passed: bool,
}

impl ConditionReport {
    pub fn max_residual(&self) -> f64 {
        self.value.max(self.zero).max(self.derivative)
    }
}

/// Checks the level-`k` conditions at `z_ℓ = e^(-θ_ℓ / 2^(k+1))`.
pub fn check_reproduction_conditions(
    m: &LaurentPolynomial,
    spectrum: &SpectrumSpec,
    k: usize,
    mode: ConditionMode,
    tol: f64,
) -> ConditionReport {
    let mut value: f64 = 0.0;
    let mut zero: f64 = 0.0;
    let mut derivative: f64 = 0.0;
    let two = Complex64::new(2.0, 0.0);
    let eval = |z: Complex64, r: usize| m.evaluate(z, r).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    for (z, tau) in spectrum.level_zeros(k) {
        zero = zero.max(eval(-z, 0));
        for r in 1..tau {
            derivative = derivative.max(eval(-z, r));
        }
        if mode == ConditionMode::Reproduction {
            value = value.max(m.value(z).map(|v| (v - two).norm()).unwrap_or(f64::INFINITY));
            for r in 1..tau {
                derivative = derivative.max(eval(z, r));
            }
        }
    }
    let passed = value <= tol && zero <= tol && derivative <= tol;
    ConditionReport { k, mode, value, zero, derivative, tol, passed }
}

/// Half-width of the sample window used by [`reproduction_residual`].
pub fn reproduction_window(m0: &LaurentPolynomial) -> i64 {
    (m0.span() as i64 + 1) / 2 + 3
}

/// Runs the conversion and `levels` refinement steps on samples of one basis
/// function of `spectrum`, and returns the largest gap between an inserted
/// value and the function, over levels `1..=levels` and the valid region.
pub fn reproduction_residual(
    program: &SymbolProgram,
    selections: &SelectionPlan,
    spectrum: &SpectrumSpec,
    basis_index: usize,
    levels: usize,
) -> Result<f64, SubdivisionError> {
    let seq = run_appint(program, selections, levels, Solver::Auto).map_err(Box::new)?;
    symbols_reproduction_residual(&seq.symbols(), spectrum, basis_index, levels)
}

/// [`reproduction_residual`] for masks that are already constructed.
pub fn symbols_reproduction_residual(
    symbols: &[LaurentPolynomial],
    spectrum: &SpectrumSpec,
    basis_index: usize,
    levels: usize,
) -> Result<f64, SubdivisionError> {
    let first = symbols.first().ok_or(SubdivisionError::NotEnoughSymbols { levels, available: 0 })?;
    let w = reproduction_window(first);
    let grid: Vec<f64> = (-w..=w).map(|i| i as f64).collect();
    let basis = sample_basis_real(spectrum, &grid)?;
    let count = basis.len();
    let row = basis
        .into_iter()
        .nth(basis_index)
        .ok_or(SubdivisionError::BasisIndex { index: basis_index, count })?;
    let run = run_scheme(symbols, &DataSequence::scalar(-w, row), levels)?;
    let mut worst: Option<f64> = None;
    for k in 1..=levels {
        let d = run.level(k);
        let Some((a, b)) = run.valid[k] else { continue };
        let t: Vec<f64> = (a..=b).map(|i| grid_point(i, k)).collect();
        let exact = &sample_basis_real(spectrum, &t)?[basis_index];
        for (idx, i) in (a..=b).enumerate() {
            if i.rem_euclid(2) == 1 {
                let gap = (d.get(0, i) - exact[idx]).abs();
                worst = Some(worst.map_or(gap, |x: f64| x.max(gap)));
            }
        }
    }
    worst.ok_or(SubdivisionError::EmptyValidRegion { levels })
}
