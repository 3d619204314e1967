//! Level symbols built from spectral data: exponential B-splines, the tension
//! recurrence, the five-term affine family and its presets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bezout_roots::FactoredSymbol;
use crate::laurent::{LaurentError, LaurentPolynomial, REAL_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Frequencies closer than this are treated as the same entry.
const THETA_TOL: f64 = 1e-12;
/// Distance from the excluded tension values of presets 4 and 5.
const PRESET_EXCLUSION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("e^(theta/2^(k+1)) = -1 for theta = {theta} at level {k}")]
    PoleAtMinusOne { theta: Complex64, k: usize },
    #[error("{0}")]
    Domain(String),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("spectrum is not closed under conjugation")]
    NotConjugateClosed,
    #[error("no symbol for level {k}: {reason}")]
    MissingLevel { k: usize, reason: String },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// One frequency `θ` with multiplicity `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    #[serde(with = "complex_pair")]
    pub theta: Complex64,
    pub tau: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct SpectrumSpec {
    entries: Vec<SpectrumEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumRepr {
    entries: Vec<SpectrumEntry>,
}

impl TryFrom<SpectrumRepr> for SpectrumSpec {
    type Error = SpectrumError;
    fn try_from(r: SpectrumRepr) -> Result<Self, Self::Error> {
        SpectrumSpec::new(r.entries)
    }
}

impl From<SpectrumSpec> for SpectrumRepr {
    fn from(s: SpectrumSpec) -> Self {
        SpectrumRepr { entries: s.entries }
    }
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq([z.re, z.im])
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

impl SpectrumSpec {
    /// Validates distinct frequencies and positive multiplicities.
    pub fn new(entries: Vec<SpectrumEntry>) -> Result<Self, SpectrumError> {
        if entries.is_empty() {
            return Err(SpectrumError::InvalidSpectrum("no entries".into()));
        }
        for (a, e) in entries.iter().enumerate() {
            if e.tau == 0 {
                return Err(SpectrumError::InvalidSpectrum(format!("multiplicity 0 for theta {}", e.theta)));
            }
            if !e.theta.re.is_finite() || !e.theta.im.is_finite() {
                return Err(SpectrumError::InvalidSpectrum(format!("non-finite theta {}", e.theta)));
            }
            if entries[..a].iter().any(|f| (f.theta - e.theta).norm() <= THETA_TOL) {
                return Err(SpectrumError::InvalidSpectrum(format!("theta {} listed twice", e.theta)));
            }
        }
        Ok(Self { entries })
    }

    /// Builds a spectrum from possibly repeated frequencies, adding up
    /// multiplicities of coinciding ones.
    pub fn from_multiset(items: impl IntoIterator<Item = (Complex64, usize)>) -> Result<Self, SpectrumError> {
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        for (theta, tau) in items {
            match entries.iter_mut().find(|e| (e.theta - theta).norm() <= THETA_TOL) {
                Some(e) => e.tau += tau,
                None => entries.push(SpectrumEntry { theta, tau }),
            }
        }
        Self::new(entries)
    }

    /// Polynomial space of degree `< order`: the single frequency 0.
    pub fn polynomial(order: usize) -> Self {
        Self {
            entries: vec![SpectrumEntry { theta: ZERO, tau: order }],
        }
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// Total order `T = Σ τ`.
    pub fn order(&self) -> usize {
        self.entries.iter().map(|e| e.tau).sum()
    }

    pub fn is_conjugate_closed(&self) -> bool {
        self.entries.iter().all(|e| {
            self.entries
                .iter()
                .any(|f| f.tau == e.tau && (f.theta - e.theta.conj()).norm() <= THETA_TOL)
        })
    }

    /// Level-`k` zeros `z_ℓ^(k) = e^(-θ_ℓ / 2^(k+1))` with multiplicities.
    pub fn level_zeros(&self, k: usize) -> Vec<(Complex64, usize)> {
        let scale = level_scale(k);
        self.entries
            .iter()
            .map(|e| ((-e.theta * scale).exp(), e.tau))
            .collect()
    }
}

fn level_scale(k: usize) -> f64 {
    0.5f64.powi(k as i32 + 1)
}

/// Factored level-`k` exponential B-spline symbol
/// `2 ∏ ((e^(θ') z + 1) / (e^(θ') + 1))^τ` with `θ' = θ / 2^(k+1)`.
pub fn exp_bspline_factored(spectrum: &SpectrumSpec, k: usize) -> Result<FactoredSymbol, SpectrumError> {
    let scale = level_scale(k);
    let mut leading = Complex64::new(2.0, 0.0);
    let mut roots = Vec::new();
    for e in spectrum.entries() {
        let w = (e.theta * scale).exp();
        if (w + ONE).norm() < 1e-14 {
            return Err(SpectrumError::PoleAtMinusOne { theta: e.theta, k });
        }
        leading *= (w / (w + ONE)).powi(e.tau as i32);
        roots.push((-ONE / w, e.tau));
    }
    Ok(FactoredSymbol::new(leading, roots, 0))
}

/// Dense level-`k` exponential B-spline symbol (`low = 0`, degree `T`).
pub fn exp_bspline_symbol(spectrum: &SpectrumSpec, k: usize) -> Result<LaurentPolynomial, SpectrumError> {
    let scale = level_scale(k);
    let mut acc = LaurentPolynomial::constant(Complex64::new(2.0, 0.0));
    for e in spectrum.entries() {
        let w = (e.theta * scale).exp();
        if (w + ONE).norm() < 1e-14 {
            return Err(SpectrumError::PoleAtMinusOne { theta: e.theta, k });
        }
        let factor = LaurentPolynomial::new(0, vec![ONE / (w + ONE), w / (w + ONE)]);
        acc = acc.multiply(&factor.pow(e.tau));
    }
    if spectrum.is_conjugate_closed() {
        acc = acc.realify()?;
    }
    Ok(acc)
}

/// `v ↦ √((v+1)/2)`.
pub fn tension_update(v: f64) -> Result<f64, SpectrumError> {
    if v.is_nan() || v <= -1.0 {
        return Err(SpectrumError::Domain(format!("tension update needs v > -1, got {v}")));
    }
    Ok(((v + 1.0) / 2.0).sqrt())
}

/// `v^(k)` reached from `v^(-1) = v_init` after `k + 1` updates.
pub fn tension_at(v_init: f64, k: usize) -> Result<f64, SpectrumError> {
    (0..=k).try_fold(v_init, |v, _| tension_update(v))
}

/// Frequency `θ` with `cosh θ = v`: real for `v ≥ 1`, imaginary for `|v| < 1`.
pub fn theta_from_tension(v: f64) -> Result<Complex64, SpectrumError> {
    if v.is_nan() || v <= -1.0 {
        return Err(SpectrumError::Domain(format!("tension must exceed -1, got {v}")));
    }
    Ok(if v >= 1.0 {
        Complex64::new(v.acosh(), 0.0)
    } else {
        Complex64::new(0.0, v.acos())
    })
}

/// Cubic exponential B-spline `(z+1)² (z² + 2vz + 1) / (4(v+1))`.
pub fn b3_symbol(v: f64) -> LaurentPolynomial {
    LaurentPolynomial::from_real(0, &[1.0, 2.0, 1.0])
        .multiply(&LaurentPolynomial::from_real(0, &[1.0, 2.0 * v, 1.0]))
        .scale(Complex64::new(1.0 / (4.0 * (v + 1.0)), 0.0))
}

fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let d = (b * b - a * c * 4.0).sqrt();
    // avoid cancellation: pick the larger-magnitude numerator first
    let q = if (b.conj() * d).re >= 0.0 { -(b + d) / 2.0 } else { -(b - d) / 2.0 };
    if q.norm() == 0.0 {
        return [ZERO, ZERO];
    }
    [q / a, c / q]
}

fn b3_roots(v: f64) -> Vec<(Complex64, usize)> {
    let [r1, r2] = quadratic_roots(ONE, Complex64::new(2.0 * v, 0.0), ONE);
    vec![(-ONE, 2), (r1, 1), (r2, 1)]
}

pub fn b3_factored(v: f64) -> FactoredSymbol {
    FactoredSymbol::new(Complex64::new(1.0 / (4.0 * (v + 1.0)), 0.0), b3_roots(v), 0)
}

fn affine_factor(alpha: f64, beta: f64) -> LaurentPolynomial {
    let gamma = 1.0 - 2.0 * alpha - 2.0 * beta;
    LaurentPolynomial::from_real(0, &[alpha, beta, gamma, beta, alpha])
}

/// `B_3(z) (α + βz + (1-2α-2β)z² + βz³ + αz⁴)`.
pub fn five_term_symbol(alpha: f64, beta: f64, v: f64) -> LaurentPolynomial {
    b3_symbol(v).multiply(&affine_factor(alpha, beta))
}

/// Factored form of [`five_term_symbol`]. Vanishing low coefficients of the
/// affine factor show up as exact roots at the origin.
pub fn five_term_factored(alpha: f64, beta: f64, v: f64) -> FactoredSymbol {
    let gamma = 1.0 - 2.0 * alpha - 2.0 * beta;
    let (lead, mut roots) = if alpha != 0.0 {
        // palindromic quartic: w = z + 1/z solves αw² + βw + (γ - 2α) = 0
        let ws = quadratic_roots(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), Complex64::new(gamma - 2.0 * alpha, 0.0));
        let mut r = Vec::new();
        for w in ws {
            let [z1, z2] = quadratic_roots(ONE, -w, ONE);
            r.push((z1, 1));
            r.push((z2, 1));
        }
        (alpha, r)
    } else if beta != 0.0 {
        let [z1, z2] = quadratic_roots(Complex64::new(beta, 0.0), Complex64::new(gamma, 0.0), Complex64::new(beta, 0.0));
        (beta, vec![(ZERO, 1), (z1, 1), (z2, 1)])
    } else {
        (gamma, vec![(ZERO, 2)])
    };
    roots.extend(b3_roots(v));
    FactoredSymbol::new(Complex64::new(lead / (4.0 * (v + 1.0)), 0.0), roots, 0)
}

/// Parameters `(α, β)` of the five presets at tension `v`, and the space the
/// resulting schemes reproduce for the frequency `θ`.
pub fn preset_five_term(case: u8, v: f64, theta: Complex64) -> Result<(f64, f64, SpectrumSpec), SpectrumError> {
    if v.is_nan() || v <= -1.0 {
        return Err(SpectrumError::Domain(format!("preset needs v > -1, got {v}")));
    }
    let near_zero = v.abs() < PRESET_EXCLUSION_TOL;
    let near_half = (v - 0.5).abs() < PRESET_EXCLUSION_TOL;
    if (case == 2 && near_zero) || (matches!(case, 4 | 5) && (near_zero || near_half)) {
        return Err(SpectrumError::Domain(format!("preset {case} is undefined at v = {v}")));
    }
    let v2 = v * v;
    let (alpha, beta) = match case {
        1 => (0.0, 0.25),
        2 => (0.0, 1.0 / (4.0 * v2)),
        3 => (0.0, 1.0 / (2.0 * (1.0 + v))),
        4 => {
            let s = (2.0 * v - 1.0).powi(2);
            (1.0 / (8.0 * v2 * (v + 1.0) * s), (4.0 * v2 - 2.0 * v - 1.0) / (4.0 * v2 * s))
        }
        5 => (1.0 / (8.0 * v2 * (v + 1.0)), (2.0 * v - 1.0) / (4.0 * v2)),
        other => return Err(SpectrumError::Domain(format!("unknown preset case {other}, expected 1..=5"))),
    };
    let t = theta;
    let items: Vec<(Complex64, usize)> = match case {
        1 => vec![(ZERO, 4), (t, 1), (-t, 1)],
        2 => vec![(ZERO, 2), (t, 1), (-t, 1), (t * 2.0, 1), (-t * 2.0, 1)],
        3 => vec![(ZERO, 2), (t, 2), (-t, 2)],
        4 => vec![(ZERO, 2), (t, 1), (-t, 1), (t * 2.0, 1), (-t * 2.0, 1), (t * 3.0, 1), (-t * 3.0, 1)],
        _ => vec![(ZERO, 2), (t, 2), (-t, 2), (t * 2.0, 1), (-t * 2.0, 1)],
    };
    Ok((alpha, beta, SpectrumSpec::from_multiset(items)?))
}

/// Samples of the basis `x^r e^(θx)`, one row per function, in spectrum order.
pub fn sample_basis(spectrum: &SpectrumSpec, grid: &[f64]) -> Vec<Vec<Complex64>> {
    let mut rows = Vec::new();
    for e in spectrum.entries() {
        for r in 0..e.tau {
            rows.push(
                grid.iter()
                    .map(|&x| (e.theta * x).exp() * x.powi(r as i32))
                    .collect(),
            );
        }
    }
    rows
}

/// Real basis: a conjugate pair `a ± ib` contributes `x^r e^(ax) cos(bx)` for
/// the member with positive imaginary part and `x^r e^(ax) sin(bx)` for its
/// partner; real frequencies are sampled directly.
pub fn sample_basis_real(spectrum: &SpectrumSpec, grid: &[f64]) -> Result<Vec<Vec<f64>>, SpectrumError> {
    if !spectrum.is_conjugate_closed() {
        return Err(SpectrumError::NotConjugateClosed);
    }
    let mut rows = Vec::new();
    for e in spectrum.entries() {
        let (a, b) = (e.theta.re, e.theta.im.abs());
        let trig: fn(f64) -> f64 = if e.theta.im.abs() <= THETA_TOL {
            |_| 1.0
        } else if e.theta.im > 0.0 {
            f64::cos
        } else {
            f64::sin
        };
        for r in 0..e.tau {
            rows.push(grid.iter().map(|&x| x.powi(r as i32) * (a * x).exp() * trig(b * x)).collect());
        }
    }
    Ok(rows)
}

/// Per-level value of `α` or `β`: a constant, or one value per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSchedule {
    Constant(f64),
    PerLevel(Vec<f64>),
}

impl ParamSchedule {
    pub fn at(&self, k: usize) -> Option<f64> {
        match self {
            ParamSchedule::Constant(x) => Some(*x),
            ParamSchedule::PerLevel(xs) => xs.get(k).copied(),
        }
    }
}

/// Source of the approximating symbols `â^(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolProgram {
    ExpBspline {
        spectrum: SpectrumSpec,
    },
    /// Five-term family driven by the tension chain `v^(k)`; either a preset
    /// `case` or explicit `alpha`/`beta` schedules. `alpha = beta = 0` is the
    /// cubic exponential B-spline.
    FiveTerm {
        v_init: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        case: Option<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<ParamSchedule>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<ParamSchedule>,
    },
    /// Fixed symbols per level; the last one is reused for deeper levels.
    Explicit {
        symbols: Vec<LaurentPolynomial>,
    },
}

/// Symbol data for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSymbol {
    pub k: usize,
    /// Dense symbol; generated families start at `z^0` before trimming, so a
    /// positive `low` records vanishing low-order coefficients.
    pub symbol: LaurentPolynomial,
    pub factored: Option<FactoredSymbol>,
    pub v: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl SymbolProgram {
    /// Cubic exponential B-spline chain started at `v^(-1) = v_init`.
    pub fn cubic_exponential(v_init: f64) -> Self {
        SymbolProgram::FiveTerm {
            v_init,
            case: None,
            alpha: Some(ParamSchedule::Constant(0.0)),
            beta: Some(ParamSchedule::Constant(0.0)),
        }
    }

    pub fn preset(case: u8, v_init: f64) -> Self {
        SymbolProgram::FiveTerm {
            v_init,
            case: Some(case),
            alpha: None,
            beta: None,
        }
    }

    /// Checks the shape of the program and evaluates levels `0..levels`, so
    /// domain problems surface with the offending level.
    pub fn validate(&self, levels: usize) -> Result<(), SpectrumError> {
        match self {
            SymbolProgram::FiveTerm { v_init, case, alpha, beta } => {
                theta_from_tension(*v_init)?;
                match (case, alpha, beta) {
                    (Some(_), None, None) | (None, Some(_), Some(_)) => {}
                    _ => {
                        return Err(SpectrumError::Domain(
                            "five_term needs either a preset case or both alpha and beta".into(),
                        ))
                    }
                }
            }
            SymbolProgram::Explicit { symbols } => {
                if symbols.is_empty() {
                    return Err(SpectrumError::MissingLevel { k: 0, reason: "no explicit symbols".into() });
                }
            }
            SymbolProgram::ExpBspline { .. } => {}
        }
        for k in 0..levels {
            self.level(k)?;
        }
        Ok(())
    }

    /// Whether levels carry a factored form (and so suit the root solver).
    pub fn has_factored_form(&self) -> bool {
        !matches!(self, SymbolProgram::Explicit { .. })
    }

    /// The space the generated symbols reproduce, when the program knows it:
    /// the spectrum of an exponential B-spline, the advertised space of a
    /// preset, or `{0×2, ±θ}` for the cubic exponential chain.
    pub fn spectrum(&self) -> Result<Option<SpectrumSpec>, SpectrumError> {
        match self {
            SymbolProgram::ExpBspline { spectrum } => Ok(Some(spectrum.clone())),
            SymbolProgram::FiveTerm { v_init, case: Some(c), .. } => {
                let theta = theta_from_tension(*v_init)?;
                let v0 = tension_at(*v_init, 0)?;
                Ok(Some(preset_five_term(*c, v0, theta)?.2))
            }
            SymbolProgram::FiveTerm { v_init, alpha: Some(a), beta: Some(b), .. }
                if *a == ParamSchedule::Constant(0.0) && *b == ParamSchedule::Constant(0.0) =>
            {
                let theta = theta_from_tension(*v_init)?;
                Ok(Some(SpectrumSpec::from_multiset([(ZERO, 2), (theta, 1), (-theta, 1)])?))
            }
            _ => Ok(None),
        }
    }

    pub fn level(&self, k: usize) -> Result<LevelSymbol, SpectrumError> {
        match self {
            SymbolProgram::ExpBspline { spectrum } => Ok(LevelSymbol {
                k,
                symbol: exp_bspline_symbol(spectrum, k)?,
                factored: Some(exp_bspline_factored(spectrum, k)?),
                v: None,
                alpha: None,
                beta: None,
            }),
            SymbolProgram::FiveTerm { v_init, case, alpha, beta } => {
                let v = tension_at(*v_init, k)?;
                let (a, b) = match case {
                    Some(c) => {
                        let theta = theta_from_tension(*v_init)?;
                        let (a, b, _) = preset_five_term(*c, v, theta).map_err(|e| match e {
                            SpectrumError::Domain(msg) => SpectrumError::Domain(format!("level {k}: {msg}")),
                            other => other,
                        })?;
                        (a, b)
                    }
                    None => {
                        let get = |s: &Option<ParamSchedule>, name: &str| {
                            s.as_ref().and_then(|s| s.at(k)).ok_or_else(|| SpectrumError::MissingLevel {
                                k,
                                reason: format!("{name} schedule is too short"),
                            })
                        };
                        (get(alpha, "alpha")?, get(beta, "beta")?)
                    }
                };
                Ok(LevelSymbol {
                    k,
                    symbol: five_term_symbol(a, b, v),
                    factored: Some(five_term_factored(a, b, v)),
                    v: Some(v),
                    alpha: Some(a),
                    beta: Some(b),
                })
            }
            SymbolProgram::Explicit { symbols } => {
                let s = symbols.get(k).or(symbols.last()).ok_or_else(|| SpectrumError::MissingLevel {
                    k,
                    reason: "no explicit symbols".into(),
                })?;
                Ok(LevelSymbol {
                    k,
                    symbol: s.clone(),
                    factored: None,
                    v: None,
                    alpha: None,
                    beta: None,
                })
            }
        }
    }
}

/// True when all coefficients are real within the realification tolerance.
pub fn is_real_symbol(p: &LaurentPolynomial) -> bool {
    p.is_real(REAL_TOL)
}
