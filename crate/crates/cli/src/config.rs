//! Scheme configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use appint::appint::{InterpolatorySelection, SelectionPlan, Solver};
use appint::laurent::LaurentPolynomial;
use appint::spectra::{ParamSchedule, SpectrumEntry, SpectrumSpec, SymbolProgram};
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_LEVELS: usize = 6;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_REPRODUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ExpBspline,
    FiveTerm,
    CubicExponential,
    Explicit,
}

/// `θ` either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Theta {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryConfig {
    theta: Theta,
    tau: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SelectionConfig {
    Named(String),
    One(InterpolatorySelection),
    List(Vec<InterpolatorySelection>),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Interpolation, Bezout and reproduction-condition residuals.
    pub residual: f64,
    /// Inserted-point error of the end-to-end reproduction runs.
    pub reproduction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: DEFAULT_TOL,
            reproduction: DEFAULT_REPRODUCTION_TOL,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub sequence: Option<PathBuf>,
    pub points: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: Family,
    #[serde(default)]
    spectrum: Option<Vec<EntryConfig>>,
    #[serde(default)]
    v_init: Option<f64>,
    #[serde(default)]
    case: Option<u8>,
    #[serde(default)]
    alpha: Option<ParamSchedule>,
    #[serde(default)]
    beta: Option<ParamSchedule>,
    #[serde(default)]
    symbols: Option<Vec<LaurentPolynomial>>,
    #[serde(default)]
    selection: Option<SelectionConfig>,
    #[serde(default)]
    levels: Option<usize>,
    #[serde(default)]
    solver: Option<Solver>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    outputs: Outputs,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub program: SymbolProgram,
    pub selections: SelectionPlan,
    pub levels: usize,
    pub solver: Solver,
    /// Space used by the verification checks, if any is known.
    pub spectrum: Option<SpectrumSpec>,
    pub tolerances: Tolerances,
    pub outputs: Outputs,
}

pub fn load_config(path: &Path) -> Result<SchemeConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

const FAMILIES: [&str; 4] = ["exp_bspline", "five_term", "cubic_exponential", "explicit"];

pub fn parse_config(text: &str) -> Result<SchemeConfig, CliError> {
    let located = |e: serde_json::Error| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()));
    let value: serde_json::Value = serde_json::from_str(text).map_err(located)?;
    match value.get("family") {
        Some(serde_json::Value::String(f)) if !FAMILIES.contains(&f.as_str()) => {
            return Err(CliError::Validation(format!(
                "unknown family {f:?} (expected one of {})",
                FAMILIES.join(", ")
            )));
        }
        _ => {}
    }
    let raw: RawConfig = serde_json::from_str(text).map_err(located)?;
    raw.validate()
}

fn spectrum_from(entries: &[EntryConfig]) -> Result<SpectrumSpec, CliError> {
    let entries = entries
        .iter()
        .map(|e| SpectrumEntry {
            theta: match e.theta {
                Theta::Real(x) => Complex64::new(x, 0.0),
                Theta::Pair([re, im]) => Complex64::new(re, im),
            },
            tau: e.tau,
        })
        .collect();
    SpectrumSpec::new(entries).map_err(|e| CliError::Validation(format!("spectrum: {e}")))
}

fn unused(family: Family, fields: &[(&str, bool)]) -> Result<(), CliError> {
    match fields.iter().find(|(_, set)| *set) {
        Some((name, _)) => Err(CliError::Validation(format!("field `{name}` does not apply to family {family:?}"))),
        None => Ok(()),
    }
}

impl RawConfig {
    fn validate(self) -> Result<SchemeConfig, CliError> {
        let spectrum = self.spectrum.as_deref().map(spectrum_from).transpose()?;
        let need_v = |v: Option<f64>| v.ok_or_else(|| CliError::Validation("field `v_init` is required".into()));
        let program = match self.family {
            Family::ExpBspline => {
                unused(self.family, &[
                    ("case", self.case.is_some()),
                    ("alpha", self.alpha.is_some()),
                    ("beta", self.beta.is_some()),
                    ("symbols", self.symbols.is_some()),
                ])?;
                let spectrum = spectrum
                    .clone()
                    .ok_or_else(|| CliError::Validation("exp_bspline needs a `spectrum`".into()))?;
                if let Some(v) = self.v_init {
                    check_tension(v)?;
                }
                SymbolProgram::ExpBspline { spectrum }
            }
            Family::CubicExponential => {
                unused(self.family, &[
                    ("case", self.case.is_some()),
                    ("alpha", self.alpha.is_some()),
                    ("beta", self.beta.is_some()),
                    ("symbols", self.symbols.is_some()),
                ])?;
                let v = need_v(self.v_init)?;
                check_tension(v)?;
                SymbolProgram::cubic_exponential(v)
            }
            Family::FiveTerm => {
                unused(self.family, &[("symbols", self.symbols.is_some())])?;
                let v = need_v(self.v_init)?;
                check_tension(v)?;
                if let Some(c) = self.case {
                    if !(1..=5).contains(&c) {
                        return Err(CliError::Validation(format!("preset case {c} outside 1..=5")));
                    }
                }
                SymbolProgram::FiveTerm {
                    v_init: v,
                    case: self.case,
                    alpha: self.alpha,
                    beta: self.beta,
                }
            }
            Family::Explicit => {
                unused(self.family, &[
                    ("v_init", self.v_init.is_some()),
                    ("case", self.case.is_some()),
                    ("alpha", self.alpha.is_some()),
                    ("beta", self.beta.is_some()),
                ])?;
                let symbols = self
                    .symbols
                    .ok_or_else(|| CliError::Validation("explicit needs `symbols`".into()))?;
                SymbolProgram::Explicit { symbols }
            }
        };
        let levels = self.levels.unwrap_or(DEFAULT_LEVELS);
        program.validate(levels).map_err(|e| CliError::Validation(e.to_string()))?;
        let selections = match self.selection {
            None => SelectionPlan::Centered,
            Some(SelectionConfig::Named(s)) if s == "centered" => SelectionPlan::Centered,
            Some(SelectionConfig::Named(s)) => {
                return Err(CliError::Validation(format!("unknown selection {s:?}")));
            }
            Some(SelectionConfig::One(s)) => SelectionPlan::Constant(s),
            Some(SelectionConfig::List(v)) => {
                if v.len() < levels {
                    return Err(CliError::Validation(format!(
                        "selection list has {} entries for {levels} levels",
                        v.len()
                    )));
                }
                SelectionPlan::PerLevel(v)
            }
        };
        let tol = self.tolerances;
        if !(tol.residual > 0.0 && tol.reproduction > 0.0) {
            return Err(CliError::Validation("tolerances must be positive".into()));
        }
        let spectrum = match spectrum {
            Some(s) => Some(s),
            None => program.spectrum().map_err(|e| CliError::Validation(e.to_string()))?,
        };
        Ok(SchemeConfig {
            program,
            selections,
            levels,
            solver: self.solver.unwrap_or(Solver::Both),
            spectrum,
            tolerances: tol,
            outputs: self.outputs,
        })
    }
}

fn check_tension(v: f64) -> Result<(), CliError> {
    if !v.is_finite() || v <= -1.0 {
        return Err(CliError::Validation(format!("v_init must be finite and > -1, got {v}")));
    }
    Ok(())
}
