//! The four commands.

use std::env;
use std::path::{Path, PathBuf};
use std::thread;

use appint::appint::{run_appint, InterpolatorySelection, InterpolatorySequence, Solver};
use appint::spectra::{sample_basis_real, SpectrumSpec};
use appint::subdivision::{
    check_reproduction_conditions, run_scheme, symbols_reproduction_residual, ConditionMode, ConditionReport,
    DataSequence,
};
use serde::Serialize;

use crate::config::{SchemeConfig, Tolerances};
use crate::error::CliError;
use crate::output::{read_points_csv, read_refined_csv, render_svg, write_json, write_points_csv, PointRow};

pub const SOLVER_ENV: &str = "APPINT_SOLVER";

/// The configured solver, unless `APPINT_SOLVER` says otherwise.
pub fn effective_solver(cfg: &SchemeConfig) -> Result<Solver, CliError> {
    match env::var(SOLVER_ENV) {
        Ok(s) if !s.trim().is_empty() => s
            .parse()
            .map_err(|e: String| CliError::Validation(format!("{SOLVER_ENV}: {e}"))),
        _ => Ok(cfg.solver),
    }
}

fn output_path(given: Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    given
        .or_else(|| fallback.clone())
        .ok_or_else(|| CliError::Validation(format!("no {what} path given (flag or `outputs` entry)")))
}

fn convert_levels(cfg: &SchemeConfig, levels: usize) -> Result<InterpolatorySequence, (CliError, InterpolatorySequence)> {
    let solver = effective_solver(cfg).map_err(|e| (e, InterpolatorySequence::default()))?;
    cfg.program
        .validate(levels)
        .map_err(|e| (CliError::Validation(e.to_string()), InterpolatorySequence::default()))?;
    run_appint(&cfg.program, &cfg.selections, levels, solver).map_err(|e| (CliError::from(&e), e.partial))
}

/// Writes the interpolatory sequence (or the levels completed before a
/// failure) as JSON.
pub fn convert(cfg: &SchemeConfig, out: Option<PathBuf>) -> Result<InterpolatorySequence, CliError> {
    let out = output_path(out, &cfg.outputs.sequence, "output")?;
    match convert_levels(cfg, cfg.levels) {
        Ok(seq) => {
            write_json(&out, &seq)?;
            Ok(seq)
        }
        Err((e, partial)) => {
            write_json(&out, &partial)?;
            Err(e)
        }
    }
}

/// Refines the points of `points` for `levels` levels and writes every level.
/// Unless `full` is set, each level is clipped to the parameter range of the
/// input points.
pub fn subdivide(
    cfg: &SchemeConfig,
    points: &Path,
    levels: usize,
    out: Option<PathBuf>,
    full: bool,
) -> Result<Vec<PointRow>, CliError> {
    let out = output_path(out, &cfg.outputs.points, "output")?;
    let columns = read_points_csv(points)?;
    let seq = convert_levels(cfg, levels).map_err(|(e, _)| e)?;
    let data = DataSequence::new(0, columns).map_err(|e| CliError::Parse(e.to_string()))?;
    let run = run_scheme(&seq.symbols(), &data, levels).map_err(|e| CliError::Failure(e.to_string()))?;
    let last = data.last_index();
    let mut rows = Vec::new();
    for k in 0..=levels {
        let level = run.level(k);
        let (lo, hi) = if full {
            (level.offset, level.last_index())
        } else {
            (level.offset.max(0), level.last_index().min(last << k))
        };
        for i in lo..=hi {
            rows.push(PointRow {
                level: k,
                index: i,
                t: appint::subdivision::grid_point(i, k),
                values: (0..data.dim()).map(|c| level.get(c, i)).collect(),
                valid: run.is_valid(k, i),
            });
        }
    }
    write_points_csv(&out, data.dim(), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub k: usize,
    pub selection: InterpolatorySelection,
    pub margin: f64,
    pub bezout_residual: f64,
    pub interpolation_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionCheck {
    pub basis: usize,
    pub residual: Option<f64>,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub levels: usize,
    pub solver: Solver,
    pub tolerances: TolerancesOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    pub per_level: Vec<LevelCheck>,
    pub reproduction: Vec<ReproductionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduction_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TolerancesOut {
    pub residual: f64,
    pub reproduction: f64,
}

impl From<Tolerances> for TolerancesOut {
    fn from(t: Tolerances) -> Self {
        Self {
            residual: t.residual,
            reproduction: t.reproduction,
        }
    }
}

fn check_levels(seq: &InterpolatorySequence, spectrum: Option<&SpectrumSpec>, tol: f64) -> Vec<LevelCheck> {
    seq.levels
        .iter()
        .map(|rec| {
            let (_, interp) = rec.m.is_interpolatory(tol);
            let conditions =
                spectrum.map(|s| check_reproduction_conditions(&rec.m, s, rec.k, ConditionMode::Reproduction, tol));
            let passed = rec.residual <= tol
                && interp <= tol
                && rec.cross_check.is_none_or(|d| d <= tol)
                && conditions.is_none_or(|c| c.passed);
            LevelCheck {
                k: rec.k,
                selection: rec.selection,
                margin: rec.margin,
                bezout_residual: rec.residual,
                interpolation_residual: interp,
                cross_check: rec.cross_check,
                conditions,
                passed,
            }
        })
        .collect()
}

fn check_reproduction(seq: &InterpolatorySequence, spectrum: &SpectrumSpec, levels: usize, tol: f64) -> Vec<ReproductionCheck> {
    let symbols = seq.symbols();
    let count = sample_basis_real(spectrum, &[0.0]).map(|b| b.len()).unwrap_or(0);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..count)
            .map(|idx| {
                let symbols = &symbols;
                scope.spawn(move || symbols_reproduction_residual(symbols, spectrum, idx, levels))
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(basis, h)| match h.join().expect("reproduction worker panicked") {
                Ok(r) => ReproductionCheck { basis, residual: Some(r), tol, passed: r <= tol, error: None },
                Err(e) => ReproductionCheck { basis, residual: None, tol, passed: false, error: Some(e.to_string()) },
            })
            .collect()
    })
}

/// Runs the conversion and every check, writes the report, and fails with
/// the first error or with [`CliError::Tolerance`] if any residual is too large.
pub fn verify(
    cfg: &SchemeConfig,
    levels: Option<usize>,
    tol: Option<f64>,
    report: Option<PathBuf>,
) -> Result<VerifyReport, CliError> {
    let report_path = output_path(report, &cfg.outputs.report, "report")?;
    let levels = levels.unwrap_or(cfg.levels);
    let mut tolerances = cfg.tolerances;
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::Validation(format!("--tol must be positive, got {t}")));
        }
        tolerances.residual = t;
    }
    let solver = effective_solver(cfg)?;
    let spectrum = cfg.spectrum.as_ref();
    let mut rep = VerifyReport {
        levels,
        solver,
        tolerances: tolerances.into(),
        spectrum: cfg.spectrum.clone(),
        per_level: Vec::new(),
        reproduction: Vec::new(),
        reproduction_skipped: None,
        error: None,
        passed: false,
    };
    let seq = match convert_levels(cfg, levels) {
        Ok(seq) => seq,
        Err((e, partial)) => {
            rep.per_level = check_levels(&partial, spectrum, tolerances.residual);
            rep.error = Some(e.to_string());
            write_json(&report_path, &rep)?;
            return Err(e);
        }
    };
    rep.per_level = check_levels(&seq, spectrum, tolerances.residual);
    match spectrum {
        None => rep.reproduction_skipped = Some("no spectrum known for this program".into()),
        Some(s) if !s.is_conjugate_closed() => {
            rep.reproduction_skipped = Some("spectrum is not closed under conjugation".into())
        }
        Some(_) if seq.levels.iter().any(|r| !r.m.is_real(1e-12)) => {
            rep.reproduction_skipped = Some("masks are not real".into())
        }
        Some(s) if levels > 0 => rep.reproduction = check_reproduction(&seq, s, levels, tolerances.reproduction),
        Some(_) => {}
    }
    rep.passed = rep.per_level.iter().all(|l| l.passed) && rep.reproduction.iter().all(|r| r.passed);
    write_json(&report_path, &rep)?;
    if rep.passed {
        Ok(rep)
    } else {
        let failed: Vec<String> = rep
            .per_level
            .iter()
            .filter(|l| !l.passed)
            .map(|l| format!("level {}", l.k))
            .chain(rep.reproduction.iter().filter(|r| !r.passed).map(|r| format!("basis {}", r.basis)))
            .collect();
        Err(CliError::Tolerance(failed.join(", ")))
    }
}

/// Draws the deepest level of a refined CSV over the level-0 points.
pub fn plot(input: &Path, out: &Path, width: u32, height: u32) -> Result<(), CliError> {
    if width == 0 || height == 0 {
        return Err(CliError::Validation("plot size must be positive".into()));
    }
    let (dim, mut rows) = read_refined_csv(input)?;
    rows.sort_by_key(|r| (r.level, r.index));
    let deepest = rows.iter().map(|r| r.level).max().ok_or_else(|| CliError::Parse("no rows to plot".into()))?;
    let xy = |r: &PointRow| if dim == 2 { (r.values[0], r.values[1]) } else { (r.t, r.values[0]) };
    let control: Vec<(f64, f64)> = rows.iter().filter(|r| r.level == 0).map(xy).collect();
    let curve: Vec<(f64, f64)> = rows.iter().filter(|r| r.level == deepest).map(xy).collect();
    std::fs::write(out, render_svg(&control, &curve, width, height))
        .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}
