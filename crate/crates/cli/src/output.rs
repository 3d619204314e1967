//! Writers for JSON reports, CSV point streams and SVG plots.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::CliError;

/// Pretty JSON with every float printed as `d.ddddddddddddddddde±x`
/// (17 significant digits), so identical inputs give identical bytes.
pub struct FixedFloatFormatter<'a>(PrettyFormatter<'a>);

impl Default for FixedFloatFormatter<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

fn fixed(w: &mut (impl Write + ?Sized), v: f64) -> io::Result<()> {
    if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        w.write_all(b"null")
    }
}

impl Formatter for FixedFloatFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        fixed(w, v)
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        fixed(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_fixed_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter::default());
    value.serialize(&mut ser).map_err(|e| CliError::Failure(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_fixed_json(value)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// One refined point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub level: usize,
    pub index: i64,
    pub t: f64,
    pub values: Vec<f64>,
    pub valid: bool,
}

pub fn write_points_csv(path: &Path, dim: usize, rows: &[PointRow]) -> Result<(), CliError> {
    let io_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    let mut header = vec!["level", "index", "t", "x"];
    if dim == 2 {
        header.push("y");
    }
    header.push("valid");
    w.write_record(&header).map_err(io_err)?;
    for r in rows {
        let mut rec = vec![r.level.to_string(), r.index.to_string(), r.t.to_string()];
        rec.extend(r.values.iter().map(|v| v.to_string()));
        rec.push(r.valid.to_string());
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

/// Reads `x` or `x,y` rows; a first row that does not parse as numbers is
/// taken as a header.
pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let vals: Option<Vec<f64>> = rec.iter().map(parse_f64).collect();
        let vals = match vals {
            Some(v) => v,
            None if line == 0 => continue,
            None => return Err(CliError::Parse(format!("{}: line {}: not a number", path.display(), line + 1))),
        };
        if vals.is_empty() || vals.len() > 2 {
            return Err(CliError::Parse(format!(
                "{}: line {}: expected 1 or 2 columns, got {}",
                path.display(),
                line + 1,
                vals.len()
            )));
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); vals.len()];
        }
        if vals.len() != columns.len() {
            return Err(CliError::Parse(format!("{}: line {}: column count changed", path.display(), line + 1)));
        }
        for (c, v) in columns.iter_mut().zip(vals) {
            c.push(v);
        }
    }
    if columns.is_empty() {
        return Err(CliError::Parse(format!("{}: no points", path.display())));
    }
    Ok(columns)
}

/// Reads a CSV written by [`write_points_csv`].
pub fn read_refined_csv(path: &Path) -> Result<(usize, Vec<PointRow>), CliError> {
    let parse_err = |msg: String| CliError::Parse(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header = r.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(li), Some(ii), Some(ti), Some(xi)) = (col("level"), col("index"), col("t"), col("x")) else {
        return Err(parse_err("expected header level,index,t,x[,y][,valid]".into()));
    };
    let yi = col("y");
    let vi = col("valid");
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let get = |i: usize| rec.get(i).ok_or_else(|| parse_err("short row".into()));
        let num = |i: usize| get(i).and_then(|s| parse_f64(s).ok_or_else(|| parse_err(format!("bad number {s:?}"))));
        let mut values = vec![num(xi)?];
        if let Some(yi) = yi {
            values.push(num(yi)?);
        }
        rows.push(PointRow {
            level: get(li)?.parse().map_err(|_| parse_err("bad level".into()))?,
            index: get(ii)?.parse().map_err(|_| parse_err("bad index".into()))?,
            t: num(ti)?,
            values,
            valid: match vi {
                Some(vi) => get(vi)? == "true",
                None => true,
            },
        });
    }
    Ok((if yi.is_some() { 2 } else { 1 }, rows))
}

/// SVG 1.1 document with the control polygon (dashed) and the refined curve.
pub fn render_svg(control: &[(f64, f64)], curve: &[(f64, f64)], width: u32, height: u32) -> String {
    let all = control.iter().chain(curve);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let margin = 0.05 * width.min(height) as f64;
    let sx = (width as f64 - 2.0 * margin) / (x1 - x0).max(1e-300);
    let sy = (height as f64 - 2.0 * margin) / (y1 - y0).max(1e-300);
    let s = sx.min(sy);
    let map = |&(x, y): &(f64, f64)| (margin + (x - x0) * s, height as f64 - margin - (y - y0) * s);
    let points = |pts: &[(f64, f64)]| {
        pts.iter()
            .map(|p| {
                let (u, v) = map(p);
                format!("{u:.3},{v:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str(&format!("  <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"));
    if !control.is_empty() {
        out.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n",
            points(control)
        ));
        for p in control {
            let (u, v) = map(p);
            out.push_str(&format!("  <circle cx=\"{u:.3}\" cy=\"{v:.3}\" r=\"3\" fill=\"gray\"/>\n"));
        }
    }
    out.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        points(curve)
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_floats() {
        let s = String::from_utf8(to_fixed_json(&serde_json::json!({"a": [0.1, -2.0, 1e-300], "b": 3})).unwrap()).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("-2.0000000000000000e0"));
        assert!(s.contains("\"b\": 3"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][0].as_f64(), Some(0.1));
    }

    #[test]
    fn svg_shape() {
        let svg = render_svg(&[(0.0, 0.0), (1.0, 1.0)], &[(0.0, 0.0), (0.5, 0.6), (1.0, 1.0)], 200, 100);
        assert!(svg.contains("version=\"1.1\""));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
