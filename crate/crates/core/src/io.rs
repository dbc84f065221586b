//! Plain-text curve files.
//!
//! ```text
//! # model=c-1 dim=4 ds=1.0000000000000000e-3
//! s,x1,x2,x3,x4
//! 4.7123889803846897e-1,...
//! ```
//!
//! `model` is the curvature sign of the space form and `dim` the number of
//! coordinates per row (the Euclidean dimension when `c = 0`). Floats are written
//! with 17 significant digits so files round-trip exactly. Upper half-space
//! files use `model=uhs` and columns `s,x,y,z`.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::frames::{FrenetData, SampledCurve};
use crate::spaceform::{from_upper_halfspace, to_upper_halfspace, AmbientVector, SpaceForm};

/// Model tag of a curve file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileModel {
    Form(SpaceForm),
    UpperHalfSpace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub model: FileModel,
    pub ds: f64,
    pub s: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> GeomError {
    GeomError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<(FileModel, usize, f64)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "expected a '# model=... dim=... ds=...' header"))?;
    let (mut model, mut dim, mut ds) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field '{field}'")))?;
        match key {
            "model" => {
                model = Some(match value {
                    "c-1" => FileModel::Form(SpaceForm::Hyperbolic),
                    "c0" => FileModel::Form(SpaceForm::Euclidean),
                    "c1" => FileModel::Form(SpaceForm::Spherical),
                    "uhs" => FileModel::UpperHalfSpace,
                    other => return Err(parse_err(1, format!("unknown model '{other}'"))),
                })
            }
            "dim" => {
                dim = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(1, format!("bad dim '{value}'")))?,
                )
            }
            "ds" => {
                ds = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| parse_err(1, format!("bad ds '{value}'")))?,
                )
            }
            _ => {}
        }
    }
    Ok((
        model.ok_or_else(|| parse_err(1, "header lacks model="))?,
        dim.ok_or_else(|| parse_err(1, "header lacks dim="))?,
        ds.ok_or_else(|| parse_err(1, "header lacks ds="))?,
    ))
}

/// Parses a curve file into raw columns without geometric validation.
pub fn parse_table(text: &str) -> Result<CurveTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (model, dim, ds) = parse_header(header.trim())?;
    let (hline, columns) = lines.next().ok_or_else(|| parse_err(2, "missing column header"))?;
    let names: Vec<&str> = columns.split(',').map(str::trim).collect();
    if names.len() != dim + 1 || names[0] != "s" {
        return Err(parse_err(
            hline + 1,
            format!("expected columns s and {dim} coordinates, got '{}'", columns.trim()),
        ));
    }
    let mut s = Vec::new();
    let mut rows = Vec::new();
    for (k, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 1 {
            return Err(parse_err(
                k + 1,
                format!("expected {} fields, found {}", dim + 1, fields.len()),
            ));
        }
        let mut vals = Vec::with_capacity(dim + 1);
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| parse_err(k + 1, format!("not a number: '{f}'")))?;
            if !v.is_finite() {
                return Err(parse_err(k + 1, format!("non-finite value '{f}'")));
            }
            vals.push(v);
        }
        s.push(vals[0]);
        rows.push(vals[1..].to_vec());
    }
    Ok(CurveTable { model, ds, s, rows })
}

/// Reads a hyperquadric (or Euclidean) curve file.
pub fn read_curve(text: &str) -> Result<SampledCurve> {
    let table = parse_table(text)?;
    let form = match table.model {
        FileModel::Form(f) => f,
        FileModel::UpperHalfSpace => {
            return Err(parse_err(1, "upper half-space file; convert it first"));
        }
    };
    let metric = crate::spaceform::Metric::new(form);
    let mut points = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let p = DVector::from_vec(row.clone());
        if form.is_curved() {
            let r = metric.norm_sq(&p) - form.c();
            if r.abs() > crate::spaceform::TOL_CONSTRAINT * (1.0 + p.norm_squared()) {
                return Err(parse_err(i + 3, format!("point off the hyperquadric (residual {r:.3e})")));
            }
        }
        points.push(p);
    }
    check_grid(&table)?;
    SampledCurve::from_samples(form, &table.s, points)
}

fn check_grid(table: &CurveTable) -> Result<()> {
    if table.s.len() < 4 {
        return Err(parse_err(3, format!("need at least 4 samples, found {}", table.s.len())));
    }
    for (i, w) in table.s.windows(2).enumerate() {
        let step = w[1] - w[0];
        if (step - table.ds).abs() > 1e-6 * table.ds {
            return Err(parse_err(
                i + 4,
                format!("arc-length step {step:e} differs from ds = {:e}", table.ds),
            ));
        }
    }
    Ok(())
}

/// Reads an upper half-space file and lifts it to the hyperboloid.
pub fn read_upper_halfspace(text: &str) -> Result<SampledCurve> {
    let table = parse_table(text)?;
    if table.model != FileModel::UpperHalfSpace {
        return Err(parse_err(1, "expected model=uhs"));
    }
    let mut points: Vec<AmbientVector> = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        points.push(from_upper_halfspace(row).map_err(|e| parse_err(i + 3, e.to_string()))?);
    }
    check_grid(&table)?;
    SampledCurve::from_samples(SpaceForm::Hyperbolic, &table.s, points)
}

fn model_tag(form: SpaceForm) -> &'static str {
    match form {
        SpaceForm::Hyperbolic => "c-1",
        SpaceForm::Euclidean => "c0",
        SpaceForm::Spherical => "c1",
    }
}

fn push_row(out: &mut String, s: f64, values: impl IntoIterator<Item = f64>) {
    let _ = write!(out, "{s:.16e}");
    for v in values {
        let _ = write!(out, ",{v:.16e}");
    }
    out.push('\n');
}

pub fn write_curve(curve: &SampledCurve) -> String {
    let dim = curve.dim();
    let mut out = format!(
        "# model={} dim={dim} ds={:.16e}\ns",
        model_tag(curve.form()),
        curve.ds()
    );
    for k in 1..=dim {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    for (i, p) in curve.points().iter().enumerate() {
        push_row(&mut out, curve.s(i), p.iter().copied());
    }
    out
}

/// Upper half-space image of a hyperbolic curve, columns `s,x,y,z`.
pub fn write_upper_halfspace(curve: &SampledCurve) -> Result<String> {
    if curve.form() != SpaceForm::Hyperbolic || curve.dim() != 4 {
        return Err(GeomError::InvalidInput(
            "the upper half-space chart applies to curves in H^3".into(),
        ));
    }
    let mut out = format!("# model=uhs dim=3 ds={:.16e}\ns,x,y,z\n", curve.ds());
    for (i, p) in curve.points().iter().enumerate() {
        push_row(&mut out, curve.s(i), to_upper_halfspace(p)?);
    }
    Ok(out)
}

/// Columns `s,kappa,tau,kappa_prime`.
pub fn write_frenet(frenet: &FrenetData) -> String {
    let mut out = String::from("s,kappa,tau,kappa_prime\n");
    for i in 0..frenet.len() {
        push_row(
            &mut out,
            frenet.s[i],
            [frenet.kappa[i], frenet.tau[i], frenet.kappa_prime[i]],
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{oracle_circle_s3, synthesize_horosphere, HorosphereParams};

    #[test]
    fn curve_round_trip_is_exact() {
        let c = oracle_circle_s3(0.8, 1e-2, 50).unwrap();
        let text = write_curve(&c);
        assert!(text.starts_with("# model=c1 dim=4 ds="));
        let back = read_curve(&text).unwrap();
        assert_eq!(back.points(), c.points());
        assert_eq!(back.len(), c.len());
    }

    #[test]
    fn upper_halfspace_round_trip() {
        let mut p = HorosphereParams::figure(1.0);
        p.ds = 1e-2;
        let c = synthesize_horosphere(&p).unwrap().curve;
        let text = write_upper_halfspace(&c).unwrap();
        let back = read_upper_halfspace(&text).unwrap();
        for (a, b) in back.points().iter().zip(c.points()) {
            assert!((a - b).amax() < 1e-12);
        }
        // horosphere x3 + x4 = 1 is the plane z = 1
        for line in text.lines().skip(2) {
            let z: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
            assert!((z - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let bad = "# model=c1 dim=4 ds=0.1\ns,x1,x2,x3,x4\n0,1,0,0,0\n0.1,1,0,0\n";
        assert!(matches!(read_curve(bad), Err(GeomError::Parse { line: 4, .. })));
        let off = "# model=c1 dim=4 ds=0.1\ns,x1,x2,x3,x4\n0,1,0,0,0\n0.1,2,0,0,0\n";
        assert!(matches!(read_curve(off), Err(GeomError::Parse { line: 4, .. })));
        assert!(matches!(read_curve("s,x\n"), Err(GeomError::Parse { line: 1, .. })));
        let nan = "# model=c1 dim=4 ds=0.1\ns,x1,x2,x3,x4\n0,abc,0,0,0\n";
        assert!(matches!(read_curve(nan), Err(GeomError::Parse { line: 3, .. })));
        assert!(read_curve("# model=c7 dim=4 ds=0.1\n").is_err());
    }

    #[test]
    fn frenet_columns() {
        let c = oracle_circle_s3(0.8, 1e-2, 50).unwrap();
        let f = crate::frames::frenet_apparatus(&c).unwrap();
        let text = write_frenet(&f);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,kappa,tau,kappa_prime"));
        assert_eq!(lines.count(), 50);
    }
}
