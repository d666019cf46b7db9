//! Sampling and curvature of interpolating spline curves.

use std::io::Write;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spline::{make_knots, Point, PolylineCurve, SplineFamily};

/// Relative magnitude below which a curvature value counts as zero.
pub const SIGN_THRESHOLD: f64 = 1e-9;

/// Points, one per line, as 2 or 3 numbers separated by spaces or commas.
/// Blank lines and lines starting with `#` are skipped; 2D points get `z = 0`.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let vals: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}"))))
            .collect::<Result<_>>()?;
        if !matches!(vals.len(), 2 | 3) {
            return Err(err(format!("expected 2 or 3 coordinates, got {}", vals.len())));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(err("non-finite coordinate".into()));
        }
        out.push(Point::new(vals[0], vals[1], vals.get(2).copied().unwrap_or(0.0)));
    }
    Ok(out)
}

/// Normal of the least-squares plane through `pts`, signed so that its
/// largest component is positive. Falls back to `+z` for fewer than 3 points.
pub fn best_fit_normal(pts: &[Point]) -> Point {
    if pts.len() < 3 {
        return Point::z();
    }
    let c: Point = pts.iter().sum::<Point>() / pts.len() as f64;
    let cov: Matrix3<f64> = pts.iter().map(|p| (p - c) * (p - c).transpose()).sum();
    let eig = SymmetricEigen::new(cov);
    let n: Point = eig.eigenvectors.column(eig.eigenvalues.imin()).into();
    let k = n.iamax();
    if n[k] < 0.0 {
        -n
    } else {
        n
    }
}

/// Curvature of a curve with derivatives `d1, d2`, signed about `normal`.
pub fn signed_curvature(d1: &Point, d2: &Point, normal: &Point) -> f64 {
    let s = d1.norm();
    if s == 0.0 {
        return 0.0;
    }
    d1.cross(d2).dot(normal) / (s * s * s)
}

/// Sign changes between consecutive values, ignoring those below
/// [`SIGN_THRESHOLD`] times the largest magnitude.
pub fn count_sign_changes(values: &[f64], cyclic: bool) -> usize {
    let max = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<bool> =
        values.iter().filter(|v| v.is_finite() && v.abs() > SIGN_THRESHOLD * max).map(|&v| v > 0.0).collect();
    let mut n = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if cyclic && signs.len() > 1 && signs[0] != signs[signs.len() - 1] {
        n += 1;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub x: f64,
    pub position: [f64; 3],
    pub curvature: f64,
}

/// Interpolating curve through `points` with knot exponent `alpha`.
pub fn interpolate(points: Vec<Point>, family: SplineFamily, alpha: f64, closed: bool) -> Result<PolylineCurve> {
    let knots = make_knots(&points, alpha, closed)?;
    PolylineCurve::new(points, knots, family)
}

/// `n` samples over the curve domain, with curvature signed about the
/// best-fit plane of the control points.
pub fn sample_curve(curve: &PolylineCurve, n: usize) -> Result<Vec<CurveSample>> {
    if n == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let (lo, hi) = curve.domain();
    let normal = best_fit_normal(curve.points());
    (0..n)
        .map(|i| {
            let f = if curve.is_closed() {
                i as f64 / n as f64
            } else if n == 1 {
                0.0
            } else {
                i as f64 / (n - 1) as f64
            };
            let x = lo + (hi - lo) * f;
            let p = curve.eval(x, 0)?;
            let k = signed_curvature(&curve.eval(x, 1)?, &curve.eval(x, 2)?, &normal);
            Ok(CurveSample { x, position: [p.x, p.y, p.z], curvature: k })
        })
        .collect()
}

pub fn curve_sign_changes(curve: &PolylineCurve, samples: &[CurveSample]) -> usize {
    let k: Vec<f64> = samples.iter().map(|s| s.curvature).collect();
    count_sign_changes(&k, curve.is_closed())
}

pub fn write_csv<W: Write>(samples: &[CurveSample], mut w: W) -> Result<()> {
    writeln!(w, "x,px,py,pz,curvature")?;
    for s in samples {
        let [a, b, c] = s.position;
        writeln!(w, "{},{},{},{},{}", s.x, a, b, c, s.curvature)?;
    }
    Ok(())
}

/// Minimal SVG in the xy-plane: control polygon, curve and a curvature comb
/// with teeth of length `comb_scale * curvature` along the in-plane normal.
pub fn write_svg<W: Write>(points: &[Point], samples: &[CurveSample], comb_scale: f64, mut w: W) -> Result<()> {
    let pos: Vec<(f64, f64)> = samples.iter().map(|s| (s.position[0], s.position[1])).collect();
    let n = pos.len();
    let teeth: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (pos[i.saturating_sub(1)], pos[(i + 1).min(n - 1)]);
            let (tx, ty) = (b.0 - a.0, b.1 - a.1);
            let l = tx.hypot(ty);
            let (nx, ny) = if l > 0.0 { (-ty / l, tx / l) } else { (0.0, 0.0) };
            let k = comb_scale * samples[i].curvature;
            (pos[i].0 + k * nx, pos[i].1 + k * ny)
        })
        .collect();
    let all = points.iter().map(|p| (p.x, p.y)).chain(pos.iter().copied()).chain(teeth.iter().copied());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let stroke = pad / 10.0;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - pad,
        -(y1 + pad),
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    )?;
    writeln!(w, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">"#)?;
    let poly = |pts: &mut dyn Iterator<Item = (f64, f64)>| -> String {
        pts.map(|(x, y)| format!("{x},{y}")).collect::<Vec<_>>().join(" ")
    };
    let ctrl = poly(&mut points.iter().map(|p| (p.x, p.y)));
    writeln!(w, r#"<polyline stroke="gray" points="{ctrl}"/>"#)?;
    for (a, b) in pos.iter().zip(&teeth) {
        writeln!(w, r#"<polyline stroke="orange" points="{},{} {},{}"/>"#, a.0, a.1, b.0, b.1)?;
    }
    writeln!(w, r#"<polyline stroke="orange" points="{}"/>"#, poly(&mut teeth.iter().copied()))?;
    writeln!(w, r#"<polyline stroke="black" points="{}"/>"#, poly(&mut pos.iter().copied()))?;
    writeln!(w, "</g>\n</svg>")?;
    Ok(())
}
