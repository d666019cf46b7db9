use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CompositeSurface, Patch};
use crate::curve::{best_fit_normal, count_sign_changes, signed_curvature};
use crate::gregory::Mode;
use crate::mesh::trace_section_polylines;
use crate::patch::{boundary_scaling_delta, Side};
use crate::spline::{KnotSequence, Point, PolylineCurve};

/// Finite-difference step in `u, v`.
pub const FD_STEP: f64 = 1e-4;

/// Unit light direction of the isophote channel.
pub const LIGHT_DIR: [f64; 3] = [0.0, 0.0, 1.0];

/// Second-order accurate first and second derivative of `g` at `t` in `[0, 1]`,
/// central inside and one-sided near the ends.
fn stencil(g: impl Fn(f64) -> Point, t: f64, h: f64) -> (Point, Point) {
    if t - h >= 0.0 && t + h <= 1.0 {
        let (a, b, c) = (g(t - h), g(t), g(t + h));
        ((c - a) / (2.0 * h), (a - 2.0 * b + c) / (h * h))
    } else {
        let s = if t - h < 0.0 { 1.0 } else { -1.0 };
        let f: Vec<Point> = (0..4).map(|i| g(t + s * i as f64 * h)).collect();
        let d1 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h) * s;
        let d2 = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        (d1, d2)
    }
}

/// `r`-th derivative (1 or 2) of `g` at `t` by [`stencil`].
fn fd(g: impl Fn(f64) -> Point, t: f64, r: usize) -> Point {
    let (a, b) = stencil(g, t, FD_STEP);
    if r == 1 {
        a
    } else {
        b
    }
}

/// `Su, Sv, Suu, Suv, Svv` by finite differences.
pub(crate) fn partials(p: &Patch, u: f64, v: f64) -> [Point; 5] {
    let h = FD_STEP;
    let (su, suu) = stencil(|x| p.eval(x, v), u, h);
    let (sv, svv) = stencil(|y| p.eval(u, y), v, h);
    let (suv, _) = stencil(|y| stencil(|x| p.eval(x, y), u, h).0, v, h);
    [su, sv, suu, suv, svv]
}

fn unit_normal(d: &[Point; 5]) -> Option<Point> {
    let n = d[0].cross(&d[1]);
    let l = n.norm();
    (l >= 1e-12).then(|| n / l)
}

/// Mean curvature from the fundamental forms.
fn mean_curvature(d: &[Point; 5]) -> Option<f64> {
    let n = unit_normal(d)?;
    let (e, f, g) = (d[0].dot(&d[0]), d[0].dot(&d[1]), d[1].dot(&d[1]));
    let (l, m, nn) = (d[2].dot(&n), d[3].dot(&n), d[4].dot(&n));
    Some((e * nn - 2.0 * f * m + g * l) / (2.0 * (e * g - f * f)))
}

/// Normal curvature in the tangent direction `c`.
fn normal_curvature(d: &[Point; 5], n: &Point, c: &Point) -> f64 {
    let a = Matrix2::new(d[0].dot(&d[0]), d[0].dot(&d[1]), d[0].dot(&d[1]), d[1].dot(&d[1]));
    let rhs = Vector2::new(d[0].dot(c), d[1].dot(c));
    let Some(w) = a.lu().solve(&rhs) else { return f64::NAN };
    let (x, y) = (w[0], w[1]);
    let two = d[2].dot(n) * x * x + 2.0 * d[3].dot(n) * x * y + d[4].dot(n) * y * y;
    let one = (d[0] * x + d[1] * y).norm_squared();
    two / one
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisFields {
    pub mean_curvature: Vec<f64>,
    pub isophote: Vec<f64>,
    /// Samples with a degenerate normal (reported as NaN).
    pub degenerate: usize,
}

/// Mean curvature and isophote value at `(face, u, v)` samples.
pub fn analysis_fields(surface: &CompositeSurface, samples: &[(usize, f64, f64)]) -> AnalysisFields {
    let light = Point::from(LIGHT_DIR);
    let vals: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|&(f, u, v)| {
            let d = partials(&surface.patches[f], u, v);
            match (unit_normal(&d), mean_curvature(&d)) {
                (Some(n), Some(h)) => (h, n.dot(&light).clamp(-1.0, 1.0)),
                _ => (f64::NAN, f64::NAN),
            }
        })
        .collect();
    let degenerate = vals.iter().filter(|(h, _)| h.is_nan()).count();
    if degenerate > 0 {
        log::warn!("{degenerate} samples with degenerate normal");
    }
    let (mean_curvature, isophote) = vals.into_iter().unzip();
    AnalysisFields { mean_curvature, isophote, degenerate }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    RegularRegular,
    RegularGregory,
    GregoryGregory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub vertices: [usize; 2],
    pub faces: [usize; 2],
    pub kind: EdgeKind,
    pub max_position_gap: f64,
    /// Degrees.
    pub max_normal_angle: f64,
    /// G2 only: largest normal-curvature difference over the boundary
    /// tangent, the cross direction and their bisector.
    pub max_curvature_gap: Option<f64>,
    /// Regular-regular only: relative residual of the scaled cross-derivative
    /// law for orders `1..=k`.
    pub scaling_residual: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

impl Percentiles {
    /// Nearest-rank percentiles; NaNs are ignored.
    pub fn of(values: &[f64]) -> Percentiles {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return Percentiles::default();
        }
        v.sort_by(f64::total_cmp);
        let at = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Percentiles { p50: at(0.5), p90: at(0.9), p99: at(0.99), max: v[v.len() - 1] }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub edges: usize,
    pub position_gap: Percentiles,
    pub normal_angle: Percentiles,
    pub curvature_gap: Option<Percentiles>,
    pub scaling_residual: Option<Percentiles>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub mode: Mode,
    pub samples_per_edge: usize,
    pub edges: Vec<EdgeReport>,
    pub summary: ReportSummary,
}

impl ContinuityReport {
    pub fn max_position_gap(&self) -> f64 {
        self.summary.position_gap.max
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Cross derivative of order `r` in the patch's own coordinate, sampled
/// one-sided into the patch.
fn cross_fd(p: &Patch, s: Side, t: f64, r: usize) -> Point {
    let (u, v) = s.uv(t);
    if s.along_u() {
        fd(|y| p.eval(u, y), v, r)
    } else {
        fd(|x| p.eval(x, v), u, r)
    }
}

fn angle_deg(a: &Point, b: &Point) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

fn edge_report(surface: &CompositeSurface, e: usize, n: usize) -> Option<EdgeReport> {
    let mesh = surface.mesh();
    let nf = surface.patches.len();
    let faces = mesh.edge_faces(e);
    if faces.len() != 2 || faces[0] >= nf || faces[1] >= nf {
        return None;
    }
    let [a, b] = mesh.edge(e);
    let (f, g) = (faces[0], faces[1]);
    let (pf, pg) = (&surface.patches[f], &surface.patches[g]);
    let (sf, rf) = surface.side_of(f, a, b)?;
    let (sg, rg) = surface.side_of(g, a, b)?;
    let kind = match (pf.is_regular(), pg.is_regular()) {
        (true, true) => EdgeKind::RegularRegular,
        (false, false) => EdgeKind::GregoryGregory,
        _ => EdgeKind::RegularGregory,
    };
    let g2 = surface.options.mode == Mode::G2;
    let (mut gap, mut ang, mut curv) = (0.0f64, 0.0f64, 0.0f64);
    let k = surface.options.family.continuity();
    let mut resid = vec![0.0f64; k];
    for i in 0..n {
        let t = (i as f64 + 0.5) / n as f64;
        let tf = if rf { 1.0 - t } else { t };
        let tg = if rg { 1.0 - t } else { t };
        let (uf, vf) = sf.uv(tf);
        let (ug, vg) = sg.uv(tg);
        gap = gap.max((pf.eval(uf, vf) - pg.eval(ug, vg)).norm());
        let df = partials(pf, uf, vf);
        let dg = partials(pg, ug, vg);
        let (Some(nf), Some(ng)) = (unit_normal(&df), unit_normal(&dg)) else {
            ang = f64::NAN;
            continue;
        };
        ang = ang.max(angle_deg(&nf, &ng));
        if g2 {
            let along = if sf.along_u() { df[0] } else { df[1] };
            let tan = along.normalize();
            let cross = nf.cross(&tan);
            let bis = (tan + cross).normalize();
            for c in [tan, cross, bis] {
                let d = (normal_curvature(&df, &nf, &c) - normal_curvature(&dg, &ng, &c)).abs();
                curv = curv.max(d);
            }
        }
        if let (Patch::Regular(ra), Patch::Regular(rb)) = (pf, pg) {
            let Ok(dl) = boundary_scaling_delta(ra, rb, tf) else { continue };
            let s = -sf.inward_sign() * sg.inward_sign();
            // relative to the first cross derivative too, so that vanishing
            // higher derivatives on flat data do not blow up the ratio
            let scale = cross_fd(pf, sf, tf, 1).norm();
            for (r, res) in resid.iter_mut().enumerate() {
                let r = r + 1;
                let da = cross_fd(pf, sf, tf, r);
                let db = cross_fd(pg, sg, tg, r);
                let rel = (da - (s * dl).powi(r as i32) * db).norm() / da.norm().max(scale).max(f64::MIN_POSITIVE);
                *res = res.max(rel);
            }
        }
    }
    Some(EdgeReport {
        vertices: [a, b],
        faces: [f, g],
        kind,
        max_position_gap: gap,
        max_normal_angle: ang,
        max_curvature_gap: g2.then_some(curv),
        scaling_residual: (kind == EdgeKind::RegularRegular).then_some(resid),
    })
}

/// Sampled continuity across every interior edge of the input mesh.
pub fn continuity_report(surface: &CompositeSurface, samples_per_edge: usize) -> ContinuityReport {
    let n = samples_per_edge.max(1);
    let edges: Vec<EdgeReport> =
        (0..surface.augmented.original_edges).into_par_iter().filter_map(|e| edge_report(surface, e, n)).collect();
    let col = |f: &dyn Fn(&EdgeReport) -> Option<f64>| -> Option<Percentiles> {
        let v: Vec<f64> = edges.iter().filter_map(f).collect();
        (!v.is_empty()).then(|| Percentiles::of(&v))
    };
    let summary = ReportSummary {
        edges: edges.len(),
        position_gap: col(&|e| Some(e.max_position_gap)).unwrap_or_default(),
        normal_angle: col(&|e| Some(e.max_normal_angle)).unwrap_or_default(),
        curvature_gap: col(&|e| e.max_curvature_gap),
        scaling_residual: col(&|e| e.scaling_residual.as_ref().map(|r| r.iter().copied().fold(0.0, f64::max))),
    };
    ContinuityReport { mode: surface.options.mode, samples_per_edge: n, edges, summary }
}

/// Curvature sign changes summed over the section curves of the input mesh,
/// sampling each curve segment `samples` times.
pub fn section_sign_changes(surface: &CompositeSurface, samples: usize) -> usize {
    let mesh = surface.mesh();
    let params = surface.params();
    let orig = surface.augmented.original_edges;
    let family = surface.options.family;
    trace_section_polylines(mesh)
        .par_iter()
        .map(|sp| {
            let pts: Vec<Point> = sp.vertices.iter().map(|&v| mesh.position(v)).collect();
            let mut knots = vec![0.0];
            for &e in &sp.edges {
                knots.push(knots[knots.len() - 1] + params.edge(e));
            }
            let Ok(ks) = KnotSequence::new(knots, sp.closed) else { return 0 };
            let Ok(curve) = PolylineCurve::new(pts.clone(), ks, family) else { return 0 };
            let normal = best_fit_normal(&pts);
            let segs = sp.edges.len();
            let mut kappa = Vec::new();
            for (s, &e) in sp.edges.iter().enumerate() {
                let evaluable = sp.closed || (s >= 1 && s + 2 <= segs);
                if e >= orig || !evaluable {
                    continue;
                }
                let d = params.edge(e);
                for j in 0..samples.max(1) {
                    let t = d * (j as f64 + 0.5) / samples.max(1) as f64;
                    kappa.push(signed_curvature(
                        &curve.eval_on_segment(s, t, 1),
                        &curve.eval_on_segment(s, t, 2),
                        &normal,
                    ));
                }
            }
            count_sign_changes(&kappa, sp.closed && kappa.len() == segs * samples.max(1))
        })
        .sum()
}
