//! Curve network and cross fields for the sides of Gregory faces that have
//! no regular neighbour.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

use super::{side_between, side_ends, BuildOptions, RegularSide};
use crate::error::{Error, Result};
use crate::gregory::{Mode, SideData};
use crate::mesh::{Augmented, EdgeParams, HalfEdgeMesh};
use crate::network::{
    build_missing_boundary_curve, build_r, build_w, directional_derivs, fit_guide_polynomial, guide_coords,
    guide_coords_param, guide_frame, guide_points, match_r_derivatives, planar_angles, surface_frame, tangent_or_chord,
    CrossField, EdgeCurve, SurfaceFrame, VPoly,
};
use crate::patch::{RegularPatch, Side};
use crate::spline::{Point, SplineFamily};

#[derive(Clone, Debug)]
struct VertexData {
    edges: Vec<usize>,
    /// First and second derivative along each fan edge, away from the vertex.
    tau: Vec<(Point, Point)>,
    normal: Point,
    frame: Option<SurfaceFrame>,
}

#[derive(Clone, Debug)]
struct EdgeInfo {
    curve: EdgeCurve,
    r: VPoly,
    w: Option<VPoly>,
}

pub(crate) struct Network<'a> {
    mesh: &'a HalfEdgeMesh,
    params: &'a EdgeParams,
    nf: usize,
    regular: &'a [Option<Arc<RegularPatch>>],
    corners: &'a [[usize; 4]],
    opts: &'a BuildOptions,
    vdata: HashMap<usize, VertexData>,
    edges: HashMap<usize, EdgeInfo>,
}

/// Segment starting at the middle of three consecutive section points, with a
/// placeholder far point.
fn knot_window(family: SplineFamily, p: [Point; 3], d: [f64; 2]) -> EdgeCurve {
    let far = p[2] * 2.0 - p[1];
    EdgeCurve::Spline { family, p: [p[0], p[1], p[2], far], d: [d[0], d[1], d[1]] }
}

const UV: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];

fn orient_frame(f: SurfaceFrame, reference: &Point) -> SurfaceFrame {
    if f.normal.dot(reference) >= 0.0 {
        f
    } else {
        SurfaceFrame { normal: -f.normal, k1: -f.k2, k2: -f.k1, dir1: f.dir2, dir2: f.dir1 }
    }
}

impl<'a> Network<'a> {
    pub(crate) fn new(
        aug: &'a Augmented,
        regular: &'a [Option<Arc<RegularPatch>>],
        corners: &'a [[usize; 4]],
        opts: &'a BuildOptions,
        gregory_faces: &[usize],
    ) -> Result<Self> {
        let mesh = &aug.mesh;
        let mut net = Network {
            mesh,
            params: &aug.params,
            nf: aug.original_faces,
            regular,
            corners,
            opts,
            vdata: HashMap::new(),
            edges: HashMap::new(),
        };
        let mut verts = BTreeSet::new();
        let mut net_edges = BTreeSet::new();
        for &f in gregory_faces {
            for &v in &corners[f] {
                if mesh.is_boundary_vertex(v) {
                    return Err(Error::Unsupported(format!(
                        "face {f}: corner vertex {v} stays on the open boundary (boundary valence {} is not supported)",
                        mesh.valence(v) - 1
                    )));
                }
                verts.insert(v);
            }
            for s in Side::ALL {
                let (a, b) = side_ends(&corners[f], s);
                let e = mesh.find_edge(a, b).expect("face side is an edge");
                if net.regular_across(f, e).is_none() {
                    net_edges.insert(e);
                }
            }
        }
        let vd: Vec<(usize, VertexData)> =
            verts.into_par_iter().map(|v| net.vertex_data(v).map(|d| (v, d))).collect::<Result<_>>()?;
        net.vdata = vd.into_iter().collect();
        let ed: Vec<(usize, EdgeInfo)> =
            net_edges.into_par_iter().map(|e| net.edge_info(e).map(|i| (e, i))).collect::<Result<_>>()?;
        net.edges = ed.into_iter().collect();
        Ok(net)
    }

    fn regular_across(&self, f: usize, e: usize) -> Option<(usize, &Arc<RegularPatch>)> {
        self.mesh
            .edge_faces(e)
            .iter()
            .copied()
            .find(|&g| g != f && g < self.nf)
            .and_then(|g| self.regular[g].as_ref().map(|p| (g, p)))
    }

    /// Spline segment of edge `e` oriented away from `from`, if both ends continue.
    fn spline_segment(&self, e: usize, from: usize) -> Option<EdgeCurve> {
        let m = self.mesh;
        let to = m.other_end(e, from);
        let prev = m.continue_through(e, from)?;
        let next = m.continue_through(e, to)?;
        let ids = [m.other_end(prev, from), from, to, m.other_end(next, to)];
        Some(EdgeCurve::Spline {
            family: self.opts.family,
            p: ids.map(|v| m.position(v)),
            d: [self.params.edge(prev), self.params.edge(e), self.params.edge(next)],
        })
    }

    /// First and second derivative at `v`, along `e` and away from `v`, of the
    /// section curve continuing `e` through `v`. These knot derivatives only
    /// depend on the two adjacent points and intervals, so the far point of
    /// the window is a placeholder.
    fn continuation(&self, v: usize, e: usize) -> Option<(Point, Point)> {
        let m = self.mesh;
        let ext = m.continue_through(e, v)?;
        let (a, b) = (m.position(m.other_end(ext, v)), m.position(m.other_end(e, v)));
        let p = m.position(v);
        let de = self.params.edge(e);
        let seg = knot_window(self.opts.family, [a, p, b], [self.params.edge(ext), de]);
        Some((seg.eval(0.0, 1), seg.eval(0.0, 2)))
    }

    fn face_normal_sum(&self, v: usize) -> Point {
        self.mesh.vertex_fan(v).iter().map(|&h| self.mesh.face_normal(self.mesh.face_of(h))).sum()
    }

    fn vertex_data(&self, v: usize) -> Result<VertexData> {
        let m = self.mesh;
        let fan = m.vertex_fan(v);
        let edges: Vec<usize> = fan.iter().map(|&h| m.edge_of(h)).collect();
        let cont: Vec<Option<(Point, Point)>> = edges.iter().map(|&e| self.continuation(v, e)).collect();
        let reg = fan.iter().find_map(|&h| {
            let f = m.face_of(h);
            let p = self.regular.get(f)?.as_ref()?;
            let k = self.corners[f].iter().position(|&c| c == v)?;
            Some((p, UV[k]))
        });
        let need_net = reg.is_none() || cont.iter().any(|c| c.is_none());
        let est = if need_net { Some(self.estimate(v, &fan)?) } else { None };
        let reference = self.face_normal_sum(v);
        let (normal, frame) = match reg {
            Some((p, (u, w))) => {
                let fr = surface_frame(
                    &p.eval_mixed(u, w, 1, 0),
                    &p.eval_mixed(u, w, 0, 1),
                    &p.eval_mixed(u, w, 2, 0),
                    &p.eval_mixed(u, w, 1, 1),
                    &p.eval_mixed(u, w, 0, 2),
                )
                .map_err(|e| Error::Construction(format!("vertex {v}: {e}")))?;
                let fr = orient_frame(fr, &reference);
                (fr.normal, Some(fr))
            }
            None => {
                let (_, n, fr) = est.as_ref().expect("estimated when no regular patch");
                let n = if n.dot(&reference) < 0.0 { -n } else { *n };
                (n, fr.map(|f| orient_frame(f, &reference)))
            }
        };
        let tau = cont
            .iter()
            .enumerate()
            .map(|(i, c)| c.unwrap_or_else(|| est.as_ref().expect("estimated when a continuation is missing").0[i]))
            .collect();
        Ok(VertexData { edges, tau, normal, frame })
    }

    /// Compatible derivatives at `v` from the generalized Bessel tangents
    /// (G1: projected onto a common plane; G2: guide polynomial).
    #[allow(clippy::type_complexity)]
    fn estimate(&self, v: usize, fan: &[usize]) -> Result<(Vec<(Point, Point)>, Point, Option<SurfaceFrame>)> {
        let m = self.mesh;
        let n = fan.len();
        let ctx = |e: Error| Error::Construction(format!("vertex {v}: {e}"));
        if n < 3 {
            return Err(Error::Unsupported(format!("vertex {v} has valence {n}")));
        }
        let p0 = m.position(v);
        let nb: Vec<Point> = fan.iter().map(|&h| m.position(m.dest(h))).collect();
        let d: Vec<f64> = fan.iter().map(|&h| self.params.half_edge(m, h)).collect();
        let t: Vec<Point> = (0..n).map(|i| tangent_or_chord(&p0, &nb, &d, i)).collect::<Result<_>>().map_err(ctx)?;
        if self.opts.mode == Mode::G1 {
            let cov: Matrix3<f64> = t.iter().map(|x| x * x.transpose()).sum();
            let eig = SymmetricEigen::new(cov);
            let k = eig.eigenvalues.imin();
            let nrm: Point = eig.eigenvectors.column(k).into();
            let tau = t.iter().map(|x| (x - nrm * x.dot(&nrm), Point::zeros())).collect();
            return Ok((tau, nrm, None));
        }
        let back: Vec<Point> = (0..n).map(|i| self.back_derivative(v, fan[i])).collect::<Result<_>>()?;
        let mut q = Vec::with_capacity(2 * n);
        let mut qm = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = guide_points(&p0, &nb[i], d[i], &t[i], &back[i]);
            q.push(a);
            qm.push(b);
        }
        q.extend(qm);
        let eta = planar_angles(&t).map_err(ctx)?;
        let xy = match self.opts.guide_alpha {
            Some(alpha) => guide_coords(&p0, &q, &eta, alpha),
            None => guide_coords_param(&d, &eta),
        };
        let poly = fit_guide_polynomial(&p0, &q, &xy).map_err(ctx)?;
        let tau = eta.iter().map(|&e| directional_derivs(&poly, e)).collect();
        let frame = guide_frame(&poly).map_err(ctx)?;
        Ok((tau, frame.normal, Some(frame)))
    }

    /// Derivative at the far end of half-edge `h` (from `v`), oriented from `v`
    /// toward the far end: sampled from the continuing spline when available,
    /// else the negated Bessel estimate there, else the chord.
    fn back_derivative(&self, v: usize, h: usize) -> Result<Point> {
        let m = self.mesh;
        let e = m.edge_of(h);
        let pi = m.dest(h);
        if let Some((t, _)) = self.continuation(pi, e) {
            return Ok(-t);
        }
        let chord = (m.position(pi) - m.position(v)) / self.params.edge(e);
        if m.is_boundary_vertex(pi) || m.valence(pi) < 3 {
            return Ok(chord);
        }
        let fan = m.vertex_fan(pi);
        let Some(j) = fan.iter().position(|&g| m.edge_of(g) == e) else { return Ok(chord) };
        let nb: Vec<Point> = fan.iter().map(|&g| m.position(m.dest(g))).collect();
        let dd: Vec<f64> = fan.iter().map(|&g| self.params.half_edge(m, g)).collect();
        Ok(-tangent_or_chord(&m.position(pi), &nb, &dd, j)?)
    }

    fn tau(&self, v: usize, e: usize) -> (Point, Point) {
        let vd = &self.vdata[&v];
        let i = vd.edges.iter().position(|&x| x == e).expect("edge incident to vertex");
        vd.tau[i]
    }

    fn edge_info(&self, e: usize) -> Result<EdgeInfo> {
        let m = self.mesh;
        let [lo, hi] = m.edge(e);
        let de = self.params.edge(e);
        let curve = match self.spline_segment(e, lo) {
            Some(c) => c,
            None => {
                let (a0, a2) = self.tau(lo, e);
                let (b0, b2) = self.tau(hi, e);
                let second = (self.opts.mode == Mode::G2).then_some([a2, b2]);
                EdgeCurve::Hermite(build_missing_boundary_curve(
                    [m.position(lo), m.position(hi)],
                    [a0, -b0],
                    second,
                    de,
                )?)
            }
        };
        let (vl, vh) = (&self.vdata[&lo], &self.vdata[&hi]);
        let nm = if self.opts.r_degree == 2 {
            let s: Point = m.edge_faces(e).iter().map(|&f| m.face_normal(f)).sum();
            let s = if s.norm() > 0.0 { s.normalize() } else { 0.5 * (vl.normal + vh.normal) };
            Some(s)
        } else {
            None
        };
        let mut r = build_r(&curve, &vl.normal, &vh.normal, nm.as_ref());
        let w = match (self.opts.mode, vl.frame, vh.frame) {
            (Mode::G2, Some(f0), Some(f1)) => {
                r = match_r_derivatives(&r, &curve, &f0, &f1);
                Some(build_w(&r, de, &f0, &f1))
            }
            (Mode::G2, _, _) => return Err(Error::Construction(format!("edge ({lo},{hi}): missing curvature data"))),
            _ => None,
        };
        Ok(EdgeInfo { curve, r, w })
    }

    pub(crate) fn face_sides(&self, f: usize) -> Result<[Arc<dyn SideData>; 4]> {
        let m = self.mesh;
        let c = &self.corners[f];
        let g2 = self.opts.mode == Mode::G2;
        enum Src<'b> {
            Reg(Arc<dyn SideData>),
            Net(&'b EdgeInfo, bool),
        }
        let mut src = Vec::with_capacity(4);
        for s in Side::ALL {
            let (a, b) = side_ends(c, s);
            let e = m.find_edge(a, b).expect("face side is an edge");
            match self.regular_across(f, e) {
                Some((g, p)) => {
                    let (sr, rev) = side_between(&self.corners[g], a, b).expect("shared edge is a side of both");
                    src.push(Src::Reg(Arc::new(RegularSide {
                        patch: p.clone(),
                        side: sr,
                        reversed: rev,
                        cross_sign: -sr.inward_sign() * s.inward_sign(),
                        with_xi: g2,
                    })));
                }
                None => src.push(Src::Net(&self.edges[&e], m.edge(e)[0] != a)),
            }
        }
        let interval = |i: usize| match &src[i] {
            Src::Reg(d) => d.interval(),
            Src::Net(info, _) => info.curve.interval(),
        };
        let gamma = |i: usize, x: f64, k: usize| match &src[i] {
            Src::Reg(d) => d.gamma(x, k),
            Src::Net(info, rev) => {
                if *rev {
                    let s = if k % 2 == 1 { -1.0 } else { 1.0 };
                    info.curve.eval(info.curve.interval() - x, k) * s
                } else {
                    info.curve.eval(x, k)
                }
            }
        };
        // adjacent sides at the start and end of each side
        let adj = |s: usize, k: usize| -> [Point; 2] {
            match s {
                0 => [gamma(3, 0.0, k), gamma(1, 0.0, k)],
                1 => [gamma(0, interval(0), k), gamma(2, interval(2), k)],
                2 => [gamma(3, interval(3), k), gamma(1, interval(1), k)],
                _ => [gamma(0, 0.0, k), gamma(2, 0.0, k)],
            }
        };
        let mut out: Vec<Arc<dyn SideData>> = Vec::with_capacity(4);
        for (i, sd) in src.iter().enumerate() {
            match sd {
                Src::Reg(d) => out.push(d.clone()),
                Src::Net(info, rev) => {
                    let (a, b) = side_ends(c, Side::from_index(i));
                    let ctx = |e: Error| Error::Construction(format!("face {f}, side ({a},{b}): {e}"));
                    let mut cf = CrossField::new_chi(info.curve.clone(), info.r.clone(), *rev, adj(i, 1), [a, b])
                        .map_err(ctx)?;
                    if g2 {
                        let w = info.w.clone().expect("w built in G2 mode");
                        cf = cf.with_xi(w, adj(i, 2), [a, b]).map_err(ctx)?;
                    }
                    out.push(Arc::new(cf));
                }
            }
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
    }
}
