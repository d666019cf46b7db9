//! Quad meshes with half-edge connectivity.
//!
//! Half-edge `4f + k` runs from `faces[f][k]` to `faces[f][(k+1) % 4]`, so
//! `next`, `prev` and `face` are arithmetic and only twins are stored.

mod extrapolate;
mod grid;
mod obj;
mod params;
pub mod shapes;

use std::collections::HashMap;

pub use extrapolate::{extrapolate_boundary_layer, Augmented};
pub use grid::{classify_faces, extract_local_grid, trace_section_polylines, LocalGrid, SectionPolyline};
pub use obj::{load_obj, parse_obj, save_obj, write_obj, ObjStats};
pub use params::{assign_edge_params, assign_edge_params_alpha, parse_edge_params_json, EdgeParams, ParamMethod};

use crate::error::{Error, Result};
use crate::spline::Point;

/// Vertex positions and quad faces, without connectivity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadMesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<[usize; 4]>,
}

impl QuadMesh {
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 4]>) -> Result<Self> {
        for (f, q) in faces.iter().enumerate() {
            if let Some(&i) = q.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::Structural(format!("face {f} references missing vertex {i}")));
            }
        }
        Ok(QuadMesh { vertices, faces })
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(&self.vertices)
    }
}

pub fn bbox_diagonal(pts: &[Point]) -> f64 {
    let mut lo = Point::repeat(f64::INFINITY);
    let mut hi = Point::repeat(f64::NEG_INFINITY);
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if pts.is_empty() {
        0.0
    } else {
        (hi - lo).norm()
    }
}

/// Quad mesh with frozen half-edge connectivity.
#[derive(Clone, Debug)]
pub struct HalfEdgeMesh {
    mesh: QuadMesh,
    twin: Vec<Option<usize>>,
    edge_of: Vec<usize>,
    edges: Vec<[usize; 2]>,
    edge_faces: Vec<Vec<usize>>,
    vert_edges: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

pub fn build_connectivity(mesh: QuadMesh) -> Result<HalfEdgeMesh> {
    HalfEdgeMesh::new(mesh)
}

impl HalfEdgeMesh {
    pub fn new(mesh: QuadMesh) -> Result<Self> {
        let nh = mesh.faces.len() * 4;
        let diag = mesh.bbox_diagonal();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        for (f, q) in mesh.faces.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = (q[k], q[(k + 1) % 4]);
                if a == b || q.iter().filter(|&&v| v == a).count() > 1 {
                    return Err(Error::Structural(format!("face {f} repeats vertex {a}")));
                }
                let len = (mesh.vertices[b] - mesh.vertices[a]).norm();
                if len <= 1e-12 * diag {
                    return Err(Error::DegenerateEdge(format!("edge ({a},{b}) of face {f} has length {len:e}")));
                }
                if directed.insert((a, b), 4 * f + k).is_some() {
                    return Err(Error::Structural(format!(
                        "directed edge ({a},{b}) used twice: non-manifold or inconsistent orientation at face {f}"
                    )));
                }
            }
        }
        let mut twin = vec![None; nh];
        let mut edge_of = vec![usize::MAX; nh];
        let mut edges = Vec::new();
        let mut edge_faces = Vec::new();
        let mut vert_edges = vec![Vec::new(); mesh.vertices.len()];
        for h in 0..nh {
            let (a, b) = (mesh.faces[h / 4][h % 4], mesh.faces[h / 4][(h % 4 + 1) % 4]);
            twin[h] = directed.get(&(b, a)).copied();
            if edge_of[h] != usize::MAX {
                continue;
            }
            let e = edges.len();
            edges.push([a.min(b), a.max(b)]);
            edge_of[h] = e;
            let mut fs = vec![h / 4];
            if let Some(t) = twin[h] {
                edge_of[t] = e;
                fs.push(t / 4);
            }
            edge_faces.push(fs);
            vert_edges[a].push(e);
            vert_edges[b].push(e);
        }
        let mut boundary = vec![false; mesh.vertices.len()];
        for h in 0..nh {
            if twin[h].is_none() {
                boundary[mesh.faces[h / 4][h % 4]] = true;
                boundary[mesh.faces[h / 4][(h % 4 + 1) % 4]] = true;
            }
        }
        let m = HalfEdgeMesh { mesh, twin, edge_of, edges, edge_faces, vert_edges, boundary };
        m.check_vertex_fans()?;
        Ok(m)
    }

    /// Every vertex star must be a single fan of faces.
    fn check_vertex_fans(&self) -> Result<()> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices()];
        for h in 0..self.num_half_edges() {
            out[self.origin(h)].push(h);
        }
        for (v, hs) in out.iter().enumerate() {
            if hs.is_empty() {
                continue;
            }
            let start = hs.iter().copied().find(|&h| self.twin(h).is_none()).unwrap_or(hs[0]);
            let mut h = start;
            let mut count = 0;
            loop {
                count += 1;
                match self.twin(self.prev(h)) {
                    Some(t) if t != start => h = t,
                    _ => break,
                }
                if count > hs.len() {
                    break;
                }
            }
            if count != hs.len() {
                return Err(Error::Structural(format!("vertex {v} is non-manifold")));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> &QuadMesh {
        &self.mesh
    }
    pub fn vertices(&self) -> &[Point] {
        &self.mesh.vertices
    }
    pub fn faces(&self) -> &[[usize; 4]] {
        &self.mesh.faces
    }
    pub fn num_vertices(&self) -> usize {
        self.mesh.vertices.len()
    }
    pub fn num_faces(&self) -> usize {
        self.mesh.faces.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_half_edges(&self) -> usize {
        self.twin.len()
    }
    pub fn position(&self, v: usize) -> Point {
        self.mesh.vertices[v]
    }

    #[inline]
    pub fn origin(&self, h: usize) -> usize {
        self.mesh.faces[h / 4][h % 4]
    }
    #[inline]
    pub fn dest(&self, h: usize) -> usize {
        self.mesh.faces[h / 4][(h % 4 + 1) % 4]
    }
    #[inline]
    pub fn next(&self, h: usize) -> usize {
        h - h % 4 + (h % 4 + 1) % 4
    }
    #[inline]
    pub fn prev(&self, h: usize) -> usize {
        h - h % 4 + (h % 4 + 3) % 4
    }
    #[inline]
    pub fn twin(&self, h: usize) -> Option<usize> {
        self.twin[h]
    }
    #[inline]
    pub fn face_of(&self, h: usize) -> usize {
        h / 4
    }
    #[inline]
    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    /// Canonical vertex pair `(lo, hi)` of an edge.
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    /// Edge joining `a` and `b`, if any.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.vert_edges.get(a)?.iter().copied().find(|&e| self.edges[e] == key)
    }
    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vert_edges[v]
    }
    pub fn valence(&self, v: usize) -> usize {
        self.vert_edges[v].len()
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 1
    }
    pub fn has_boundary(&self) -> bool {
        self.twin.iter().any(Option::is_none)
    }
    pub fn num_boundary_half_edges(&self) -> usize {
        self.twin.iter().filter(|t| t.is_none()).count()
    }

    /// Interior vertex of valence 4.
    pub fn is_regular_vertex(&self, v: usize) -> bool {
        !self.boundary[v] && self.valence(v) == 4
    }

    /// Half-edge of face `f` whose origin has the smallest vertex index.
    pub fn anchor_half_edge(&self, f: usize) -> usize {
        let q = &self.mesh.faces[f];
        let k = (0..4).min_by_key(|&k| q[k]).unwrap();
        4 * f + k
    }

    /// Half-edge of face `f` running from `a` to `b`, if any.
    pub fn face_half_edge(&self, f: usize, a: usize, b: usize) -> Option<usize> {
        (0..4).map(|k| 4 * f + k).find(|&h| self.origin(h) == a && self.dest(h) == b)
    }

    /// Euler characteristic `V - E + F` over referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let used = self.vert_edges.iter().filter(|e| !e.is_empty()).count();
        used as i64 - self.edges.len() as i64 + self.mesh.faces.len() as i64
    }

    /// Outgoing half-edges of `v` in fan order; for boundary vertices the
    /// fan starts at the outgoing boundary half-edge.
    pub fn vertex_fan(&self, v: usize) -> Vec<usize> {
        let hs: Vec<usize> = self.vert_edges[v]
            .iter()
            .flat_map(|&e| {
                let [a, b] = self.edges[e];
                let w = if a == v { b } else { a };
                self.edge_faces[e].iter().filter_map(move |&f| self.face_half_edge(f, v, w))
            })
            .collect();
        let Some(&first) = hs.first() else { return hs };
        let start = hs.iter().copied().find(|&h| self.twin(h).is_none()).unwrap_or(first);
        let mut fan = vec![start];
        let mut h = start;
        while let Some(t) = self.twin(self.prev(h)) {
            if t == start {
                break;
            }
            fan.push(t);
            h = t;
        }
        fan
    }

    pub fn face_normal(&self, f: usize) -> Point {
        let q = self.mesh.faces[f];
        let p = |i: usize| self.mesh.vertices[q[i]];
        let n = (p(2) - p(0)).cross(&(p(3) - p(1)));
        let l = n.norm();
        if l > 0.0 {
            n / l
        } else {
            n
        }
    }
}
