//! Regular/extraordinary classification, local vertex grids and section polylines.

use super::{EdgeParams, HalfEdgeMesh};
use crate::error::{Error, Result};
use crate::spline::Point;

impl HalfEdgeMesh {
    /// Bottom half-edge of the cell to the right (`+u`).
    pub fn cell_right(&self, h: usize) -> Option<usize> {
        self.twin(self.next(h)).map(|t| self.next(t))
    }
    pub fn cell_left(&self, h: usize) -> Option<usize> {
        self.twin(self.prev(h)).map(|t| self.prev(t))
    }
    pub fn cell_up(&self, h: usize) -> Option<usize> {
        self.twin(self.next(self.next(h)))
    }
    pub fn cell_down(&self, h: usize) -> Option<usize> {
        self.twin(h).map(|t| self.next(self.next(t)))
    }

    /// Bottom half-edge of cell `(i, j)` relative to the cell whose bottom is `h`.
    /// Only meaningful when the vertices crossed are regular.
    pub fn cell_at(&self, h: usize, i: i32, j: i32) -> Option<usize> {
        let mut c = h;
        for _ in 0..i.abs() {
            c = if i > 0 { self.cell_right(c)? } else { self.cell_left(c)? };
        }
        for _ in 0..j.abs() {
            c = if j > 0 { self.cell_up(c)? } else { self.cell_down(c)? };
        }
        Some(c)
    }

    fn cell_corners(&self, b: usize) -> [usize; 4] {
        [self.origin(b), self.dest(b), self.dest(self.next(b)), self.origin(self.prev(b))]
    }
}

/// `true` for faces that admit a full `w x w` vertex grid.
pub fn classify_faces(mesh: &HalfEdgeMesh, w: usize) -> Vec<bool> {
    (0..mesh.num_faces()).map(|f| face_is_regular(mesh, f, w)).collect()
}

fn face_is_regular(mesh: &HalfEdgeMesh, f: usize, w: usize) -> bool {
    let h0 = mesh.anchor_half_edge(f);
    let rmax = (w / 2).saturating_sub(1) as i32;
    for r in 0..rmax {
        for i in -r..=r {
            for j in -r..=r {
                let Some(c) = mesh.cell_at(h0, i, j) else { return false };
                if !mesh.cell_corners(c).iter().all(|&v| mesh.is_regular_vertex(v)) {
                    return false;
                }
            }
        }
    }
    // all cells of the window must exist
    (-rmax..=rmax).all(|i| (-rmax..=rmax).all(|j| mesh.cell_at(h0, i, j).is_some()))
}

/// 4x4 vertex window around a regular face. Index `[i+1][j+1]` holds `p_{i,j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalGrid {
    pub face: usize,
    pub p: [[Point; 4]; 4],
    pub ids: [[usize; 4]; 4],
    /// `d[i+1][j]` = interval of edge `p_{i,j} p_{i+1,j}`, `i in -1..=1`, `j in 0..=1`.
    pub d: [[f64; 2]; 3],
    /// `e[i][j+1]` = interval of edge `p_{i,j} p_{i,j+1}`, `i in 0..=1`, `j in -1..=1`.
    pub e: [[f64; 3]; 2],
}

impl LocalGrid {
    pub fn point(&self, i: i32, j: i32) -> Point {
        self.p[(i + 1) as usize][(j + 1) as usize]
    }
}

pub fn extract_local_grid(mesh: &HalfEdgeMesh, params: &EdgeParams, face: usize) -> Result<LocalGrid> {
    if !face_is_regular(mesh, face, 4) {
        return Err(Error::Contract(format!("face {face} is not regular")));
    }
    let h0 = mesh.anchor_half_edge(face);
    let mut cells = [[0usize; 3]; 3];
    for i in -1..=1 {
        for j in -1..=1 {
            cells[(i + 1) as usize][(j + 1) as usize] = mesh
                .cell_at(h0, i, j)
                .ok_or_else(|| Error::Contract(format!("face {face}: missing cell ({i},{j})")))?;
        }
    }
    let mut ids = [[usize::MAX; 4]; 4];
    for ci in 0..3 {
        for cj in 0..3 {
            let c = mesh.cell_corners(cells[ci][cj]);
            for (k, (di, dj)) in [(0, 0), (1, 0), (1, 1), (0, 1)].into_iter().enumerate() {
                ids[ci + di][cj + dj] = c[k];
            }
        }
    }
    let p = ids.map(|row| row.map(|v| mesh.position(v)));
    let iv = |h: usize| params.half_edge(mesh, h);
    let mut d = [[0.0; 2]; 3];
    for i in 0..3 {
        let b = cells[i][1];
        d[i][0] = iv(b);
        d[i][1] = iv(mesh.next(mesh.next(b)));
    }
    let mut e = [[0.0; 3]; 2];
    for j in 0..3 {
        let b = cells[1][j];
        e[0][j] = iv(mesh.prev(b));
        e[1][j] = iv(mesh.next(b));
    }
    Ok(LocalGrid { face, p, ids, d, e })
}

/// Chain of pairwise adjacent edges continuing straight through regular vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionPolyline {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub closed: bool,
}

impl HalfEdgeMesh {
    /// Edge continuing `e` straight through its endpoint `v`, if any.
    pub fn continue_through(&self, e: usize, v: usize) -> Option<usize> {
        let n = self.valence(v);
        let admissible = if self.is_boundary_vertex(v) { n == 3 } else { n == 4 };
        if !admissible {
            return None;
        }
        let fe = self.edge_faces(e);
        let mut cand = self
            .vertex_edges(v)
            .iter()
            .copied()
            .filter(|&c| c != e && !self.edge_faces(c).iter().any(|f| fe.contains(f)));
        let first = cand.next()?;
        if cand.next().is_some() {
            return None;
        }
        Some(first)
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edge(e);
        if a == v {
            b
        } else {
            a
        }
    }
}

pub fn trace_section_polylines(mesh: &HalfEdgeMesh) -> Vec<SectionPolyline> {
    let mut used = vec![false; mesh.num_edges()];
    let mut out = Vec::new();
    for e0 in 0..mesh.num_edges() {
        if used[e0] {
            continue;
        }
        used[e0] = true;
        let [a, b] = mesh.edge(e0);
        let mut verts = vec![a, b];
        let mut edges = vec![e0];
        let mut closed = false;
        let (mut e, mut v) = (e0, b);
        while let Some(n) = mesh.continue_through(e, v) {
            if n == e0 {
                closed = true;
                break;
            }
            if used[n] {
                break;
            }
            used[n] = true;
            v = mesh.other_end(n, v);
            e = n;
            edges.push(n);
            verts.push(v);
        }
        if closed {
            verts.pop();
        } else {
            let (mut e, mut v) = (e0, a);
            let mut back_v = Vec::new();
            let mut back_e = Vec::new();
            while let Some(n) = mesh.continue_through(e, v) {
                if used[n] {
                    break;
                }
                used[n] = true;
                v = mesh.other_end(n, v);
                e = n;
                back_e.push(n);
                back_v.push(v);
            }
            back_v.reverse();
            back_e.reverse();
            back_v.extend(verts);
            back_e.extend(edges);
            verts = back_v;
            edges = back_e;
        }
        out.push(SectionPolyline { vertices: verts, edges, closed });
    }
    out
}
