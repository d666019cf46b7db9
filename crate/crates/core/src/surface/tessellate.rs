use std::collections::HashMap;

use rayon::prelude::*;

use super::CompositeSurface;
use crate::error::{Error, Result};
use crate::mesh::bbox_diagonal;
use crate::spline::Point;

/// Relative weld tolerance (times the bounding-box diagonal).
pub const WELD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub positions: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Face and `(u, v)` each vertex was first sampled at.
    pub source: Vec<(usize, f64, f64)>,
    /// Named per-vertex scalars.
    pub channels: Vec<(String, Vec<f64>)>,
}

impl TriangleMesh {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn add_channel(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.positions.len() {
            return Err(Error::Contract(format!(
                "channel {name} has {} values for {} vertices",
                values.len(),
                self.positions.len()
            )));
        }
        self.channels.retain(|(n, _)| n != name);
        self.channels.push((name.to_string(), values));
        Ok(())
    }
}

/// Samples of every patch on an `(n+1) x (n+1)` grid, index `j * (n + 1) + i`
/// for `u = i / n`, `v = j / n`.
pub fn sample_grid(surface: &CompositeSurface, n: usize) -> Vec<Vec<Point>> {
    let n = n.max(1);
    surface
        .patches
        .par_iter()
        .map(|p| {
            let mut out = Vec::with_capacity((n + 1) * (n + 1));
            for j in 0..=n {
                for i in 0..=n {
                    out.push(p.eval(i as f64 / n as f64, j as f64 / n as f64));
                }
            }
            out
        })
        .collect()
}

type Cell = (i64, i64, i64);

struct Welder {
    tol: f64,
    cells: HashMap<Cell, Vec<usize>>,
}

impl Welder {
    fn cell(&self, p: &Point) -> Cell {
        let c = |x: f64| (x / self.tol).floor() as i64;
        (c(p.x), c(p.y), c(p.z))
    }

    fn find(&self, p: &Point, positions: &[Point]) -> Option<usize> {
        let (a, b, c) = self.cell(p);
        let mut best: Option<(f64, usize)> = None;
        for i in -1..=1 {
            for j in -1..=1 {
                for k in -1..=1 {
                    for &id in self.cells.get(&(a + i, b + j, c + k)).into_iter().flatten() {
                        let d = (positions[id] - p).norm();
                        if d <= self.tol && best.is_none_or(|(bd, bi)| d < bd || (d == bd && id < bi)) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|(_, id)| id)
    }

    fn insert(&mut self, p: &Point, id: usize) {
        self.cells.entry(self.cell(p)).or_default().push(id);
    }
}

/// Triangulate every patch on an `n x n` grid and weld shared vertices.
pub fn tessellate(surface: &CompositeSurface, n: usize) -> TriangleMesh {
    let n = n.max(1);
    let grids = sample_grid(surface, n);
    let all: Vec<Point> = grids.iter().flatten().copied().collect();
    let diag = bbox_diagonal(&all);
    let tol = if diag > 0.0 { WELD_TOL * diag } else { f64::MIN_POSITIVE };
    let mut w = Welder { tol, cells: HashMap::new() };
    let mut mesh = TriangleMesh::default();
    let stride = n + 1;
    for (f, g) in grids.iter().enumerate() {
        let ids: Vec<usize> = g
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                if let Some(id) = w.find(p, &mesh.positions) {
                    return id;
                }
                let id = mesh.positions.len();
                mesh.positions.push(*p);
                mesh.source.push((f, (idx % stride) as f64 / n as f64, (idx / stride) as f64 / n as f64));
                w.insert(p, id);
                id
            })
            .collect();
        for j in 0..n {
            for i in 0..n {
                let a = ids[j * stride + i];
                let b = ids[j * stride + i + 1];
                let c = ids[(j + 1) * stride + i + 1];
                let d = ids[(j + 1) * stride + i];
                for t in [[a, b, c], [a, c, d]] {
                    if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
                        mesh.triangles.push(t);
                    }
                }
            }
        }
    }
    mesh
}
