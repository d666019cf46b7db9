//! Small parametric quad meshes for demos and tests.

use std::f64::consts::TAU;

use super::{HalfEdgeMesh, QuadMesh};
use crate::error::{Error, Result};
use crate::spline::Point;

/// Unit cube, outward-oriented faces.
pub fn cube() -> QuadMesh {
    let v = (0..8).map(|i| Point::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)).collect();
    let f = vec![[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
    QuadMesh { vertices: v, faces: f }
}

/// Torus with `n x m` faces; vertex `(i, j)` has id `i * m + j` and sits at
/// angles `a(i), b(j)` given by the two angle functions.
pub fn torus_with(
    n: usize,
    m: usize,
    big: f64,
    small: f64,
    a: impl Fn(usize) -> f64,
    b: impl Fn(usize) -> f64,
) -> QuadMesh {
    let mut v = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let (a, b) = (a(i), b(j));
            let r = big + small * b.cos();
            v.push(Point::new(r * a.cos(), r * a.sin(), small * b.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % n) * m + (j % m);
    let mut f = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    QuadMesh { vertices: v, faces: f }
}

/// Evenly sampled torus with radii 3 and 1.
pub fn torus(n: usize, m: usize) -> QuadMesh {
    torus_with(n, m, 3.0, 1.0, |i| i as f64 / n as f64 * TAU, |j| j as f64 / m as f64 * TAU)
}

/// Planar `n x m` grid of unit squares in `z = 0`.
pub fn grid(n: usize, m: usize) -> QuadMesh {
    let mut v = Vec::with_capacity((n + 1) * (m + 1));
    for j in 0..=m {
        for i in 0..=n {
            v.push(Point::new(i as f64, j as f64, 0.0));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut f = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    QuadMesh { vertices: v, faces: f }
}

/// Rotate the interior edge `a-b` inside the hexagon formed by its two faces.
/// `a` and `b` lose one valence; the two hexagon vertices that become
/// connected gain one.
pub fn rotate_edge(mesh: &QuadMesh, a: usize, b: usize) -> Result<QuadMesh> {
    let find = |p: usize, q: usize| {
        mesh.faces
            .iter()
            .enumerate()
            .find_map(|(f, quad)| (0..4).find(|&k| quad[k] == p && quad[(k + 1) % 4] == q).map(|k| (f, k)))
    };
    let (Some((f1, k1)), Some((f2, k2))) = (find(a, b), find(b, a)) else {
        return Err(Error::Structural(format!("edge ({a},{b}) is not an interior edge")));
    };
    let q1 = mesh.faces[f1];
    let q2 = mesh.faces[f2];
    let (c1, d1) = (q1[(k1 + 2) % 4], q1[(k1 + 3) % 4]);
    let (c2, d2) = (q2[(k2 + 2) % 4], q2[(k2 + 3) % 4]);
    let mut out = mesh.clone();
    out.faces[f1] = [c2, d2, b, c1];
    out.faces[f2] = [c1, d1, a, c2];
    Ok(out)
}

/// Jacobi Laplacian smoothing of the listed vertices toward the mean of
/// their edge neighbours.
pub fn relax(mesh: &QuadMesh, movable: &[usize], iterations: usize) -> Result<QuadMesh> {
    let he = HalfEdgeMesh::new(mesh.clone())?;
    let mut pos = mesh.vertices.clone();
    for _ in 0..iterations {
        let next: Vec<Point> = movable
            .iter()
            .map(|&v| {
                let es = he.vertex_edges(v);
                let s: Point = es.iter().map(|&e| pos[he.other_end(e, v)]).sum();
                s / es.len().max(1) as f64
            })
            .collect();
        for (&v, p) in movable.iter().zip(next) {
            pos[v] = p;
        }
    }
    Ok(QuadMesh { vertices: pos, faces: mesh.faces.clone() })
}

/// Vertices within `rings` edge steps of `seeds`, sorted.
pub fn neighbourhood(mesh: &QuadMesh, seeds: &[usize], rings: usize) -> Result<Vec<usize>> {
    let he = HalfEdgeMesh::new(mesh.clone())?;
    let mut set: std::collections::BTreeSet<usize> = seeds.iter().copied().collect();
    for _ in 0..rings {
        let he = &he;
        let add: Vec<usize> =
            set.iter().flat_map(|&v| he.vertex_edges(v).iter().map(move |&e| he.other_end(e, v))).collect();
        set.extend(add);
    }
    Ok(set.into_iter().collect())
}

/// Planar grid with one rotated interior edge, relaxed so every quad is
/// convex: two valence-3 and two valence-5 interior vertices.
pub fn planar_five_three(n: usize) -> Result<QuadMesh> {
    if n < 6 {
        return Err(Error::Domain(format!("grid size {n} too small, need 6")));
    }
    let g = grid(n, n);
    let (i, j) = (n / 2, n / 2);
    let a = j * (n + 1) + i;
    let b = (j + 1) * (n + 1) + i;
    let m = rotate_edge(&g, a, b)?;
    let he = HalfEdgeMesh::new(m.clone())?;
    let movable: Vec<usize> =
        neighbourhood(&m, &[a, b], 2)?.into_iter().filter(|&v| !he.is_boundary_vertex(v)).collect();
    relax(&m, &movable, 50)
}

/// Torus with one rotated edge, relaxed near the rotation.
pub fn torus_five_three(n: usize, m: usize) -> Result<QuadMesh> {
    let t = torus(n, m);
    let (a, b) = ((n / 2) * m + m / 2, (n / 2) * m + m / 2 + 1);
    let r = rotate_edge(&t, a, b)?;
    let movable = neighbourhood(&r, &[a, b], 1)?;
    relax(&r, &movable, 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valences(m: &QuadMesh) -> Vec<usize> {
        let he = HalfEdgeMesh::new(m.clone()).unwrap();
        let mut v: Vec<usize> =
            (0..m.vertices.len()).filter(|&v| !he.is_boundary_vertex(v)).map(|v| he.valence(v)).collect();
        v.sort();
        v
    }

    #[test]
    fn rotation_changes_valences() {
        let m = planar_five_three(8).unwrap();
        let v = valences(&m);
        assert_eq!(v.iter().filter(|&&x| x == 3).count(), 2);
        assert_eq!(v.iter().filter(|&&x| x == 5).count(), 2);
        assert_eq!(v.iter().filter(|&&x| x != 4 && x != 3 && x != 5).count(), 0);
        // every quad stays convex and counter-clockwise
        for q in &m.faces {
            for k in 0..4 {
                let p = |i: usize| m.vertices[q[(k + i) % 4]];
                let c = (p(1) - p(0)).cross(&(p(2) - p(1)));
                assert!(c.z > 1e-3, "{q:?}");
            }
        }
        assert!(rotate_edge(&m, 0, 1).is_err());
    }

    #[test]
    fn torus_rotation_is_closed() {
        let m = torus_five_three(10, 8).unwrap();
        let he = HalfEdgeMesh::new(m.clone()).unwrap();
        assert!(!he.has_boundary());
        assert_eq!(he.euler_characteristic(), 0);
        let v = valences(&m);
        assert_eq!(v.iter().filter(|&&x| x == 3).count(), 2);
        assert_eq!(v.iter().filter(|&&x| x == 5).count(), 2);
    }
}
