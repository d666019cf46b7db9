//! Linear extrapolation of one phantom face layer across the mesh boundary.

use std::collections::HashMap;

use super::{EdgeParams, HalfEdgeMesh, QuadMesh};
use crate::error::{Error, Result};

/// Mesh with a phantom layer. Original vertices, faces and edges keep their
/// ids; phantom entities are appended after them.
#[derive(Clone, Debug)]
pub struct Augmented {
    pub mesh: HalfEdgeMesh,
    pub params: EdgeParams,
    pub original_vertices: usize,
    pub original_faces: usize,
    pub original_edges: usize,
}

impl Augmented {
    pub fn is_phantom_face(&self, f: usize) -> bool {
        f >= self.original_faces
    }
    pub fn is_phantom_vertex(&self, v: usize) -> bool {
        v >= self.original_vertices
    }
}

pub fn extrapolate_boundary_layer(mesh: &HalfEdgeMesh, params: &EdgeParams) -> Result<Augmented> {
    let mut q: QuadMesh = mesh.mesh().clone();
    let nv = q.vertices.len();
    let nf = q.faces.len();
    let mut phantom: HashMap<(usize, usize), usize> = HashMap::new();
    let mut iv: HashMap<[usize; 2], f64> = HashMap::new();
    let key = |a: usize, b: usize| [a.min(b), a.max(b)];

    let mut get = |q: &mut QuadMesh, v: usize, y: usize, iv: &mut HashMap<[usize; 2], f64>, d: f64| {
        *phantom.entry((v, y)).or_insert_with(|| {
            let p = 2.0 * q.vertices[v] - q.vertices[y];
            q.vertices.push(p);
            let id = q.vertices.len() - 1;
            iv.insert(key(v, id), d);
            id
        })
    };

    let mut pending = Vec::new();
    for h in 0..mesh.num_half_edges() {
        if mesh.twin(h).is_some() {
            continue;
        }
        let (v, x) = (mesh.origin(h), mesh.dest(h));
        let y = mesh.origin(mesh.prev(h));
        let z = mesh.dest(mesh.next(h));
        let pv = get(&mut q, v, y, &mut iv, params.half_edge(mesh, mesh.prev(h)));
        let px = get(&mut q, x, z, &mut iv, params.half_edge(mesh, mesh.next(h)));
        iv.insert(key(pv, px), params.half_edge(mesh, h));
        q.faces.push([x, v, pv, px]);
        pending.push(h);
    }
    for v in 0..nv {
        if !mesh.is_boundary_vertex(v) || mesh.valence(v) != 2 {
            continue;
        }
        let h1 = (0..mesh.num_half_edges())
            .find(|&h| mesh.origin(h) == v && mesh.twin(h).is_none())
            .ok_or_else(|| Error::Structural(format!("corner vertex {v} without boundary edge")))?;
        let h2 = mesh.prev(h1);
        let (x, w) = (mesh.dest(h1), mesh.origin(h2));
        let diag = mesh.dest(mesh.next(h1));
        let pvx = phantom[&(v, x)];
        let pvw = phantom[&(v, w)];
        q.vertices.push(2.0 * q.vertices[v] - q.vertices[diag]);
        let c = q.vertices.len() - 1;
        iv.insert(key(pvx, c), params.half_edge(mesh, h2));
        iv.insert(key(c, pvw), params.half_edge(mesh, h1));
        q.faces.push([v, pvx, c, pvw]);
    }
    let aug = HalfEdgeMesh::new(q)?;
    let mut p = params.clone();
    for e in mesh.num_edges()..aug.num_edges() {
        let [a, b] = aug.edge(e);
        let d = iv
            .get(&[a, b])
            .copied()
            .ok_or_else(|| Error::Structural(format!("phantom edge ({a},{b}) without interval")))?;
        p.push(d);
    }
    debug_assert!(pending.len() == mesh.num_boundary_half_edges());
    Ok(Augmented {
        params: EdgeParams::from_vec(&aug, p.as_slice().to_vec())?,
        mesh: aug,
        original_vertices: nv,
        original_faces: nf,
        original_edges: mesh.num_edges(),
    })
}
