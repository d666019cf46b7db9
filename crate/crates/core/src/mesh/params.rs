//! Per-edge parameter intervals.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HalfEdgeMesh;
use crate::error::{Error, Result};
use crate::spline::interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamMethod {
    Uniform,
    Chordal,
    Centripetal,
    /// Centripetal intervals averaged over each edge ribbon.
    Mean,
}

impl ParamMethod {
    pub fn default_alpha(self) -> f64 {
        match self {
            ParamMethod::Uniform => 0.0,
            ParamMethod::Chordal => 1.0,
            ParamMethod::Centripetal | ParamMethod::Mean => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ParamMethod::Uniform => "uniform",
            ParamMethod::Chordal => "chordal",
            ParamMethod::Centripetal => "centripetal",
            ParamMethod::Mean => "mean",
        }
    }
}

impl FromStr for ParamMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(ParamMethod::Uniform),
            "chordal" => Ok(ParamMethod::Chordal),
            "centripetal" => Ok(ParamMethod::Centripetal),
            "mean" => Ok(ParamMethod::Mean),
            _ => Err(Error::Domain(format!("unknown parametrization '{s}'"))),
        }
    }
}

/// One positive interval per mesh edge, indexed by edge id.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeParams {
    d: Vec<f64>,
}

impl EdgeParams {
    pub fn from_vec(mesh: &HalfEdgeMesh, d: Vec<f64>) -> Result<Self> {
        if d.len() != mesh.num_edges() {
            return Err(Error::Domain(format!("{} intervals for {} edges", d.len(), mesh.num_edges())));
        }
        if let Some(e) = d.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::DegenerateEdge(format!("edge {e} has interval {}", d[e])));
        }
        Ok(EdgeParams { d })
    }

    #[inline]
    pub fn edge(&self, e: usize) -> f64 {
        self.d[e]
    }

    #[inline]
    pub fn half_edge(&self, mesh: &HalfEdgeMesh, h: usize) -> f64 {
        self.d[mesh.edge_of(h)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    pub(crate) fn push(&mut self, v: f64) {
        self.d.push(v);
    }

    /// Replace intervals of the listed edges.
    pub fn apply_overrides(&mut self, mesh: &HalfEdgeMesh, items: &[([usize; 2], f64)]) -> Result<()> {
        for &([a, b], d) in items {
            let e = mesh
                .find_edge(a, b)
                .ok_or_else(|| Error::Structural(format!("sidecar edge ({a},{b}) is not a mesh edge")))?;
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Domain(format!("sidecar interval {d} for edge ({a},{b})")));
            }
            self.d[e] = d;
        }
        Ok(())
    }
}

pub fn assign_edge_params(mesh: &HalfEdgeMesh, method: ParamMethod) -> Result<EdgeParams> {
    assign_edge_params_alpha(mesh, method, method.default_alpha())
}

/// As [`assign_edge_params`] with an explicit exponent for the per-edge intervals.
pub fn assign_edge_params_alpha(mesh: &HalfEdgeMesh, method: ParamMethod, alpha: f64) -> Result<EdgeParams> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0,1]")));
    }
    let base: Vec<f64> =
        mesh.edges().iter().map(|&[a, b]| interval(&mesh.position(a), &mesh.position(b), alpha)).collect();
    if let Some(e) = base.iter().position(|&x| !(x > 0.0)) {
        let [a, b] = mesh.edge(e);
        return Err(Error::DegenerateEdge(format!("edge ({a},{b}) has zero length")));
    }
    if method != ParamMethod::Mean {
        return EdgeParams::from_vec(mesh, base);
    }
    for v in 0..mesh.num_vertices() {
        let n = mesh.valence(v);
        let ok = n == 0 || if mesh.is_boundary_vertex(v) { n == 2 || n == 3 } else { n == 4 };
        if !ok {
            return Err(Error::Unsupported(format!(
                "mean parametrization needs a regular mesh; vertex {v} has valence {n}"
            )));
        }
    }
    let ribbons = edge_ribbons(mesh);
    let mut sum = vec![0.0; mesh.num_edges()];
    let mut cnt = vec![0usize; mesh.num_edges()];
    for (e, &r) in ribbons.iter().enumerate() {
        sum[r] += base[e];
        cnt[r] += 1;
    }
    let d = ribbons.iter().map(|&r| sum[r] / cnt[r] as f64).collect();
    EdgeParams::from_vec(mesh, d)
}

/// Representative edge of the ribbon (chain of opposite edges) of each edge.
pub(crate) fn edge_ribbons(mesh: &HalfEdgeMesh) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..mesh.num_edges()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for f in 0..mesh.num_faces() {
        for k in 0..2 {
            let a = find(&mut parent, mesh.edge_of(4 * f + k));
            let b = find(&mut parent, mesh.edge_of(4 * f + k + 2));
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        }
    }
    (0..mesh.num_edges()).map(|e| find(&mut parent, e)).collect()
}

#[derive(Deserialize)]
struct SidecarItem {
    edge: [usize; 2],
    d: f64,
}

/// Parse the JSON sidecar `[{"edge": [i, j], "d": value}, ...]`.
pub fn parse_edge_params_json(text: &str) -> Result<Vec<([usize; 2], f64)>> {
    let items: Vec<SidecarItem> = serde_json::from_str(text)?;
    Ok(items.into_iter().map(|i| (i.edge, i.d)).collect())
}
