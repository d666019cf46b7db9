//! Composite surface: regular spline patches plus Gregory patches around
//! extraordinary vertices, with tessellation, analysis and export.

mod analysis;
mod boundary;
mod export;
mod tessellate;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gregory::{BoundaryDataSet, GregoryPatch, Mode, SideData};
use crate::mesh::{
    assign_edge_params_alpha, classify_faces, extract_local_grid, extrapolate_boundary_layer, Augmented, EdgeParams,
    HalfEdgeMesh, ParamMethod, QuadMesh,
};
use crate::patch::{RegularPatch, Side};
use crate::spline::{Point, SplineFamily};

pub use analysis::{
    analysis_fields, continuity_report, section_sign_changes, AnalysisFields, ContinuityReport, EdgeKind, EdgeReport,
    Percentiles, ReportSummary, LIGHT_DIR,
};
pub use export::{export_obj, export_ply, read_ply, write_obj_tris, write_ply, PlyData};
pub use tessellate::{sample_grid, tessellate, TriangleMesh};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    pub family: SplineFamily,
    pub mode: Mode,
    pub param: ParamMethod,
    /// Exponent of the per-edge intervals; defaults to the method's own.
    pub alpha: Option<f64>,
    /// Guide point radii `|q - p0|^a`; by default each radius is the
    /// parameter of the guide point on its edge cubic.
    pub guide_alpha: Option<f64>,
    /// Degree of the cross-field direction `r` (1 or 2).
    pub r_degree: usize,
    #[serde(skip)]
    pub edge_overrides: Vec<([usize; 2], f64)>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            family: SplineFamily::D5C2P2S4,
            mode: Mode::G2,
            param: ParamMethod::Centripetal,
            alpha: None,
            guide_alpha: None,
            r_degree: 2,
            edge_overrides: Vec::new(),
        }
    }
}

impl BuildOptions {
    pub fn validate(&self) -> Result<()> {
        if self.mode.order() > self.family.continuity() {
            return Err(Error::Domain(format!(
                "mode {} needs a family with continuity {}, {} has {}",
                self.mode,
                self.mode.order(),
                self.family,
                self.family.continuity()
            )));
        }
        if !matches!(self.r_degree, 1 | 2) {
            return Err(Error::Domain(format!("r-degree must be 1 or 2, got {}", self.r_degree)));
        }
        for a in [self.alpha, self.guide_alpha].into_iter().flatten() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Domain(format!("alpha {a} outside [0,1]")));
            }
        }
        Ok(())
    }

    pub fn interval_alpha(&self) -> f64 {
        self.alpha.unwrap_or(self.param.default_alpha())
    }
}

#[derive(Clone, Debug)]
pub enum Patch {
    Regular(Arc<RegularPatch>),
    Gregory(Box<GregoryPatch>),
}

impl Patch {
    pub fn eval(&self, u: f64, v: f64) -> Point {
        match self {
            Patch::Regular(p) => p.eval(u, v),
            Patch::Gregory(p) => p.eval(u, v),
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, Patch::Regular(_))
    }
}

#[derive(Clone, Debug)]
pub struct CompositeSurface {
    pub options: BuildOptions,
    /// Mesh with the phantom layer (identical to the input for closed meshes).
    pub augmented: Augmented,
    /// One patch per input face.
    pub patches: Vec<Patch>,
    /// Vertex ids at patch corners `(0,0), (1,0), (1,1), (0,1)`.
    pub corners: Vec<[usize; 4]>,
}

impl CompositeSurface {
    pub fn mesh(&self) -> &HalfEdgeMesh {
        &self.augmented.mesh
    }

    pub fn params(&self) -> &EdgeParams {
        &self.augmented.params
    }

    pub fn num_regular(&self) -> usize {
        self.patches.iter().filter(|p| p.is_regular()).count()
    }

    pub fn num_gregory(&self) -> usize {
        self.patches.len() - self.num_regular()
    }

    /// Side of patch `f` joining vertices `a` and `b`, and whether it runs `b -> a`.
    pub fn side_of(&self, f: usize, a: usize, b: usize) -> Option<(Side, bool)> {
        side_between(&self.corners[f], a, b)
    }
}

pub(crate) fn side_ends(c: &[usize; 4], s: Side) -> (usize, usize) {
    match s {
        Side::V0 => (c[0], c[1]),
        Side::U1 => (c[1], c[2]),
        Side::V1 => (c[3], c[2]),
        Side::U0 => (c[0], c[3]),
    }
}

pub(crate) fn side_between(c: &[usize; 4], a: usize, b: usize) -> Option<(Side, bool)> {
    Side::ALL.into_iter().find_map(|s| {
        let (p, q) = side_ends(c, s);
        if (p, q) == (a, b) {
            Some((s, false))
        } else if (p, q) == (b, a) {
            Some((s, true))
        } else {
            None
        }
    })
}

pub(crate) fn cell_corners(mesh: &HalfEdgeMesh, f: usize) -> [usize; 4] {
    let b = mesh.anchor_half_edge(f);
    [mesh.origin(b), mesh.dest(b), mesh.dest(mesh.next(b)), mesh.origin(mesh.prev(b))]
}

/// Build the composite surface of `mesh`.
pub fn build_surface(mesh: QuadMesh, options: &BuildOptions) -> Result<CompositeSurface> {
    options.validate()?;
    let he = HalfEdgeMesh::new(mesh)?;
    let mut params = assign_edge_params_alpha(&he, options.param, options.interval_alpha())?;
    params.apply_overrides(&he, &options.edge_overrides)?;
    build_with_params(he, params, options)
}

/// Build from explicit edge intervals.
pub fn build_with_params(mesh: HalfEdgeMesh, params: EdgeParams, options: &BuildOptions) -> Result<CompositeSurface> {
    options.validate()?;
    let nf = mesh.num_faces();
    let augmented = if mesh.has_boundary() {
        extrapolate_boundary_layer(&mesh, &params)?
    } else {
        Augmented {
            original_vertices: mesh.num_vertices(),
            original_faces: nf,
            original_edges: mesh.num_edges(),
            mesh,
            params,
        }
    };
    let am = &augmented.mesh;
    let regular = classify_faces(am, 4);
    let corners: Vec<[usize; 4]> = (0..nf).map(|f| cell_corners(am, f)).collect();
    let reg_patches: Vec<Option<Arc<RegularPatch>>> = (0..nf)
        .into_par_iter()
        .map(|f| -> Result<Option<Arc<RegularPatch>>> {
            if !regular[f] {
                return Ok(None);
            }
            let g = extract_local_grid(am, &augmented.params, f)?;
            Ok(Some(Arc::new(RegularPatch::new(g, options.family)?)))
        })
        .collect::<Result<_>>()?;
    let gregory_faces: Vec<usize> = (0..nf).filter(|&f| !regular[f]).collect();
    log::info!("{} regular, {} gregory faces", nf - gregory_faces.len(), gregory_faces.len());

    let net = boundary::Network::new(&augmented, &reg_patches, &corners, options, &gregory_faces)?;
    let greg: Vec<GregoryPatch> = gregory_faces
        .par_iter()
        .map(|&f| {
            let sides = net.face_sides(f)?;
            let pos = corners[f].map(|v| am.position(v));
            let data = BoundaryDataSet::new(pos, sides).map_err(|e| Error::Construction(format!("face {f}: {e}")))?;
            GregoryPatch::new(data, options.mode).map_err(|e| Error::Construction(format!("face {f}: {e}")))
        })
        .collect::<Result<_>>()?;
    let mut greg = greg.into_iter();
    let patches = reg_patches
        .into_iter()
        .map(|r| match r {
            Some(p) => Patch::Regular(p),
            None => Patch::Gregory(Box::new(greg.next().expect("one gregory patch per extraordinary face"))),
        })
        .collect();
    Ok(CompositeSurface { options: options.clone(), augmented, patches, corners })
}

/// Side data of a Gregory face read from an adjacent regular patch.
#[derive(Debug)]
pub(crate) struct RegularSide {
    pub patch: Arc<RegularPatch>,
    pub side: Side,
    pub reversed: bool,
    /// Relation between the neighbour's and the Gregory patch's cross directions.
    pub cross_sign: f64,
    pub with_xi: bool,
}

impl RegularSide {
    fn at(&self, x: f64, rc: usize, k: usize) -> Point {
        let d = self.patch.side_interval(self.side);
        let t = (x / d).clamp(0.0, 1.0);
        let (t, s) = if self.reversed { (1.0 - t, if k % 2 == 1 { -1.0 } else { 1.0 }) } else { (t, 1.0) };
        let c = if rc % 2 == 1 { self.cross_sign } else { 1.0 };
        self.patch.side_local(self.side, t, rc, k).expect("orders checked at construction") * (s * c)
    }
}

impl SideData for RegularSide {
    fn interval(&self) -> f64 {
        self.patch.side_interval(self.side)
    }
    fn gamma(&self, x: f64, k: usize) -> Point {
        self.at(x, 0, k)
    }
    fn chi(&self, x: f64, k: usize) -> Point {
        self.at(x, 1, k)
    }
    fn xi(&self, x: f64, k: usize) -> Option<Point> {
        self.with_xi.then(|| self.at(x, 2, k))
    }
}

#[cfg(test)]
mod tests;
