//! Augmented spline patches over regular faces.
//!
//! The patch blends the 4x4 grid with fundamental functions in the local
//! variables `x = u * delta_00(v)` and `y = v * eps_00(u)`, where the row and
//! column intervals are themselves blended across the face.

use crate::error::{Error, Result};
use crate::jet::{Jet, Jet2, Scalar};
use crate::mesh::LocalGrid;
use crate::spline::{Point, SplineFamily};

/// `a + (b - a) B_k(t)` with all derivatives of order `1..=k` vanishing at 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalParamFn {
    pub a: f64,
    pub b: f64,
    pub k: usize,
}

pub fn smooth_blend(k: usize, a: f64, b: f64) -> Result<LocalParamFn> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("blend endpoints must be positive, got {a}, {b}")));
    }
    if !(1..=2).contains(&k) {
        return Err(Error::Unsupported(format!("blend order {k}")));
    }
    Ok(LocalParamFn { a, b, k })
}

impl LocalParamFn {
    pub fn eval<T: Scalar>(&self, t: T) -> T {
        let c = T::cst;
        let t2 = t * t;
        let bk = match self.k {
            1 => t2 * (c(3.0) - c(2.0) * t),
            _ => t2 * t * (c(10.0) + t * (c(-15.0) + c(6.0) * t)),
        };
        c(self.a) + c(self.b - self.a) * bk
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    pub fn deriv(&self, t: f64, r: usize) -> f64 {
        self.eval(Jet::<f64, 6>::variable(t)).derivative(r)
    }
}

/// Sides in patch order: 0 is `v=0`, 1 is `u=1`, 2 is `v=1`, 3 is `u=0`.
/// Sides 0 and 2 run along `u`, sides 1 and 3 along `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    V0 = 0,
    U1 = 1,
    V1 = 2,
    U0 = 3,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::V0, Side::U1, Side::V1, Side::U0];

    pub fn from_index(i: usize) -> Side {
        Side::ALL[i % 4]
    }

    pub fn along_u(self) -> bool {
        matches!(self, Side::V0 | Side::V1)
    }

    /// `(u, v)` of the side point with along parameter `t`.
    pub fn uv(self, t: f64) -> (f64, f64) {
        match self {
            Side::V0 => (t, 0.0),
            Side::V1 => (t, 1.0),
            Side::U0 => (0.0, t),
            Side::U1 => (1.0, t),
        }
    }

    /// `+1` if the increasing cross coordinate points into the patch.
    pub fn inward_sign(self) -> f64 {
        match self {
            Side::V0 | Side::U0 => 1.0,
            Side::V1 | Side::U1 => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegularPatch {
    pub grid: LocalGrid,
    pub family: SplineFamily,
    delta: [LocalParamFn; 3],
    eps: [LocalParamFn; 3],
}

type J2 = Jet2<3, 3>;

impl RegularPatch {
    pub fn new(grid: LocalGrid, family: SplineFamily) -> Result<Self> {
        let k = family.continuity();
        let mut delta = [LocalParamFn { a: 1.0, b: 1.0, k }; 3];
        let mut eps = delta;
        for i in 0..3 {
            delta[i] = smooth_blend(k, grid.d[i][0], grid.d[i][1])?;
            eps[i] = smooth_blend(k, grid.e[0][i], grid.e[1][i])?;
        }
        Ok(RegularPatch { grid, family, delta, eps })
    }

    pub fn k(&self) -> usize {
        self.family.continuity()
    }

    /// `delta_{i,0}` for `i in -1..=1`.
    pub fn delta(&self, i: i32) -> &LocalParamFn {
        &self.delta[(i + 1) as usize]
    }

    /// `eps_{0,j}` for `j in -1..=1`.
    pub fn eps(&self, j: i32) -> &LocalParamFn {
        &self.eps[(j + 1) as usize]
    }

    /// Grid vertex ids at the corners `(0,0), (1,0), (1,1), (0,1)`.
    pub fn corner_ids(&self) -> [usize; 4] {
        let g = &self.grid.ids;
        [g[1][1], g[2][1], g[2][2], g[1][2]]
    }

    /// Vertex ids `(start, end)` of a side in increasing along parameter.
    pub fn side_ids(&self, s: Side) -> (usize, usize) {
        let c = self.corner_ids();
        match s {
            Side::V0 => (c[0], c[1]),
            Side::U1 => (c[1], c[2]),
            Side::V1 => (c[3], c[2]),
            Side::U0 => (c[0], c[3]),
        }
    }

    /// Interval of the mesh edge on a side.
    pub fn side_interval(&self, s: Side) -> f64 {
        let g = &self.grid;
        match s {
            Side::V0 => g.d[1][0],
            Side::V1 => g.d[1][1],
            Side::U0 => g.e[0][1],
            Side::U1 => g.e[1][1],
        }
    }

    /// First-cell blend across a side: `delta_00(v)` for u-sides, `eps_00(u)` for v-sides.
    pub fn cross_scale(&self, s: Side, t: f64) -> f64 {
        if s.along_u() {
            self.eps(0).value(t)
        } else {
            self.delta(0).value(t)
        }
    }

    fn tensor<T: Scalar>(&self, x: T, y: T, d: [T; 3], e: [T; 3]) -> [T; 3] {
        let bi = self.family.basis(x, d[0], d[1], d[2]);
        let bj = self.family.basis(y, e[0], e[1], e[2]);
        let mut out = [T::cst(0.0); 3];
        for (i, wi) in bi.iter().enumerate() {
            for (j, wj) in bj.iter().enumerate() {
                let w = *wi * *wj;
                let p = self.grid.p[i][j];
                for c in 0..3 {
                    out[c] = out[c] + T::cst(p[c]) * w;
                }
            }
        }
        out
    }

    fn eval_generic<T: Scalar>(&self, u: T, v: T) -> [T; 3] {
        let d = [self.delta[0].eval(v), self.delta[1].eval(v), self.delta[2].eval(v)];
        let e = [self.eps[0].eval(u), self.eps[1].eval(u), self.eps[2].eval(u)];
        self.tensor(u * d[1], v * e[1], d, e)
    }

    pub fn eval(&self, u: f64, v: f64) -> Point {
        let r = self.eval_generic(u, v);
        Point::new(r[0], r[1], r[2])
    }

    /// Exact `d^a/du^a d^b/dv^b S(u, v)` for `a, b <= 2`.
    pub fn eval_mixed(&self, u: f64, v: f64, a: usize, b: usize) -> Point {
        let ju = J2::variable(Jet::constant(u));
        let jv = J2::constant(Jet::variable(v));
        let r = self.eval_generic(ju, jv);
        Point::new(r[0].derivative(a).derivative(b), r[1].derivative(a).derivative(b), r[2].derivative(a).derivative(b))
    }

    /// Local-variable cross derivative `d^r T / d(cross local)^r` along a side,
    /// as a jet in the along parameter `t`.
    fn frozen_cross(&self, s: Side, t: f64, r: usize) -> [Jet<f64, 3>; 3] {
        type O = Jet<f64, 3>;
        let seed = J2::constant(Jet::variable(0.0)); // inner variable: cross local coordinate
        let tj = J2::variable(Jet::constant(t)); // outer variable: along parameter
        let cst = |x: f64| J2::cst(x);
        let res = match s {
            Side::V0 | Side::V1 => {
                let vb = if s == Side::V0 { 0.0 } else { 1.0 };
                let j = if s == Side::V0 { 0 } else { 1 };
                let d = [cst(self.grid.d[0][j]), cst(self.grid.d[1][j]), cst(self.grid.d[2][j])];
                let e = [self.eps[0].eval(tj), self.eps[1].eval(tj), self.eps[2].eval(tj)];
                let x = tj * d[1];
                let y = cst(vb) * e[1] + seed;
                self.tensor(x, y, d, e)
            }
            Side::U0 | Side::U1 => {
                let ub = if s == Side::U0 { 0.0 } else { 1.0 };
                let i = if s == Side::U0 { 0 } else { 1 };
                let e = [cst(self.grid.e[i][0]), cst(self.grid.e[i][1]), cst(self.grid.e[i][2])];
                let d = [self.delta[0].eval(tj), self.delta[1].eval(tj), self.delta[2].eval(tj)];
                let y = tj * e[1];
                let x = cst(ub) * d[1] + seed;
                self.tensor(x, y, d, e)
            }
        };
        res.map(|c| {
            let mut o = O::cst(0.0);
            for k in 0..3 {
                o.c[k] = c.c[k].derivative(r);
            }
            o
        })
    }

    /// Exact `d^ra/dt^ra d^rc/d(cross)^rc S` on side `s` at along parameter `t`,
    /// with derivatives taken in the patch's own `u, v` coordinates.
    pub fn boundary_deriv(&self, s: Side, t: f64, r_cross: usize, r_along: usize) -> Result<Point> {
        if r_cross > self.k() {
            return Err(Error::Unsupported(format!(
                "cross derivative order {r_cross} exceeds continuity {}",
                self.k()
            )));
        }
        if r_along > 2 {
            return Err(Error::Unsupported(format!("along derivative order {r_along}")));
        }
        let g = self.frozen_cross(s, t, r_cross);
        let f = if s.along_u() { self.eps[1] } else { self.delta[1] };
        let sc = f.eval(Jet::<f64, 3>::variable(t));
        let mut scale = Jet::<f64, 3>::cst(1.0);
        for _ in 0..r_cross {
            scale = scale * sc;
        }
        let c: Vec<f64> = g.iter().map(|gi| (*gi * scale).derivative(r_along)).collect();
        Ok(Point::new(c[0], c[1], c[2]))
    }

    /// Boundary data of a side in the local boundary variable `x = t * d_side`:
    /// `d^ra/dx^ra` of the curve (`r_cross = 0`) or of the local cross field
    /// (`r_cross = 1` gives chi, `2` gives xi).
    pub fn side_local(&self, s: Side, t: f64, r_cross: usize, r_along: usize) -> Result<Point> {
        if r_cross > self.k() {
            return Err(Error::Unsupported(format!("cross field of order {r_cross} needs continuity {r_cross}")));
        }
        let g = self.frozen_cross(s, t, r_cross);
        let ds = self.side_interval(s).powi(r_along as i32);
        Ok(Point::new(g[0].derivative(r_along), g[1].derivative(r_along), g[2].derivative(r_along)) / ds)
    }

    /// Shared side with `other`: `(my side, other side, reversed)`.
    pub fn shared_side(&self, other: &RegularPatch) -> Option<(Side, Side, bool)> {
        for a in Side::ALL {
            let (p, q) = self.side_ids(a);
            for b in Side::ALL {
                let (r, s) = other.side_ids(b);
                if (p, q) == (r, s) {
                    return Some((a, b, false));
                }
                if (p, q) == (s, r) {
                    return Some((a, b, true));
                }
            }
        }
        None
    }
}

/// Sampled boundary data of one regular patch side, in the local boundary variable.
#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub side: Side,
    pub interval: f64,
    pub gamma: Vec<Point>,
    pub chi: Vec<Point>,
    pub xi: Option<Vec<Point>>,
}

/// Sample curve and cross fields at `n + 1` evenly spaced points of a side.
pub fn sample_boundary_data(patch: &RegularPatch, side: Side, n: usize, want_xi: bool) -> Result<BoundarySample> {
    if want_xi && patch.k() < 2 {
        return Err(Error::Unsupported("second cross field needs a C2 family".into()));
    }
    let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n.max(1) as f64).collect();
    let take = |r: usize| -> Result<Vec<Point>> { ts.iter().map(|&t| patch.side_local(side, t, r, 0)).collect() };
    Ok(BoundarySample {
        side,
        interval: patch.side_interval(side),
        gamma: take(0)?,
        chi: take(1)?,
        xi: if want_xi { Some(take(2)?) } else { None },
    })
}

pub fn eval_patch(patch: &RegularPatch, u: f64, v: f64) -> Point {
    patch.eval(u, v)
}

pub fn eval_patch_boundary_deriv(
    patch: &RegularPatch,
    side: Side,
    t: f64,
    r_cross: usize,
    r_along: usize,
) -> Result<Point> {
    patch.boundary_deriv(side, t, r_cross, r_along)
}

/// Ratio of the two patches' cross blends on their shared side, at the
/// along parameter `t` of `patch`.
pub fn boundary_scaling_delta(patch: &RegularPatch, neighbor: &RegularPatch, t: f64) -> Result<f64> {
    let (a, b, rev) = patch.shared_side(neighbor).ok_or_else(|| {
        Error::Contract(format!("faces {} and {} are not adjacent", patch.grid.face, neighbor.grid.face))
    })?;
    let tn = if rev { 1.0 - t } else { t };
    Ok(patch.cross_scale(a, t) / neighbor.cross_scale(b, tn))
}
