//! Coons patches with Gregory twist correction on augmented parameter intervals.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::patch::{smooth_blend, LocalParamFn};
use crate::spline::Point;

/// Cubic Hermite blends with a leading `-1`.
pub fn h3<T: Scalar>(u: T) -> [T; 5] {
    let c = T::cst;
    let u2 = u * u;
    let u3 = u2 * u;
    [c(-1.0), c(2.0) * u3 - c(3.0) * u2 + c(1.0), c(-2.0) * u3 + c(3.0) * u2, u3 - c(2.0) * u2 + u, u3 - u2]
}

/// Quintic Hermite blends with a leading `-1`.
pub fn h5<T: Scalar>(u: T) -> [T; 7] {
    let c = T::cst;
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    [
        c(-1.0),
        c(-6.0) * u5 + c(15.0) * u4 - c(10.0) * u3 + c(1.0),
        c(6.0) * u5 - c(15.0) * u4 + c(10.0) * u3,
        c(-3.0) * u5 + c(8.0) * u4 - c(6.0) * u3 + u,
        c(-3.0) * u5 + c(7.0) * u4 - c(4.0) * u3,
        c(-0.5) * u5 + c(1.5) * u4 - c(1.5) * u3 + c(0.5) * u2,
        c(0.5) * u5 - u4 + c(0.5) * u3,
    ]
}

pub fn hermite_basis(degree: usize, u: f64) -> Result<Vec<f64>> {
    match degree {
        3 => Ok(h3(u).to_vec()),
        5 => Ok(h5(u).to_vec()),
        _ => Err(Error::Domain(format!("hermite degree {degree}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    G1,
    G2,
}

impl Mode {
    pub fn order(self) -> usize {
        match self {
            Mode::G1 => 1,
            Mode::G2 => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::G1 => "g1",
            Mode::G2 => "g2",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g1" => Ok(Mode::G1),
            "g2" => Ok(Mode::G2),
            _ => Err(Error::Domain(format!("unknown continuity mode '{s}'"))),
        }
    }
}

/// Curve and cross fields of one patch side, in the side's local variable
/// on `[0, interval]`. Cross fields are derivatives in the increasing
/// `u` or `v` direction.
pub trait SideData: Send + Sync + fmt::Debug {
    fn interval(&self) -> f64;
    fn gamma(&self, x: f64, k: usize) -> Point;
    fn chi(&self, x: f64, k: usize) -> Point;
    fn xi(&self, x: f64, k: usize) -> Option<Point>;
}

impl SideData for crate::network::CrossField {
    fn interval(&self) -> f64 {
        crate::network::CrossField::interval(self)
    }
    fn gamma(&self, x: f64, k: usize) -> Point {
        crate::network::CrossField::gamma(self, x, k)
    }
    fn chi(&self, x: f64, k: usize) -> Point {
        crate::network::CrossField::chi(self, x, k)
    }
    fn xi(&self, x: f64, k: usize) -> Option<Point> {
        self.w.as_ref().map(|_| crate::network::CrossField::xi(self, x, k))
    }
}

/// Sides in patch order: 0 at `v=0` (`p0 -> p1`), 1 at `u=1` (`p1 -> p2`),
/// 2 at `v=1` (`p3 -> p2`), 3 at `u=0` (`p0 -> p3`).
#[derive(Clone, Debug)]
pub struct BoundaryDataSet {
    pub corners: [Point; 4],
    pub sides: [Arc<dyn SideData>; 4],
}

impl BoundaryDataSet {
    pub fn new(corners: [Point; 4], sides: [Arc<dyn SideData>; 4]) -> Result<Self> {
        for (i, s) in sides.iter().enumerate() {
            if !(s.interval() > 0.0) {
                return Err(Error::Construction(format!("side {i} has interval {}", s.interval())));
            }
        }
        let scale = 1.0 + corners.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let ends = [(0, 0, 1), (1, 1, 2), (2, 3, 2), (3, 0, 3)];
        for (s, a, b) in ends {
            let d = sides[s].interval();
            for (x, c) in [(0.0, a), (d, b)] {
                let gap = (sides[s].gamma(x, 0) - corners[c]).norm();
                if gap > 1e-9 * scale {
                    return Err(Error::Construction(format!("side {s} misses corner {c} by {gap:e}")));
                }
            }
        }
        Ok(BoundaryDataSet { corners, sides })
    }

    /// `[d0, d1, e0, e1]`.
    pub fn intervals(&self) -> [f64; 4] {
        [self.sides[0].interval(), self.sides[2].interval(), self.sides[3].interval(), self.sides[1].interval()]
    }

    pub fn has_xi(&self) -> bool {
        self.sides.iter().all(|s| s.xi(0.0, 0).is_some())
    }
}

#[derive(Clone, Debug)]
pub struct GregoryPatch {
    pub data: BoundaryDataSet,
    pub mode: Mode,
    delta: LocalParamFn,
    eps: LocalParamFn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) enum Twist {
    Gregory,
    USide,
    VSide,
}

fn blend(twist: Twist, wu: f64, a: Point, wv: f64, b: Point) -> Point {
    match twist {
        Twist::USide => a,
        Twist::VSide => b,
        Twist::Gregory => {
            let den = wu + wv;
            if den < 1e-12 {
                0.5 * (a + b)
            } else {
                (a * wu + b * wv) / den
            }
        }
    }
}

impl GregoryPatch {
    pub fn new(data: BoundaryDataSet, mode: Mode) -> Result<Self> {
        if mode == Mode::G2 && !data.has_xi() {
            return Err(Error::Contract("G2 patch needs second cross fields on all sides".into()));
        }
        let [d0, d1, e0, e1] = data.intervals();
        let k = mode.order();
        Ok(GregoryPatch { delta: smooth_blend(k, d0, d1)?, eps: smooth_blend(k, e0, e1)?, data, mode })
    }

    pub fn delta(&self) -> &LocalParamFn {
        &self.delta
    }

    pub fn eps(&self) -> &LocalParamFn {
        &self.eps
    }

    pub fn eval(&self, u: f64, v: f64) -> Point {
        self.eval_with(u, v, self.mode.order(), Twist::Gregory)
    }

    fn field(&self, side: usize, order: usize, x: f64, k: usize) -> Point {
        let s = &self.data.sides[side];
        match order {
            0 => s.gamma(x, k),
            1 => s.chi(x, k),
            _ => s.xi(x, k).unwrap_or_else(Point::zeros),
        }
    }

    pub(crate) fn eval_with(&self, u: f64, v: f64, k: usize, twist: Twist) -> Point {
        let n = 1 + 2 * (k + 1);
        let [d0, d1, e0, e1] = self.data.intervals();
        let dd = [d0, d1];
        let ee = [e0, e1];
        let (eu, dv) = (self.eps.value(u), self.delta.value(v));
        let p = &self.data.corners;
        let corner = [[p[0], p[3]], [p[1], p[2]]];
        let usides = [3, 1];
        let vsides = [0, 2];
        let idx = |order: usize, end: usize| if order == 0 { 1 + end } else { 1 + 2 * order + end };
        let pw = k as i32;
        let mut m = vec![vec![Point::zeros(); n]; n];
        for jv in 0..2 {
            let x = u * dd[jv];
            m[0][1 + jv] = self.field(vsides[jv], 0, x, 0);
            for b in 1..=k {
                m[0][idx(b, jv)] = self.field(vsides[jv], b, x, 0) * eu.powi(b as i32);
            }
        }
        for iu in 0..2 {
            let y = v * ee[iu];
            m[1 + iu][0] = self.field(usides[iu], 0, y, 0);
            for a in 1..=k {
                m[idx(a, iu)][0] = self.field(usides[iu], a, y, 0) * dv.powi(a as i32);
            }
        }
        for iu in 0..2 {
            for jv in 0..2 {
                let yend = if jv == 0 { 0.0 } else { ee[iu] };
                let xend = if iu == 0 { 0.0 } else { dd[jv] };
                m[1 + iu][1 + jv] = corner[iu][jv];
                for b in 1..=k {
                    m[1 + iu][idx(b, jv)] = self.field(usides[iu], 0, yend, b) * ee[iu].powi(b as i32);
                }
                for a in 1..=k {
                    m[idx(a, iu)][1 + jv] = self.field(vsides[jv], 0, xend, a) * dd[jv].powi(a as i32);
                }
                let wu = if iu == 0 { u } else { 1.0 - u }.powi(pw);
                let wv = if jv == 0 { v } else { 1.0 - v }.powi(pw);
                for a in 1..=k {
                    for b in 1..=k {
                        let tu = self.field(usides[iu], a, yend, b);
                        let tv = self.field(vsides[jv], b, xend, a);
                        let sc = dd[jv].powi(a as i32) * ee[iu].powi(b as i32);
                        m[idx(a, iu)][idx(b, jv)] = blend(twist, wu, tu, wv, tv) * sc;
                    }
                }
            }
        }
        let (hu, hv): (Vec<f64>, Vec<f64>) =
            if k == 1 { (h3(u).to_vec(), h3(v).to_vec()) } else { (h5(u).to_vec(), h5(v).to_vec()) };
        let mut s = Point::zeros();
        for i in 0..n {
            for j in 0..n {
                s += m[i][j] * (hu[i] * hv[j]);
            }
        }
        -s
    }
}

/// Bicubically blended evaluation.
pub fn eval_g1(patch: &GregoryPatch, u: f64, v: f64) -> Point {
    patch.eval_with(u, v, 1, Twist::Gregory)
}

/// Biquintically blended evaluation.
pub fn eval_g2(patch: &GregoryPatch, u: f64, v: f64) -> Result<Point> {
    if !patch.data.has_xi() {
        return Err(Error::Contract("G2 evaluation needs second cross fields".into()));
    }
    Ok(patch.eval_with(u, v, 2, Twist::Gregory))
}
