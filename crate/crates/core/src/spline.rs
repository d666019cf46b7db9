//! Non-uniform local interpolating splines with support width 4.
//!
//! Two fundamental-function families are built in: the cubic C1 class
//! (non-uniform Catmull-Rom) and the quintic C2 class. Both reproduce
//! quadratics. A segment `[x_s, x_{s+1}]` is evaluated from the four
//! points `p_{s-1} .. p_{s+2}` and the three intervals `d_{s-1}, d_s, d_{s+1}`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

pub type Point = Vector3<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplineFamily {
    D3C1P2S4,
    D5C2P2S4,
}

impl SplineFamily {
    pub fn degree(self) -> usize {
        match self {
            SplineFamily::D3C1P2S4 => 3,
            SplineFamily::D5C2P2S4 => 5,
        }
    }

    pub fn continuity(self) -> usize {
        match self {
            SplineFamily::D3C1P2S4 => 1,
            SplineFamily::D5C2P2S4 => 2,
        }
    }

    pub fn reproduction(self) -> usize {
        2
    }

    pub fn support(self) -> usize {
        4
    }

    /// Offsets accepted by the evaluators: `-w/2+1 ..= w/2`.
    pub fn offsets(self) -> std::ops::RangeInclusive<i32> {
        let h = (self.support() / 2) as i32;
        (1 - h)..=h
    }

    pub fn name(self) -> &'static str {
        match self {
            SplineFamily::D3C1P2S4 => "d3c1p2s4",
            SplineFamily::D5C2P2S4 => "d5c2p2s4",
        }
    }

    /// The four segment basis functions `psi_{s-1} .. psi_{s+2}` at local `x`,
    /// written once for any scalar type so jets can differentiate them.
    pub fn basis<T: Scalar>(self, x: T, dm: T, ds: T, dp: T) -> [T; 4] {
        match self {
            SplineFamily::D3C1P2S4 => {
                let xm = x - ds;
                let ds2 = ds * ds;
                let a = -(x * xm * xm) / (dm * ds * (dm + ds));
                let b = xm * (x * x / (ds + dp) + x * xm / dm - ds) / ds2;
                let c = x * ((ds * (dm + T::cst(2.0) * x) - x * x) / (dm + ds) - x * xm / dp) / ds2;
                let e = x * x * xm / (ds * dp * (ds + dp));
                [a, b, c, e]
            }
            SplineFamily::D5C2P2S4 => {
                let two = T::cst(2.0);
                let three = T::cst(3.0);
                let xm = x - ds;
                let x2 = x * x;
                let x3 = x2 * x;
                let x4 = x3 * x;
                let ds2 = ds * ds;
                let ds3 = ds2 * ds;
                let ds4 = ds3 * ds;
                let a = x * xm * xm * xm * (ds + two * x) / (dm * ds3 * (dm + ds));
                let b = (ds - x)
                    * (dm * (-(three * x3 * ds) + ds4 + ds3 * dp + two * x4)
                        + x * (ds + dp) * (ds + two * x) * xm * xm)
                    / (dm * ds4 * (ds + dp));
                let c = x
                    * (x2 * (two * x - three * ds) * xm / dp
                        + (-(T::cst(5.0) * x3 * ds) + three * x2 * ds2 + ds3 * (dm + x) + two * x4) / (dm + ds))
                    / ds4;
                let e = -(x3 * (two * x - three * ds) * xm) / (ds3 * dp * (ds + dp));
                [a, b, c, e]
            }
        }
    }

    /// r-th derivatives of the four segment basis functions.
    pub fn basis_deriv(self, x: f64, d: [f64; 3], r: usize) -> [f64; 4] {
        if r == 0 {
            return self.basis(x, d[0], d[1], d[2]);
        }
        if r > self.degree() {
            return [0.0; 4];
        }
        let j = Jet::<f64, 6>::variable(x);
        let c = |v: f64| Jet::<f64, 6>::cst(v);
        let b = self.basis(j, c(d[0]), c(d[1]), c(d[2]));
        [b[0].derivative(r), b[1].derivative(r), b[2].derivative(r), b[3].derivative(r)]
    }
}

impl fmt::Display for SplineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SplineFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d3c1p2s4" => Ok(SplineFamily::D3C1P2S4),
            "d5c2p2s4" => Ok(SplineFamily::D5C2P2S4),
            _ => Err(Error::Domain(format!("unknown spline family '{s}'"))),
        }
    }
}

/// Intervals `d_{s-1}, d_s, d_{s+1}` around the evaluated segment.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalParamVector(Vec<f64>);

impl LocalParamVector {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!("non-positive interval in {d:?}")));
        }
        Ok(LocalParamVector(d))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn triple(&self, family: SplineFamily) -> Result<[f64; 3]> {
        if self.0.len() != family.support() - 1 {
            return Err(Error::Domain(format!(
                "local parameter vector has {} entries, family {} needs {}",
                self.0.len(),
                family,
                family.support() - 1
            )));
        }
        Ok([self.0[0], self.0[1], self.0[2]])
    }
}

fn check_offset(family: SplineFamily, offset: i32) -> Result<usize> {
    if !family.offsets().contains(&offset) {
        return Err(Error::Domain(format!("offset {offset} outside support of {family}")));
    }
    Ok((offset + 1) as usize)
}

pub fn eval_fundamental(family: SplineFamily, offset: i32, x: f64, d: &LocalParamVector) -> Result<f64> {
    let i = check_offset(family, offset)?;
    let d = d.triple(family)?;
    Ok(family.basis(x, d[0], d[1], d[2])[i])
}

pub fn eval_fundamental_deriv(
    family: SplineFamily,
    offset: i32,
    x: f64,
    d: &LocalParamVector,
    r: usize,
) -> Result<f64> {
    let i = check_offset(family, offset)?;
    let d = d.triple(family)?;
    Ok(family.basis_deriv(x, d, r)[i])
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnotSequence {
    knots: Vec<f64>,
    periodic: bool,
}

impl KnotSequence {
    pub fn new(knots: Vec<f64>, periodic: bool) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Domain("knot sequence needs at least two knots".into()));
        }
        for (i, w) in knots.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::DegenerateEdge(format!("knot interval {i} is not positive")));
            }
        }
        Ok(KnotSequence { knots, periodic })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn intervals(&self) -> Vec<f64> {
        self.knots.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Knot spacing `|p_{i+1} - p_i|^alpha`.
pub fn interval(a: &Point, b: &Point, alpha: f64) -> f64 {
    let l = (b - a).norm();
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        l
    } else if alpha == 0.5 {
        l.sqrt()
    } else {
        l.powf(alpha)
    }
}

pub fn make_knots(points: &[Point], alpha: f64, closed: bool) -> Result<KnotSequence> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0,1]")));
    }
    let n = points.len();
    let segs = if closed { n } else { n - 1 };
    let mut knots = Vec::with_capacity(segs + 1);
    knots.push(0.0);
    for i in 0..segs {
        let a = &points[i];
        let b = &points[(i + 1) % n];
        if (b - a).norm() == 0.0 {
            return Err(Error::DegenerateEdge(format!("points {i} and {} coincide", (i + 1) % n)));
        }
        let last = knots[i];
        knots.push(last + interval(a, b, alpha));
    }
    KnotSequence::new(knots, closed)
}

/// Interpolating spline through a point sequence.
#[derive(Clone, Debug)]
pub struct PolylineCurve {
    points: Vec<Point>,
    knots: KnotSequence,
    family: SplineFamily,
}

impl PolylineCurve {
    pub fn new(points: Vec<Point>, knots: KnotSequence, family: SplineFamily) -> Result<Self> {
        let need = if knots.is_periodic() { points.len() + 1 } else { points.len() };
        if knots.knots().len() != need {
            return Err(Error::Domain(format!(
                "{} points need {need} knots, got {}",
                points.len(),
                knots.knots().len()
            )));
        }
        let min = if knots.is_periodic() { 3 } else { family.support() };
        if points.len() < min {
            return Err(Error::Domain(format!("curve needs at least {min} points")));
        }
        Ok(PolylineCurve { points, knots, family })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub fn family(&self) -> SplineFamily {
        self.family
    }

    pub fn is_closed(&self) -> bool {
        self.knots.is_periodic()
    }

    /// Evaluable parameter range.
    pub fn domain(&self) -> (f64, f64) {
        let k = self.knots.knots();
        if self.is_closed() {
            (k[0], k[k.len() - 1])
        } else {
            (k[1], k[k.len() - 2])
        }
    }

    /// Segment index and local coordinate for `x`.
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let k = self.knots.knots();
        let (lo, hi) = self.domain();
        let x = if self.is_closed() {
            lo + (x - lo).rem_euclid(hi - lo)
        } else {
            let tol = 1e-12 * (hi - lo).abs().max(1.0);
            if x < lo - tol || x > hi + tol || !x.is_finite() {
                return Err(Error::Domain(format!("x = {x} outside [{lo}, {hi}]")));
            }
            x.clamp(lo, hi)
        };
        let (first, last) = if self.is_closed() { (0, k.len() - 2) } else { (1, k.len() - 3) };
        // last knot <= x among the admissible segment starts
        let mut s = match k.partition_point(|&t| t <= x) {
            0 => 0,
            p => p - 1,
        };
        s = s.clamp(first, last);
        Ok((s, x - k[s]))
    }

    fn window(&self, s: usize) -> ([Point; 4], [f64; 3]) {
        let n = self.points.len() as isize;
        let iv = self.knots.intervals();
        let m = iv.len() as isize;
        let s = s as isize;
        let p = |i: isize| self.points[i.rem_euclid(n) as usize];
        let d = |i: isize| iv[i.rem_euclid(m) as usize];
        ([p(s - 1), p(s), p(s + 1), p(s + 2)], [d(s - 1), d(s), d(s + 1)])
    }

    /// Position (`r = 0`) or r-th derivative at global parameter `x`.
    pub fn eval(&self, x: f64, r: usize) -> Result<Point> {
        let (s, t) = self.locate(x)?;
        let (p, d) = self.window(s);
        Ok(eval_segment(self.family, &p, d, t, r))
    }

    /// Like [`eval`](Self::eval) but forces segment `s`, useful for one-sided
    /// derivatives at knots.
    pub fn eval_on_segment(&self, s: usize, t: f64, r: usize) -> Point {
        let (p, d) = self.window(s);
        eval_segment(self.family, &p, d, t, r)
    }
}

/// `sum p_i psi_i^(r)(t)` for one segment window.
pub fn eval_segment(family: SplineFamily, p: &[Point; 4], d: [f64; 3], t: f64, r: usize) -> Point {
    let w = family.basis_deriv(t, d, r);
    p[0] * w[0] + p[1] * w[1] + p[2] * w[2] + p[3] * w[3]
}

pub fn eval_curve(curve: &PolylineCurve, x: f64, r: usize) -> Result<Point> {
    curve.eval(x, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMS: [SplineFamily; 2] = [SplineFamily::D3C1P2S4, SplineFamily::D5C2P2S4];

    #[test]
    fn midpoint_weights_uniform() {
        let d = LocalParamVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        let expect = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];
        for f in FAMS {
            for (o, e) in (-1..=2).zip(expect) {
                let v = eval_fundamental(f, o, 0.5, &d).unwrap();
                assert!((v - e).abs() < 1e-15, "{f} offset {o}: {v}");
            }
        }
    }

    #[test]
    fn classical_catmull_rom_weights() {
        // uniform Catmull-Rom: 0.5 * [-t^3+2t^2-t, 3t^3-5t^2+2, -3t^3+4t^2+t, t^3-t^2]
        let d = [1.0, 1.0, 1.0];
        for &t in &[0.1, 0.3, 0.77] {
            let w = SplineFamily::D3C1P2S4.basis(t, d[0], d[1], d[2]);
            let cr = [
                0.5 * (-t * t * t + 2.0 * t * t - t),
                0.5 * (3.0 * t * t * t - 5.0 * t * t + 2.0),
                0.5 * (-3.0 * t * t * t + 4.0 * t * t + t),
                0.5 * (t * t * t - t * t),
            ];
            for i in 0..4 {
                assert!((w[i] - cr[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn offset_out_of_range() {
        let d = LocalParamVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(eval_fundamental(SplineFamily::D3C1P2S4, 3, 0.2, &d), Err(Error::Domain(_))));
        assert!(eval_fundamental(SplineFamily::D5C2P2S4, -2, 0.2, &d).is_err());
        assert!(LocalParamVector::new(vec![1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn knots_examples() {
        let p = |x: f64, y: f64| Point::new(x, y, 0.0);
        let k = make_knots(&[p(0., 0.), p(1., 0.), p(1., 1.)], 0.5, false).unwrap();
        assert_eq!(k.knots(), &[0.0, 1.0, 2.0]);
        let k = make_knots(&[p(0., 0.), p(4., 0.)], 0.5, false).unwrap();
        assert_eq!(k.knots(), &[0.0, 2.0]);
        let k = make_knots(&[p(0., 0.), p(4., 0.), p(5., 0.)], 1.0, false).unwrap();
        assert_eq!(k.knots(), &[0.0, 4.0, 5.0]);
        let k = make_knots(&[p(0., 0.), p(1., 0.), p(1., 1.)], 0.0, true).unwrap();
        assert_eq!(k.knots(), &[0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(make_knots(&[p(0., 0.), p(0., 0.)], 0.5, false), Err(Error::DegenerateEdge(_))));
    }

    #[test]
    fn derivative_beyond_degree_is_zero() {
        let d = LocalParamVector::new(vec![0.4, 1.3, 2.0]).unwrap();
        for o in -1..=2 {
            assert_eq!(eval_fundamental_deriv(SplineFamily::D3C1P2S4, o, 0.3, &d, 4).unwrap(), 0.0);
        }
        // cubic: third derivative is constant
        let a = eval_fundamental_deriv(SplineFamily::D3C1P2S4, 0, 0.1, &d, 3).unwrap();
        let b = eval_fundamental_deriv(SplineFamily::D3C1P2S4, 0, 1.2, &d, 3).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn closed_curve_wraps() {
        let pts = vec![
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
            Point::new(-1.0, 0.0, 0.0),
            Point::new(0.0, -1.0, 0.0),
        ];
        let k = make_knots(&pts, 0.5, true).unwrap();
        let c = PolylineCurve::new(pts, k, SplineFamily::D5C2P2S4).unwrap();
        let (lo, hi) = c.domain();
        let a = c.eval(lo + 0.3, 0).unwrap();
        let b = c.eval(hi + 0.3, 0).unwrap();
        let z = c.eval(lo - (hi - lo) + 0.3, 0).unwrap();
        assert!((a - b).norm() < 1e-12 && (a - z).norm() < 1e-12);
    }

    #[test]
    fn open_curve_domain() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 0.0, 0.0)).collect();
        let k = make_knots(&pts, 1.0, false).unwrap();
        let c = PolylineCurve::new(pts, k, SplineFamily::D3C1P2S4).unwrap();
        assert_eq!(c.domain(), (1.0, 3.0));
        assert!(c.eval(0.5, 0).is_err());
        assert!((c.eval(3.0, 0).unwrap() - Point::new(3.0, 0.0, 0.0)).norm() < 1e-14);
        assert!((c.eval(2.25, 0).unwrap() - Point::new(2.25, 0.0, 0.0)).norm() < 1e-14);
    }
}
