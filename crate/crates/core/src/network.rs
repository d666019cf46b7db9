//! Boundary curves and cross-boundary fields around extraordinary vertices.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2};

use crate::error::{Error, Result};
use crate::gregory::{h3, h5};
use crate::jet::Jet;
use crate::spline::{eval_segment, Point, SplineFamily};

/// Generalized Bessel tangent at `p0` along the edge to `nbrs[i]`.
/// Neighbours are in cyclic (fan) order with intervals `d`.
pub fn estimate_tangent_bessel(p0: &Point, nbrs: &[Point], d: &[f64], i: usize) -> Result<Point> {
    let n = nbrs.len();
    if n < 3 || d.len() != n || i >= n {
        return Err(Error::Domain(format!("bessel estimate needs valence >= 3, got {n}")));
    }
    let mut dbar = 0.0;
    let mut fbar = Point::zeros();
    for j in (0..n).filter(|&j| j != i) {
        let c = (TAU * (j as f64 - i as f64) / n as f64).cos();
        dbar -= c * d[j];
        fbar += c.abs() * (nbrs[j] - p0);
    }
    if !(dbar > 0.0) {
        return Err(Error::DegenerateEstimate(format!("non-positive opposite interval {dbar} at edge {i}")));
    }
    let alpha = dbar / (d[i] + dbar);
    Ok((nbrs[i] - p0) * (alpha / d[i]) - fbar * ((1.0 - alpha) / dbar))
}

/// Bessel tangent, or the chord `f_i / d_i` when the estimate degenerates.
pub fn tangent_or_chord(p0: &Point, nbrs: &[Point], d: &[f64], i: usize) -> Result<Point> {
    match estimate_tangent_bessel(p0, nbrs, d, i) {
        Err(Error::DegenerateEstimate(msg)) => {
            log::debug!("bessel fallback to chord: {msg}");
            Ok((nbrs[i] - p0) / d[i])
        }
        r => r,
    }
}

/// Values at `d/4` and `d/2` of the cubic with `lambda(0) = p0`,
/// `lambda'(0) = t0i`, `lambda(d) = pi`, `lambda'(d) = ti0`.
pub fn guide_points(p0: &Point, pi: &Point, d: f64, t0i: &Point, ti0: &Point) -> (Point, Point) {
    let q = (54.0 * p0 + 10.0 * pi + 3.0 * d * (3.0 * t0i - ti0)) / 64.0;
    let qm = (4.0 * p0 + 4.0 * pi + d * (t0i - ti0)) / 8.0;
    (q, qm)
}

/// Parameter-plane angles of the edge directions.
pub fn planar_angles(tangents: &[Point]) -> Result<Vec<f64>> {
    let n = tangents.len();
    if let Some(i) = tangents.iter().position(|t| !(t.norm() > 0.0)) {
        return Err(Error::DegenerateEstimate(format!("zero tangent at edge {i}")));
    }
    let zeta: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (tangents[i], tangents[(i + 1) % n]);
            a.cross(&b).norm().atan2(a.dot(&b))
        })
        .collect();
    let total: f64 = zeta.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateEstimate("all tangents parallel".into()));
    }
    let mut eta = vec![0.0; n];
    for i in 1..n {
        eta[i] = eta[i - 1] + zeta[i - 1] * TAU / total;
    }
    Ok(eta)
}

/// Bivariate vector polynomial through `p0` at the origin.
/// Coefficients follow `[1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GuidePoly {
    pub degree: usize,
    pub coef: Vec<Point>,
}

fn monomials(degree: usize, x: f64, y: f64) -> Vec<f64> {
    let mut m = vec![1.0, x, y, x * x, x * y, y * y];
    if degree >= 3 {
        m.extend([x * x * x, x * x * y, x * y * y, y * y * y]);
    }
    m
}

impl GuidePoly {
    pub fn eval(&self, x: f64, y: f64) -> Point {
        monomials(self.degree, x, y).iter().zip(&self.coef).map(|(m, c)| c * *m).sum()
    }
    pub fn px(&self) -> Point {
        self.coef[1]
    }
    pub fn py(&self) -> Point {
        self.coef[2]
    }
    pub fn pxx(&self) -> Point {
        2.0 * self.coef[3]
    }
    pub fn pxy(&self) -> Point {
        self.coef[4]
    }
    pub fn pyy(&self) -> Point {
        2.0 * self.coef[5]
    }
}

/// Parameter-plane coordinates `r_j (cos eta_i, sin eta_i)` for `q_1..q_2n`.
pub fn guide_coords(p0: &Point, q: &[Point], eta: &[f64], alpha: f64) -> Vec<(f64, f64)> {
    let n = eta.len();
    q.iter()
        .enumerate()
        .map(|(j, qj)| {
            let r = (qj - p0).norm().powf(alpha);
            let e = eta[j % n];
            (r * e.cos(), r * e.sin())
        })
        .collect()
}

/// Parameter-plane coordinates with `r_j` set to the parameter of `q_j` on
/// its guide cubic: `d_i / 4` for `q_i` and `d_i / 2` for `q_{n+i}`.
pub fn guide_coords_param(d: &[f64], eta: &[f64]) -> Vec<(f64, f64)> {
    let n = eta.len();
    (0..2 * n)
        .map(|j| {
            let r = if j < n { 0.25 * d[j] } else { 0.5 * d[j - n] };
            let e = eta[j % n];
            (r * e.cos(), r * e.sin())
        })
        .collect()
}

/// Least-squares fit with the constant term pinned to `p0`; degree 3 for
/// valence >= 5, else 2.
pub fn fit_guide_polynomial(p0: &Point, q: &[Point], xy: &[(f64, f64)]) -> Result<GuidePoly> {
    if q.len() != xy.len() || q.len() < 6 || q.len() % 2 != 0 {
        return Err(Error::Fit(format!("need 2n >= 6 guide points, got {}", q.len())));
    }
    let n = q.len() / 2;
    let degree = if n >= 5 { 3 } else { 2 };
    let m = if degree == 3 { 9 } else { 5 };
    let mut a = DMatrix::<f64>::zeros(q.len(), m);
    let mut b = DMatrix::<f64>::zeros(q.len(), 3);
    for (r, (&(x, y), qj)) in xy.iter().zip(q).enumerate() {
        let mono = monomials(degree, x, y);
        for c in 0..m {
            a[(r, c)] = mono[c + 1];
        }
        let rhs = qj - p0;
        for c in 0..3 {
            b[(r, c)] = rhs[c];
        }
    }
    let scatter: Matrix2<f64> = xy.iter().map(|&(x, y)| Vector2::new(x, y) * Vector2::new(x, y).transpose()).sum();
    let ev = SymmetricEigen::new(scatter).eigenvalues;
    if !(ev.min() > 1e-10 * ev.max().abs()) {
        return Err(Error::Fit(format!(
            "guide points are collinear in the parameter plane (eigenvalue ratio {:e})",
            ev.min() / ev.max()
        )));
    }
    // monomials vanishing at every point (e.g. xy on orthogonal axes) get a
    // zero coefficient via the minimum-norm solution
    let scale: Vec<f64> = (0..m).map(|c| a.column(c).norm()).map(|s| if s > 0.0 { s } else { 1.0 }).collect();
    for (c, s) in scale.iter().enumerate() {
        a.column_mut(c).unscale_mut(*s);
    }
    let svd = a.svd(true, true);
    let tol = 1e-10 * svd.singular_values.max();
    let sol = svd.solve(&b, tol).map_err(|e| Error::Fit(format!("guide system: {e}")))?;
    let mut coef = vec![*p0];
    for c in 0..m {
        coef.push(Point::new(sol[(c, 0)], sol[(c, 1)], sol[(c, 2)]) / scale[c]);
    }
    Ok(GuidePoly { degree, coef })
}

/// First and second derivatives of `P` at the origin along angle `eta`.
pub fn directional_derivs(p: &GuidePoly, eta: f64) -> (Point, Point) {
    let (c, s) = (eta.cos(), eta.sin());
    let t1 = p.px() * c + p.py() * s;
    let t2 = p.pxx() * (c * c) + p.pxy() * (2.0 * c * s) + p.pyy() * (s * s);
    (t1, t2)
}

/// Unit normal, principal curvatures (`k1 >= k2`) and directions from partials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceFrame {
    pub normal: Point,
    pub k1: f64,
    pub k2: f64,
    pub dir1: Point,
    pub dir2: Point,
}

impl SurfaceFrame {
    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.k1 + self.k2)
    }

    /// Second fundamental form `II(x, y)`.
    pub fn second_form(&self, x: &Point, y: &Point) -> f64 {
        self.k1 * x.dot(&self.dir1) * y.dot(&self.dir1) + self.k2 * x.dot(&self.dir2) * y.dot(&self.dir2)
    }
}

pub fn surface_frame(su: &Point, sv: &Point, suu: &Point, suv: &Point, svv: &Point) -> Result<SurfaceFrame> {
    let nn = su.cross(sv);
    let l = nn.norm();
    if !(l > 1e-300) || su.norm() == 0.0 {
        return Err(Error::DegenerateEstimate("degenerate tangent plane".into()));
    }
    let n = nn / l;
    let e1 = su.normalize();
    let e2 = n.cross(&e1);
    let j = Matrix2::new(su.dot(&e1), sv.dot(&e1), su.dot(&e2), sv.dot(&e2));
    let ji = j.try_inverse().ok_or_else(|| Error::DegenerateEstimate("singular metric".into()))?;
    let b = Matrix2::new(suu.dot(&n), suv.dot(&n), suv.dot(&n), svv.dot(&n));
    let bo = ji.transpose() * b * ji;
    let bo = 0.5 * (bo + bo.transpose());
    let eig = SymmetricEigen::new(bo);
    let (i1, i2) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let v1: Vector2<f64> = eig.eigenvectors.column(i1).into();
    let v2: Vector2<f64> = eig.eigenvectors.column(i2).into();
    Ok(SurfaceFrame {
        normal: n,
        k1: eig.eigenvalues[i1],
        k2: eig.eigenvalues[i2],
        dir1: e1 * v1[0] + e2 * v1[1],
        dir2: e1 * v2[0] + e2 * v2[1],
    })
}

/// Frame of the guide polynomial at the origin.
pub fn guide_frame(p: &GuidePoly) -> Result<SurfaceFrame> {
    surface_frame(&p.px(), &p.py(), &p.pxx(), &p.pxy(), &p.pyy())
}

/// Hermite interpolant on `[0, d]` (cubic, or quintic when second derivatives are given).
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteCurve {
    pub d: f64,
    pub p: [Point; 2],
    pub t: [Point; 2],
    pub a: Option<[Point; 2]>,
}

impl HermiteCurve {
    pub fn degree(&self) -> usize {
        if self.a.is_some() {
            5
        } else {
            3
        }
    }

    pub fn eval(&self, x: f64, r: usize) -> Point {
        if r > 5 {
            return Point::zeros();
        }
        let t = Jet::<f64, 6>::variable(x / self.d);
        let d = self.d;
        let data: Vec<(Point, Jet<f64, 6>)> = match self.a {
            None => {
                let h = h3(t);
                vec![(self.p[0], h[1]), (self.p[1], h[2]), (self.t[0] * d, h[3]), (self.t[1] * d, h[4])]
            }
            Some(a) => {
                let h = h5(t);
                vec![
                    (self.p[0], h[1]),
                    (self.p[1], h[2]),
                    (self.t[0] * d, h[3]),
                    (self.t[1] * d, h[4]),
                    (a[0] * (d * d), h[5]),
                    (a[1] * (d * d), h[6]),
                ]
            }
        };
        let s: Point = data.iter().map(|(p, w)| p * w.derivative(r)).sum();
        s / d.powi(r as i32)
    }
}

/// Hermite boundary segment from endpoint data; quintic when `second` is given.
pub fn build_missing_boundary_curve(
    p: [Point; 2],
    first: [Point; 2],
    second: Option<[Point; 2]>,
    d: f64,
) -> Result<HermiteCurve> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("curve interval {d}")));
    }
    Ok(HermiteCurve { d, p, t: first, a: second })
}

/// Patch boundary curve on `[0, d]`: a spline segment or a Hermite segment.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeCurve {
    Spline { family: SplineFamily, p: [Point; 4], d: [f64; 3] },
    Hermite(HermiteCurve),
}

impl EdgeCurve {
    pub fn interval(&self) -> f64 {
        match self {
            EdgeCurve::Spline { d, .. } => d[1],
            EdgeCurve::Hermite(h) => h.d,
        }
    }

    pub fn eval(&self, x: f64, r: usize) -> Point {
        match self {
            EdgeCurve::Spline { family, p, d } => eval_segment(*family, p, *d, x, r),
            EdgeCurve::Hermite(h) => h.eval(x, r),
        }
    }

    pub fn is_spline(&self) -> bool {
        matches!(self, EdgeCurve::Spline { .. })
    }
}

/// Vector polynomial in monomial form.
#[derive(Clone, Debug, PartialEq)]
pub struct VPoly(pub Vec<Point>);

impl VPoly {
    /// Interpolant through `(x_i, v_i)`.
    pub fn interpolate(xs: &[f64], vs: &[Point]) -> VPoly {
        let n = xs.len();
        let mut coef = vec![Point::zeros(); n];
        // Newton form, then expand
        let mut dd: Vec<Point> = vs.to_vec();
        for k in 1..n {
            for i in (k..n).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
            }
        }
        for k in (0..n).rev() {
            // coef = coef * (x - xs[k]) + dd[k]
            let mut next = vec![Point::zeros(); n];
            for i in 0..n {
                if i + 1 < n {
                    next[i + 1] += coef[i];
                }
                next[i] -= coef[i] * xs[k];
            }
            next[0] += dd[k];
            coef = next;
        }
        VPoly(coef)
    }

    pub fn eval(&self, x: f64, r: usize) -> Point {
        let mut s = Point::zeros();
        for (i, c) in self.0.iter().enumerate().skip(r) {
            let mut f = 1.0;
            for k in 0..r {
                f *= (i - k) as f64;
            }
            s += c * (f * x.powi((i - r) as i32));
        }
        s
    }
}

/// Linear scalar `c0 + c1 x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lin(pub f64, pub f64);

impl Lin {
    pub fn through(d: f64, v0: f64, v1: f64) -> Lin {
        Lin(v0, (v1 - v0) / d)
    }
    pub fn eval(&self, x: f64, r: usize) -> f64 {
        match r {
            0 => self.0 + self.1 * x,
            1 => self.1,
            _ => 0.0,
        }
    }
}

/// `r` through `gamma'(0) x n0`, `gamma'(d) x n1` and optionally `gamma'(d/2) x nm`.
pub fn build_r(gamma: &EdgeCurve, n0: &Point, n1: &Point, nm: Option<&Point>) -> VPoly {
    let d = gamma.interval();
    let r0 = gamma.eval(0.0, 1).cross(n0);
    let r1 = gamma.eval(d, 1).cross(n1);
    match nm {
        Some(nm) => {
            let rm = gamma.eval(0.5 * d, 1).cross(nm);
            VPoly::interpolate(&[0.0, 0.5 * d, d], &[r0, rm, r1])
        }
        None => VPoly::interpolate(&[0.0, d], &[r0, r1]),
    }
}

/// Add a cubic term vanishing at both ends so that `r' . n = II(gamma', r)`
/// at each end, as the derivative of `gamma' x n` along a surface curve
/// would give. This keeps the normal part of `xi` at the corners equal to
/// the second derivative of the adjacent boundary curves.
pub fn match_r_derivatives(r: &VPoly, gamma: &EdgeCurve, f0: &SurfaceFrame, f1: &SurfaceFrame) -> VPoly {
    let d = gamma.interval();
    let gap = |x: f64, f: &SurfaceFrame| f.second_form(&gamma.eval(x, 1), &r.eval(x, 0)) - r.eval(x, 1).dot(&f.normal);
    let c0 = f0.normal * gap(0.0, f0);
    let c1 = f1.normal * gap(d, f1);
    let mut coef = r.0.clone();
    coef.resize(coef.len().max(4), Point::zeros());
    coef[1] += c0;
    coef[2] -= (c0 * 2.0 + c1) / d;
    coef[3] += (c0 + c1) / (d * d);
    VPoly(coef)
}

/// Linear `w` with endpoint values `(mu^2 k1 + nu^2 k2) n`.
pub fn build_w(r: &VPoly, d: f64, f0: &SurfaceFrame, f1: &SurfaceFrame) -> VPoly {
    let end = |rv: Point, f: &SurfaceFrame| {
        let (mu, nu) = (rv.dot(&f.dir1), rv.dot(&f.dir2));
        f.normal * (mu * mu * f.k1 + nu * nu * f.k2)
    };
    VPoly::interpolate(&[0.0, d], &[end(r.eval(0.0, 0), f0), end(r.eval(d, 0), f1)])
}

/// Curve, `r` and `w` of an edge seen from one side, possibly reversed.
#[derive(Clone, Debug)]
pub struct Oriented<'a> {
    pub curve: &'a EdgeCurve,
    pub r: &'a VPoly,
    pub w: Option<&'a VPoly>,
    pub reversed: bool,
}

impl Oriented<'_> {
    fn map(&self, x: f64, k: usize) -> (f64, f64) {
        if self.reversed {
            (self.curve.interval() - x, if k % 2 == 1 { -1.0 } else { 1.0 })
        } else {
            (x, 1.0)
        }
    }
    pub fn gamma(&self, x: f64, k: usize) -> Point {
        let (y, s) = self.map(x, k);
        self.curve.eval(y, k) * s
    }
    pub fn r(&self, x: f64, k: usize) -> Point {
        let (y, s) = self.map(x, k);
        self.r.eval(y, k) * s
    }
    pub fn w(&self, x: f64, k: usize) -> Point {
        let (y, s) = self.map(x, k);
        self.w.map_or(Point::zeros(), |w| w.eval(y, k) * s)
    }
}

/// Cross fields `chi = a gamma' + b r` and
/// `xi = a^2 gamma'' + s gamma' + t r + 2ab r' + b^2 w` of one patch side.
#[derive(Clone, Debug)]
pub struct CrossField {
    pub curve: EdgeCurve,
    pub r: VPoly,
    pub w: Option<VPoly>,
    pub reversed: bool,
    pub a: Lin,
    pub b: Lin,
    pub s: Lin,
    pub t: Lin,
}

fn solve_frame(g: &Point, r: &Point, target: &Point, what: &str) -> Result<(f64, f64)> {
    let m = Matrix2::new(g.dot(g), g.dot(r), r.dot(g), r.dot(r));
    let det = m.determinant();
    if !(det.abs() > 1e-14 * m[(0, 0)] * m[(1, 1)]) {
        return Err(Error::Construction(format!("{what}: curve tangent and r are parallel")));
    }
    let sol = m.try_inverse().unwrap() * Vector2::new(g.dot(target), r.dot(target));
    Ok((sol[0], sol[1]))
}

fn binom(n: usize, k: usize) -> f64 {
    [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]][n][k]
}

impl CrossField {
    fn oriented(&self) -> Oriented<'_> {
        Oriented { curve: &self.curve, r: &self.r, w: self.w.as_ref(), reversed: self.reversed }
    }

    pub fn interval(&self) -> f64 {
        self.curve.interval()
    }

    /// Solve `a, b` so that `chi` hits `targets` at both ends.
    pub fn new_chi(
        curve: EdgeCurve,
        r: VPoly,
        reversed: bool,
        targets: [Point; 2],
        corner: [usize; 2],
    ) -> Result<Self> {
        let d = curve.interval();
        let mut f = CrossField {
            curve,
            r,
            w: None,
            reversed,
            a: Lin(0.0, 0.0),
            b: Lin(0.0, 0.0),
            s: Lin(0.0, 0.0),
            t: Lin(0.0, 0.0),
        };
        let o = f.oriented();
        let mut ab = [(0.0, 0.0); 2];
        for (k, x) in [0.0, d].into_iter().enumerate() {
            ab[k] = solve_frame(&o.gamma(x, 1), &o.r(x, 0), &targets[k], &format!("corner {}", corner[k]))?;
        }
        f.a = Lin::through(d, ab[0].0, ab[1].0);
        f.b = Lin::through(d, ab[0].1, ab[1].1);
        Ok(f)
    }

    /// Attach `w` and solve `s, t` against second-derivative targets.
    pub fn with_xi(mut self, w: VPoly, targets: [Point; 2], corner: [usize; 2]) -> Result<Self> {
        self.w = Some(w);
        let d = self.interval();
        let mut st = [(0.0, 0.0); 2];
        {
            let o = self.oriented();
            for (k, x) in [0.0, d].into_iter().enumerate() {
                let (a, b) = (self.a.eval(x, 0), self.b.eval(x, 0));
                let rest = o.gamma(x, 2) * (a * a) + o.r(x, 1) * (2.0 * a * b) + o.w(x, 0) * (b * b);
                st[k] =
                    solve_frame(&o.gamma(x, 1), &o.r(x, 0), &(targets[k] - rest), &format!("corner {}", corner[k]))?;
            }
        }
        self.s = Lin::through(d, st[0].0, st[1].0);
        self.t = Lin::through(d, st[0].1, st[1].1);
        Ok(self)
    }

    pub fn gamma(&self, x: f64, k: usize) -> Point {
        self.oriented().gamma(x, k)
    }

    /// `d^m chi / dx^m`, `m <= 2`.
    pub fn chi(&self, x: f64, m: usize) -> Point {
        let o = self.oriented();
        let mut s = Point::zeros();
        for k in 0..=m {
            let c = binom(m, k);
            s += o.gamma(x, m - k + 1) * (c * self.a.eval(x, k)) + o.r(x, m - k) * (c * self.b.eval(x, k));
        }
        s
    }

    /// `d^m xi / dx^m`, `m <= 2`.
    pub fn xi(&self, x: f64, m: usize) -> Point {
        let o = self.oriented();
        // scalar coefficient products as jets in x
        let j = |l: Lin| Jet::<f64, 3>::constant(l.0) + Jet::constant(l.1) * Jet::variable(x);
        let (a, b, s, t) = (j(self.a), j(self.b), j(self.s), j(self.t));
        let a2 = a * a;
        let ab2 = Jet::constant(2.0) * a * b;
        let b2 = b * b;
        let mut out = Point::zeros();
        for k in 0..=m {
            let c = binom(m, k);
            let q = m - k;
            out += o.gamma(x, q + 2) * (c * a2.derivative(k))
                + o.gamma(x, q + 1) * (c * s.derivative(k))
                + o.r(x, q) * (c * t.derivative(k))
                + o.r(x, q + 1) * (c * ab2.derivative(k))
                + o.w(x, q) * (c * b2.derivative(k));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn bessel_valence_four_cross() {
        let nb = [p(1., 0., 0.), p(0., 1., 0.), p(-1., 0., 0.), p(0., -1., 0.)];
        let t = estimate_tangent_bessel(&Point::zeros(), &nb, &[1.0; 4], 0).unwrap();
        assert!((t - p(1., 0., 0.)).norm() < 1e-15);
        let nb2: Vec<Point> = nb.iter().map(|v| v * 2.0).collect();
        let t2 = estimate_tangent_bessel(&Point::zeros(), &nb2, &[1.0; 4], 0).unwrap();
        assert!((t2 - 2.0 * t).norm() < 1e-15);
    }

    #[test]
    fn bessel_fallback() {
        // valence 3 with a tiny opposite contribution still positive; force negative with n=3 symmetric? d-bar = 0.5(d1+d2) > 0 always
        let nb = [p(1., 0., 0.), p(-0.5, 0.8, 0.), p(-0.5, -0.8, 0.)];
        assert!(estimate_tangent_bessel(&Point::zeros(), &nb, &[1.0; 3], 0).is_ok());
        // valence 5: d-bar = -(cos(2pi/5)(d1+d4) + cos(4pi/5)(d2+d3)) can be negative
        let nb5: Vec<Point> = (0..5).map(|i| p((i as f64).cos(), (i as f64).sin(), 0.0)).collect();
        let d = [1.0, 10.0, 0.01, 0.01, 10.0];
        assert!(matches!(estimate_tangent_bessel(&Point::zeros(), &nb5, &d, 0), Err(Error::DegenerateEstimate(_))));
        let t = tangent_or_chord(&Point::zeros(), &nb5, &d, 0).unwrap();
        assert_eq!(t, nb5[0]);
    }

    #[test]
    fn guide_point_examples() {
        let (q, qm) = guide_points(&Point::zeros(), &p(1., 0., 0.), 1.0, &p(1., 0., 0.), &p(-1., 0., 0.));
        assert!((q - p(0.34375, 0., 0.)).norm() < 1e-15);
        assert!((qm - p(0.75, 0., 0.)).norm() < 1e-15);
        // same values from a direct cubic Hermite evaluation with lambda'(d) = ti0
        let h =
            HermiteCurve { d: 1.0, p: [Point::zeros(), p(1., 0., 0.)], t: [p(1., 0., 0.), p(-1., 0., 0.)], a: None };
        assert!((h.eval(0.25, 0) - q).norm() < 1e-15);
        assert!((h.eval(0.5, 0) - qm).norm() < 1e-15);
        let z = p(0.3, -1.0, 2.0);
        let (a, b) = guide_points(&z, &z, 1.7, &Point::zeros(), &Point::zeros());
        assert!((a - z).norm() < 1e-15 && (b - z).norm() < 1e-15);
        let (_, mid) = guide_points(&Point::zeros(), &p(2., 0., 0.), 2.0, &p(1., 0., 0.), &p(1., 0., 0.));
        assert!((mid - p(1., 0., 0.)).norm() < 1e-15);
    }

    #[test]
    fn angle_examples() {
        let t5: Vec<Point> = (0..5)
            .map(|i| {
                let a = TAU * i as f64 / 5.0;
                p(a.cos(), a.sin(), 0.3)
            })
            .collect();
        let eta = planar_angles(&t5).unwrap();
        for (i, e) in eta.iter().enumerate() {
            assert!((e - TAU * i as f64 / 5.0).abs() < 1e-12);
        }
        let t4 = [p(1., 0., 0.), p(0., 1., 0.), p(-1., 0., 0.), p(0., -1., 0.)];
        let eta = planar_angles(&t4).unwrap();
        assert!((eta[3] - 1.5 * std::f64::consts::PI).abs() < 1e-12);
        assert!(planar_angles(&[p(1., 0., 0.), Point::zeros(), p(0., 1., 0.)]).is_err());
    }

    #[test]
    fn guide_fit_reproduces_quadratic() {
        let f = |x: f64, y: f64| p(x, y, 0.3 * x * x - 0.2 * x * y + 0.7 * y * y + 0.1 * x);
        let eta = [0.0f64, 1.4, 3.0, 4.4];
        let xy: Vec<(f64, f64)> = (0..8)
            .map(|j| {
                let r = if j < 4 { 0.4 } else { 0.9 };
                (r * eta[j % 4].cos(), r * eta[j % 4].sin())
            })
            .collect();
        let q: Vec<Point> = xy.iter().map(|&(x, y)| f(x, y)).collect();
        let g = fit_guide_polynomial(&f(0.0, 0.0), &q, &xy).unwrap();
        assert_eq!(g.degree, 2);
        for (&(x, y), qj) in xy.iter().zip(&q) {
            assert!((g.eval(x, y) - qj).norm() < 1e-10);
        }
        assert_eq!(g.eval(0.0, 0.0), f(0.0, 0.0));
        // planar data gives zero z
        let qp: Vec<Point> = xy.iter().map(|&(x, y)| p(x, y, 0.0)).collect();
        let gp = fit_guide_polynomial(&Point::zeros(), &qp, &xy).unwrap();
        assert!(gp.coef.iter().all(|c| c.z.abs() < 1e-14));
        // collinear parameter points
        let bad: Vec<(f64, f64)> = (0..8).map(|j| (j as f64 * 0.1 + 0.1, 0.0)).collect();
        assert!(matches!(fit_guide_polynomial(&Point::zeros(), &qp, &bad), Err(Error::Fit(_))));
    }

    #[test]
    fn directional_examples() {
        let g = GuidePoly {
            degree: 2,
            coef: vec![Point::zeros(), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.), Point::zeros(), Point::zeros()],
        };
        for eta in [0.0f64, 0.7, 2.0] {
            let (t1, t2) = directional_derivs(&g, eta);
            assert!((t1 - p(eta.cos(), eta.sin(), 0.0)).norm() < 1e-15);
            assert!((t2.z - 2.0 * eta.cos().powi(2)).abs() < 1e-15);
            let (u1, u2) = directional_derivs(&g, eta + std::f64::consts::PI);
            assert!((u1 + t1).norm() < 1e-14 && (u2 - t2).norm() < 1e-14);
        }
    }

    #[test]
    fn hermite_reproduces_quintic() {
        let c = [
            p(0.1, 0.2, 0.3),
            p(1.0, -1.0, 0.5),
            p(0.2, 0.3, -0.4),
            p(-0.5, 0.1, 0.2),
            p(0.3, 0.3, 0.3),
            p(-0.1, 0.2, 0.05),
        ];
        let q = |x: f64, r: usize| VPoly(c.to_vec()).eval(x, r);
        let d = 1.7;
        let h = build_missing_boundary_curve([q(0., 0), q(d, 0)], [q(0., 1), q(d, 1)], Some([q(0., 2), q(d, 2)]), d)
            .unwrap();
        for i in 0..20 {
            let x = d * i as f64 / 19.0;
            assert!((h.eval(x, 0) - q(x, 0)).norm() < 1e-12);
        }
        assert!((h.eval(d, 1) - q(d, 1)).norm() < 1e-12);
        assert!((h.eval(0.0, 2) - q(0.0, 2)).norm() < 1e-12);
        // straight-line data
        let l = build_missing_boundary_curve([Point::zeros(), p(2., 0., 0.)], [p(1., 0., 0.); 2], None, 2.0).unwrap();
        assert!((l.eval(0.7, 0) - p(0.7, 0., 0.)).norm() < 1e-15);
    }

    #[test]
    fn vpoly_interpolates() {
        let xs = [0.0, 0.4, 1.3];
        let vs = [p(1., 2., 3.), p(-1., 0., 2.), p(0.5, 0.5, 0.5)];
        let v = VPoly::interpolate(&xs, &vs);
        for (x, y) in xs.iter().zip(&vs) {
            assert!((v.eval(*x, 0) - y).norm() < 1e-14);
        }
    }

    fn random_field(rng: &mut ChaCha8Rng) -> (CrossField, [Point; 2], [Point; 2]) {
        let mut rp = || p(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let curve = EdgeCurve::Hermite(HermiteCurve {
            d: 1.3,
            p: [rp(), rp() + p(2., 0., 0.)],
            t: [rp() + p(2., 0., 0.), rp() + p(2., 0., 0.)],
            a: Some([rp(), rp()]),
        });
        let n0 = p(0., 0., 1.) + 0.2 * rp();
        let n1 = p(0., 0., 1.) + 0.2 * rp();
        let nm = p(0., 0., 1.) + 0.2 * rp();
        let r = build_r(&curve, &n0.normalize(), &n1.normalize(), Some(&nm.normalize()));
        let tg = [rp() + p(0., 2., 0.), rp() + p(0., 2., 0.)];
        let t2 = [rp(), rp()];
        let fr = SurfaceFrame { normal: n0.normalize(), k1: 0.5, k2: -0.2, dir1: p(1., 0., 0.), dir2: p(0., 1., 0.) };
        let w = build_w(&r, 1.3, &fr, &fr);
        let f = CrossField::new_chi(curve, r, false, tg, [0, 1]).unwrap().with_xi(w, t2, [0, 1]).unwrap();
        (f, tg, t2)
    }

    #[test]
    fn chi_hits_targets_in_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let (f, tg, t2) = random_field(&mut rng);
            let d = f.interval();
            for (k, x) in [0.0, d].into_iter().enumerate() {
                let c = f.chi(x, 0);
                let g = f.gamma(x, 1);
                let r = f.r.eval(x, 0);
                // target projected onto span(gamma', r)
                let n = g.cross(&r).normalize();
                let proj = tg[k] - n * tg[k].dot(&n);
                assert!((c - proj).norm() < 1e-10);
                let xi = f.xi(x, 0);
                let p2 = t2[k] - n * t2[k].dot(&n);
                assert!(((xi - n * xi.dot(&n)) - p2).norm() < 1e-10);
            }
            // derivatives agree with finite differences
            let h = 1e-5;
            for m in 0..2 {
                let x = 0.6;
                let fdc = (f.chi(x + h, m) - f.chi(x - h, m)) / (2.0 * h);
                assert!((fdc - f.chi(x, m + 1)).norm() < 1e-6 * fdc.norm().max(1.0));
                let fdx = (f.xi(x + h, m) - f.xi(x - h, m)) / (2.0 * h);
                assert!((fdx - f.xi(x, m + 1)).norm() < 1e-6 * fdx.norm().max(1.0));
            }
        }
    }

    #[test]
    fn xi_assembly_with_constant_parts() {
        let curve = EdgeCurve::Hermite(HermiteCurve {
            d: 1.0,
            p: [Point::zeros(), p(1., 0., 0.)],
            t: [p(1., 0.2, 0.), p(1., -0.3, 0.)],
            a: Some([p(0., 0.4, 0.), p(0., 0.1, 0.)]),
        });
        let r = VPoly(vec![p(0., 1., 0.)]);
        let w = VPoly(vec![p(0., 0., 0.5)]);
        let f = CrossField {
            curve,
            r,
            w: Some(w),
            reversed: false,
            a: Lin(0.7, 0.0),
            b: Lin(1.2, 0.0),
            s: Lin(0.3, 0.0),
            t: Lin(-0.4, 0.0),
        };
        for x in [0.0, 0.3, 0.8] {
            let g1 = f.gamma(x, 1);
            let g2 = f.gamma(x, 2);
            let expect = g2 * 0.49 + g1 * 0.3 + p(0., 1., 0.) * -0.4 + p(0., 0., 0.5) * 1.44;
            assert!((f.xi(x, 0) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn planar_chi_stays_planar() {
        let curve = EdgeCurve::Hermite(HermiteCurve {
            d: 1.0,
            p: [Point::zeros(), p(1., 0., 0.)],
            t: [p(1., 0.2, 0.), p(1., -0.3, 0.)],
            a: None,
        });
        let n = p(0., 0., 1.);
        let r = build_r(&curve, &n, &n, Some(&n));
        let f = CrossField::new_chi(curve, r, false, [p(0.1, 1., 0.), p(-0.2, 1.1, 0.)], [0, 1]).unwrap();
        for i in 0..10 {
            assert!(f.chi(i as f64 / 9.0, 0).z.abs() < 1e-15);
        }
        assert!((f.chi(0.0, 0) - p(0.1, 1., 0.)).norm() < 1e-12);
    }

    #[test]
    fn r_derivative_matches_second_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut rp = || p(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let curve = EdgeCurve::Hermite(HermiteCurve {
                d: 0.9,
                p: [rp(), rp() + p(2., 0., 0.)],
                t: [rp() + p(2., 0., 0.), rp() + p(2., 0., 0.)],
                a: Some([rp(), rp()]),
            });
            let n0 = (p(0., 0., 1.) + 0.2 * rp()).normalize();
            let n1 = (p(0., 0., 1.) + 0.2 * rp()).normalize();
            let frame = |n: Point, k1: f64, k2: f64, v: Point| {
                let d1 = (v - n * v.dot(&n)).normalize();
                SurfaceFrame { normal: n, k1, k2, dir1: d1, dir2: n.cross(&d1) }
            };
            let f0 = frame(n0, 0.7, -0.4, rp());
            let f1 = frame(n1, 1.1, 0.3, rp());
            let r = build_r(&curve, &n0, &n1, Some(&(n0 + n1).normalize()));
            let m = match_r_derivatives(&r, &curve, &f0, &f1);
            for (x, f) in [(0.0, &f0), (0.9, &f1)] {
                assert!((m.eval(x, 0) - r.eval(x, 0)).norm() < 1e-14);
                let want = f.second_form(&curve.eval(x, 1), &m.eval(x, 0));
                assert!((m.eval(x, 1).dot(&f.normal) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frame_of_paraboloid() {
        // z = (a x^2 + b y^2)/2 at origin
        let (a, b) = (0.8, -0.3);
        let fr = surface_frame(&p(1., 0., 0.), &p(0., 1., 0.), &p(0., 0., a), &Point::zeros(), &p(0., 0., b)).unwrap();
        assert!((fr.k1 - a).abs() < 1e-14 && (fr.k2 - b).abs() < 1e-14);
        assert!((fr.dir1.x.abs() - 1.0).abs() < 1e-14);
        assert!((fr.mean_curvature() - 0.25).abs() < 1e-14);
    }
}
