//! Truncated Taylor arithmetic used to obtain exact derivatives of the
//! closed-form fundamental functions and of the patch formulas.
//!
//! A [`Jet<T, N>`] stores the first `N` Taylor coefficients of a function
//! around an expansion point, `c[k] = f^(k)(x0) / k!`. Nesting jets
//! (`Jet<Jet<f64, A>, B>`) gives bivariate expansions with tensor-product
//! truncation, which is what the patch code uses for mixed derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Minimal field interface shared by `f64` and the jet types.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// Lift a constant.
    fn cst(v: f64) -> Self;
    /// The plain value (zeroth coefficient, recursively).
    fn re(&self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T: Scalar, const N: usize> {
    pub c: [T; N],
}

impl<T: Scalar, const N: usize> Jet<T, N> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::cst(0.0); N];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable expanded around `x0`.
    pub fn variable(x0: T) -> Self {
        let mut j = Self::constant(x0);
        if N > 1 {
            j.c[1] = T::cst(1.0);
        }
        j
    }

    #[inline]
    pub fn value(&self) -> T {
        self.c[0]
    }

    /// k-th derivative at the expansion point (zero beyond the truncation order).
    pub fn derivative(&self, k: usize) -> T {
        if k >= N {
            return T::cst(0.0);
        }
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k] * T::cst(f)
    }

    fn recip(self) -> Self {
        let mut r = [T::cst(0.0); N];
        let inv = T::cst(1.0) / self.c[0];
        r[0] = inv;
        for k in 1..N {
            let mut acc = T::cst(0.0);
            for j in 1..=k {
                acc = acc + self.c[j] * r[k - j];
            }
            r[k] = -(acc * inv);
        }
        Jet { c: r }
    }
}

impl<T: Scalar, const N: usize> Scalar for Jet<T, N> {
    #[inline]
    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }
    #[inline]
    fn re(&self) -> f64 {
        self.c[0].re()
    }
}

impl<T: Scalar, const N: usize> Add for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] = self.c[k] + o.c[k];
        }
        self
    }
}

impl<T: Scalar, const N: usize> Sub for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] = self.c[k] - o.c[k];
        }
        self
    }
}

impl<T: Scalar, const N: usize> Neg for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        for k in 0..N {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl<T: Scalar, const N: usize> Mul for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let mut r = [T::cst(0.0); N];
        for i in 0..N {
            for j in 0..(N - i) {
                r[i + j] = r[i + j] + self.c[i] * o.c[j];
            }
        }
        Jet { c: r }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<T: Scalar, const N: usize> Div for Jet<T, N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

/// Bivariate jet: outer coefficients in the first variable, inner in the second.
pub type Jet2<const A: usize, const B: usize> = Jet<Jet<f64, B>, A>;

/// Seed `(u, v)` as independent variables of a bivariate jet.
pub fn seed2<const A: usize, const B: usize>(u: f64, v: f64) -> (Jet2<A, B>, Jet2<A, B>) {
    let ju = Jet::variable(Jet::constant(u));
    let jv = Jet::constant(Jet::variable(v));
    (ju, jv)
}

/// Mixed derivative `d^a/du^a d^b/dv^b` of a bivariate jet.
pub fn mixed<const A: usize, const B: usize>(j: &Jet2<A, B>, a: usize, b: usize) -> f64 {
    j.derivative(a).derivative(b)
}
