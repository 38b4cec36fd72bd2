//! 2×2 complex matrices and their exponential.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let m = &self.0;
        Mat2::new(k * m[0][0], k * m[0][1], k * m[1][0], k * m[1][1])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// Max-abs entry.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues, ordered by descending real part.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let tau = self.trace() * 0.5;
        let s = self.half_gap();
        let (a, b) = (tau + s, tau - s);
        if a.re >= b.re {
            [a, b]
        } else {
            [b, a]
        }
    }

    /// s = sqrt(((m00 - m11)/2)² + m01 m10); eigenvalues are tr/2 ± s.
    fn half_gap(&self) -> Complex64 {
        let m = &self.0;
        let h = (m[0][0] - m[1][1]) * 0.5;
        (h * h + m[0][1] * m[1][0]).sqrt()
    }

    /// Matrix exponential in closed form.
    ///
    /// With τ = tr/2 and s as in [`Mat2::eigenvalues`],
    /// `exp(M) = e^τ [cosh(s) I + sinh(s)/s (M - τ I)]`. The `sinh(s)/s`
    /// factor switches to its Taylor series near s = 0, and for large |Re s|
    /// the dominant exponential is formed directly so `e^τ` cannot underflow
    /// against an overflowing `cosh`.
    pub fn exp(&self) -> Mat2 {
        let tau = self.trace() * 0.5;
        let s = self.half_gap();
        let (c, sh) = if s.norm() < 1.0e-4 {
            let s2 = s * s;
            let e = tau.exp();
            let cosh = ONE + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
            let sinhc = ONE + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
            (e * cosh, e * sinhc)
        } else if s.re.abs() < 350.0 {
            let e = tau.exp();
            (e * s.cosh(), e * s.sinh() / s)
        } else {
            // cosh(s) ≈ sinh(s)·sign = e^{±s}/2 to within e^{-700}.
            let sign = s.re.signum();
            let dom = (tau + s * sign).exp() * 0.5;
            (dom, dom * sign / s)
        };
        let shifted = *self - Mat2::identity().scale(tau);
        Mat2::identity().scale(c) + shifted.scale(sh)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
