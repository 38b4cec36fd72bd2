//! Adaptive Dormand–Prince 5(4) integration of `dT/dζ = F(ζ, T)` for 2×2
//! complex matrices.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { atol: 1e-12, rtol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights equal the last row of A (FSAL).
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_HAT: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

fn combo(y: &Mat2, h: f64, coef: &[f64], k: &[Mat2]) -> Mat2 {
    let mut out = *y;
    for (c, ki) in coef.iter().zip(k) {
        if *c != 0.0 {
            out = out + ki.scale(Complex64::new(h * c, 0.0));
        }
    }
    out
}

fn error_norm(err: &Mat2, y0: &Mat2, y1: &Mat2, tol: Tolerances) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let scale = tol.atol + tol.rtol * y0.0[i][j].norm().max(y1.0[i][j].norm());
            worst = worst.max(err.0[i][j].norm() / scale);
        }
    }
    worst
}

/// Integrate from `z0` to `z1` starting at `y0`.
///
/// Fails with [`Error::Integration`] carrying the last accepted ζ when the
/// step size underflows or the state stops being finite.
pub fn dopri5<F>(f: F, z0: f64, z1: f64, y0: Mat2, tol: Tolerances) -> Result<(Mat2, Stats)>
where
    F: Fn(f64, &Mat2) -> Mat2,
{
    let span = z1 - z0;
    let mut stats = Stats::default();
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let h_min = 1e-14 * span.abs().max(1.0);
    let mut z = z0;
    let mut y = y0;
    let mut k0 = f(z, &y);
    let rate = k0.max_norm() / y.max_norm().max(1e-300);
    let mut h = if rate > 0.0 { (0.01 / rate).min(span.abs()) } else { span.abs() } * dir;

    while (z1 - z) * dir > 0.0 {
        if (z + h - z1) * dir > 0.0 {
            h = z1 - z;
        }
        let mut k = [Mat2::zero(); 7];
        k[0] = k0;
        for s in 1..7 {
            let ys = combo(&y, h, &A[s][..s], &k[..s]);
            k[s] = f(z + C[s] * h, &ys);
        }
        let y_new = combo(&y, h, &B, &k);
        let mut err = Mat2::zero();
        for s in 0..7 {
            let w = B[s] - B_HAT[s];
            if w != 0.0 {
                err = err + k[s].scale(Complex64::new(h * w, 0.0));
            }
        }
        let en = error_norm(&err, &y, &y_new, tol);
        if !en.is_finite() || !y_new.is_finite() {
            stats.rejected += 1;
            h *= 0.1;
        } else if en <= 1.0 {
            stats.accepted += 1;
            z = if (z + h - z1) * dir >= 0.0 { z1 } else { z + h };
            y = y_new;
            k0 = k[6];
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h.abs() < h_min && (z1 - z) * dir > h_min {
            return Err(Error::Integration { zeta: z, reason: format!("step size underflow (h = {:e})", h.abs()) });
        }
    }
    Ok((y, stats))
}
