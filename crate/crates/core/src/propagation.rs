//! Signal/idler propagation through the EIT medium.
//!
//! Fields are mean amplitudes `(a_S, a_I†)` evolving in the normalised
//! coordinate ζ = z/L as `d/dζ (a_S, a_I†) = M(δ) (a_S, a_I†)`. The
//! generator follows from adiabatic elimination of the optical and spin
//! coherences at two-photon detuning δ. With `A = δ + iγ_ge`,
//! `B = δ + iγ_gs`, `det = A B - Ω_C²` and `k = D γ_ge`:
//!
//! ```text
//! m00 = -i k B / det
//! m01 = +i k Ω_C² / (Δ det)
//! m10 = -m01
//! m11 = +i k A Ω_C² / (Δ² det) - conj(D_abs Λ(δ))
//! ```
//!
//! At δ = 0 and γ_gs = 0 this is `[[0, -iDγ/Δ], [iDγ/Δ, Dγ²/Δ²]]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{dopri5, Tolerances};
use crate::linalg::Mat2;
use crate::model::{EitMedium, FieldPair};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub m: Mat2,
    /// Two-photon detuning, MHz.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub t: Mat2,
    pub delta: f64,
}

impl TransferMatrix {
    pub fn apply(&self, input: FieldPair) -> FieldPair {
        let [a_s, a_i_dag] = self.t.apply([input.a_s, input.a_i_dag]);
        FieldPair { a_s, a_i_dag }
    }
}

/// Which pieces of the generator to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    /// Off-diagonal signal/idler coupling.
    pub fwm: bool,
    /// The idler's own parametric term, `D γ²/Δ²` at resonance.
    pub idler_gain: bool,
}

impl Terms {
    pub const ALL: Terms = Terms { fwm: true, idler_gain: true };
    /// Lossless Bogoliubov limit of the resonant solution.
    pub const NO_IDLER_GAIN: Terms = Terms { fwm: true, idler_gain: false };
    /// Pure EIT: the signal sees only its own susceptibility.
    pub const EIT_ONLY: Terms = Terms { fwm: false, idler_gain: false };
}

/// Generator at detuning `delta` with the given idler loss `D_abs Λ(δ)`.
pub fn build_coupling_matrix(eit: &EitMedium, absorber_loss: Complex64, delta: f64) -> Result<CouplingMatrix> {
    build_coupling_matrix_with(eit, absorber_loss, delta, Terms::ALL)
}

pub fn build_coupling_matrix_with(
    eit: &EitMedium,
    absorber_loss: Complex64,
    delta: f64,
    terms: Terms,
) -> Result<CouplingMatrix> {
    let k = eit.depth * eit.gamma_ge;
    let a = Complex64::new(delta, eit.gamma_ge);
    let om2 = eit.omega_c * eit.omega_c;
    let dl = eit.delta_control;
    let singular = || Error::Singular { context: format!("coupling matrix at delta = {delta} MHz") };

    let (m00, m01, m11) = if om2 == 0.0 {
        if a.norm() == 0.0 {
            return Err(singular());
        }
        (-I * k / a, ZERO, ZERO)
    } else {
        let b = Complex64::new(delta, eit.gamma_gs);
        let det = a * b - om2;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(singular());
        }
        let m01 = I * k * om2 / (dl * det);
        let m11 = I * k * a * om2 / (dl * dl * det);
        (-I * k * b / det, m01, m11)
    };
    let (m01, m10) = if terms.fwm { (m01, -m01) } else { (ZERO, ZERO) };
    let m11 = if terms.idler_gain { m11 } else { ZERO } - absorber_loss.conj();
    let m = Mat2::new(m00, m01, m10, m11);
    if !m.is_finite() {
        return Err(singular());
    }
    Ok(CouplingMatrix { m, delta })
}

/// Resonant lossless solution,
/// `a_S' = cosh θ a_S - i sinh θ a_I†`, `a_I†' = i sinh θ a_S + cosh θ a_I†`
/// with θ = D γ_ge/Δ.
pub fn analytic_resonant_output(eit: &EitMedium, input: FieldPair) -> FieldPair {
    let th = eit.fwm_parameter();
    let (c, s) = (th.cosh(), th.sinh());
    FieldPair { a_s: c * input.a_s - I * s * input.a_i_dag, a_i_dag: I * s * input.a_s + c * input.a_i_dag }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOutput {
    pub output: FieldPair,
    /// γ_ge/|Δ| ≤ 0.05 and D_abs |Δ|/(D γ_ge) ≥ 10.
    pub in_regime: bool,
}

/// Signal output when a strong idler absorber dominates the FWM gain:
/// `a_S' = E a_S - (i/2)(D/D_abs)(γ/Δ) E a_I†`, `E = exp(D (γ/Δ)² D/D_abs)`.
/// The idler component of the result is left at zero.
pub fn approx_output_with_absorber(eit: &EitMedium, d_abs: f64, input: FieldPair) -> Result<ApproxOutput> {
    if !(d_abs > 0.0 && d_abs.is_finite()) {
        return Err(Error::Domain(format!(
            "absorber depth must be positive for the strong-absorber limit, got {d_abs}"
        )));
    }
    let g = eit.decay_ratio();
    let ratio = eit.depth / d_abs;
    let e = (eit.depth * g * g * ratio).exp();
    let a_s = input.a_s * e - I * 0.5 * ratio * g * e * input.a_i_dag;
    let in_regime = g.abs() <= 0.05 && (eit.depth == 0.0 || d_abs / (eit.depth * g.abs()) >= 10.0);
    Ok(ApproxOutput { output: FieldPair::new(a_s, ZERO), in_regime })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    MatrixExponential,
    AdaptiveRk,
}

pub fn transfer_matrix(matrix: &CouplingMatrix, method: Method) -> Result<TransferMatrix> {
    let t = match method {
        Method::MatrixExponential => matrix.m.exp(),
        Method::AdaptiveRk => {
            let m = matrix.m;
            dopri5(|_, y| m * *y, 0.0, 1.0, Mat2::identity(), Tolerances::default())?.0
        }
    };
    if !t.is_finite() {
        return Err(Error::Singular { context: format!("transfer matrix at delta = {} MHz", matrix.delta) });
    }
    Ok(TransferMatrix { t, delta: matrix.delta })
}

/// Propagate `input` through ζ ∈ [0, 1].
pub fn propagate(matrix: &CouplingMatrix, input: FieldPair, method: Method) -> Result<(FieldPair, TransferMatrix)> {
    let tm = transfer_matrix(matrix, method)?;
    Ok((tm.apply(input), tm))
}

/// Probe intensity transmission with the FWM coupling removed.
pub fn eit_reference(eit: &EitMedium, delta: f64) -> Result<f64> {
    let cm = build_coupling_matrix_with(eit, ZERO, delta, Terms::EIT_ONLY)?;
    Ok((2.0 * cm.m.0[0][0].re).exp())
}

/// Noise photons generated by FWM without absorber, `sinh²(D γ_ge/Δ)`.
pub fn n_fwm(eit: &EitMedium) -> f64 {
    eit.fwm_parameter().sinh().powi(2)
}

/// Ratio of noise photons with and without the absorber,
/// `(D/D_abs)² (γ/Δ)² exp(-2D (γ/Δ)(1 - (γ/Δ) D/D_abs))`.
pub fn noise_suppression_ratio(eit: &EitMedium, d_abs: f64) -> Result<f64> {
    // No medium, no noise: the ratio is defined as 0 for any absorber.
    if eit.depth == 0.0 {
        return Ok(0.0);
    }
    if !(d_abs > 0.0) {
        return Err(Error::Domain(format!("noise suppression ratio needs a positive absorber depth, got {d_abs}")));
    }
    let g = eit.decay_ratio().abs();
    let ratio = eit.depth / d_abs;
    Ok(ratio * ratio * g * g * (-2.0 * eit.depth * g * (1.0 - g * ratio)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn medium(depth: f64, ratio: f64) -> EitMedium {
        EitMedium::new(300.0, 0.0, 300.0 / ratio, 30.0, depth).unwrap()
    }

    fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn resonant_limit_is_exact() {
        let eit = EitMedium::new(300.0, 0.0, 3036.0, 50.0, 15.0).unwrap();
        let m = build_coupling_matrix(&eit, ZERO, 0.0).unwrap().m.0;
        let th = 15.0 * 300.0 / 3036.0;
        assert!(m[0][0].norm() < 1e-12);
        assert!((m[0][1] - c(0.0, -th)).norm() < 1e-12);
        assert!((m[1][0] - c(0.0, th)).norm() < 1e-12);
        assert!((m[1][1] - c(th * 300.0 / 3036.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn absorber_loss_enters_idler_diagonal() {
        let eit = EitMedium::new(300.0, 0.0, 3036.0, 50.0, 15.0).unwrap();
        let m = build_coupling_matrix(&eit, c(7.5, 0.0), 0.0).unwrap().m.0;
        let self_gain = 15.0 * 300.0 * 300.0 / (3036.0 * 3036.0);
        assert!((m[1][1] - c(self_gain - 7.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn no_control_gives_two_level_absorption() {
        let eit = EitMedium::new(300.0, 0.0, 1e12, 0.0, 2.0).unwrap();
        for delta in [-600.0, -30.0, 0.0, 45.0, 900.0] {
            let (out, _) = propagate(
                &build_coupling_matrix(&eit, ZERO, delta).unwrap(),
                FieldPair::real(1.0, 1.0),
                Method::MatrixExponential,
            )
            .unwrap();
            let lorentz = (-2.0 * 2.0 * 300.0f64.powi(2) / (delta * delta + 300.0f64.powi(2))).exp();
            assert!((out.a_s.norm_sqr() - lorentz).abs() < 1e-12);
            assert!((out.a_i_dag - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pole_reported_as_singularity() {
        // γ_gs = 0 with Ω_C = 0 is regular; a real pole needs det = 0, which
        // a vanishing optical decay would allow. Emulate it with a NaN rate.
        let eit = EitMedium { gamma_ge: f64::NAN, ..EitMedium::new(300.0, 0.0, 3036.0, 50.0, 15.0).unwrap() };
        assert!(matches!(build_coupling_matrix(&eit, ZERO, 0.0), Err(Error::Singular { .. })));
    }

    #[test]
    fn analytic_identity_without_depth() {
        let eit = medium(0.0, 0.05);
        let input = FieldPair::new(c(0.3, -0.2), c(1.1, 0.4));
        assert_eq!(analytic_resonant_output(&eit, input), input);
    }

    #[test]
    fn analytic_doubling_point() {
        let theta = 2f64.sqrt().acosh();
        let eit = medium(theta / 0.1, 0.1);
        let out = analytic_resonant_output(&eit, FieldPair::real(1.0, 0.0));
        assert!((out.a_s.norm_sqr() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sec5_gain_and_noise_photons() {
        let eit = EitMedium::new(300.0, 0.064, 3036.0, 50.0, 15.0).unwrap();
        let out = analytic_resonant_output(&eit, FieldPair::real(1.0, 0.0));
        assert!((out.a_s.norm_sqr() - 5.3).abs() < 0.1);
        assert!((n_fwm(&eit) - 4.3).abs() < 0.1);
        assert_eq!(n_fwm(&medium(0.0, 0.1)), 0.0);
        let small = medium(0.01, 0.1);
        assert!((n_fwm(&small) / 1e-6 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn anti_diagonal_generator_gives_bogoliubov_map() {
        let th = 0.7;
        for sign in [1.0, -1.0] {
            let cm = CouplingMatrix { m: Mat2::new(ZERO, c(0.0, sign * th), c(0.0, -sign * th), ZERO), delta: 0.0 };
            let (_, t) = propagate(&cm, FieldPair::real(1.0, 0.0), Method::MatrixExponential).unwrap();
            let expect =
                Mat2::new(c(th.cosh(), 0.0), c(0.0, sign * th.sinh()), c(0.0, -sign * th.sinh()), c(th.cosh(), 0.0));
            assert!((t.t - expect).max_norm() < 1e-14);
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let cm = CouplingMatrix { m: Mat2::zero(), delta: 0.0 };
        for method in [Method::MatrixExponential, Method::AdaptiveRk] {
            let (_, t) = propagate(&cm, FieldPair::real(1.0, 0.0), method).unwrap();
            assert_eq!(t.t, Mat2::identity());
        }
    }

    #[test]
    fn eigenvalues_reproduce_resonant_gain() {
        let theta = 2f64.sqrt().acosh();
        let eit = EitMedium::new(300.0, 0.0, 6834.7, 30.0, theta * 6834.7 / 300.0).unwrap();
        let cm = build_coupling_matrix_with(&eit, ZERO, 0.0, Terms::NO_IDLER_GAIN).unwrap();
        let [hi, lo] = cm.m.eigenvalues();
        assert!((hi.re - theta).abs() < 1e-12 && (lo.re + theta).abs() < 1e-12);
        let analytic = analytic_resonant_output(&eit, FieldPair::real(1.0, 0.0)).a_s.norm_sqr();
        assert!((hi.re.cosh().powi(2) - analytic).abs() < 1e-6);
    }

    #[test]
    fn strong_absorber_examples() {
        let eit = medium(10.0, 0.02);
        let out = approx_output_with_absorber(&eit, 100.0, FieldPair::real(1.0, 0.0)).unwrap();
        assert!(out.in_regime);
        assert!((out.output.a_s.re - (10.0f64 * 0.0004 * 0.1).exp()).abs() < 1e-12);
        let cross = approx_output_with_absorber(&eit, 100.0, FieldPair::real(0.0, 1.0)).unwrap();
        assert!((cross.output.a_s.norm() - 0.5 * 0.1 * 0.02 * 1.0004).abs() < 1e-6);

        let weak = approx_output_with_absorber(&eit, 1e9, FieldPair::real(1.0, 0.0)).unwrap();
        assert!((weak.output.a_s.re - 1.0).abs() < 1e-9);

        assert!(!approx_output_with_absorber(&medium(10.0, 0.2), 100.0, FieldPair::real(1.0, 0.0)).unwrap().in_regime);
        assert!(matches!(approx_output_with_absorber(&eit, 0.0, FieldPair::real(1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn strong_absorber_limit_tracks_full_propagation() {
        let eit = medium(10.0, 0.02);
        let full = propagate(
            &build_coupling_matrix(&eit, c(100.0, 0.0), 0.0).unwrap(),
            FieldPair::real(1.0, 0.0),
            Method::MatrixExponential,
        )
        .unwrap()
        .0;
        let approx = approx_output_with_absorber(&eit, 100.0, FieldPair::real(1.0, 0.0)).unwrap();
        assert!((full.a_s.norm() / approx.output.a_s.norm() - 1.0).abs() < 0.05);
    }

    #[test]
    fn noise_ratio_examples() {
        let eit = EitMedium::new(300.0, 0.064, 3036.0, 50.0, 15.0).unwrap();
        let r = noise_suppression_ratio(&eit, 16.5).unwrap();
        assert!((r - 5.433e-4).abs() < 1e-6, "{r}");
        assert!(noise_suppression_ratio(&eit, 1e12).unwrap() < 1e-20);
        assert!(matches!(noise_suppression_ratio(&eit, 0.0), Err(Error::Domain(_))));
        let a = noise_suppression_ratio(&medium(5.0, 1e-3), 50.0).unwrap();
        let b = noise_suppression_ratio(&medium(5.0, 1e-4), 50.0).unwrap();
        assert!((a / b / 100.0 - 1.0).abs() < 0.01);
        assert_eq!(noise_suppression_ratio(&medium(0.0, 0.1), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn eit_reference_at_resonance() {
        let eit = EitMedium::new(300.0, 0.01, 6834.7, 30.0, 10.0).unwrap();
        let expect = (-2.0f64 * 10.0 * 300.0 * 0.01 / (900.0 + 300.0 * 0.01)).exp();
        assert!((eit_reference(&eit, 0.0).unwrap() - expect).abs() < 1e-12);
        let perfect = EitMedium { gamma_gs: 0.0, ..eit };
        assert_eq!(eit_reference(&perfect, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn probe_transmission_symmetric_in_detuning() {
        use crate::susceptibility::{normalized_lineshape, AbsorberResponse};
        let eit = EitMedium::new(300.0, 0.0, 6834.7, 30.0, 20.0).unwrap();
        let resp = AbsorberResponse::lorentzian(3.0, 0.4, 0.0).unwrap();
        for k in 1..40 {
            let d = 0.07 * k as f64;
            let t = |d: f64| {
                let loss = normalized_lineshape(&resp, d) * resp.depth_abs;
                let cm = build_coupling_matrix(&eit, loss, d).unwrap();
                transfer_matrix(&cm, Method::MatrixExponential).unwrap().t.0[0][0].norm_sqr()
            };
            let (p, m) = (t(d), t(-d));
            assert!((p - m).abs() <= 1e-12 * p.max(1.0), "{d}: {p} vs {m}");
        }
    }

    proptest! {
        #[test]
        fn methods_agree(
            depth in 0.0f64..5.0,
            ratio in 0.001f64..0.1,
            delta in -3.0f64..3.0,
            gamma_gs in 0.0f64..0.05,
            loss_re in 0.0f64..20.0,
            loss_im in -5.0f64..5.0,
        ) {
            let eit = EitMedium { gamma_gs, ..medium(depth, ratio) };
            let cm = build_coupling_matrix(&eit, c(loss_re, loss_im), delta).unwrap();
            let a = transfer_matrix(&cm, Method::MatrixExponential).unwrap().t;
            let b = transfer_matrix(&cm, Method::AdaptiveRk).unwrap().t;
            prop_assert!((a - b).max_norm() <= 1e-8 * a.max_norm().max(1.0));
        }

        #[test]
        fn lossless_resonant_oracle_and_symplectic(
            depth in 0.0f64..5.0,
            ratio in 0.001f64..0.1,
            s in (-1.0f64..1.0, -1.0f64..1.0),
            i in (-1.0f64..1.0, -1.0f64..1.0),
        ) {
            let eit = medium(depth, ratio);
            let cm = build_coupling_matrix_with(&eit, ZERO, 0.0, Terms::NO_IDLER_GAIN).unwrap();
            let input = FieldPair::new(c(s.0, s.1), c(i.0, i.1));
            let (out, t) = propagate(&cm, input, Method::MatrixExponential).unwrap();
            let oracle = analytic_resonant_output(&eit, input);
            prop_assert!(rel_close(out.a_s, oracle.a_s, 1e-6));
            prop_assert!(rel_close(out.a_i_dag, oracle.a_i_dag, 1e-6));
            let t = t.t.0;
            prop_assert!((t[0][0].norm_sqr() - t[0][1].norm_sqr() - 1.0).abs() < 1e-9);
            prop_assert!((t[1][1].norm_sqr() - t[1][0].norm_sqr() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn absorber_never_amplifies_uncoupled_idler(
            loss_re in 0.0f64..50.0,
            loss_im in -50.0f64..50.0,
            delta in -10.0f64..10.0,
        ) {
            let eit = EitMedium::new(300.0, 0.01, 1e12, 30.0, 10.0).unwrap();
            let cm = build_coupling_matrix(&eit, c(loss_re, loss_im), delta).unwrap();
            let (out, _) = propagate(&cm, FieldPair::real(0.0, 1.0), Method::MatrixExponential).unwrap();
            prop_assert!(out.a_i_dag.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn strong_absorber_containment(
            ratio in 0.001f64..0.05,
            depth in 0.1f64..20.0,
            excess in 10.0f64..200.0,
        ) {
            let eit = medium(depth, ratio);
            let d_abs = excess * depth * ratio;
            let approx = approx_output_with_absorber(&eit, d_abs, FieldPair::real(1.0, 1.0)).unwrap();
            prop_assert!(approx.in_regime);
            let cm = build_coupling_matrix(&eit, c(d_abs, 0.0), 0.0).unwrap();
            let (full, _) = propagate(&cm, FieldPair::real(1.0, 1.0), Method::MatrixExponential).unwrap();
            prop_assert!((full.a_s.norm() / approx.output.a_s.norm() - 1.0).abs() < 0.05);
        }
    }
}
