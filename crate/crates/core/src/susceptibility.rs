//! Optical response of the Raman absorber.
//!
//! Sign convention: `Im χ > 0` is absorption. The two-photon line of the
//! dressed Λ-system sits at `δ₂ = |Ω_A|²/Δ₂` (the light shift) with
//! half-width Γ_R; near it
//! `χ_abs(δ₂) ≈ K r / (δ₂ - δ_LS - iΓ_R)` with `K = 3γ_r N λ³/(8π²)` and
//! `r = |Ω_A|²/Δ₂²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AtomicLine, RamanAbsorber};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Full susceptibility of the absorber at probe detuning `delta_2_probe`
/// from the bare two-photon resonance.
pub fn chi_abs(absorber: &RamanAbsorber, line: &AtomicLine, delta_2_probe: f64) -> Result<Complex64> {
    let a = absorber;
    let om2 = a.omega_a * a.omega_a;
    if om2 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = Complex64::new(delta_2_probe + a.delta_2, -a.gamma_ab) * Complex64::new(delta_2_probe, -a.gamma_cb) - om2;
    if d.norm() == 0.0 || !d.is_finite() {
        return Err(Error::Singular { context: format!("absorber susceptibility at delta_2 = {delta_2_probe} MHz") });
    }
    let num = om2 / Complex64::new(a.delta_2, a.gamma_ac);
    Ok(line.prefactor() * num / d)
}

/// Two-photon susceptibility in the far-detuned limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhoton {
    pub value: Complex64,
    /// False when |Δ₂| ≤ 10 γ_ab, where the far-detuned form is unreliable.
    pub far_detuned: bool,
}

fn far_detuned(a: &RamanAbsorber) -> bool {
    a.delta_2.abs() > 10.0 * a.gamma_ab
}

/// Far-detuned two-photon susceptibility evaluated on the (light-shifted)
/// two-photon resonance: `i K r / (γ_cb + γ_ab r)`.
///
/// This is the value whose imaginary part, normalised by the two-level peak,
/// gives the effective depth of [`effective_depth`].
pub fn chi_2ph(absorber: &RamanAbsorber, line: &AtomicLine) -> Result<TwoPhoton> {
    let r = absorber.mixing_ratio();
    if r == 0.0 {
        return Ok(TwoPhoton { value: Complex64::new(0.0, 0.0), far_detuned: far_detuned(absorber) });
    }
    let width = absorber.gamma_cb + absorber.gamma_ab * r;
    if width == 0.0 {
        return Err(Error::Singular { context: "two-photon susceptibility (zero width)".into() });
    }
    Ok(TwoPhoton { value: I * line.prefactor() * r / width, far_detuned: far_detuned(absorber) })
}

/// Far-detuned two-photon susceptibility at zero bare two-photon detuning:
/// `K r / (|Ω_A|²/Δ₂ + i(γ_cb + γ_ab r))`.
///
/// The real light-shift term in the denominator makes this much smaller than
/// [`chi_2ph`] whenever the shift exceeds the width.
pub fn chi_2ph_unshifted(absorber: &RamanAbsorber, line: &AtomicLine) -> Result<TwoPhoton> {
    let r = absorber.mixing_ratio();
    let den = Complex64::new(light_shift(absorber), absorber.gamma_cb + absorber.gamma_ab * r);
    if r == 0.0 {
        return Ok(TwoPhoton { value: Complex64::new(0.0, 0.0), far_detuned: far_detuned(absorber) });
    }
    if den.norm() == 0.0 {
        return Err(Error::Singular { context: "two-photon susceptibility (zero denominator)".into() });
    }
    Ok(TwoPhoton { value: line.prefactor() * r / den, far_detuned: far_detuned(absorber) })
}

/// Effective peak amplitude depth of the Raman line,
/// `D_abs = γ_ab r D_2L / (γ_cb + γ_ab r)`.
pub fn effective_depth(absorber: &RamanAbsorber) -> f64 {
    let g_r = absorber.gamma_ab * absorber.mixing_ratio();
    let den = absorber.gamma_cb + g_r;
    if den == 0.0 {
        return 0.0;
    }
    g_r / den * absorber.depth_2l
}

/// Half-width of the two-photon line, `Γ_R = γ_ab r + γ_cb (1 - r)`, MHz.
pub fn two_photon_width(absorber: &RamanAbsorber) -> f64 {
    let r = absorber.mixing_ratio();
    absorber.gamma_ab * r + absorber.gamma_cb * (1.0 - r)
}

/// AC-Stark displacement of the two-photon line, `|Ω_A|²/Δ₂`, MHz.
pub fn light_shift(absorber: &RamanAbsorber) -> f64 {
    absorber.omega_a * absorber.omega_a / absorber.delta_2
}

/// Depth equivalent of a susceptibility: the map that sends the two-level
/// peak `i K/γ_ab` to `D_2L`.
pub fn depth_from_chi(chi: Complex64, absorber: &RamanAbsorber, line: &AtomicLine) -> f64 {
    chi.im * absorber.gamma_ab / line.prefactor() * absorber.depth_2l
}

/// Pole of the exact susceptibility nearest the bare two-photon resonance.
/// Its real part is the exact line centre, its imaginary part the exact
/// half-width.
pub fn raman_pole(absorber: &RamanAbsorber) -> Complex64 {
    let a = absorber;
    // u² + b u + c = 0
    let b = Complex64::new(a.delta_2, -(a.gamma_ab + a.gamma_cb));
    let c = Complex64::new(a.delta_2, -a.gamma_ab) * Complex64::new(0.0, -a.gamma_cb) - a.omega_a * a.omega_a;
    let disc = (b * b - 4.0 * c).sqrt();
    let sgn = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + disc * sgn) * 0.5;
    if q.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    c / q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineshapeOptions {
    /// Displace the line centre by the light shift.
    pub light_shift: bool,
    /// Use the full susceptibility instead of the Lorentzian.
    pub exact: bool,
}

impl Default for LineshapeOptions {
    fn default() -> Self {
        LineshapeOptions { light_shift: true, exact: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    Lorentzian,
    Exact {
        absorber: RamanAbsorber,
        /// δ₂ = δ - shift
        shift: f64,
        peak: Complex64,
    },
}

/// Absorber loss as seen by the idler, on the scan's two-photon detuning axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberResponse {
    pub depth_abs: f64,
    pub hwhm: f64,
    pub light_shift: f64,
    /// Line centre on the scan axis, MHz.
    pub center: f64,
    profile: Profile,
}

impl AbsorberResponse {
    /// No absorber at all.
    pub fn none() -> Self {
        AbsorberResponse { depth_abs: 0.0, hwhm: 1.0, light_shift: 0.0, center: 0.0, profile: Profile::Lorentzian }
    }

    /// Lorentzian response with explicit parameters.
    pub fn lorentzian(depth_abs: f64, hwhm: f64, center: f64) -> Result<Self> {
        if !(depth_abs >= 0.0 && depth_abs.is_finite()) {
            return Err(Error::Domain(format!("absorber depth must be non-negative, got {depth_abs}")));
        }
        if !(hwhm > 0.0 && hwhm.is_finite()) {
            return Err(Error::Domain(format!("absorber half-width must be positive, got {hwhm}")));
        }
        Ok(AbsorberResponse { depth_abs, hwhm, light_shift: 0.0, center, profile: Profile::Lorentzian })
    }

    /// Response of a Raman absorber. `depth_override` replaces the depth from
    /// [`effective_depth`] (used by depth sweeps).
    pub fn from_absorber(
        absorber: &RamanAbsorber,
        depth_override: Option<f64>,
        opts: LineshapeOptions,
    ) -> Result<Self> {
        let depth_abs = depth_override.unwrap_or_else(|| effective_depth(absorber));
        let hwhm = two_photon_width(absorber);
        if depth_abs == 0.0 && hwhm <= 0.0 {
            return Ok(AbsorberResponse::none());
        }
        let ls = light_shift(absorber);
        let center = absorber.center_offset + if opts.light_shift { ls } else { 0.0 };
        let mut resp = AbsorberResponse::lorentzian(depth_abs, hwhm, center)?;
        resp.light_shift = ls;
        if opts.exact && absorber.omega_a > 0.0 {
            let pole = raman_pole(absorber);
            let shift = if opts.light_shift { absorber.center_offset } else { absorber.center_offset - pole.re };
            // The line prefactor cancels in the ratio.
            let peak = chi_abs(absorber, &AtomicLine::RB_D1, pole.re)?;
            resp.center = shift + pole.re;
            resp.profile = Profile::Exact { absorber: *absorber, shift, peak };
        }
        Ok(resp)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.profile, Profile::Exact { .. })
    }

    /// Loss entering the idler equation, `D_abs Λ(δ)`.
    pub fn loss(&self, delta: f64) -> Complex64 {
        if self.depth_abs == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        normalized_lineshape(self, delta) * self.depth_abs
    }
}

/// Peak-normalised complex response Λ(δ), with Λ(centre) = 1 and
/// `Re Λ` the absorptive part.
pub fn normalized_lineshape(response: &AbsorberResponse, delta: f64) -> Complex64 {
    match response.profile {
        Profile::Lorentzian => {
            let g = response.hwhm;
            I * g / Complex64::new(delta - response.center, g)
        }
        Profile::Exact { absorber, shift, peak } => {
            // The idler sees the conjugate of the susceptibility's frequency
            // dependence; normalising by the peak keeps Λ(centre) = 1.
            match chi_abs(&absorber, &AtomicLine::RB_D1, delta - shift) {
                Ok(chi) => (chi / peak).conj(),
                Err(_) => Complex64::new(0.0, 0.0),
            }
        }
    }
}
