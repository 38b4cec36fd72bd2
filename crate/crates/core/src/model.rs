//! Domain types shared by every other module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationErrors, Violation};
use crate::units::{HZ_PER_MHZ, SPEED_OF_LIGHT};

/// The EIT/FWM Λ-system: rates, control field and resonant optical depth.
///
/// `depth` is an amplitude exponent: a resonant probe without control field
/// leaves the medium with amplitude `exp(-depth)`, i.e. intensity
/// `exp(-2 depth)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EitMedium {
    /// Optical coherence decay rate, MHz.
    pub gamma_ge: f64,
    /// Ground-state spin decoherence rate, MHz.
    pub gamma_gs: f64,
    /// Detuning of the control field from the |g>-|e> transition, MHz.
    pub delta_control: f64,
    /// Control Rabi frequency, MHz.
    pub omega_c: f64,
    /// Resonant optical depth (amplitude convention).
    pub depth: f64,
}

impl EitMedium {
    pub fn new(gamma_ge: f64, gamma_gs: f64, delta_control: f64, omega_c: f64, depth: f64) -> Result<Self> {
        let m = EitMedium { gamma_ge, gamma_gs, delta_control, omega_c, depth };
        m.check().into_result()?;
        Ok(m)
    }

    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        let fields = [
            ("gamma_ge", self.gamma_ge),
            ("gamma_gs", self.gamma_gs),
            ("delta_control", self.delta_control),
            ("omega_c", self.omega_c),
            ("depth", self.depth),
        ];
        if !all_finite(&fields, &mut errs) {
            return errs;
        }
        if self.gamma_ge <= 0.0 {
            errs.push(Violation::new("gamma_ge", self.gamma_ge, "must be positive"));
        }
        if self.gamma_gs < 0.0 {
            errs.push(Violation::new("gamma_gs", self.gamma_gs, "must be non-negative"));
        }
        if self.depth < 0.0 {
            errs.push(Violation::new("depth", self.depth, "must be non-negative"));
        }
        if self.omega_c < 0.0 {
            errs.push(Violation::new("omega_c", self.omega_c, "must be non-negative"));
        }
        if self.delta_control == 0.0 {
            errs.push(Violation::new(
                "delta_control",
                self.delta_control,
                "must be nonzero (the FWM coupling gamma_ge/delta_control divides by it)",
            ));
        }
        if self.gamma_ge > 0.0 && self.gamma_gs > self.gamma_ge {
            errs.push(Violation::new(
                "gamma_gs",
                self.gamma_gs,
                format!("must not exceed gamma_ge = {}", self.gamma_ge),
            ));
        }
        errs
    }

    /// γ_ge/Δ.
    pub fn decay_ratio(&self) -> f64 {
        self.gamma_ge / self.delta_control
    }

    /// D·γ_ge/Δ, the parametric gain exponent of the resonant solution.
    pub fn fwm_parameter(&self) -> f64 {
        self.depth * self.decay_ratio()
    }

    /// Width scale of the EIT window, |Ω_C|²/(γ_ge √D), MHz.
    pub fn eit_width(&self) -> f64 {
        self.omega_c * self.omega_c / (self.gamma_ge * self.depth.sqrt())
    }
}

/// Far-detuned Λ-system in the second species that provides Raman absorption
/// for the Stokes field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanAbsorber {
    /// Raman control Rabi frequency, MHz.
    pub omega_a: f64,
    /// Raman control detuning from the |a>-|c> transition, MHz.
    pub delta_2: f64,
    /// Optical coherence decay rate of the absorber, MHz.
    pub gamma_ab: f64,
    /// Optical coherence decay rate on the |a>-|c> leg, MHz.
    pub gamma_ac: f64,
    /// Ground-state coherence decay rate of the absorber, MHz.
    pub gamma_cb: f64,
    /// Peak two-level optical depth of the absorber species.
    pub depth_2l: f64,
    /// Displacement of the Raman line from the idler's FWM resonance, MHz.
    pub center_offset: f64,
    /// Detuning of the Raman control from the EIT species' resonance, MHz.
    /// Only used for the spontaneous Raman scattering estimate.
    pub delta_a: Option<f64>,
}

impl RamanAbsorber {
    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        let mut fields = vec![
            ("omega_a", self.omega_a),
            ("delta_2", self.delta_2),
            ("gamma_ab", self.gamma_ab),
            ("gamma_ac", self.gamma_ac),
            ("gamma_cb", self.gamma_cb),
            ("depth_2l", self.depth_2l),
            ("center_offset", self.center_offset),
        ];
        if let Some(d) = self.delta_a {
            fields.push(("delta_a", d));
        }
        if !all_finite(&fields, &mut errs) {
            return errs;
        }
        if self.omega_a < 0.0 {
            errs.push(Violation::new("omega_a", self.omega_a, "must be non-negative"));
        }
        if self.delta_2 == 0.0 {
            errs.push(Violation::new("delta_2", self.delta_2, "must be nonzero"));
        }
        for (name, v) in [("gamma_ab", self.gamma_ab), ("gamma_ac", self.gamma_ac)] {
            if v <= 0.0 {
                errs.push(Violation::new(name, v, "must be positive"));
            }
        }
        if self.gamma_cb < 0.0 {
            errs.push(Violation::new("gamma_cb", self.gamma_cb, "must be non-negative"));
        }
        if self.depth_2l < 0.0 {
            errs.push(Violation::new("depth_2l", self.depth_2l, "must be non-negative"));
        }
        if self.delta_a == Some(0.0) {
            errs.push(Violation::new("delta_a", 0.0, "must be nonzero"));
        }
        errs
    }

    /// r = |Ω_A|²/Δ₂², the fraction of excited-state character mixed into
    /// the dressed ground state.
    pub fn mixing_ratio(&self) -> f64 {
        let x = self.omega_a / self.delta_2;
        x * x
    }
}

/// Optical line of the absorber species, used for absolute susceptibilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicLine {
    /// Radiative decay rate, MHz.
    pub gamma_r: f64,
    /// Wavelength, nm.
    pub wavelength: f64,
    /// Number density, atoms per cm³.
    pub density: f64,
}

impl AtomicLine {
    /// Rb D1 line (795 nm) at 10¹² cm⁻³.
    pub const RB_D1: AtomicLine = AtomicLine { gamma_r: 5.746, wavelength: 794.979, density: 1.0e12 };

    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        let fields = [("gamma_r", self.gamma_r), ("wavelength", self.wavelength), ("density", self.density)];
        if !all_finite(&fields, &mut errs) {
            return errs;
        }
        for (name, v) in fields {
            if v <= 0.0 {
                errs.push(Violation::new(name, v, "must be positive"));
            }
        }
        errs
    }

    /// 3 γ_r N λ³ / (8π²), MHz (N λ³ made dimensionless with λ in cm).
    pub fn prefactor(&self) -> f64 {
        let lambda_cm = self.wavelength * 1.0e-7;
        3.0 * self.gamma_r * self.density * lambda_cm.powi(3) / (8.0 * std::f64::consts::PI.powi(2))
    }

    /// Peak two-level depth for an optical decay rate `gamma_ab`.
    pub fn two_level_depth(&self, gamma_ab: f64) -> f64 {
        self.prefactor() / gamma_ab
    }
}

/// Mean-field amplitudes of the signal and the conjugated idler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPair {
    pub a_s: Complex64,
    pub a_i_dag: Complex64,
}

impl FieldPair {
    pub fn new(a_s: Complex64, a_i_dag: Complex64) -> Self {
        FieldPair { a_s, a_i_dag }
    }

    pub fn real(a_s: f64, a_i_dag: f64) -> Self {
        FieldPair::new(Complex64::new(a_s, 0.0), Complex64::new(a_i_dag, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.a_s.is_finite() && self.a_i_dag.is_finite()
    }

    pub fn check(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        if !self.a_s.is_finite() {
            errs.push(Violation::bare("a_s", "must be finite"));
        }
        if !self.a_i_dag.is_finite() {
            errs.push(Violation::bare("a_i_dag", "must be finite"));
        }
        errs
    }
}

/// Resonant optical depth D = g² N L / (c γ_ge).
///
/// `g` and `gamma_ge` in MHz, `length` in metres, `atoms` a count.
pub fn compute_optical_depth(g: f64, atoms: f64, length: f64, gamma_ge: f64) -> Result<f64> {
    let mut errs = ValidationErrors::default();
    for (name, v) in [("g", g), ("atoms", atoms), ("length", length), ("gamma_ge", gamma_ge)] {
        if !(v.is_finite() && v > 0.0) {
            errs.push(Violation::new(name, v, "must be positive and finite"));
        }
    }
    errs.into_result().map_err(Error::from)?;
    // g²/γ carries one net frequency; take it to Hz against c/L in 1/s.
    Ok(g * g / gamma_ge * HZ_PER_MHZ * atoms * length / SPEED_OF_LIGHT)
}

fn all_finite(fields: &[(&str, f64)], errs: &mut ValidationErrors) -> bool {
    let mut ok = true;
    for (name, v) in fields {
        if !v.is_finite() {
            errs.push(Violation::new(*name, *v, "must be finite"));
            ok = false;
        }
    }
    ok
}
