//! Feasibility calculus for a proposed experiment.
//!
//! Qualitative inequalities are made concrete so verdicts can be audited:
//! "a ≪ b" means `10 a ≤ b`, and the spurious Raman strength must satisfy
//! `x < 1` strictly. Each check records the inequality it applied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::model::{EitMedium, RamanAbsorber};
use crate::propagation::{n_fwm, noise_suppression_ratio};
use crate::scenario::Scenario;
use crate::susceptibility::{effective_depth, two_photon_width};

/// Factor standing in for "much less than".
pub const MUCH_LESS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiWindow {
    /// √(γ_ge γ_gs), MHz.
    pub lower: f64,
    /// γ_ge, MHz.
    pub upper: f64,
    pub omega_c: f64,
    pub passed: bool,
    pub criterion: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthTarget {
    pub target_d_abs: f64,
    pub depth_2l: f64,
    /// Raman Rabi frequency reaching the target, MHz; absent when infeasible.
    pub omega_a: Option<f64>,
    pub feasible: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    /// Raman line half-width at the scenario's Ω_A, MHz.
    pub lhs: f64,
    /// `Ω_C²/(γ_ge √D) · √(2/(1 + D/12))`, MHz.
    pub rhs: f64,
    pub omega_a: f64,
    pub passed: bool,
    pub criterion: String,
    /// Independently estimated Stokes width, shown for comparison only.
    pub reference_stokes_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanScatter {
    pub x: f64,
    pub delta_a: f64,
    pub passed: bool,
    pub criterion: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub rabi_window: RabiWindow,
    /// D γ_ge/Δ.
    pub fwm_strength: f64,
    /// Noise photons without absorber.
    pub n_fwm: f64,
    pub d_abs_required: DepthTarget,
    pub bandwidth: Bandwidth,
    /// Noise-photon ratio at the target absorber depth.
    pub noise_ratio: f64,
    pub raman_scatter: RamanScatter,
    /// Every check passed.
    pub passed: bool,
}

impl DesignReport {
    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.rabi_window.passed {
            out.push("rabi_window");
        }
        if !self.d_abs_required.feasible {
            out.push("d_abs_required");
        }
        if !self.bandwidth.passed {
            out.push("bandwidth");
        }
        if !self.raman_scatter.passed {
            out.push("raman_scatter");
        }
        out
    }
}

pub fn rabi_window(eit: &EitMedium) -> RabiWindow {
    let lower = (eit.gamma_ge * eit.gamma_gs).sqrt();
    let upper = eit.gamma_ge;
    RabiWindow {
        lower,
        upper,
        omega_c: eit.omega_c,
        passed: eit.omega_c >= MUCH_LESS * lower && eit.omega_c < upper,
        criterion: format!("{MUCH_LESS} * sqrt(gamma_ge * gamma_gs) <= omega_c < gamma_ge"),
    }
}

pub fn fwm_strength(eit: &EitMedium) -> f64 {
    eit.fwm_parameter()
}

/// Raman Rabi frequency giving effective depth `target_d_abs`, by bisection.
pub fn solve_omega_a(template: &RamanAbsorber, target_d_abs: f64) -> Result<f64> {
    if !(target_d_abs.is_finite() && target_d_abs >= 0.0) {
        return Err(Error::Domain(format!(
            "target absorber depth must be non-negative and finite, got {target_d_abs}"
        )));
    }
    if target_d_abs == 0.0 {
        return Ok(0.0);
    }
    let ceiling = template.depth_2l;
    if target_d_abs >= ceiling {
        return Err(Error::Infeasible(format!(
            "target D_abs = {target_d_abs} is not below the two-level depth D_2L = {ceiling}, \
             which is approached only as gamma_cb -> 0"
        )));
    }
    if template.gamma_cb == 0.0 {
        return Err(Error::Infeasible("with gamma_cb = 0 any nonzero omega_a saturates the depth at D_2L".into()));
    }
    let depth = |omega_a: f64| effective_depth(&RamanAbsorber { omega_a, ..*template });
    let mut lo = 0.0;
    let mut hi = template.delta_2.abs() * 1e-3;
    while depth(hi) < target_d_abs {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Infeasible(format!("target D_abs = {target_d_abs} not reachable")));
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if depth(mid) < target_d_abs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn bandwidth_check(absorber: &RamanAbsorber, eit: &EitMedium) -> Bandwidth {
    let lhs = two_photon_width(absorber);
    let rhs = if eit.omega_c == 0.0 || eit.depth == 0.0 {
        0.0
    } else {
        eit.eit_width() * (2.0 / (1.0 + eit.depth / 12.0)).sqrt()
    };
    Bandwidth {
        lhs,
        rhs,
        omega_a: absorber.omega_a,
        passed: lhs > rhs,
        criterion: "lhs > rhs".into(),
        reference_stokes_width: None,
    }
}

/// Relative strength of spontaneous Raman scattering driven by the Raman
/// control in the EIT species, `x = D (Ω_A/Ω_C)(γ_ge/Δ_A)`.
pub fn raman_scatter_strength(eit: &EitMedium, absorber: &RamanAbsorber, delta_a: f64) -> Result<RamanScatter> {
    if delta_a == 0.0 || !delta_a.is_finite() {
        return Err(Error::Domain(format!("delta_a must be nonzero and finite, got {delta_a}")));
    }
    let x = if absorber.omega_a == 0.0 || eit.depth == 0.0 {
        0.0
    } else if eit.omega_c == 0.0 {
        return Err(Error::Domain("Raman scattering strength is unbounded with omega_c = 0 and omega_a > 0".into()));
    } else {
        eit.depth * (absorber.omega_a / eit.omega_c) * (eit.gamma_ge / delta_a).abs()
    };
    Ok(RamanScatter { x, delta_a, passed: x < 1.0, criterion: "x < 1".into() })
}

/// Every figure of merit for the scenario.
pub fn full_report(scenario: &Scenario) -> Result<DesignReport> {
    let mut errs = scenario.check();
    let Some(absorber) = scenario.absorber else {
        errs.push(Violation::bare("absorber", "section is required for a design report"));
        return Err(Error::Validation(errs));
    };
    let Some(delta_a) = absorber.delta_a else {
        errs.push(Violation::bare("absorber.delta_a", "is required for a design report"));
        return Err(Error::Validation(errs));
    };
    errs.into_result()?;
    let eit = &scenario.eit;

    let target = scenario.options.target_depth_ratio * eit.depth;
    let d_abs_required = match solve_omega_a(&absorber, target) {
        Ok(omega_a) => DepthTarget {
            target_d_abs: target,
            depth_2l: absorber.depth_2l,
            omega_a: Some(omega_a),
            feasible: true,
            note: None,
        },
        Err(Error::Infeasible(msg)) => DepthTarget {
            target_d_abs: target,
            depth_2l: absorber.depth_2l,
            omega_a: None,
            feasible: false,
            note: Some(msg),
        },
        Err(e) => return Err(e),
    };
    let noise_ratio = if target > 0.0 { noise_suppression_ratio(eit, target)? } else { 0.0 };
    let mut bandwidth = bandwidth_check(&absorber, eit);
    bandwidth.reference_stokes_width = scenario.options.reference_stokes_width;
    let rabi = rabi_window(eit);
    let raman_scatter = raman_scatter_strength(eit, &absorber, delta_a)?;
    let passed = rabi.passed && d_abs_required.feasible && bandwidth.passed && raman_scatter.passed;
    Ok(DesignReport {
        rabi_window: rabi,
        fwm_strength: fwm_strength(eit),
        n_fwm: n_fwm(eit),
        d_abs_required,
        bandwidth,
        noise_ratio,
        raman_scatter,
        passed,
    })
}
