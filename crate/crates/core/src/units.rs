//! Frequency units.
//!
//! Every rate, Rabi frequency and detuning in this crate is a linear frequency
//! in MHz. All formulas are ratios or products of such quantities, so a 2π
//! factor never has to be chosen.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const HZ_PER_MHZ: f64 = 1.0e6;

pub fn mhz_to_ghz(mhz: f64) -> f64 {
    mhz / 1.0e3
}

pub fn ghz_to_mhz(ghz: f64) -> f64 {
    ghz * 1.0e3
}

pub fn khz_to_mhz(khz: f64) -> f64 {
    khz / 1.0e3
}

pub fn mhz_to_khz(mhz: f64) -> f64 {
    mhz * 1.0e3
}
