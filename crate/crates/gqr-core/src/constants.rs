//! Physical constants, CODATA 2018 recommended values, frozen in one table.
//!
//! Every other module computes in SI internally; the CLI converts
//! experiment-friendly units at the boundary (see [`crate::units`]).

/// Immutable table of the physical constants the simulation depends on.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    /// Gravitational constant (m^3 kg^-1 s^-2).
    pub g: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Planck constant (J s).
    pub h: f64,
    /// Speed of light in vacuum (m s^-1).
    pub c: f64,
    /// Atomic mass unit (kg).
    pub amu: f64,
}

/// Planck constant (J s), exact in the 2019 SI.
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Reduced Planck constant h/(2*pi) (J s), derived so the ratio is exact
/// in double precision rather than truncated to CODATA's printed digits.
pub const HBAR: f64 = PLANCK_H / std::f64::consts::TAU;

/// Newtonian gravitational constant (m^3 kg^-1 s^-2).
pub const GRAVITATIONAL_G: f64 = 6.674_30e-11;

/// Speed of light in vacuum (m s^-1), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Atomic mass unit (kg).
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    g: GRAVITATIONAL_G,
    hbar: HBAR,
    h: PLANCK_H,
    c: SPEED_OF_LIGHT,
    amu: ATOMIC_MASS_KG,
};
