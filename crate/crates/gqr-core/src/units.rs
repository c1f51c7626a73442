//! Unit tags accepted at the configuration boundary and their SI factors.
//!
//! Conversions are plain decade (or amu) scalings: `to_si` followed by
//! `from_si` round-trips to relative 1e-14 or better.

use crate::constants::ATOMIC_MASS_KG;
use crate::error::{CoreError, Result};

/// Physical dimension of a configuration quantity, used to reject unit
/// mismatches (a mass key given in micrometres, say) at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Mass,
    Length,
    Time,
    Speed,
}

impl Dimension {
    pub fn accepted_tags(self) -> &'static str {
        match self {
            Dimension::Mass => "amu|kg",
            Dimension::Length => "um|nm|m",
            Dimension::Time => "s",
            Dimension::Speed => "m_per_s",
        }
    }
}

/// Recognized unit tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Amu,
    Micrometre,
    Nanometre,
    Metre,
    Kilogram,
    Second,
    MetrePerSecond,
}

impl Unit {
    /// Parse a configuration unit tag.
    pub fn from_tag(tag: &str) -> Result<Unit> {
        match tag {
            "amu" => Ok(Unit::Amu),
            "um" => Ok(Unit::Micrometre),
            "nm" => Ok(Unit::Nanometre),
            "m" => Ok(Unit::Metre),
            "kg" => Ok(Unit::Kilogram),
            "s" => Ok(Unit::Second),
            "m_per_s" => Ok(Unit::MetrePerSecond),
            other => Err(CoreError::config(format!(
                "unknown unit tag '{other}' (expected one of amu, um, nm, m, kg, s, m_per_s)"
            ))),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Unit::Amu => "amu",
            Unit::Micrometre => "um",
            Unit::Nanometre => "nm",
            Unit::Metre => "m",
            Unit::Kilogram => "kg",
            Unit::Second => "s",
            Unit::MetrePerSecond => "m_per_s",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Unit::Amu | Unit::Kilogram => Dimension::Mass,
            Unit::Micrometre | Unit::Nanometre | Unit::Metre => Dimension::Length,
            Unit::Second => Dimension::Time,
            Unit::MetrePerSecond => Dimension::Speed,
        }
    }

    /// Multiplicative factor taking a value in this unit to SI.
    pub fn si_factor(self) -> f64 {
        match self {
            Unit::Amu => ATOMIC_MASS_KG,
            Unit::Micrometre => 1e-6,
            Unit::Nanometre => 1e-9,
            Unit::Metre | Unit::Kilogram | Unit::Second | Unit::MetrePerSecond => 1.0,
        }
    }
}

/// Convert `value` carrying `unit` to SI. Exact for m, kg, s, m_per_s.
pub fn to_si(value: f64, unit: Unit) -> Result<f64> {
    if !value.is_finite() {
        return Err(CoreError::config(format!(
            "non-finite value {value} for unit '{}'",
            unit.tag()
        )));
    }
    Ok(value * unit.si_factor())
}

/// Inverse of [`to_si`].
pub fn from_si(value: f64, unit: Unit) -> Result<f64> {
    if !value.is_finite() {
        return Err(CoreError::config(format!(
            "non-finite SI value {value} for unit '{}'",
            unit.tag()
        )));
    }
    Ok(value / unit.si_factor())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn amu_is_codata_kilograms() {
        assert_eq!(to_si(1.0, Unit::Amu).unwrap(), 1.660_539_066_60e-27);
    }

    #[test]
    fn metre_is_identity() {
        assert_eq!(to_si(1.0, Unit::Metre).unwrap(), 1.0);
    }

    #[test]
    fn micrometre_decade_scaling() {
        let si = to_si(2.5, Unit::Micrometre).unwrap();
        assert!((si - 2.5e-6).abs() < 1e-21);
    }

    #[test]
    fn unknown_tag_is_config_error() {
        let err = Unit::from_tag("furlong").unwrap_err();
        assert!(matches!(err, CoreError::Config(_)));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(to_si(f64::NAN, Unit::Metre).is_err());
        assert!(to_si(f64::INFINITY, Unit::Amu).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(v in 1e-12f64..1e12, idx in 0usize..7) {
            let unit = [
                Unit::Amu,
                Unit::Micrometre,
                Unit::Nanometre,
                Unit::Metre,
                Unit::Kilogram,
                Unit::Second,
                Unit::MetrePerSecond,
            ][idx];
            let si = to_si(v, unit).unwrap();
            let back = from_si(si, unit).unwrap();
            prop_assert!((back - v).abs() <= 1e-14 * v.abs());
        }
    }
}
