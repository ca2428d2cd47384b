//! Unit conventions: SI powers, dimensionless fractions, decibels.

use crate::error::{ModelError, Violation};

/// Speed of light in vacuum, m/s. Enters the cavity decay rate
/// `gamma = c (T2 + L2) / l`.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// An optical power in watts. Finite and non-negative by construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Power(f64);

impl Power {
    pub const ZERO: Power = Power(0.0);

    pub fn new(watts: f64) -> Result<Self, Violation> {
        if !watts.is_finite() || watts < 0.0 {
            return Err(Violation::new(
                "power",
                watts,
                "must be finite and non-negative (watts)",
            ));
        }
        Ok(Power(watts))
    }

    pub fn watts(self) -> f64 {
        self.0
    }

    /// Internal constructor for values non-negative by construction.
    pub(crate) fn wrap(watts: f64) -> Self {
        debug_assert!(watts.is_finite() && watts >= 0.0, "bad power {watts}");
        Power(watts)
    }
}

/// A dimensionless fraction in `[0, 1]`: transmissivities, losses,
/// efficiencies.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fraction(f64);

impl Fraction {
    pub fn new(value: f64) -> Result<Self, Violation> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Violation::new(
                "fraction",
                value,
                "must be finite and lie in [0, 1]",
            ));
        }
        Ok(Fraction(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub(crate) fn wrap(value: f64) -> Self {
        debug_assert!(
            value.is_finite() && (0.0..=1.0).contains(&value),
            "bad fraction {value}"
        );
        Fraction(value)
    }
}

/// Decibels of a variance/power ratio: `10 log10(r)`.
pub fn db_from_linear(r: f64) -> Result<f64, ModelError> {
    if !r.is_finite() || r <= 0.0 {
        return Err(ModelError::Domain {
            name: "r",
            value: r,
            requirement: "must be finite and positive",
        });
    }
    Ok(10.0 * r.log10())
}

/// Inverse of [`db_from_linear`]: `10^(d/10)`.
pub fn linear_from_db(d: f64) -> Result<f64, ModelError> {
    if !d.is_finite() {
        return Err(ModelError::Domain {
            name: "d",
            value: d,
            requirement: "must be finite",
        });
    }
    Ok(10f64.powf(d / 10.0))
}
