//! Models of cavity-enhanced frequency doubling and sub-threshold optical
//! parametric oscillation, with parameter estimation from measured series.
//!
//! The crate covers the full chain of a squeezed-vacuum source built around
//! two bow-tie enhancement cavities:
//!
//! - [`shg`]: the implicit doubling-efficiency equation of the second-harmonic
//!   generation cavity, solved by bracketed bisection,
//! - [`opo`]: threshold, parametric gain, pump-induced intracavity losses and
//!   escape efficiency of the parametric oscillator below threshold,
//! - [`squeeze`]: detected squeezing/anti-squeezing variances including the
//!   homodyne detection efficiency budget and cavity sideband filtering,
//! - [`estimate`]: least-squares recovery of the model constants from
//!   measured data series.
//!
//! All powers are SI watts and all transmissivities/losses are dimensionless
//! fractions in `[0, 1]`; decibel values follow the power convention
//! `10 log10(ratio)`.

pub mod error;
pub mod estimate;
mod numeric;
pub mod opo;
pub mod params;
pub mod shg;
pub mod squeeze;
pub mod units;

pub use error::{InvalidParams, ModelError, Violation};
pub use params::{DetectionChain, OpoParams, ShgParams};
pub use units::{db_from_linear, linear_from_db, Fraction, Power, SPEED_OF_LIGHT};
