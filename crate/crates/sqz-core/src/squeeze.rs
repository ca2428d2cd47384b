//! Detected squeezing and anti-squeezing of the sub-threshold OPO output.
//!
//! The variances relative to shot noise follow the single-pole cavity model
//!
//! ```text
//! R_-+ = 1 -+ eta_tot 4x / ((1 +- x)^2 + 4 Omega^2)
//! ```
//!
//! where `eta_tot = eta* eps^2 zeta rho` collects the photodiode quantum
//! efficiency, homodyne visibility (squared), propagation efficiency, and
//! cavity escape efficiency. `R+ R- = 1 + eta_tot (1 - eta_tot) A S` holds
//! identically, so the state is pure exactly when `eta_tot` is 0 or 1.

use crate::error::ModelError;
use crate::numeric::{linspace, logspace};
use crate::opo::{
    cavity_rates, escape_efficiency, gain_with_induced_loss, induced_loss, opo_threshold,
    parametric_gain, pump_parameter_from_gain, SweepMode,
};
use crate::params::{DetectionChain, OpoParams};
use crate::units::{db_from_linear, Fraction, Power};

/// Squeezed and anti-squeezed quadrature variances relative to shot noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureNoise {
    /// Squeezed variance, `(0, 1]`.
    pub r_minus: f64,
    /// Anti-squeezed variance, `>= 1`.
    pub r_plus: f64,
    pub r_minus_db: f64,
    pub r_plus_db: f64,
    /// Pump parameter `x` the variances were evaluated at.
    pub pump_parameter: f64,
    /// Detuning parameter `Omega`.
    pub detuning: f64,
    /// Total detection efficiency `eta_tot`.
    pub total_efficiency: Fraction,
}

/// Multiplicative detection-efficiency budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyBudget {
    pub photodiode: Fraction,
    pub visibility_squared: Fraction,
    pub propagation: Fraction,
    pub escape: Fraction,
    /// Product of the four factors.
    pub total: Fraction,
}

/// Folds the detection chain and the cavity escape efficiency into the total
/// efficiency `eta* eps^2 zeta rho`.
pub fn total_detection_efficiency(
    chain: &DetectionChain,
    escape: Fraction,
) -> Result<EfficiencyBudget, ModelError> {
    if escape.value() == 0.0 {
        return Err(ModelError::Domain {
            name: "escape",
            value: 0.0,
            requirement: "must be positive",
        });
    }
    let vis = chain.visibility().value();
    let visibility_squared = vis * vis;
    let total = chain.quantum_efficiency().value()
        * visibility_squared
        * chain.propagation().value()
        * escape.value();
    Ok(EfficiencyBudget {
        photodiode: chain.quantum_efficiency(),
        visibility_squared: Fraction::wrap(visibility_squared),
        propagation: chain.propagation(),
        escape,
        total: Fraction::wrap(total),
    })
}

/// Quadrature variances at pump parameter `x`, detuning `Omega`, and total
/// detection efficiency `eta_tot`.
pub fn noise_variances(
    x: f64,
    detuning: f64,
    total_efficiency: Fraction,
) -> Result<QuadratureNoise, ModelError> {
    if !x.is_finite() || !(0.0..1.0).contains(&x) {
        return Err(ModelError::Domain {
            name: "x",
            value: x,
            requirement: "must lie in [0, 1) (below threshold)",
        });
    }
    if !detuning.is_finite() || detuning < 0.0 {
        return Err(ModelError::Domain {
            name: "detuning",
            value: detuning,
            requirement: "must be finite and non-negative",
        });
    }
    let eta = total_efficiency.value();
    let four_omega_sq = 4.0 * detuning * detuning;
    let d_minus = (1.0 + x) * (1.0 + x) + four_omega_sq;
    let drop = eta * 4.0 * x / d_minus;
    // Deep squeezing makes 1 - drop cancel badly; the equivalent ratio of
    // non-negative terms keeps full relative precision there.
    let r_minus = if drop <= 0.5 {
        1.0 - drop
    } else {
        ((1.0 - x) * (1.0 - x) + 4.0 * x * (1.0 - eta) + four_omega_sq) / d_minus
    };
    let r_plus = 1.0 + eta * 4.0 * x / ((1.0 - x) * (1.0 - x) + four_omega_sq);
    Ok(QuadratureNoise {
        r_minus,
        r_plus,
        r_minus_db: db_from_linear(r_minus).expect("r_minus is positive for x < 1"),
        r_plus_db: db_from_linear(r_plus).expect("r_plus is at least 1"),
        pump_parameter: x,
        detuning,
        total_efficiency,
    })
}

/// Prediction from an actually measured gain: folds the pump-induced loss at
/// this pump power into escape efficiency and detuning, takes `x` from the
/// gain, and evaluates the variances.
pub fn predict_from_measured_gain(
    opo: &OpoParams,
    chain: &DetectionChain,
    measured_gain: f64,
    pump_power: Power,
    analysis_frequency: f64,
) -> Result<QuadratureNoise, ModelError> {
    let x = pump_parameter_from_gain(measured_gain)?;
    let l2 = induced_loss(opo, pump_power)?;
    let rho = escape_efficiency(opo.t2(), l2)?;
    let rates = cavity_rates(opo.t2(), l2, opo.cavity_length(), analysis_frequency)?;
    let budget = total_detection_efficiency(chain, rho)?;
    noise_variances(x, rates.detuning, budget.total)
}

/// Squeezing levels across a pump-power grid at a fixed analysis frequency.
///
/// `Ideal` keeps the baseline loss and threshold; `Corrected` recomputes the
/// threshold, escape efficiency, and detuning from the induced-loss law at
/// every grid power.
pub fn squeeze_power_sweep(
    opo: &OpoParams,
    chain: &DetectionChain,
    p_min: Power,
    p_max: Power,
    steps: usize,
    analysis_frequency: f64,
    mode: SweepMode,
) -> Result<Vec<(Power, QuadratureNoise)>, ModelError> {
    if steps < 2 {
        return Err(ModelError::Domain {
            name: "steps",
            value: steps as f64,
            requirement: "must be at least 2",
        });
    }
    if p_min >= p_max {
        return Err(ModelError::Domain {
            name: "p_min",
            value: p_min.watts(),
            requirement: "must be strictly below p_max",
        });
    }

    let base_threshold = opo_threshold(opo, None);
    let base_budget = {
        let rho = escape_efficiency(opo.t2(), opo.l2_base())?;
        total_detection_efficiency(chain, rho)?
    };
    let base_rates = cavity_rates(
        opo.t2(),
        opo.l2_base(),
        opo.cavity_length(),
        analysis_frequency,
    )?;

    linspace(p_min.watts(), p_max.watts(), steps)
        .into_iter()
        .map(|p| {
            let pump = Power::wrap(p);
            let noise = match mode {
                SweepMode::Ideal => {
                    let point = parametric_gain(pump, base_threshold)
                        .map_err(|e| e.at_grid_point(p))?;
                    noise_variances(
                        point.pump_parameter,
                        base_rates.detuning,
                        base_budget.total,
                    )?
                }
                SweepMode::Corrected => {
                    let point =
                        gain_with_induced_loss(opo, pump).map_err(|e| e.at_grid_point(p))?;
                    let l2 = induced_loss(opo, pump)?;
                    let rho = escape_efficiency(opo.t2(), l2)?;
                    let rates = cavity_rates(
                        opo.t2(),
                        l2,
                        opo.cavity_length(),
                        analysis_frequency,
                    )?;
                    let budget = total_detection_efficiency(chain, rho)?;
                    noise_variances(point.pump_parameter, rates.detuning, budget.total)?
                }
            };
            Ok((pump, noise))
        })
        .collect()
}

/// Noise spectrum across analysis frequencies at a fixed pump power.
///
/// The pump parameter and the loss state are fixed once per the mode; only
/// the detuning varies along the grid.
#[allow(clippy::too_many_arguments)]
pub fn frequency_spectrum(
    opo: &OpoParams,
    chain: &DetectionChain,
    pump_power: Power,
    f_min: f64,
    f_max: f64,
    steps: usize,
    log_spacing: bool,
    mode: SweepMode,
) -> Result<Vec<(f64, QuadratureNoise)>, ModelError> {
    if steps < 2 {
        return Err(ModelError::Domain {
            name: "steps",
            value: steps as f64,
            requirement: "must be at least 2",
        });
    }
    if !f_min.is_finite() || f_min < 0.0 || f_min >= f_max {
        return Err(ModelError::Domain {
            name: "f_min",
            value: f_min,
            requirement: "must be non-negative and strictly below f_max",
        });
    }
    if log_spacing && f_min == 0.0 {
        return Err(ModelError::Domain {
            name: "f_min",
            value: f_min,
            requirement: "must be positive for logarithmic spacing",
        });
    }

    let (x, l2) = match mode {
        SweepMode::Ideal => {
            let point = parametric_gain(pump_power, opo_threshold(opo, None))?;
            (point.pump_parameter, opo.l2_base())
        }
        SweepMode::Corrected => {
            let point = gain_with_induced_loss(opo, pump_power)?;
            (point.pump_parameter, induced_loss(opo, pump_power)?)
        }
    };
    let rho = escape_efficiency(opo.t2(), l2)?;
    let budget = total_detection_efficiency(chain, rho)?;

    let grid = if log_spacing {
        logspace(f_min, f_max, steps)
    } else {
        linspace(f_min, f_max, steps)
    };
    grid.into_iter()
        .map(|f| {
            let rates = cavity_rates(opo.t2(), l2, opo.cavity_length(), f)
                .map_err(|e| e.at_grid_point(f))?;
            let noise = noise_variances(x, rates.detuning, budget.total)?;
            Ok((f, noise))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn opo() -> OpoParams {
        OpoParams::new(0.115, 0.004, 0.0185, 0.93, 0.6, 0.00445, 0.06767).unwrap()
    }

    fn chain() -> DetectionChain {
        DetectionChain::new(0.94, 0.997, 0.99).unwrap()
    }

    #[test]
    fn budget_matches_frozen_products() {
        let ideal = total_detection_efficiency(
            &chain(),
            Fraction::new(0.9663865546218487).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(ideal.total.value(), 0.8939315056386554, max_relative = 1e-12);

        let corrected = total_detection_efficiency(
            &chain(),
            Fraction::new(0.9190127597329844).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(corrected.total.value(), 0.850109571661738, max_relative = 1e-12);

        let perfect = DetectionChain::new(1.0, 1.0, 1.0).unwrap();
        let unity = total_detection_efficiency(&perfect, Fraction::new(1.0).unwrap()).unwrap();
        assert_eq!(unity.total.value(), 1.0);

        assert!(
            total_detection_efficiency(&chain(), Fraction::new(0.0).unwrap()).is_err()
        );
    }

    #[test]
    fn budget_total_is_the_product_of_factors() {
        let b = total_detection_efficiency(&chain(), Fraction::new(0.8).unwrap()).unwrap();
        let product = b.photodiode.value()
            * b.visibility_squared.value()
            * b.propagation.value()
            * b.escape.value();
        assert!((b.total.value() - product).abs() <= 1e-12 * product);
    }

    #[test]
    fn shot_noise_without_pump() {
        let n = noise_variances(0.0, 0.2113, Fraction::new(0.8939).unwrap()).unwrap();
        assert_eq!(n.r_minus, 1.0);
        assert_eq!(n.r_plus, 1.0);
        assert_eq!(n.r_minus_db, 0.0);
        assert_eq!(n.r_plus_db, 0.0);
    }

    #[test]
    fn reference_operating_point_variances() {
        // Frozen from direct evaluation at x = 0.6386, Omega = 0.2113,
        // eta_tot = 0.8939.
        let n = noise_variances(0.6386, 0.2113, Fraction::new(0.8939).unwrap()).unwrap();
        assert_relative_eq!(n.r_minus, 0.20261992391173855, max_relative = 1e-12);
        assert_relative_eq!(n.r_plus, 8.384776335579037, max_relative = 1e-12);
        assert_relative_eq!(n.r_minus_db, -6.933178520680946, max_relative = 1e-12);
        assert_relative_eq!(n.r_plus_db, 9.234914822647797, max_relative = 1e-12);
        assert!((n.r_minus_db - -6.93).abs() < 0.01);
        assert!((n.r_plus_db - 9.23).abs() < 0.01);
    }

    #[test]
    fn corrected_operating_point_variances() {
        let n = noise_variances(0.5615, 0.2010, Fraction::new(0.8501).unwrap()).unwrap();
        assert_relative_eq!(n.r_minus_db, -5.757518908179296, max_relative = 1e-12);
        assert_relative_eq!(n.r_plus_db, 8.058613277334205, max_relative = 1e-12);
    }

    #[test]
    fn noise_rejects_x_at_threshold() {
        let eta = Fraction::new(0.9).unwrap();
        assert!(noise_variances(1.0, 0.0, eta).is_err());
        assert!(noise_variances(1.5, 0.0, eta).is_err());
        assert!(noise_variances(-0.1, 0.0, eta).is_err());
        assert!(noise_variances(0.5, -0.1, eta).is_err());
    }

    #[test]
    fn prediction_from_measured_gain_matches_frozen_values() {
        let n = predict_from_measured_gain(&opo(), &chain(), 5.2, Power::new(0.084).unwrap(), 2e6)
            .unwrap();
        assert_relative_eq!(n.r_minus, 0.2656096229029169, max_relative = 1e-12);
        assert_relative_eq!(n.r_plus, 6.395062515386647, max_relative = 1e-12);
        assert_relative_eq!(n.r_minus_db, -5.7575619474855655, max_relative = 1e-12);
        assert_relative_eq!(n.r_plus_db, 8.058447943118972, max_relative = 1e-12);
    }

    #[test]
    fn prediction_equals_manual_composition() {
        let opo = opo();
        let chain = chain();
        let pump = Power::new(0.084).unwrap();
        let via_op = predict_from_measured_gain(&opo, &chain, 5.2, pump, 2e6).unwrap();

        let x = pump_parameter_from_gain(5.2).unwrap();
        let l2 = induced_loss(&opo, pump).unwrap();
        let rho = escape_efficiency(opo.t2(), l2).unwrap();
        let rates = cavity_rates(opo.t2(), l2, opo.cavity_length(), 2e6).unwrap();
        let budget = total_detection_efficiency(&chain, rho).unwrap();
        let manual = noise_variances(x, rates.detuning, budget.total).unwrap();

        assert_eq!(via_op, manual);
    }

    #[test]
    fn unity_gain_gives_shot_noise() {
        let n = predict_from_measured_gain(&opo(), &chain(), 1.0, Power::new(0.05).unwrap(), 2e6)
            .unwrap();
        assert_eq!(n.r_minus_db, 0.0);
        assert_eq!(n.r_plus_db, 0.0);
    }

    #[test]
    fn fixed_loss_variant_squeezes_more() {
        let fixed = OpoParams::new(0.115, 0.004, 0.0185, 0.93, 0.6, 0.004, 0.0).unwrap();
        let pump = Power::new(0.084).unwrap();
        let without = predict_from_measured_gain(&fixed, &chain(), 5.2, pump, 2e6).unwrap();
        let with = predict_from_measured_gain(&opo(), &chain(), 5.2, pump, 2e6).unwrap();
        assert!(without.r_minus < with.r_minus);
    }

    #[test]
    fn sweep_row_matches_pointwise_composition() {
        let opo = opo();
        let chain = chain();
        let rows = squeeze_power_sweep(
            &opo,
            &chain,
            Power::new(0.084).unwrap(),
            Power::new(0.15).unwrap(),
            5,
            2e6,
            SweepMode::Ideal,
        )
        .unwrap();

        let point = parametric_gain(Power::new(0.084).unwrap(), opo_threshold(&opo, None)).unwrap();
        let rho = escape_efficiency(opo.t2(), opo.l2_base()).unwrap();
        let rates = cavity_rates(opo.t2(), opo.l2_base(), opo.cavity_length(), 2e6).unwrap();
        let budget = total_detection_efficiency(&chain, rho).unwrap();
        let manual = noise_variances(point.pump_parameter, rates.detuning, budget.total).unwrap();

        assert_eq!(rows[0].0.watts(), 0.084);
        assert_eq!(rows[0].1, manual);
        // The frozen reference levels at this pump power.
        assert_relative_eq!(rows[0].1.r_minus_db, -6.935661641995625, max_relative = 1e-12);
        assert_relative_eq!(rows[0].1.r_plus_db, 9.238948041207944, max_relative = 1e-12);
    }

    #[test]
    fn ideal_squeezing_deepens_with_pump() {
        let rows = squeeze_power_sweep(
            &opo(),
            &chain(),
            Power::ZERO,
            Power::new(0.15).unwrap(),
            31,
            2e6,
            SweepMode::Ideal,
        )
        .unwrap();
        for w in rows.windows(2) {
            assert!(w[1].1.r_minus_db.abs() >= w[0].1.r_minus_db.abs());
        }
    }

    #[test]
    fn corrected_sweep_never_beats_ideal() {
        let ideal = squeeze_power_sweep(
            &opo(),
            &chain(),
            Power::ZERO,
            Power::new(0.15).unwrap(),
            31,
            2e6,
            SweepMode::Ideal,
        )
        .unwrap();
        let corrected = squeeze_power_sweep(
            &opo(),
            &chain(),
            Power::ZERO,
            Power::new(0.15).unwrap(),
            31,
            2e6,
            SweepMode::Corrected,
        )
        .unwrap();
        for (c, i) in corrected.iter().zip(&ideal) {
            assert!(c.1.r_minus_db.abs() <= i.1.r_minus_db.abs() + 1e-12);
        }
    }

    #[test]
    fn sweep_above_threshold_names_power() {
        let err = squeeze_power_sweep(
            &opo(),
            &chain(),
            Power::ZERO,
            Power::new(0.25).unwrap(),
            6,
            2e6,
            SweepMode::Ideal,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::AtGridPoint { value, .. } if value == 0.25));
    }

    #[test]
    fn spectrum_approaches_shot_noise_at_high_frequency() {
        let rows = frequency_spectrum(
            &opo(),
            &chain(),
            Power::new(0.084).unwrap(),
            1e12,
            2e12,
            2,
            false,
            SweepMode::Ideal,
        )
        .unwrap();
        for (_, n) in rows {
            assert!((n.r_minus - 1.0).abs() < 1e-6);
            assert!((n.r_plus - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn spectrum_row_matches_pointwise_result() {
        let opo = opo();
        let chain = chain();
        let rows = frequency_spectrum(
            &opo,
            &chain,
            Power::new(0.084).unwrap(),
            2e6,
            1e7,
            5,
            false,
            SweepMode::Ideal,
        )
        .unwrap();

        let point = parametric_gain(Power::new(0.084).unwrap(), opo_threshold(&opo, None)).unwrap();
        let rho = escape_efficiency(opo.t2(), opo.l2_base()).unwrap();
        let budget = total_detection_efficiency(&chain, rho).unwrap();
        let rates = cavity_rates(opo.t2(), opo.l2_base(), opo.cavity_length(), 2e6).unwrap();
        let manual = noise_variances(point.pump_parameter, rates.detuning, budget.total).unwrap();

        assert_eq!(rows[0].0, 2e6);
        assert_eq!(rows[0].1, manual);
    }

    #[test]
    fn squeezing_is_deepest_at_the_lowest_frequency() {
        let rows = frequency_spectrum(
            &opo(),
            &chain(),
            Power::new(0.042).unwrap(),
            2e5,
            1e7,
            40,
            true,
            SweepMode::Corrected,
        )
        .unwrap();
        let first = rows[0].1.r_minus_db.abs();
        for (_, n) in &rows {
            assert!(n.r_minus_db.abs() <= first + 1e-12);
        }
        // Monotone in Omega along the whole grid.
        for w in rows.windows(2) {
            assert!(w[1].1.r_minus >= w[0].1.r_minus);
        }
    }

    #[test]
    fn spectrum_rejects_log_grid_from_zero() {
        let err = frequency_spectrum(
            &opo(),
            &chain(),
            Power::new(0.042).unwrap(),
            0.0,
            1e7,
            10,
            true,
            SweepMode::Ideal,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::Domain { name: "f_min", .. }));
    }

    proptest! {
        #[test]
        fn uncertainty_product_identity(
            x in 0.0f64..0.999,
            omega in 0.0f64..10.0,
            eta in 0.0f64..1.0,
        ) {
            let n = noise_variances(x, omega, Fraction::new(eta).unwrap()).unwrap();
            let amp = 4.0 * x / ((1.0 - x) * (1.0 - x) + 4.0 * omega * omega);
            let sqz = 4.0 * x / ((1.0 + x) * (1.0 + x) + 4.0 * omega * omega);
            let expected = 1.0 + eta * (1.0 - eta) * amp * sqz;
            let product = n.r_plus * n.r_minus;
            prop_assert!((product - expected).abs() <= 1e-10 * expected.abs());
            prop_assert!(product >= 1.0 - 1e-12);
            prop_assert!(n.r_minus <= 1.0 && n.r_plus >= 1.0);
        }

        #[test]
        fn pure_state_limit(x in 0.0f64..0.999) {
            let n = noise_variances(x, 0.0, Fraction::new(1.0).unwrap()).unwrap();
            let expected = (1.0 - x) * (1.0 - x) / ((1.0 + x) * (1.0 + x));
            // Absolute floor covers the cancellation in 1 - 4x/(1+x)^2 as
            // x approaches 1.
            prop_assert!((n.r_minus - expected).abs() <= 1e-15 + 1e-12 * expected);
            prop_assert!((n.r_plus - 1.0 / expected).abs() <= 1e-10 / expected);
        }

        #[test]
        fn vacuum_limit(x in 0.0f64..0.999, omega in 0.0f64..10.0) {
            let n = noise_variances(x, omega, Fraction::new(0.0).unwrap()).unwrap();
            prop_assert_eq!(n.r_minus, 1.0);
            prop_assert_eq!(n.r_plus, 1.0);
        }

        #[test]
        fn monotone_in_efficiency_and_detuning(x in 0.01f64..0.99) {
            let lo = noise_variances(x, 0.2, Fraction::new(0.5).unwrap()).unwrap();
            let hi = noise_variances(x, 0.2, Fraction::new(0.9).unwrap()).unwrap();
            prop_assert!(hi.r_minus < lo.r_minus);
            prop_assert!(hi.r_plus > lo.r_plus);

            let near = noise_variances(x, 0.1, Fraction::new(0.9).unwrap()).unwrap();
            let far = noise_variances(x, 1.0, Fraction::new(0.9).unwrap()).unwrap();
            prop_assert!(far.r_minus > near.r_minus);
            prop_assert!(far.r_plus < near.r_plus);
        }
    }
}
