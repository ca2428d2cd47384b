//! Sub-threshold optical parametric oscillator: threshold, parametric gain,
//! pump-induced intracavity losses, escape efficiency, and cavity decay.
//!
//! The model chain is
//!
//! ```text
//! P_th  = (T2 + L2)^2 / (4 E*_nl) / alpha
//! G     = 1 / (1 - sqrt(P / P_th))^2            (defined below threshold)
//! x     = sqrt(P / P_th) = 1 - 1 / sqrt(G)
//! L2(P) = loss_intercept + loss_slope * P        (UV-induced grey tracking)
//! rho   = T2 / (T2 + L2)
//! gamma = c (T2 + L2) / l,   Omega = 2 pi f / gamma
//! ```
//!
//! Everything is steady-state; above-threshold inputs are hard errors since
//! the gain expression diverges there.

use crate::error::ModelError;
use crate::numeric::linspace;
use crate::params::OpoParams;
use crate::units::{Fraction, Power, SPEED_OF_LIGHT};

/// Whether a sweep uses the pump-free baseline loss or folds in the
/// pump-induced loss law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Baseline intracavity loss, fixed threshold.
    Ideal,
    /// Pump-dependent loss raises the threshold and degrades escape.
    Corrected,
}

/// One point of the parametric-gain curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPoint {
    /// Pump power at the OPO input.
    pub pump_power: Power,
    /// Parametric gain `G >= 1`.
    pub gain: f64,
    /// Pump parameter `x = sqrt(P / P_th)` in `[0, 1)`.
    pub pump_parameter: f64,
    /// The threshold this point was computed against.
    pub threshold_used: Power,
}

/// Cavity decay rate and the dimensionless sideband detuning at one analysis
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityRates {
    /// Field decay rate `gamma = c (T2 + L2) / l`, 1/s.
    pub decay_rate: f64,
    /// Detuning parameter `Omega = 2 pi f / gamma`.
    pub detuning: f64,
    /// Analysis frequency `f`, Hz.
    pub analysis_frequency: f64,
}

/// Oscillation threshold `(T2 + L2)^2 / (4 E*_nl) / alpha`.
///
/// `l2_override` substitutes the intracavity loss (used for the induced-loss
/// corrections); otherwise the pump-free baseline applies.
pub fn opo_threshold(params: &OpoParams, l2_override: Option<Fraction>) -> Power {
    let l2 = l2_override.unwrap_or_else(|| params.l2_base()).value();
    let t2 = params.t2().value();
    let pth = (t2 + l2).powi(2) / (4.0 * params.e_nl_opo()) / params.alpha().value();
    Power::wrap(pth)
}

/// Parametric gain `G = 1 / (1 - sqrt(P / P_th))^2` below threshold.
pub fn parametric_gain(pump_power: Power, threshold: Power) -> Result<GainPoint, ModelError> {
    if threshold.watts() <= 0.0 {
        return Err(ModelError::Domain {
            name: "threshold",
            value: threshold.watts(),
            requirement: "must be positive",
        });
    }
    if pump_power >= threshold {
        return Err(ModelError::AboveThreshold {
            pump_w: pump_power.watts(),
            threshold_w: threshold.watts(),
        });
    }
    let x = (pump_power.watts() / threshold.watts()).sqrt();
    Ok(GainPoint {
        pump_power,
        gain: 1.0 / ((1.0 - x) * (1.0 - x)),
        pump_parameter: x,
        threshold_used: threshold,
    })
}

/// Pump parameter from a measured gain, `x = 1 - 1 / sqrt(G)`.
pub fn pump_parameter_from_gain(gain: f64) -> Result<f64, ModelError> {
    if !gain.is_finite() || gain < 1.0 {
        return Err(ModelError::Domain {
            name: "gain",
            value: gain,
            requirement: "must be finite and at least 1",
        });
    }
    Ok(1.0 - 1.0 / gain.sqrt())
}

/// Pump-induced intracavity loss `loss_intercept + loss_slope * P`.
pub fn induced_loss(params: &OpoParams, pump_power: Power) -> Result<Fraction, ModelError> {
    let loss = params.loss_intercept() + params.loss_slope() * pump_power.watts();
    if loss >= 1.0 {
        return Err(ModelError::Domain {
            name: "induced_loss",
            value: loss,
            requirement: "must stay below 1 (unphysical loss)",
        });
    }
    Ok(Fraction::wrap(loss))
}

/// Total round-trip loss of the high-reflectivity-closed cavity from its
/// measured finesse, `2 pi / F`.
pub fn loss_from_finesse(finesse: f64) -> Result<Fraction, ModelError> {
    if !finesse.is_finite() || finesse <= std::f64::consts::TAU {
        return Err(ModelError::Domain {
            name: "finesse",
            value: finesse,
            requirement: "must exceed 2 pi",
        });
    }
    Ok(Fraction::wrap(std::f64::consts::TAU / finesse))
}

/// Escape efficiency `rho = T2 / (T2 + L2)`.
pub fn escape_efficiency(t2: Fraction, l2: Fraction) -> Result<Fraction, ModelError> {
    if t2.value() == 0.0 {
        return Err(ModelError::Domain {
            name: "t2",
            value: 0.0,
            requirement: "must be positive",
        });
    }
    Ok(Fraction::wrap(t2.value() / (t2.value() + l2.value())))
}

/// Decay rate and sideband detuning for the given loss state.
pub fn cavity_rates(
    t2: Fraction,
    l2: Fraction,
    cavity_length: f64,
    analysis_frequency: f64,
) -> Result<CavityRates, ModelError> {
    if !cavity_length.is_finite() || cavity_length <= 0.0 {
        return Err(ModelError::Domain {
            name: "cavity_length",
            value: cavity_length,
            requirement: "must be finite and positive",
        });
    }
    if !analysis_frequency.is_finite() || analysis_frequency < 0.0 {
        return Err(ModelError::Domain {
            name: "analysis_frequency",
            value: analysis_frequency,
            requirement: "must be finite and non-negative",
        });
    }
    let decay_rate = SPEED_OF_LIGHT * (t2.value() + l2.value()) / cavity_length;
    Ok(CavityRates {
        decay_rate,
        detuning: std::f64::consts::TAU * analysis_frequency / decay_rate,
        analysis_frequency,
    })
}

/// Threshold recomputed with the pump-induced loss at `pump_power`.
pub fn effective_threshold(params: &OpoParams, pump_power: Power) -> Result<Power, ModelError> {
    let l2 = induced_loss(params, pump_power)?;
    Ok(opo_threshold(params, Some(l2)))
}

/// Parametric gain against the loss-raised threshold at the same pump power.
pub fn gain_with_induced_loss(
    params: &OpoParams,
    pump_power: Power,
) -> Result<GainPoint, ModelError> {
    let threshold = effective_threshold(params, pump_power)?;
    parametric_gain(pump_power, threshold)
}

/// Gain curve on a uniform pump grid, endpoints included. Any above-threshold
/// grid point aborts the sweep with that power identified.
pub fn gain_sweep(
    params: &OpoParams,
    p_min: Power,
    p_max: Power,
    steps: usize,
    mode: SweepMode,
) -> Result<Vec<GainPoint>, ModelError> {
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
    let base_threshold = opo_threshold(params, None);
    linspace(p_min.watts(), p_max.watts(), steps)
        .into_iter()
        .map(|p| {
            let pump = Power::wrap(p);
            let point = match mode {
                SweepMode::Ideal => parametric_gain(pump, base_threshold),
                SweepMode::Corrected => gain_with_induced_loss(params, pump),
            };
            point.map_err(|e| e.at_grid_point(p))
        })
        .collect()
}
