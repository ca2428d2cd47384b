//! Validated parameter records for the doubling cavity, the parametric
//! oscillator, and the homodyne detection chain.
//!
//! Records are immutable after construction; every constructor checks all
//! invariants and reports the complete list of violations at once.

use crate::error::{InvalidParams, Violation};
use crate::units::Fraction;

fn check_open_unit(field: &'static str, v: f64, out: &mut Vec<Violation>) {
    if !v.is_finite() || v <= 0.0 || v >= 1.0 {
        out.push(Violation::new(field, v, "must lie strictly inside (0, 1)"));
    }
}

fn check_loss(field: &'static str, v: f64, out: &mut Vec<Violation>) {
    if !v.is_finite() || !(0.0..1.0).contains(&v) {
        out.push(Violation::new(field, v, "must lie in [0, 1)"));
    }
}

fn check_positive(field: &'static str, v: f64, out: &mut Vec<Violation>) {
    if !v.is_finite() || v <= 0.0 {
        out.push(Violation::new(field, v, "must be finite and positive"));
    }
}

fn check_non_negative(field: &'static str, v: f64, out: &mut Vec<Violation>) {
    if !v.is_finite() || v < 0.0 {
        out.push(Violation::new(field, v, "must be finite and non-negative"));
    }
}

fn check_half_open_unit(field: &'static str, v: f64, out: &mut Vec<Violation>) {
    if !v.is_finite() || v <= 0.0 || v > 1.0 {
        out.push(Violation::new(field, v, "must lie in (0, 1]"));
    }
}

/// Doubling-cavity parameters.
///
/// `t1` is the input-coupler transmissivity, `l1` the intracavity linear loss
/// per round trip, `e_nl` the single-pass nonlinear conversion coefficient in
/// 1/W, and `gamma_abs_ratio` the harmonic-absorption coefficient expressed
/// relative to `e_nl` (`Gamma_abs = gamma_abs_ratio * e_nl`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShgParams {
    t1: Fraction,
    l1: Fraction,
    e_nl: f64,
    gamma_abs_ratio: f64,
}

impl ShgParams {
    pub fn new(t1: f64, l1: f64, e_nl: f64, gamma_abs_ratio: f64) -> Result<Self, InvalidParams> {
        let mut v = Vec::new();
        check_open_unit("t1", t1, &mut v);
        check_loss("l1", l1, &mut v);
        check_positive("e_nl", e_nl, &mut v);
        check_non_negative("gamma_abs_ratio", gamma_abs_ratio, &mut v);
        if !v.is_empty() {
            return Err(InvalidParams(v));
        }
        Ok(Self {
            t1: Fraction::wrap(t1),
            l1: Fraction::wrap(l1),
            e_nl,
            gamma_abs_ratio,
        })
    }

    pub fn t1(&self) -> Fraction {
        self.t1
    }

    pub fn l1(&self) -> Fraction {
        self.l1
    }

    /// Single-pass nonlinear conversion coefficient, 1/W.
    pub fn e_nl(&self) -> f64 {
        self.e_nl
    }

    pub fn gamma_abs_ratio(&self) -> f64 {
        self.gamma_abs_ratio
    }

    /// Total second-order loss coefficient `Gamma = e_nl (1 + gamma_abs_ratio)`.
    pub fn gamma(&self) -> f64 {
        self.e_nl * (1.0 + self.gamma_abs_ratio)
    }
}

/// Parametric-oscillator parameters.
///
/// `loss_intercept`/`loss_slope` describe the pump-induced intracavity loss
/// law `L2(P) = loss_intercept + loss_slope * P` (P in watts), distinct from
/// the pump-free baseline `l2_base` measured via the cavity finesse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpoParams {
    t2: Fraction,
    l2_base: Fraction,
    e_nl_opo: f64,
    alpha: Fraction,
    cavity_length: f64,
    loss_intercept: f64,
    loss_slope: f64,
}

impl OpoParams {
    pub fn new(
        t2: f64,
        l2_base: f64,
        e_nl_opo: f64,
        alpha: f64,
        cavity_length: f64,
        loss_intercept: f64,
        loss_slope: f64,
    ) -> Result<Self, InvalidParams> {
        let mut v = Vec::new();
        check_open_unit("t2", t2, &mut v);
        check_loss("l2_base", l2_base, &mut v);
        check_positive("e_nl_opo", e_nl_opo, &mut v);
        check_half_open_unit("alpha", alpha, &mut v);
        check_positive("cavity_length", cavity_length, &mut v);
        check_non_negative("loss_intercept", loss_intercept, &mut v);
        if loss_intercept.is_finite() && loss_intercept >= 1.0 {
            v.push(Violation::new(
                "loss_intercept",
                loss_intercept,
                "must lie in [0, 1)",
            ));
        }
        check_non_negative("loss_slope", loss_slope, &mut v);
        if !v.is_empty() {
            return Err(InvalidParams(v));
        }
        Ok(Self {
            t2: Fraction::wrap(t2),
            l2_base: Fraction::wrap(l2_base),
            e_nl_opo,
            alpha: Fraction::wrap(alpha),
            cavity_length,
            loss_intercept,
            loss_slope,
        })
    }

    /// Output-coupler transmissivity.
    pub fn t2(&self) -> Fraction {
        self.t2
    }

    /// Intracavity loss per round trip without pump light.
    pub fn l2_base(&self) -> Fraction {
        self.l2_base
    }

    /// Single-pass nonlinear conversion coefficient of the OPO crystal, 1/W.
    pub fn e_nl_opo(&self) -> f64 {
        self.e_nl_opo
    }

    /// Total pump mode-matching efficiency (spatial overlap times input-optic
    /// transmission).
    pub fn alpha(&self) -> Fraction {
        self.alpha
    }

    /// Total round-trip optical length, meters.
    pub fn cavity_length(&self) -> f64 {
        self.cavity_length
    }

    pub fn loss_intercept(&self) -> f64 {
        self.loss_intercept
    }

    /// Pump-induced loss slope, 1/W.
    pub fn loss_slope(&self) -> f64 {
        self.loss_slope
    }
}

/// Homodyne detection chain: photodiode quantum efficiency, interference
/// visibility, and propagation efficiency. All in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain {
    quantum_efficiency: Fraction,
    visibility: Fraction,
    propagation: Fraction,
}

impl DetectionChain {
    pub fn new(
        quantum_efficiency: f64,
        visibility: f64,
        propagation: f64,
    ) -> Result<Self, InvalidParams> {
        let mut v = Vec::new();
        check_half_open_unit("quantum_efficiency", quantum_efficiency, &mut v);
        check_half_open_unit("visibility", visibility, &mut v);
        check_half_open_unit("propagation", propagation, &mut v);
        if !v.is_empty() {
            return Err(InvalidParams(v));
        }
        Ok(Self {
            quantum_efficiency: Fraction::wrap(quantum_efficiency),
            visibility: Fraction::wrap(visibility),
            propagation: Fraction::wrap(propagation),
        })
    }

    pub fn quantum_efficiency(&self) -> Fraction {
        self.quantum_efficiency
    }

    pub fn visibility(&self) -> Fraction {
        self.visibility
    }

    pub fn propagation(&self) -> Fraction {
        self.propagation
    }
}
