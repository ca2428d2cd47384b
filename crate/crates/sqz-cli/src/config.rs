//! Strict JSON configuration parsing.
//!
//! The schema mirrors the parameter records field for field, in
//! lower_snake_case. Unknown keys are rejected; every constraint violation is
//! reported at once with its key path. `analysis_frequency` is the only
//! optional key and defaults to 2 MHz.

use serde::Deserialize;
use sqz_core::{DetectionChain, OpoParams, ShgParams};

use crate::CliError;

pub const DEFAULT_ANALYSIS_FREQUENCY: f64 = 2e6;

#[derive(Debug, Clone)]
pub struct Config {
    pub shg: ShgParams,
    pub opo: OpoParams,
    pub detection: DetectionChain,
    pub analysis_frequency: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    shg: Option<RawShg>,
    opo: Option<RawOpo>,
    detection: Option<RawDetection>,
    analysis_frequency: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShg {
    t1: Option<f64>,
    l1: Option<f64>,
    e_nl: Option<f64>,
    gamma_abs_ratio: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOpo {
    t2: Option<f64>,
    l2_base: Option<f64>,
    e_nl_opo: Option<f64>,
    alpha: Option<f64>,
    cavity_length: Option<f64>,
    loss_intercept: Option<f64>,
    loss_slope: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    quantum_efficiency: Option<f64>,
    visibility: Option<f64>,
    propagation: Option<f64>,
}

struct Problems(Vec<String>);

impl Problems {
    fn missing(&mut self, path: &str) {
        self.0.push(format!("{path}: missing required key"));
    }

    fn require(&mut self, path: &str, value: Option<f64>) -> f64 {
        match value {
            Some(v) => v,
            None => {
                self.missing(path);
                f64::NAN
            }
        }
    }
}

/// Reads and validates a configuration file. Returns the digest of the raw
/// bytes alongside the parsed record.
pub fn parse_config(path: &std::path::Path) -> Result<(Config, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    let digest = digest_hex(&bytes);

    let text = String::from_utf8(bytes)
        .map_err(|e| CliError::Input(format!("config {} is not UTF-8: {e}", path.display())))?;
    // An empty file is treated as an empty document so that the full list of
    // required keys is reported instead of a bare parse error.
    let effective = if text.trim().is_empty() { "{}" } else { &text };
    let raw: RawConfig = serde_json::from_str(effective)
        .map_err(|e| CliError::Input(format!("config schema error in {}: {e}", path.display())))?;

    let mut problems = Problems(Vec::new());

    let shg = raw.shg.map(|s| {
        let t1 = problems.require("shg.t1", s.t1);
        let l1 = problems.require("shg.l1", s.l1);
        let e_nl = problems.require("shg.e_nl", s.e_nl);
        let ratio = problems.require("shg.gamma_abs_ratio", s.gamma_abs_ratio);
        (t1, l1, e_nl, ratio)
    });
    if shg.is_none() {
        problems.missing("shg");
    }

    let opo = raw.opo.map(|o| {
        (
            problems.require("opo.t2", o.t2),
            problems.require("opo.l2_base", o.l2_base),
            problems.require("opo.e_nl_opo", o.e_nl_opo),
            problems.require("opo.alpha", o.alpha),
            problems.require("opo.cavity_length", o.cavity_length),
            problems.require("opo.loss_intercept", o.loss_intercept),
            problems.require("opo.loss_slope", o.loss_slope),
        )
    });
    if opo.is_none() {
        problems.missing("opo");
    }

    let detection = raw.detection.map(|d| {
        (
            problems.require("detection.quantum_efficiency", d.quantum_efficiency),
            problems.require("detection.visibility", d.visibility),
            problems.require("detection.propagation", d.propagation),
        )
    });
    if detection.is_none() {
        problems.missing("detection");
    }

    let analysis_frequency = raw.analysis_frequency.unwrap_or(DEFAULT_ANALYSIS_FREQUENCY);
    if !analysis_frequency.is_finite() || analysis_frequency < 0.0 {
        problems.0.push(format!(
            "analysis_frequency = {analysis_frequency}: must be finite and non-negative"
        ));
    }

    if !problems.0.is_empty() {
        return Err(CliError::Input(format!(
            "invalid config {}: {}",
            path.display(),
            problems.0.join("; ")
        )));
    }

    // All keys are present; build the validated records, collecting every
    // violation with its key path.
    let (t1, l1, e_nl, ratio) = shg.expect("checked above");
    let (t2, l2b, e_nl_opo, alpha, length, intercept, slope) = opo.expect("checked above");
    let (qe, vis, prop) = detection.expect("checked above");

    let mut violations = Vec::new();
    let shg = ShgParams::new(t1, l1, e_nl, ratio)
        .map_err(|e| violations.extend(prefixed(e, "shg")))
        .ok();
    let opo = OpoParams::new(t2, l2b, e_nl_opo, alpha, length, intercept, slope)
        .map_err(|e| violations.extend(prefixed(e, "opo")))
        .ok();
    let detection = DetectionChain::new(qe, vis, prop)
        .map_err(|e| violations.extend(prefixed(e, "detection")))
        .ok();

    if !violations.is_empty() {
        return Err(CliError::Input(format!(
            "invalid config {}: {}",
            path.display(),
            violations.join("; ")
        )));
    }

    Ok((
        Config {
            shg: shg.expect("no violations"),
            opo: opo.expect("no violations"),
            detection: detection.expect("no violations"),
            analysis_frequency,
        },
        digest,
    ))
}

fn prefixed(err: sqz_core::InvalidParams, section: &str) -> Vec<String> {
    err.0
        .into_iter()
        .map(|v| format!("{section}.{v}"))
        .collect()
}

fn digest_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let hash = Sha256::digest(bytes);
    let mut hex = String::with_capacity(12);
    for b in &hash[..6] {
        use std::fmt::Write;
        write!(hex, "{b:02x}").expect("writing to a String cannot fail");
    }
    hex
}
