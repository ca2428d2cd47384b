//! Least-squares recovery of model constants from measured series.
//!
//! Three fits are provided: the pump-induced loss line (ordinary least
//! squares, closed form), the oscillation threshold from a gain curve
//! (bounded scalar search), and the doubling-cavity pair `(E_nl, L1)` from a
//! conversion-efficiency curve (coarse grid scan refined by simplex descent,
//! each trial invoking the implicit-equation solver).
//!
//! Every fit is deterministic: fixed grids, fixed iteration schedules, no
//! randomness.

use std::collections::BTreeMap;

use crate::error::ModelError;
use crate::numeric::{golden_section_min, linspace, logspace, nelder_mead_2d};
use crate::params::ShgParams;
use crate::shg::shg_efficiency;
use crate::units::{Fraction, Power};

/// An ordered measurement series. Abscissae are strictly increasing and all
/// values finite; the per-fit row minimum is checked by each fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSeries {
    rows: Vec<(f64, f64)>,
}

impl DataSeries {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if rows.is_empty() {
            return Err(ModelError::InsufficientData { needed: 1, got: 0 });
        }
        for (i, &(x, y)) in rows.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(ModelError::DegenerateData(format!(
                    "row {i} contains a non-finite value ({x}, {y})"
                )));
            }
        }
        for (i, w) in rows.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(ModelError::DegenerateData(format!(
                    "abscissae must be strictly increasing: rows {i} and {} hold {} and {}",
                    i + 1,
                    w[0].0,
                    w[1].0
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Outcome of a fit: named parameter estimates, the root-mean-square of the
/// residuals, and the work spent.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub parameters: BTreeMap<String, f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl FitResult {
    fn new(
        parameters: impl IntoIterator<Item = (&'static str, f64)>,
        residual_norm: f64,
        converged: bool,
        evaluations: usize,
    ) -> Self {
        Self {
            parameters: parameters
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v))
                .collect(),
            residual_norm,
            converged,
            evaluations,
        }
    }
}

fn rms(sum_sq: f64, n: usize) -> f64 {
    (sum_sq / n as f64).sqrt()
}

/// Ordinary least-squares line through `(pump W, loss fraction)` rows,
/// recovering `{intercept, slope}` of the induced-loss law. Exact on
/// collinear data.
pub fn fit_loss_law(data: &DataSeries) -> Result<FitResult, ModelError> {
    let rows = data.rows();
    if rows.len() < 2 {
        return Err(ModelError::InsufficientData {
            needed: 2,
            got: rows.len(),
        });
    }
    let n = rows.len() as f64;
    let mean_x = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let mean_y = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let sxx: f64 = rows.iter().map(|r| (r.0 - mean_x).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.0 - mean_x) * (r.1 - mean_y)).sum();
    // sxx > 0 because the abscissae are strictly increasing.
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sum_sq: f64 = rows
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(FitResult::new(
        [("intercept", intercept), ("slope", slope)],
        rms(sum_sq, rows.len()),
        true,
        rows.len(),
    ))
}

/// Search settings for [`fit_threshold`]. The candidate threshold ranges over
/// `(max pump, upper_factor * max pump]`.
#[derive(Debug, Clone)]
pub struct ThresholdFitOptions {
    pub upper_factor: f64,
    pub scan_points: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ThresholdFitOptions {
    fn default() -> Self {
        Self {
            upper_factor: 100.0,
            scan_points: 512,
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Oscillation threshold from `(pump W, gain)` rows by least squares on
/// `G = 1/(1 - sqrt(P/P_th))^2`.
///
/// A single row is inverted exactly; otherwise a geometric scan over the
/// candidate interval brackets the minimum and golden-section refines it.
pub fn fit_threshold(data: &DataSeries) -> Result<FitResult, ModelError> {
    fit_threshold_with(data, &ThresholdFitOptions::default())
}

pub fn fit_threshold_with(
    data: &DataSeries,
    options: &ThresholdFitOptions,
) -> Result<FitResult, ModelError> {
    let rows = data.rows();
    if rows[0].0 <= 0.0 {
        return Err(ModelError::DegenerateData(format!(
            "pump powers must be positive, got {}",
            rows[0].0
        )));
    }
    if !rows.iter().any(|r| r.1 > 1.0) {
        return Err(ModelError::DegenerateData(
            "no row with gain above 1: the series carries no threshold information".into(),
        ));
    }

    let model = |pth: f64, p: f64| {
        let x = (p / pth).sqrt();
        1.0 / ((1.0 - x) * (1.0 - x))
    };

    if rows.len() == 1 {
        let (p, g) = rows[0];
        let x = 1.0 - 1.0 / g.sqrt();
        let pth = p / (x * x);
        let residual = g - model(pth, p);
        return Ok(FitResult::new(
            [("p_th", pth)],
            rms(residual * residual, 1),
            true,
            1,
        ));
    }

    let max_p = rows.last().expect("non-empty").0;
    let lo = max_p * (1.0 + 1e-6);
    let hi = max_p * options.upper_factor;
    let mut evaluations = 0usize;
    let mut objective = |pth: f64| {
        evaluations += 1;
        rows.iter()
            .map(|&(p, g)| (g - model(pth, p)).powi(2))
            .sum::<f64>()
    };

    let candidates = logspace(lo, hi, options.scan_points);
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, &c) in candidates.iter().enumerate() {
        let v = objective(c);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let bracket_lo = if best == 0 { lo } else { candidates[best - 1] };
    let bracket_hi = if best + 1 == candidates.len() {
        hi
    } else {
        candidates[best + 1]
    };
    let (pth, _, converged) = golden_section_min(
        &mut objective,
        bracket_lo,
        bracket_hi,
        options.tolerance,
        options.max_iterations,
    );
    let sum_sq = rows
        .iter()
        .map(|&(p, g)| (g - model(pth, p)).powi(2))
        .sum::<f64>();
    Ok(FitResult::new(
        [("p_th", pth)],
        rms(sum_sq, rows.len()),
        converged,
        evaluations,
    ))
}

/// Search settings for [`fit_shg_params`]: physical parameter boxes, the
/// coarse-scan resolution, and the evaluation budget of the simplex descent.
#[derive(Debug, Clone)]
pub struct ShgFitOptions {
    pub e_nl_bounds: (f64, f64),
    pub l1_bounds: (f64, f64),
    pub grid: usize,
    pub max_evaluations: usize,
}

impl Default for ShgFitOptions {
    fn default() -> Self {
        Self {
            e_nl_bounds: (1e-4, 1.0),
            l1_bounds: (0.0, 0.2),
            grid: 16,
            max_evaluations: 600,
        }
    }
}

/// Recovers `{e_nl, l1}` of the doubling cavity from `(input W, efficiency)`
/// rows with the coupler transmissivity and absorption ratio held fixed.
///
/// Each trial point solves the implicit efficiency equation for every row;
/// trial points outside the bounds or where the solver fails cost infinity.
pub fn fit_shg_params(
    data: &DataSeries,
    t1: Fraction,
    gamma_abs_ratio: f64,
) -> Result<FitResult, ModelError> {
    fit_shg_params_with(data, t1, gamma_abs_ratio, &ShgFitOptions::default())
}

pub fn fit_shg_params_with(
    data: &DataSeries,
    t1: Fraction,
    gamma_abs_ratio: f64,
    options: &ShgFitOptions,
) -> Result<FitResult, ModelError> {
    let rows = data.rows();
    if rows.len() < 3 {
        return Err(ModelError::InsufficientData {
            needed: 3,
            got: rows.len(),
        });
    }
    if rows[0].0 < 0.0 {
        return Err(ModelError::DegenerateData(format!(
            "input powers must be non-negative, got {}",
            rows[0].0
        )));
    }

    let (e_lo, e_hi) = options.e_nl_bounds;
    let (l_lo, l_hi) = options.l1_bounds;
    let n = rows.len();
    let evaluations = std::cell::Cell::new(0usize);
    let sse = |e_nl: f64, l1: f64| -> f64 {
        evaluations.set(evaluations.get() + 1);
        if !(e_lo..=e_hi).contains(&e_nl) || !(l_lo..=l_hi).contains(&l1) {
            return f64::INFINITY;
        }
        let params = match ShgParams::new(t1.value(), l1, e_nl, gamma_abs_ratio) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        let mut sum = 0.0;
        for &(p, eta) in rows {
            match shg_efficiency(&params, Power::wrap(p)) {
                Ok(point) => sum += (point.efficiency.value() - eta).powi(2),
                Err(_) => return f64::INFINITY,
            }
        }
        sum
    };

    // Coarse scan seeds the simplex at the best cell.
    let e_grid = linspace(e_lo, e_hi, options.grid);
    let l_grid = linspace(l_lo, l_hi, options.grid);
    let mut start = [e_grid[0], l_grid[0]];
    let mut start_val = f64::INFINITY;
    for &e in &e_grid {
        for &l in &l_grid {
            let v = sse(e, l);
            if v < start_val {
                start_val = v;
                start = [e, l];
            }
        }
    }

    let cell = [
        (e_hi - e_lo) / (options.grid - 1) as f64,
        (l_hi - l_lo) / (options.grid - 1) as f64,
    ];
    // Point the initial simplex into the box when seeded at an upper edge.
    let scale = [
        if start[0] + cell[0] * 0.5 > e_hi { -cell[0] * 0.5 } else { cell[0] * 0.5 },
        if start[1] + cell[1] * 0.5 > l_hi { -cell[1] * 0.5 } else { cell[1] * 0.5 },
    ];
    let budget = options.max_evaluations.saturating_sub(evaluations.get()).max(3);
    let outcome = nelder_mead_2d(&sse, start, scale, 1e-20, [1e-8, 1e-8], budget);

    let (best_x, best_fx) = if outcome.fx <= start_val {
        (outcome.x, outcome.fx)
    } else {
        (start, start_val)
    };
    Ok(FitResult::new(
        [("e_nl", best_x[0]), ("l1", best_x[1])],
        rms(best_fx, n),
        outcome.converged && best_fx.is_finite(),
        evaluations.get(),
    ))
}
