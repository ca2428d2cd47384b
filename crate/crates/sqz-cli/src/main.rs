//! `sqz` — command-line front end for the cavity doubling and squeezing
//! models.
//!
//! Every subcommand reads a strict JSON config, writes CSV rows to standard
//! output, and a one-line run report to standard error. Exit codes: 0 on
//! success, 2 for usage/config/data errors, 3 for numerical failures.

mod config;
mod data;

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use sqz_core::estimate::{fit_loss_law, fit_shg_params, fit_threshold, FitResult};
use sqz_core::opo::{
    cavity_rates, escape_efficiency, gain_sweep, gain_with_induced_loss, induced_loss,
    opo_threshold, SweepMode,
};
use sqz_core::shg::shg_sweep;
use sqz_core::squeeze::{
    frequency_spectrum, noise_variances, predict_from_measured_gain, squeeze_power_sweep,
    total_detection_efficiency,
};
use sqz_core::{ModelError, Power};

#[derive(Debug)]
pub enum CliError {
    /// Unusable input: config, data file, or flag values. Exit code 2.
    Input(String),
    /// A model-level failure; numerical ones exit 3, the rest 2.
    Model(ModelError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<sqz_core::Violation> for CliError {
    fn from(v: sqz_core::Violation) -> Self {
        CliError::Model(v.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Model(e) => {
                if e.is_numerical() {
                    3
                } else {
                    2
                }
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sqz", version, about = "Cavity-enhanced doubling and sub-threshold OPO squeezing calculator")]
struct Cli {
    /// JSON configuration file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Baseline intracavity loss and fixed threshold
    Ideal,
    /// Pump-induced loss folded into threshold, escape, and detuning
    Corrected,
}

impl From<Mode> for SweepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ideal => SweepMode::Ideal,
            Mode::Corrected => SweepMode::Corrected,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Doubling efficiency, harmonic output, and absorption over an input range
    ShgCurve {
        /// Lowest input power, W
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        /// Highest input power, W
        #[arg(long, default_value_t = 0.24)]
        p_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Oscillation threshold, optionally loss-corrected at a pump power
    OpoThreshold {
        /// Pump power (W) at which to evaluate the induced-loss threshold
        #[arg(long)]
        pump: Option<f64>,
    },
    /// Parametric gain versus pump power
    GainCurve {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 0.15)]
        p_max: f64,
        #[arg(long, default_value_t = 31)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Ideal)]
        mode: Mode,
    },
    /// Squeezing and anti-squeezing versus pump power
    SqueezeSweep {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 0.15)]
        p_max: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Ideal)]
        mode: Mode,
    },
    /// Noise spectrum versus analysis frequency at a fixed pump power
    Spectrum {
        /// Pump power, W
        #[arg(long)]
        pump: f64,
        #[arg(long, default_value_t = 2e5)]
        f_min: f64,
        #[arg(long, default_value_t = 1e7)]
        f_max: f64,
        #[arg(long, default_value_t = 60)]
        steps: usize,
        /// Logarithmic frequency spacing
        #[arg(long)]
        log: bool,
        #[arg(long, value_enum, default_value_t = Mode::Ideal)]
        mode: Mode,
    },
    /// Detection-efficiency budget and noise prediction at one operating point
    Budget {
        /// Pump power, W
        #[arg(long)]
        pump: f64,
        /// Measured parametric gain; the modeled gain is used when omitted
        #[arg(long)]
        gain: Option<f64>,
    },
    /// Estimate model parameters from a two-column CSV (header required)
    #[command(subcommand)]
    Fit(FitCommand),
}

#[derive(Debug, Subcommand)]
enum FitCommand {
    /// Induced-loss law {intercept, slope} from (pump W, loss fraction) rows
    Loss {
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
    /// Threshold {p_th} from (pump W, gain) rows
    Gain {
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
    /// Doubling-cavity {e_nl, l1} from (input W, efficiency) rows
    Shg {
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn wio(e: io::Error) -> CliError {
    CliError::Input(format!("cannot write output: {e}"))
}

fn power(name: &'static str, watts: f64) -> Result<Power, CliError> {
    Power::new(watts).map_err(|_| CliError::Input(format!("{name} = {watts}: must be a finite non-negative power in watts")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let (cfg, digest) = config::parse_config(&cli.config)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();

    let (name, rows) = match cli.command {
        Command::ShgCurve { p_min, p_max, steps } => {
            let series = shg_sweep(
                &cfg.shg,
                power("p-min", p_min)?,
                power("p-max", p_max)?,
                steps,
            )?;
            writeln!(out, "p_in_w,eta,p_shg_w,p_circ_w,p_abs_w").map_err(wio)?;
            for pt in &series {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    pt.input_power.watts(),
                    pt.efficiency.value(),
                    pt.shg_power.watts(),
                    pt.circulating_power.watts(),
                    pt.absorbed_uv_power.watts()
                )
                .map_err(wio)?;
            }
            ("shg-curve", series.len())
        }

        Command::OpoThreshold { pump } => {
            writeln!(out, "parameter,value").map_err(wio)?;
            let base = opo_threshold(&cfg.opo, None);
            writeln!(out, "p_th_w,{}", base.watts()).map_err(wio)?;
            let mut rows = 1;
            if let Some(p) = pump {
                let pump = power("pump", p)?;
                let l2 = induced_loss(&cfg.opo, pump)?;
                let effective = opo_threshold(&cfg.opo, Some(l2));
                writeln!(out, "l2_induced,{}", l2.value()).map_err(wio)?;
                writeln!(out, "p_th_eff_w,{}", effective.watts()).map_err(wio)?;
                rows += 2;
            }
            ("opo-threshold", rows)
        }

        Command::GainCurve { p_min, p_max, steps, mode } => {
            let series = gain_sweep(
                &cfg.opo,
                power("p-min", p_min)?,
                power("p-max", p_max)?,
                steps,
                mode.into(),
            )?;
            writeln!(out, "p_pump_w,gain,x,threshold_w").map_err(wio)?;
            for pt in &series {
                writeln!(
                    out,
                    "{},{},{},{}",
                    pt.pump_power.watts(),
                    pt.gain,
                    pt.pump_parameter,
                    pt.threshold_used.watts()
                )
                .map_err(wio)?;
            }
            ("gain-curve", series.len())
        }

        Command::SqueezeSweep { p_min, p_max, steps, mode } => {
            let series = squeeze_power_sweep(
                &cfg.opo,
                &cfg.detection,
                power("p-min", p_min)?,
                power("p-max", p_max)?,
                steps,
                cfg.analysis_frequency,
                mode.into(),
            )?;
            writeln!(out, "p_pump_w,r_minus_db,r_plus_db,x,omega,eta_total").map_err(wio)?;
            for (p, n) in &series {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.watts(),
                    n.r_minus_db,
                    n.r_plus_db,
                    n.pump_parameter,
                    n.detuning,
                    n.total_efficiency.value()
                )
                .map_err(wio)?;
            }
            ("squeeze-sweep", series.len())
        }

        Command::Spectrum { pump, f_min, f_max, steps, log, mode } => {
            let series = frequency_spectrum(
                &cfg.opo,
                &cfg.detection,
                power("pump", pump)?,
                f_min,
                f_max,
                steps,
                log,
                mode.into(),
            )?;
            writeln!(out, "f_hz,r_minus_db,r_plus_db,omega").map_err(wio)?;
            for (f, n) in &series {
                writeln!(out, "{},{},{},{}", f, n.r_minus_db, n.r_plus_db, n.detuning)
                    .map_err(wio)?;
            }
            ("spectrum", series.len())
        }

        Command::Budget { pump, gain } => {
            let pump = power("pump", pump)?;
            let l2 = induced_loss(&cfg.opo, pump)?;
            let rho = escape_efficiency(cfg.opo.t2(), l2)?;
            let budget = total_detection_efficiency(&cfg.detection, rho)?;
            let (gain_value, noise) = match gain {
                Some(g) => (
                    g,
                    predict_from_measured_gain(
                        &cfg.opo,
                        &cfg.detection,
                        g,
                        pump,
                        cfg.analysis_frequency,
                    )?,
                ),
                None => {
                    let point = gain_with_induced_loss(&cfg.opo, pump)?;
                    let rates = cavity_rates(
                        cfg.opo.t2(),
                        l2,
                        cfg.opo.cavity_length(),
                        cfg.analysis_frequency,
                    )?;
                    (
                        point.gain,
                        noise_variances(point.pump_parameter, rates.detuning, budget.total)?,
                    )
                }
            };
            writeln!(out, "parameter,value").map_err(wio)?;
            writeln!(out, "photodiode,{}", budget.photodiode.value()).map_err(wio)?;
            writeln!(out, "visibility_squared,{}", budget.visibility_squared.value())
                .map_err(wio)?;
            writeln!(out, "propagation,{}", budget.propagation.value()).map_err(wio)?;
            writeln!(out, "escape,{}", budget.escape.value()).map_err(wio)?;
            writeln!(out, "total,{}", budget.total.value()).map_err(wio)?;
            writeln!(out, "gain,{gain_value}").map_err(wio)?;
            writeln!(out, "x,{}", noise.pump_parameter).map_err(wio)?;
            writeln!(out, "omega,{}", noise.detuning).map_err(wio)?;
            writeln!(out, "r_minus_db,{}", noise.r_minus_db).map_err(wio)?;
            writeln!(out, "r_plus_db,{}", noise.r_plus_db).map_err(wio)?;
            ("budget", 10)
        }

        Command::Fit(fit) => {
            let (name, result): (&'static str, FitResult) = match fit {
                FitCommand::Loss { data } => {
                    ("fit loss", fit_loss_law(&data::read_series(&data)?)?)
                }
                FitCommand::Gain { data } => {
                    ("fit gain", fit_threshold(&data::read_series(&data)?)?)
                }
                FitCommand::Shg { data } => (
                    "fit shg",
                    fit_shg_params(
                        &data::read_series(&data)?,
                        cfg.shg.t1(),
                        cfg.shg.gamma_abs_ratio(),
                    )?,
                ),
            };
            writeln!(out, "parameter,value").map_err(wio)?;
            let mut rows = 0;
            for (key, value) in &result.parameters {
                writeln!(out, "{key},{value}").map_err(wio)?;
                rows += 1;
            }
            writeln!(out, "residual_norm,{}", result.residual_norm).map_err(wio)?;
            writeln!(out, "converged,{}", result.converged).map_err(wio)?;
            (name, rows + 2)
        }
    };

    out.flush().map_err(wio)?;
    // Run report on stderr only; stdout stays pure CSV.
    eprintln!(
        "run: {name} config={digest} rows={rows} elapsed={:?}",
        started.elapsed()
    );
    Ok(())
}
