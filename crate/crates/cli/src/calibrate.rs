//! Fits model parameters to a recording and writes a renderable config.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use waveguide::calibration::{
    estimate_f0, ga_optimize, loss_filter_fit, modal_fit, partial_decays, GaConfig, GaModel, ModalComponent, Weighting,
};
use waveguide::string::{Excitation, FdlParams};

use crate::models::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ga,
    Modal,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ga => "ga",
            Method::Modal => "modal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateOptions {
    pub population: usize,
    pub generations: usize,
    pub harmonics: usize,
    pub max_modes: usize,
    pub seed: u64,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        Self {
            population: 64,
            generations: 60,
            harmonics: 10,
            max_modes: 8,
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub enum CalibrateError {
    /// The (model, method) pair is not supported.
    Unsupported(String),
    Model(waveguide::Error),
}

impl std::fmt::Display for CalibrateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CalibrateError::Unsupported(m) => f.write_str(m),
            CalibrateError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<waveguide::Error> for CalibrateError {
    fn from(e: waveguide::Error) -> Self {
        CalibrateError::Model(e)
    }
}

/// Config text plus the sidecar report.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub config: String,
    pub report: Vec<String>,
    pub f0: f64,
    pub loop_gain: f64,
    /// Best GA fitness, or the loss-filter residual for the modal method.
    pub score: f64,
}

fn job_header(out: &mut String, method: Method, target: &Path, fs: u32, duration: f64, seed: u64, wav_name: &str) {
    let _ = writeln!(out, "# fitted by `dwg calibrate --method {}` from {}", method.name(), target.display());
    let _ = writeln!(out, "sample_rate = {fs}");
    let _ = writeln!(out);
    let _ = writeln!(out, "[[job]]");
    let _ = writeln!(out, "name = \"calibrated\"");
    let _ = writeln!(out, "model = \"fdl\"");
    let _ = writeln!(out, "duration = {duration:?}");
    let _ = writeln!(out, "output = \"{wav_name}\"");
    let _ = writeln!(out, "seed = {seed}");
}

pub fn run_calibrate(
    target: &[f64],
    sample_rate: u32,
    target_path: &Path,
    model: &str,
    method: Method,
    wav_name: &str,
    options: &CalibrateOptions,
) -> Result<Calibration, CalibrateError> {
    if Model::from_name(model) != Some(Model::Fdl) {
        return Err(CalibrateError::Unsupported(format!(
            "calibration of model \"{model}\" with method \"{}\" is not supported; only fdl can be calibrated",
            method.name()
        )));
    }
    let fs = sample_rate as f64;
    let duration = target.len() as f64 / fs;
    let started = Instant::now();
    let mut config = String::new();
    job_header(&mut config, method, target_path, sample_rate, duration, options.seed, wav_name);
    let mut report = vec![format!("method={}", method.name()), "model=fdl".to_string()];

    let cal = match method {
        Method::Ga => {
            let f0 = estimate_f0(target, fs)?;
            let mut template = FdlParams::new(fs, f0, 0.99, duration);
            template.excitation = Excitation::NoiseBurst {
                length: None,
                seed: options.seed,
            };
            let ga = GaConfig {
                population: options.population,
                generations: options.generations,
                bounds: vec![(f0 / 1.25, (f0 * 1.25).min(0.45 * fs)), (0.9, 1.0)],
                mutation_rate: 0.25,
                crossover_rate: 0.7,
                harmonic_count: options.harmonics,
                weighting: Weighting::Db,
                seed: options.seed,
            };
            let r = ga_optimize(target, fs, GaModel::Fdl(template), &ga)?;
            let (f0, g) = (r.params[0], r.params[1]);
            let _ = writeln!(config, "\n[job.params]");
            let _ = writeln!(config, "f0 = {f0:?}");
            let _ = writeln!(config, "loop_gain = {g:?}");
            let _ = writeln!(config, "excitation = \"noise\"");
            report.push(format!("fitness={:?}", r.fitness));
            report.push(format!("population={}", options.population));
            report.push(format!("generations={}", options.generations));
            report.push(format!("target_f0={:.4} hz", r.target_f0));
            Calibration {
                config,
                report,
                f0,
                loop_gain: g,
                score: r.fitness,
            }
        }
        Method::Modal => {
            let modes = modal_fit(target, fs, options.max_modes)?;
            if modes.is_empty() {
                return Err(waveguide::Error::Measurement("no spectral peaks found".into()).into());
            }
            let f0 = estimate_f0(target, fs).unwrap_or_else(|_| lowest(&modes));
            let decays = partial_decays(target, fs, f0, options.harmonics)?;
            let fit = loss_filter_fit(&decays, fs / f0, fs)?;
            let _ = writeln!(config, "\n[job.params]");
            let _ = writeln!(config, "f0 = {f0:?}");
            let _ = writeln!(config, "loop_gain = {:?}", fit.gain);
            if fit.pole > 0.0 {
                let _ = writeln!(config, "loss_filter = \"one_pole\"");
                let _ = writeln!(config, "loss_pole = {:?}", fit.pole);
            } else {
                let _ = writeln!(config, "loss_filter = \"none\"");
            }
            let _ = writeln!(config, "excitation = \"impulse\"");
            for m in &modes {
                let _ = writeln!(config, "\n[[job.modes]]");
                let _ = writeln!(config, "frequency = {:?}", m.frequency_hz());
                let _ = writeln!(config, "damping = {:?}", m.damping);
                let _ = writeln!(config, "amplitude = {:?}", m.amplitude);
                let _ = writeln!(config, "phase = {:?}", m.phase);
            }
            report.push(format!("residual={:?}", fit.residual));
            report.push(format!("modes={}", modes.len()));
            Calibration {
                config,
                report,
                f0,
                loop_gain: fit.gain,
                score: fit.residual,
            }
        }
    };
    let mut cal = cal;
    cal.report.push(format!("wall_clock={:.3} s", started.elapsed().as_secs_f64()));
    Ok(cal)
}

fn lowest(modes: &[ModalComponent]) -> f64 {
    modes.iter().map(|m| m.frequency_hz()).fold(f64::INFINITY, f64::min)
}
