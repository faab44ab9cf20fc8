//! `dwg`: batch rendering, analysis and calibration of waveguide models.
//!
//! Exit codes: 0 success, 1 validation error (bad flags, config or
//! unsupported request), 2 runtime error (I/O, model failure).

pub mod analyze;
pub mod calibrate;
pub mod config;
pub mod models;
pub mod wav;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::calibrate::{CalibrateError, CalibrateOptions, Method};
use crate::config::{Overrides, RenderJob};
use crate::models::Model;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dwg", version, about = "Digital waveguide renderer, analyzer and calibrator")]
pub struct Cli {
    /// Overrides every job's seed (render) or the search seed (calibrate).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides every job's sample rate in Hz.
    #[arg(long = "sample-rate", global = true)]
    pub sample_rate: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render every job of a config file to WAV.
    Render {
        config: PathBuf,
        /// Directory for relative output paths (default: the config's).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print `metric=value unit` lines for a WAV file.
    Analyze {
        wav: PathBuf,
        #[arg(long, default_value = "f0")]
        metrics: String,
    },
    /// Fit a model to a WAV file and write a config.
    Calibrate {
        wav: PathBuf,
        #[arg(long, default_value = "fdl")]
        model: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Ga)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        population: usize,
        #[arg(long, default_value_t = 60)]
        generations: usize,
    },
    /// List models and their parameters.
    ListModels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ga,
    Modal,
}

/// Outcome of one render job.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub name: String,
    pub path: PathBuf,
    pub frames: usize,
    pub clipped: usize,
}

/// Renders and writes one job.
pub fn run_render(job: &RenderJob) -> Result<Rendered, String> {
    let fs = job.sample_rate as f64;
    let mut y = job
        .params
        .render(fs, job.n_samples())
        .map_err(|e| format!("job \"{}\": {} model failed: {e}", job.name, job.model().name()))?;
    if job.gain != 1.0 {
        y.iter_mut().for_each(|v| *v *= job.gain);
    }
    if let Some(dir) = job.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("job \"{}\": cannot create {}: {e}", job.name, dir.display()))?;
    }
    let clipped = wav::write_wav(&job.output, &y, job.sample_rate)
        .map_err(|e| format!("job \"{}\": cannot write {}: {e}", job.name, job.output.display()))?;
    Ok(Rendered {
        name: job.name.clone(),
        path: job.output.clone(),
        frames: y.len(),
        clipped,
    })
}

/// Runs `args` (including the program name), writing reports to `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_VALIDATION;
        }
    };
    match &cli.command {
        Command::Render { config, out_dir } => render(&cli, config, out_dir.as_deref(), out, err),
        Command::Analyze { wav, metrics } => {
            let metrics = match analyze::parse_metrics(metrics) {
                Ok(m) => m,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_VALIDATION;
                }
            };
            match wav::read_wav(wav) {
                Ok(w) => {
                    for line in analyze::run_analyze(&w, &metrics) {
                        let _ = writeln!(out, "{line}");
                    }
                    EXIT_OK
                }
                Err(e) => {
                    let _ = writeln!(err, "error: cannot read {}: {e}", wav.display());
                    EXIT_RUNTIME
                }
            }
        }
        Command::Calibrate {
            wav,
            model,
            method,
            out: out_path,
            population,
            generations,
        } => {
            let method = match method {
                MethodArg::Ga => Method::Ga,
                MethodArg::Modal => Method::Modal,
            };
            let options = CalibrateOptions {
                population: *population,
                generations: *generations,
                seed: cli.seed.unwrap_or(0),
                ..CalibrateOptions::default()
            };
            calibrate(wav, model, method, out_path, &options, out, err)
        }
        Command::ListModels => {
            for m in Model::all() {
                let _ = writeln!(out, "{:<18} {}", m.name(), m.summary());
                for (name, default) in m.parameters() {
                    let _ = writeln!(out, "    {name:<20} {default}");
                }
            }
            EXIT_OK
        }
    }
}

fn render(cli: &Cli, config: &Path, out_dir: Option<&Path>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let overrides = Overrides {
        seed: cli.seed,
        sample_rate: cli.sample_rate,
    };
    let text = match std::fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", config.display());
            return EXIT_VALIDATION;
        }
    };
    let base = out_dir.unwrap_or_else(|| config.parent().unwrap_or(Path::new(".")));
    let jobs = match config::parse_config_str(&text, &config.display().to_string(), base, overrides) {
        Ok(j) => j,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_VALIDATION;
        }
    };
    // jobs run in parallel; reports are flushed in declaration order
    let results: Vec<Result<Rendered, String>> = jobs.par_iter().map(run_render).collect();
    let mut code = EXIT_OK;
    for (job, r) in jobs.iter().zip(results) {
        match r {
            Ok(r) => {
                let _ = writeln!(
                    out,
                    "job={} model={} frames={} sample_rate={} clipped={} path={}",
                    r.name,
                    job.model().name(),
                    r.frames,
                    job.sample_rate,
                    r.clipped,
                    r.path.display()
                );
                if r.clipped > 0 {
                    let _ = writeln!(out, "warning: job {} clipped {} samples to [-1, 1]", r.name, r.clipped);
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                code = EXIT_RUNTIME;
            }
        }
    }
    code
}

fn calibrate(
    wav_path: &Path,
    model: &str,
    method: Method,
    out_path: &Path,
    options: &CalibrateOptions,
    out: &mut impl Write,
    err: &mut impl Write,
) -> i32 {
    if Model::from_name(model) != Some(Model::Fdl) {
        let _ = writeln!(
            err,
            "error: calibration of model \"{model}\" with method \"{}\" is not supported; only fdl can be calibrated",
            method.name()
        );
        return EXIT_VALIDATION;
    }
    let target = match wav::read_wav(wav_path) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", wav_path.display());
            return EXIT_RUNTIME;
        }
    };
    let stem = out_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "calibrated".into());
    let wav_name = format!("{stem}.wav");
    let cal = match calibrate::run_calibrate(&target.samples, target.sample_rate, wav_path, model, method, &wav_name, options) {
        Ok(c) => c,
        Err(CalibrateError::Unsupported(m)) => {
            let _ = writeln!(err, "error: {m}");
            return EXIT_VALIDATION;
        }
        Err(CalibrateError::Model(e)) => {
            let _ = writeln!(err, "error: calibration failed: {e}");
            return EXIT_RUNTIME;
        }
    };
    let report_path = out_path.with_extension("report.txt");
    if let Some(dir) = out_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        let _ = std::fs::create_dir_all(dir);
    }
    let written = std::fs::write(out_path, &cal.config).and_then(|_| std::fs::write(&report_path, cal.report.join("\n") + "\n"));
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write {}: {e}", out_path.display());
        return EXIT_RUNTIME;
    }
    for line in &cal.report {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "config={}", out_path.display());
    let _ = writeln!(out, "report={}", report_path.display());
    EXIT_OK
}
