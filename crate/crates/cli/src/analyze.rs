//! `metric=value unit` reports on audio files.

use waveguide::calibration::analysis::{interpolate_peak, padded_spectrum, FRAME, PAD};
use waveguide::calibration::{estimate_f0, partial_decays};
use waveguide::sdn::sdn_rt60;
use waveguide::Error;

use crate::wav::Wav;

/// Partials reported by `partial_decay`.
pub const PARTIAL_COUNT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    F0,
    PartialDecay,
    Rt60,
    Spectrum,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::F0, Metric::PartialDecay, Metric::Rt60, Metric::Spectrum];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::F0 => "f0",
            Metric::PartialDecay => "partial_decay",
            Metric::Rt60 => "rt60",
            Metric::Spectrum => "spectrum",
        }
    }

    pub fn from_name(name: &str) -> Option<Metric> {
        Metric::ALL.iter().copied().find(|m| m.name() == name)
    }
}

/// Parses a comma-separated metric list.
pub fn parse_metrics(list: &str) -> Result<Vec<Metric>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            Metric::from_name(s).ok_or_else(|| {
                let names: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
                format!("unknown metric \"{s}\"; expected any of {}", names.join(","))
            })
        })
        .collect()
}

fn failure(metric: Metric, e: &Error) -> String {
    match e {
        Error::Unvoiced(_) => format!("{}=unvoiced", metric.name()),
        other => format!("{}=error:{}", metric.name(), other.to_string().replace(char::is_whitespace, "_")),
    }
}

fn spectrum(signal: &[f64], fs: f64) -> Result<(f64, f64), Error> {
    if !signal.iter().any(|&v| v != 0.0) {
        return Err(Error::Measurement("signal is silent".into()));
    }
    // average power over frames spanning the whole file
    let mut power = vec![0.0; FRAME * PAD / 2 + 1];
    let mut start = 0;
    loop {
        for (p, m) in power.iter_mut().zip(padded_spectrum(signal, start)) {
            *p += m * m;
        }
        start += FRAME;
        if start >= signal.len() {
            break;
        }
    }
    let bin_hz = fs / (FRAME * PAD) as f64;
    let peak = (1..power.len()).max_by(|&a, &b| power[a].total_cmp(&power[b])).unwrap();
    let total: f64 = power.iter().sum();
    let centroid = power.iter().enumerate().map(|(i, p)| i as f64 * bin_hz * p).sum::<f64>() / total;
    let mag: Vec<f64> = power.iter().map(|p| p.sqrt()).collect();
    Ok((interpolate_peak(&mag, peak).0 * bin_hz, centroid))
}

/// One report line per metric, in the requested order.
pub fn run_analyze(wav: &Wav, metrics: &[Metric]) -> Vec<String> {
    let fs = wav.sample_rate as f64;
    let x = &wav.samples;
    metrics
        .iter()
        .map(|&m| {
            let line = match m {
                Metric::F0 => estimate_f0(x, fs).map(|f| format!("f0={f:.4} hz")),
                Metric::PartialDecay => estimate_f0(x, fs).and_then(|f| partial_decays(x, fs, f, PARTIAL_COUNT)).map(|d| {
                    let v: Vec<String> = d.iter().map(|(_, a)| format!("{a:.4}")).collect();
                    format!("partial_decay={} 1/s", v.join(","))
                }),
                Metric::Rt60 => sdn_rt60(x, fs).map(|t| format!("rt60={t:.4} s")),
                Metric::Spectrum => spectrum(x, fs).map(|(p, c)| format!("spectrum=peak:{p:.2},centroid:{c:.2} hz")),
            };
            line.unwrap_or_else(|e| failure(m, &e))
        })
        .collect()
}

/// Splits `metric=value unit` into `(metric, value)`.
pub fn parse_line(line: &str) -> Option<(&str, &str)> {
    let (k, rest) = line.split_once('=')?;
    Some((k, rest.split_whitespace().next().unwrap_or("")))
}
