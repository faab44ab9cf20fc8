//! Modal analysis: sums of exponentially damped sinusoids
//! `A exp(-alpha t) cos(omega t + phi)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::analysis::{frame_count, hann, interpolate_peak, padded_spectrum, pick_peaks, FRAME, HOP, PAD};
use crate::error::{check_positive, Error, Result};

/// Peaks weaker than this, relative to the strongest, are ignored.
pub const PEAK_FLOOR_DB: f64 = -45.0;
/// Minimum peak separation in analysis (unpadded) bins.
pub const MIN_SEPARATION_BINS: usize = 3;
/// Amplitude tracks stop once a mode falls this far below its first frame.
const TRACK_FLOOR_DB: f64 = -60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalComponent {
    pub amplitude: f64,
    /// Angular frequency in rad/s.
    pub omega: f64,
    /// Decay rate in 1/s.
    pub damping: f64,
    pub phase: f64,
}

impl ModalComponent {
    pub fn from_hz(amplitude: f64, frequency_hz: f64, damping: f64, phase: f64) -> Self {
        Self {
            amplitude,
            omega: 2.0 * PI * frequency_hz,
            damping,
            phase,
        }
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * (-self.damping * t).exp() * (self.omega * t + self.phase).cos()
    }
}

/// Renders `n` samples of a sum of modes.
pub fn synthesize(modes: &[ModalComponent], fs: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            modes.iter().map(|m| m.value(t)).sum()
        })
        .collect()
}

/// Weighted least-squares fit of constant-amplitude sinusoids at fixed
/// frequencies, shared across frames.
struct FrameSolver {
    basis: DMatrix<f64>,
    weights: Vec<f64>,
    normal: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl FrameSolver {
    fn new(omegas: &[f64], fs: f64) -> Result<Self> {
        let w = hann(FRAME);
        let k = omegas.len();
        let basis = DMatrix::from_fn(FRAME, 2 * k, |i, c| {
            let ph = omegas[c / 2] * i as f64 / fs;
            if c % 2 == 0 {
                ph.cos()
            } else {
                ph.sin()
            }
        });
        let mut weighted = basis.clone();
        for (i, mut row) in weighted.row_iter_mut().enumerate() {
            row *= w[i];
        }
        let normal = (basis.transpose() * &weighted)
            .cholesky()
            .ok_or_else(|| Error::Measurement("modal frequencies too close to separate".into()))?;
        Ok(Self { basis, weights: w, normal })
    }

    /// `(a_k, b_k)` with frame signal `~ sum a cos + b sin`.
    fn solve(&self, frame: &[f64]) -> Vec<(f64, f64)> {
        let wx = DVector::from_iterator(FRAME, (0..FRAME).map(|i| self.weights[i] * frame.get(i).copied().unwrap_or(0.0)));
        let c = self.normal.solve(&(self.basis.transpose() * wx));
        c.as_slice().chunks_exact(2).map(|p| (p[0], p[1])).collect()
    }
}

/// Hann-weighted mean of `exp(-alpha (t - t_c))` over one frame: the factor
/// by which a frame fit overstates the amplitude at the frame center.
fn envelope_bias(alpha: f64, fs: f64) -> f64 {
    let w = hann(FRAME);
    let tc = FRAME as f64 / 2.0;
    let num: f64 = w.iter().enumerate().map(|(i, wi)| wi * (-alpha * (i as f64 - tc) / fs).exp()).sum();
    num / w.iter().sum::<f64>()
}

/// Fits amplitude, decay and phase of modes at known frequencies (Hz).
pub fn track_modes(signal: &[f64], fs: f64, frequencies: &[f64]) -> Result<Vec<ModalComponent>> {
    check_positive("fs", fs)?;
    let frames = frame_count(signal.len());
    if frames < 2 {
        return Err(Error::Argument(format!(
            "signal of {} samples is too short: need at least {} for decay tracking",
            signal.len(),
            FRAME + HOP
        )));
    }
    if frequencies.is_empty() {
        return Ok(Vec::new());
    }
    let omegas: Vec<f64> = frequencies.iter().map(|f| 2.0 * PI * f).collect();
    let solver = FrameSolver::new(&omegas, fs)?;
    let fits: Vec<Vec<(f64, f64)>> = (0..frames).map(|j| solver.solve(&signal[j * HOP..j * HOP + FRAME])).collect();
    let mut modes = Vec::with_capacity(omegas.len());
    for (k, &omega) in omegas.iter().enumerate() {
        let amps: Vec<f64> = fits.iter().map(|f| f[k].0.hypot(f[k].1)).collect();
        let floor = amps[0] * 10f64.powf(TRACK_FLOOR_DB / 20.0);
        let used = amps.iter().take_while(|&&a| a > floor && a > 0.0).count();
        let (slope, intercept) = if used >= 2 {
            let pts: Vec<(f64, f64)> = (0..used)
                .map(|j| ((j * HOP) as f64 / fs + FRAME as f64 / (2.0 * fs), amps[j].ln()))
                .collect();
            line_fit(&pts)
        } else {
            (0.0, amps[0].max(f64::MIN_POSITIVE).ln())
        };
        let damping = (-slope).max(0.0);
        let (a, b) = fits[0][k];
        modes.push(ModalComponent {
            amplitude: intercept.exp() / envelope_bias(damping, fs),
            omega,
            damping,
            phase: (-b).atan2(a),
        });
    }
    Ok(modes)
}

/// Least-squares `(slope, intercept)`.
pub(crate) fn line_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Up to `max_modes` strongest modes, sorted by frequency.
///
/// Frequencies come from peak picking on the first frame's zero-padded
/// spectrum with quadratic interpolation; decay from the log-amplitude slope
/// of per-frame least-squares fits; amplitude and phase from the first frame.
pub fn modal_fit(signal: &[f64], fs: f64, max_modes: usize) -> Result<Vec<ModalComponent>> {
    check_positive("fs", fs)?;
    if (signal.len() as f64) < 0.25 * fs {
        return Err(Error::Argument(format!(
            "signal of {:.3} s is too short: need at least 0.25 s",
            signal.len() as f64 / fs
        )));
    }
    let mag = padded_spectrum(signal, 0);
    let peaks = pick_peaks(&mag, PEAK_FLOOR_DB, MIN_SEPARATION_BINS * PAD, max_modes);
    let bin_hz = fs / (FRAME * PAD) as f64;
    let mut freqs: Vec<f64> = peaks.iter().map(|&(k, _)| interpolate_peak(&mag, k).0 * bin_hz).collect();
    freqs.sort_by(f64::total_cmp);
    track_modes(signal, fs, &freqs)
}

/// `(frequency, alpha)` of up to `count` partials near multiples of `f0`.
pub fn partial_decays(signal: &[f64], fs: f64, f0: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    check_positive("f0", f0)?;
    let mag = padded_spectrum(signal, 0);
    let bin_hz = fs / (FRAME * PAD) as f64;
    let strongest = mag.iter().copied().fold(0.0, f64::max);
    if strongest <= 0.0 {
        return Err(Error::Measurement("signal is silent".into()));
    }
    let floor = strongest * 10f64.powf(-60.0 / 20.0);
    let mut freqs = Vec::new();
    for k in 1..=count {
        let centre = k as f64 * f0;
        let lo = ((centre - f0 / 3.0) / bin_hz).floor().max(1.0) as usize;
        let hi = ((centre + f0 / 3.0) / bin_hz).ceil() as usize;
        if hi + 1 >= mag.len() {
            break;
        }
        let peak = (lo..=hi).max_by(|&a, &b| mag[a].total_cmp(&mag[b])).unwrap();
        if mag[peak] < floor {
            continue;
        }
        freqs.push(interpolate_peak(&mag, peak).0 * bin_hz);
    }
    Ok(track_modes(signal, fs, &freqs)?
        .iter()
        .map(|m| (m.frequency_hz(), m.damping))
        .collect())
}
