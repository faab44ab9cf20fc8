//! Short-time analysis front end shared by modal fitting and the GA:
//! 4096-sample Hann frames with a hop of 1024.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub const FRAME: usize = 4096;
pub const HOP: usize = 1024;
/// Zero-padding factor for peak picking.
pub const PAD: usize = 4;

pub fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect()
}

/// Number of complete frames in a signal.
pub fn frame_count(len: usize) -> usize {
    if len < FRAME {
        0
    } else {
        (len - FRAME) / HOP + 1
    }
}

/// Magnitude spectrum of the Hann-windowed frame at `start`, zero-padded
/// by [`PAD`]. Bin `i` is at `i * fs / (FRAME * PAD)`.
pub fn padded_spectrum(signal: &[f64], start: usize) -> Vec<f64> {
    let size = FRAME * PAD;
    let w = hann(FRAME);
    let mut buf: Vec<Complex64> = (0..size)
        .map(|i| {
            let x = if i < FRAME { signal.get(start + i).copied().unwrap_or(0.0) * w[i] } else { 0.0 };
            Complex64::new(x, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);
    buf[..size / 2 + 1].iter().map(|c| c.norm()).collect()
}

/// Quadratic interpolation of a peak on log magnitude; returns
/// `(fractional bin, interpolated magnitude)`.
pub fn interpolate_peak(mag: &[f64], k: usize) -> (f64, f64) {
    if k == 0 || k + 1 >= mag.len() {
        return (k as f64, mag[k]);
    }
    let tiny = f64::MIN_POSITIVE;
    let (a, b, c) = (mag[k - 1].max(tiny).ln(), mag[k].max(tiny).ln(), mag[k + 1].max(tiny).ln());
    let den = a - 2.0 * b + c;
    if den >= 0.0 {
        return (k as f64, mag[k]);
    }
    let p = (0.5 * (a - c) / den).clamp(-0.5, 0.5);
    (k as f64 + p, (b - 0.25 * (a - c) * p).exp())
}

/// Peaks that dominate their `+-min_sep` neighborhood (which also rejects
/// window sidelobes) and lie within `floor_db` of the strongest one
/// (`floor_db` is negative), strongest first, as `(bin, magnitude)` pairs.
pub fn pick_peaks(mag: &[f64], floor_db: f64, min_sep: usize, max_peaks: usize) -> Vec<(usize, f64)> {
    let mut peaks: Vec<(usize, f64)> = (1..mag.len().saturating_sub(1))
        .filter(|&k| {
            let lo = k.saturating_sub(min_sep);
            let hi = (k + min_sep).min(mag.len() - 1);
            mag[k] > 0.0 && mag[k] > mag[k - 1] && (lo..=hi).all(|i| mag[i] <= mag[k])
        })
        .map(|k| (k, mag[k]))
        .collect();
    let top = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
    if top <= 0.0 {
        return Vec::new();
    }
    let floor = top * 10f64.powf(floor_db / 20.0);
    peaks.retain(|p| p.1 >= floor);
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut chosen: Vec<(usize, f64)> = Vec::new();
    for p in peaks {
        if chosen.len() == max_peaks {
            break;
        }
        if chosen.iter().all(|c| c.0.abs_diff(p.0) >= min_sep) {
            chosen.push(p);
        }
    }
    chosen
}

/// Precomputed Hann-weighted quadrature basis for measuring magnitudes at
/// fixed frequencies over every frame.
#[derive(Debug, Clone)]
pub struct HarmonicProbe {
    /// `basis[k]` holds `(w cos, w sin)` per frame sample.
    basis: Vec<Vec<(f64, f64)>>,
    norm: f64,
}

impl HarmonicProbe {
    pub fn new(frequencies: &[f64], fs: f64) -> Self {
        let w = hann(FRAME);
        let norm = 2.0 / w.iter().sum::<f64>();
        let basis = frequencies
            .iter()
            .map(|&f| {
                let dw = 2.0 * PI * f / fs;
                w.iter()
                    .enumerate()
                    .map(|(i, &wi)| {
                        let (s, c) = (dw * i as f64).sin_cos();
                        (wi * c, wi * s)
                    })
                    .collect()
            })
            .collect();
        Self { basis, norm }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Sinusoid amplitude estimates `[k][frame]` for the first `frames`
    /// frames (missing samples read as zero).
    pub fn magnitudes(&self, signal: &[f64], frames: usize) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|b| {
                (0..frames)
                    .map(|j| {
                        let start = j * HOP;
                        let seg = signal.get(start..).unwrap_or(&[]);
                        let (mut re, mut im) = (0.0, 0.0);
                        for (&x, &(c, s)) in seg.iter().zip(b) {
                            re += x * c;
                            im += x * s;
                        }
                        self.norm * re.hypot(im)
                    })
                    .collect()
            })
            .collect()
    }
}
