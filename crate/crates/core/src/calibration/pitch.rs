//! Autocorrelation pitch estimation.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{check_positive, Error, Result};

/// Lowest and highest supported pitch in Hz.
pub const MIN_F0: f64 = 50.0;
pub const MAX_F0: f64 = 4000.0;
/// Minimum normalized autocorrelation at the chosen peak.
pub const VOICING_THRESHOLD: f64 = 0.3;

/// Raw autocorrelation `sum x[n] x[n+k]` for `k` in `0..max_lag`, via FFT.
pub fn autocorrelation(signal: &[f64], max_lag: usize) -> Vec<f64> {
    let n = signal.len();
    let max_lag = max_lag.min(n);
    if n == 0 {
        return vec![0.0; max_lag];
    }
    let size = (n + max_lag).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    fft.process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);
    let scale = 1.0 / size as f64;
    buf[..max_lag].iter().map(|c| c.re * scale).collect()
}

/// Normalized cross-correlation between `x[0..N-k]` and `x[k..N]`.
pub fn normalized_autocorrelation(signal: &[f64], max_lag: usize) -> Vec<f64> {
    let raw = autocorrelation(signal, max_lag);
    let mut prefix = Vec::with_capacity(signal.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &x in signal {
        acc += x * x;
        prefix.push(acc);
    }
    let total = acc;
    let n = signal.len();
    raw.iter()
        .enumerate()
        .map(|(k, &r)| {
            let head = prefix[n - k];
            let tail = total - prefix[k];
            let denom = (head * tail).sqrt();
            if denom > 0.0 {
                r / denom
            } else {
                0.0
            }
        })
        .collect()
}

/// Vertex offset in `(-0.5, 0.5)` of the parabola through three samples.
fn parabolic_offset(a: f64, b: f64, c: f64) -> f64 {
    let den = a - 2.0 * b + c;
    if den >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / den).clamp(-0.5, 0.5)
}

/// Interpolated peak position near `guess`, searching `radius` lags.
fn refine_peak(r: &[f64], guess: usize, radius: usize) -> Option<(f64, f64)> {
    let lo = guess.saturating_sub(radius).max(1);
    let hi = (guess + radius).min(r.len() - 2);
    if lo > hi {
        return None;
    }
    let k = (lo..=hi).max_by(|&a, &b| r[a].total_cmp(&r[b]))?;
    if r[k] < r[k - 1] || r[k] < r[k + 1] {
        return None;
    }
    Some((k as f64 + parabolic_offset(r[k - 1], r[k], r[k + 1]), r[k]))
}

/// Fundamental frequency in Hz of a periodic signal.
///
/// Searches the normalized autocorrelation over lags for `MAX_F0..MIN_F0`,
/// takes the shortest-lag peak within 90% of the strongest one and refines
/// it by parabolic interpolation. The period estimate is then sharpened by
/// locating the same peak at successively doubled multiples of the period,
/// which divides the interpolation error by the multiple.
pub fn estimate_f0(signal: &[f64], fs: f64) -> Result<f64> {
    check_positive("fs", fs)?;
    let min_lag = ((fs / MAX_F0).floor() as usize).max(2);
    let max_lag = (fs / MIN_F0).ceil() as usize;
    if signal.len() < 2 * max_lag {
        return Err(Error::Argument(format!(
            "signal of {} samples is too short: need at least {} for pitch search",
            signal.len(),
            2 * max_lag
        )));
    }
    let horizon = signal.len() / 2;
    let r = normalized_autocorrelation(signal, horizon + 2);
    let peaks: Vec<usize> = (min_lag..=max_lag.min(r.len() - 2))
        .filter(|&k| r[k] > r[k - 1] && r[k] >= r[k + 1])
        .collect();
    let best = peaks.iter().map(|&k| r[k]).fold(f64::NEG_INFINITY, f64::max);
    if peaks.is_empty() || !(best >= VOICING_THRESHOLD) {
        return Err(Error::Unvoiced(if best.is_finite() { best.max(0.0) } else { 0.0 }));
    }
    let k0 = *peaks.iter().find(|&&k| r[k] >= 0.9 * best).expect("best peak exists");
    let (mut period, strength) = refine_peak(&r, k0, 1).expect("k0 is a local maximum");
    let mut multiple = 2.0;
    while multiple * period + 2.0 < horizon as f64 {
        let guess = (multiple * period).round() as usize;
        match refine_peak(&r, guess, 2) {
            Some((lag, value)) if value >= 0.5 * strength => {
                period = lag / multiple;
                multiple *= 2.0;
            }
            _ => break,
        }
    }
    Ok(fs / period)
}
