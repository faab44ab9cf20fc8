//! Loop-filter design from measured partial decay rates.
//!
//! Each partial `k` must lose `g_k = exp(-alpha_k N / fs)` per trip around a
//! loop of `N` samples. The fit is `g * (1 - p) / (1 - p z^-1)` with
//! `0 <= p < 1`, `g <= 1`, by least squares on `ln g_k`.

use std::f64::consts::PI;

use crate::error::{check_positive, Error, Result};
use crate::filter::LoopFilter;

const MAX_POLE: f64 = 0.99;
const GRID: usize = 100;

#[derive(Debug, Clone)]
pub struct LossFit {
    /// Unit-DC-gain one-pole lowpass (identity when `pole == 0`).
    pub filter: LoopFilter,
    pub pole: f64,
    pub gain: f64,
    /// Sum of squared log-gain errors.
    pub residual: f64,
    /// Residual of the best frequency-independent gain.
    pub flat_residual: f64,
    /// Target per-pass gains `g_k`.
    pub targets: Vec<f64>,
}

fn log_one_pole(p: f64, w: f64) -> f64 {
    ((1.0 - p) / (1.0 - 2.0 * p * w.cos() + p * p).sqrt()).ln()
}

/// Best `ln g` (capped at 0) and residual for a fixed pole.
fn fit_gain(p: f64, omegas: &[f64], log_targets: &[f64]) -> (f64, f64) {
    let diffs: Vec<f64> = omegas.iter().zip(log_targets).map(|(&w, &t)| t - log_one_pole(p, w)).collect();
    let ln_g = (diffs.iter().sum::<f64>() / diffs.len() as f64).min(0.0);
    (ln_g, diffs.iter().map(|d| (d - ln_g).powi(2)).sum())
}

pub fn loss_filter_fit(partial_decays: &[(f64, f64)], loop_length: f64, fs: f64) -> Result<LossFit> {
    check_positive("loop_length", loop_length)?;
    check_positive("fs", fs)?;
    if partial_decays.is_empty() {
        return Err(Error::Argument("need at least one partial".into()));
    }
    let mut omegas = Vec::with_capacity(partial_decays.len());
    let mut targets = Vec::with_capacity(partial_decays.len());
    for &(f, alpha) in partial_decays {
        if !(f > 0.0 && f < fs / 2.0) {
            return Err(Error::Range {
                name: "partial frequency",
                value: f,
                interval: format!("(0, {})", fs / 2.0),
            });
        }
        let g = (-alpha * loop_length / fs).exp();
        if !(g <= 1.0) {
            return Err(Error::Infeasible(format!(
                "partial at {f:.1} Hz grows (alpha = {alpha}): per-pass gain {g:.6} exceeds 1"
            )));
        }
        omegas.push(2.0 * PI * f / fs);
        targets.push(g);
    }
    let logs: Vec<f64> = targets.iter().map(|g| g.ln()).collect();
    let (flat_ln_g, flat_residual) = fit_gain(0.0, &omegas, &logs);
    let scale = 1e-14 * logs.iter().map(|l| l * l).sum::<f64>().max(1e-300);

    let mut pole = 0.0;
    let mut best = (flat_ln_g, flat_residual);
    if flat_residual > scale && omegas.len() > 1 {
        let cost = |p: f64| fit_gain(p, &omegas, &logs).1;
        let step = MAX_POLE / GRID as f64;
        let i_best = (0..=GRID).min_by(|&a, &b| cost(a as f64 * step).total_cmp(&cost(b as f64 * step))).unwrap();
        // golden-section refinement around the best grid point
        let (mut lo, mut hi) = ((i_best as f64 - 1.0).max(0.0) * step, ((i_best as f64 + 1.0) * step).min(MAX_POLE));
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (cost(x1), cost(x2));
        for _ in 0..80 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = cost(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = cost(x2);
            }
        }
        let p = 0.5 * (lo + hi);
        let candidate = fit_gain(p, &omegas, &logs);
        if candidate.1 < flat_residual - scale {
            pole = p;
            best = candidate;
        }
    }
    Ok(LossFit {
        filter: if pole == 0.0 { LoopFilter::identity() } else { LoopFilter::one_pole(pole, 1.0)? },
        pole,
        gain: best.0.exp(),
        residual: best.1,
        flat_residual,
        targets,
    })
}
