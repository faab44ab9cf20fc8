//! Filtered delay loop (extended Karplus-Strong).
//!
//! Loop topology, fixed for reproducibility:
//! `x[n] -> integer delay -> loss filter -> gain -> fractional delay -> +e[n]`.
//! Every element is LTI, so the order does not change the output up to
//! rounding.

use crate::delay::DelayLine;
use crate::error::{check_positive, check_range, Error, Result};
use crate::filter::{filter_phase_delay, LoopFilter};
use crate::interp::{FractionalDelay, InterpKind};

use super::excitation::Excitation;

/// Interpolator choice for the fractional part of the loop delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interpolation {
    pub kind: InterpKind,
    pub order: usize,
}

impl Interpolation {
    pub const LINEAR: Self = Self {
        kind: InterpKind::Lagrange,
        order: 1,
    };
    pub const ALLPASS: Self = Self {
        kind: InterpKind::Allpass,
        order: 1,
    };

    pub fn lagrange(order: usize) -> Self {
        Self {
            kind: InterpKind::Lagrange,
            order,
        }
    }

    /// Valid fractional window `(lo, hi)`. Lagrange windows are closed,
    /// the allpass window is `(0, 1]`.
    fn window(&self) -> (f64, f64) {
        match self.kind {
            InterpKind::Lagrange => (
                (self.order as f64 - 1.0) / 2.0,
                (self.order as f64 + 1.0) / 2.0,
            ),
            InterpKind::Allpass => (0.0, 1.0),
        }
    }
}

impl Default for Interpolation {
    fn default() -> Self {
        Self::LINEAR
    }
}

/// How the loop length is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tuning {
    /// Fractional delay compensates the exact target period.
    #[default]
    Compensated,
    /// Loop delay rounded to whole samples (classic Karplus-Strong detune).
    Rounded,
}

/// Split of the loop delay: `integer_delay + fractional_delay + phase delay
/// of the loss filter at f0 = fs / f0` (compensated tuning).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopTuning {
    pub integer_delay: usize,
    pub fractional_delay: f64,
    /// Phase delay of the loss filter at f0.
    pub filter_delay: f64,
}

impl LoopTuning {
    pub fn total(&self) -> f64 {
        self.integer_delay as f64 + self.fractional_delay + self.filter_delay
    }
}

/// Chooses delay-line and interpolator lengths so the loop resonates at `f0`.
pub fn fdl_tune(fs: f64, f0: f64, loss_filter: &LoopFilter, interp: Interpolation) -> Result<LoopTuning> {
    fdl_tune_with(fs, f0, loss_filter, interp, Tuning::Compensated)
}

pub fn fdl_tune_with(
    fs: f64,
    f0: f64,
    loss_filter: &LoopFilter,
    interp: Interpolation,
    tuning: Tuning,
) -> Result<LoopTuning> {
    check_positive("fs", fs)?;
    check_range("f0", f0, f0 > 0.0 && f0 < fs / 2.0, format!("(0, {})", fs / 2.0))?;
    let filter_delay = filter_phase_delay(loss_filter, f0, fs)?;
    let target = fs / f0 - filter_delay;
    check_range(
        "loop delay",
        target,
        target >= 2.0,
        "[2, inf): f0 too high for this sample rate and loss filter",
    )?;
    let (lo, hi) = interp.window();
    let (integer, fraction) = match tuning {
        Tuning::Compensated => match interp.kind {
            InterpKind::Lagrange => {
                let frac = lo + (target - lo).fract();
                ((target - frac).round(), frac)
            }
            InterpKind::Allpass => {
                let int = target.ceil() - 1.0;
                (int, target - int)
            }
        },
        Tuning::Rounded => {
            // smallest whole-sample delay the interpolator can realize
            let frac = match interp.kind {
                InterpKind::Lagrange => lo.ceil(),
                InterpKind::Allpass => hi,
            };
            (target.round() - frac, frac)
        }
    };
    if integer < 1.0 {
        return Err(Error::Range {
            name: "loop delay",
            value: target,
            interval: format!("a delay leaving at least one whole sample after the {fraction}-sample interpolator"),
        });
    }
    Ok(LoopTuning {
        integer_delay: integer as usize,
        fractional_delay: fraction,
        filter_delay,
    })
}

#[derive(Debug, Clone)]
pub struct FdlParams {
    pub sample_rate: f64,
    pub f0: f64,
    pub loss_filter: LoopFilter,
    pub loop_gain: f64,
    pub interp: Interpolation,
    pub tuning: Tuning,
    pub excitation: Excitation,
    pub duration: f64,
}

impl FdlParams {
    /// Averager loss filter, linear interpolation, noise-burst excitation.
    pub fn new(sample_rate: f64, f0: f64, loop_gain: f64, duration: f64) -> Self {
        Self {
            sample_rate,
            f0,
            loss_filter: LoopFilter::averager(),
            loop_gain,
            interp: Interpolation::LINEAR,
            tuning: Tuning::Compensated,
            excitation: Excitation::NoiseBurst { length: None, seed: 0 },
            duration,
        }
    }

    pub fn n_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn validate(&self) -> Result<LoopTuning> {
        check_range("loop_gain", self.loop_gain, self.loop_gain > 0.0 && self.loop_gain <= 1.0, "(0, 1]")?;
        check_range("duration", self.duration, self.duration >= 0.0, "[0, inf)")?;
        fdl_tune_with(self.sample_rate, self.f0, &self.loss_filter, self.interp, self.tuning)
    }
}

/// Running filtered delay loop.
#[derive(Debug, Clone)]
pub struct FilteredDelayLoop {
    main: DelayLine,
    integer_delay: usize,
    loss: LoopFilter,
    gain: f64,
    fractional: DelayLine,
    interp: FractionalDelay,
    tuning: LoopTuning,
}

impl FilteredDelayLoop {
    pub fn new(params: &FdlParams) -> Result<Self> {
        let tuning = params.validate()?;
        Self::with_tuning(tuning, params.loss_filter.clone(), params.loop_gain, params.interp)
    }

    /// Builds a loop with an explicit integer/fractional split.
    pub fn with_tuning(
        tuning: LoopTuning,
        loss_filter: LoopFilter,
        gain: f64,
        interp: Interpolation,
    ) -> Result<Self> {
        if tuning.integer_delay == 0 {
            return Err(Error::Argument("integer loop delay must be at least 1".into()));
        }
        let frac = FractionalDelay::new(interp.kind, interp.order, tuning.fractional_delay)?;
        Ok(Self {
            main: DelayLine::new(tuning.integer_delay)?,
            integer_delay: tuning.integer_delay,
            loss: loss_filter,
            gain,
            fractional: DelayLine::new(frac.span() + 1)?,
            interp: frac,
            tuning,
        })
    }

    pub fn tuning(&self) -> LoopTuning {
        self.tuning
    }

    /// One tick with additive input; returns the loop signal `x[n]`.
    #[inline]
    pub fn tick(&mut self, input: f64) -> f64 {
        let delayed = self.main.get(self.integer_delay - 1);
        let filtered = self.gain * self.loss.process(delayed);
        self.fractional.push(filtered);
        let x = input + self.interp.read(&self.fractional);
        self.main.push(x);
        x
    }

    /// Drives the loop with `input` (zero afterwards) for `n_samples` ticks.
    pub fn drive(&mut self, input: &[f64], n_samples: usize) -> Vec<f64> {
        (0..n_samples)
            .map(|n| self.tick(input.get(n).copied().unwrap_or(0.0)))
            .collect()
    }
}

/// Renders `duration * fs` samples of the plucked loop.
pub fn fdl_render(params: &FdlParams) -> Result<Vec<f64>> {
    let mut fdl = FilteredDelayLoop::new(params)?;
    let loop_len = fdl.tuning().total().round().max(1.0) as usize;
    let excitation = params.excitation.samples(loop_len)?;
    Ok(fdl.drive(&excitation, params.n_samples()))
}
