//! Bidirectional traveling-wave lines and the ideal / terminated strings
//! built from them.

use crate::delay::DelayLine;
use crate::error::{Error, Result};
use crate::filter::{is_stable, LoopFilter};
use crate::scattering::StringMedium;

/// A pair of delay lines carrying right-going (`v+`) and left-going (`v-`)
/// traveling-wave components over `M` spatial samples.
///
/// The physical variable at position `m` is `v+[m] + v-[m]`. Each tick
/// every sample moves one position; the values entering at the two ends are
/// supplied by whatever terminates the line.
#[derive(Debug, Clone)]
pub struct TravelingWaveLine {
    right_going: DelayLine,
    left_going: DelayLine,
    length: usize,
    medium: StringMedium,
    sample_rate: f64,
}

impl TravelingWaveLine {
    pub fn new(length: usize, medium: StringMedium, sample_rate: f64) -> Result<Self> {
        if length == 0 {
            return Err(Error::Argument("line length must be at least 1".into()));
        }
        crate::error::check_positive("sample_rate", sample_rate)?;
        Ok(Self {
            right_going: DelayLine::new(length)?,
            left_going: DelayLine::new(length)?,
            length,
            medium,
            sample_rate,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn medium(&self) -> StringMedium {
        self.medium
    }

    /// Temporal sampling interval `T = 1 / fs` in seconds.
    pub fn temporal_step(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Spatial sampling interval `X = c T` in meters.
    pub fn spatial_step(&self) -> f64 {
        self.medium.wave_speed() * self.temporal_step()
    }

    pub fn check_position(&self, position: usize) -> Result<usize> {
        if position < self.length {
            Ok(position)
        } else {
            Err(Error::Range {
                name: "position",
                value: position as f64,
                interval: format!("[0, {}]", self.length - 1),
            })
        }
    }

    #[inline]
    pub fn right_wave(&self, m: usize) -> f64 {
        self.right_going.get(m)
    }

    #[inline]
    pub fn left_wave(&self, m: usize) -> f64 {
        self.left_going.get(self.length - 1 - m)
    }

    /// Physical variable at position `m`.
    #[inline]
    pub fn velocity(&self, m: usize) -> f64 {
        self.right_wave(m) + self.left_wave(m)
    }

    /// Left-going sample about to leave through the left end.
    #[inline]
    pub fn left_end_outgoing(&self) -> f64 {
        self.left_wave(0)
    }

    /// Right-going sample about to leave through the right end.
    #[inline]
    pub fn right_end_outgoing(&self) -> f64 {
        self.right_wave(self.length - 1)
    }

    /// Advances both rails one sample, feeding `from_left` into the
    /// right-going rail at `m = 0` and `from_right` into the left-going rail
    /// at `m = M - 1`.
    #[inline]
    pub fn shift(&mut self, from_left: f64, from_right: f64) {
        self.right_going.push(from_left);
        self.left_going.push(from_right);
    }

    /// Adds `amplitude / 2` to both traveling components at `position`.
    pub fn inject(&mut self, position: usize, amplitude: f64) -> Result<()> {
        self.inject_directional(position, 0.5 * amplitude, 0.5 * amplitude)
    }

    /// Adds independent amounts to the right- and left-going components.
    pub fn inject_directional(&mut self, position: usize, right: f64, left: f64) -> Result<()> {
        let m = self.check_position(position)?;
        self.right_going.add(m, right);
        self.left_going.add(self.length - 1 - m, left);
        Ok(())
    }

    /// `sum(v+^2) + sum(v-^2)` over the whole line.
    pub fn energy(&self) -> f64 {
        self.right_going.energy() + self.left_going.energy()
    }

    pub fn clear(&mut self) {
        self.right_going.clear();
        self.left_going.clear();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Inverting,
    NonInverting,
}

/// Reflection filter at one end of a string.
#[derive(Debug, Clone)]
pub struct TerminationFilter {
    filter: LoopFilter,
    polarity: Polarity,
}

impl TerminationFilter {
    pub fn new(filter: LoopFilter, polarity: Polarity) -> Result<Self> {
        if !is_stable(filter.feedback()) {
            return Err(Error::Unstable("termination filter has poles outside the unit circle".into()));
        }
        Ok(Self { filter, polarity })
    }

    /// Lossless rigid end: velocity reflection `-1`.
    pub fn rigid() -> Self {
        Self {
            filter: LoopFilter::identity(),
            polarity: Polarity::Inverting,
        }
    }

    pub fn filter(&self) -> &LoopFilter {
        &self.filter
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.filter.process(x);
        match self.polarity {
            Polarity::Inverting => -y,
            Polarity::NonInverting => y,
        }
    }

    pub fn reset(&mut self) {
        self.filter.reset();
    }
}

/// Lossless string with rigid ends.
#[derive(Debug, Clone)]
pub struct IdealString {
    line: TravelingWaveLine,
}

impl IdealString {
    pub fn new(line: TravelingWaveLine) -> Self {
        Self { line }
    }

    pub fn line(&self) -> &TravelingWaveLine {
        &self.line
    }

    pub fn line_mut(&mut self) -> &mut TravelingWaveLine {
        &mut self.line
    }

    /// One tick: propagate with `-1` reflections at both ends, apply the
    /// optional `(position, amplitude)` injection, then read the physical
    /// variable at `pickup`.
    pub fn tick(&mut self, inject: Option<(usize, f64)>, pickup: usize) -> Result<f64> {
        self.line.check_position(pickup)?;
        if let Some((position, _)) = inject {
            self.line.check_position(position)?;
        }
        let from_left = -self.line.left_end_outgoing();
        let from_right = -self.line.right_end_outgoing();
        self.line.shift(from_left, from_right);
        if let Some((position, amplitude)) = inject {
            self.line.inject(position, amplitude)?;
        }
        Ok(self.line.velocity(pickup))
    }
}

/// String with filtered reflections: bridge at `m = 0`, nut at `m = M - 1`.
#[derive(Debug, Clone)]
pub struct TerminatedString {
    line: TravelingWaveLine,
    bridge: TerminationFilter,
    nut: TerminationFilter,
}

impl TerminatedString {
    pub fn new(line: TravelingWaveLine, bridge: TerminationFilter, nut: TerminationFilter) -> Self {
        Self { line, bridge, nut }
    }

    pub fn line(&self) -> &TravelingWaveLine {
        &self.line
    }

    pub fn line_mut(&mut self) -> &mut TravelingWaveLine {
        &mut self.line
    }

    /// Propagates one tick through both terminations.
    #[inline]
    pub fn step(&mut self) {
        let from_left = self.bridge.process(self.line.left_end_outgoing());
        let from_right = self.nut.process(self.line.right_end_outgoing());
        self.line.shift(from_left, from_right);
    }

    /// Drives the string with `excitation` (one sample per tick, split
    /// equally between directions at `excite_at`) and records `n_samples`
    /// of the physical variable at `pickup`.
    pub fn render(
        &mut self,
        excitation: &[f64],
        excite_at: usize,
        pickup: usize,
        n_samples: usize,
    ) -> Result<Vec<f64>> {
        self.line.check_position(excite_at)?;
        self.line.check_position(pickup)?;
        let mut out = Vec::with_capacity(n_samples);
        for n in 0..n_samples {
            self.step();
            if let Some(&e) = excitation.get(n) {
                self.line.inject(excite_at, e)?;
            }
            out.push(self.line.velocity(pickup));
        }
        Ok(out)
    }
}

/// Renders a terminated string from rest. See [`TerminatedString::render`].
pub fn terminated_string_render(
    line: TravelingWaveLine,
    bridge: TerminationFilter,
    nut: TerminationFilter,
    excitation: &[f64],
    excite_at: usize,
    pickup: usize,
    n_samples: usize,
) -> Result<Vec<f64>> {
    TerminatedString::new(line, bridge, nut).render(excitation, excite_at, pickup, n_samples)
}
