//! Single-reed woodwind: reed table at the mouthpiece, cylindrical bore,
//! inverting lowpass bell.
//!
//! Per sample, with `h_m = p_m / 2` and `p_b-` the wave returning from the
//! bore:
//! `h_delta = h_m - p_b-`, `p_b+ = h_m - rho(h_delta) * h_delta`.
//! A closed reed (`rho = 1`) reflects the bore wave unchanged; an open reed
//! passes the mouth half-pressure straight in.

use crate::error::{Error, Result};
use crate::filter::LoopFilter;
use crate::scattering::StringMedium;
use crate::string::line::{Polarity, TerminationFilter, TravelingWaveLine};

use super::reed::{reed_table_build, ReedTable, DEFAULT_EMBOUCHURE};

pub const DEFAULT_BELL_POLE: f64 = 0.5;
pub const DEFAULT_BELL_GAIN: f64 = 0.95;

#[derive(Debug, Clone)]
pub struct ClarinetState {
    bore: TravelingWaveLine,
    bell: TerminationFilter,
    reed: ReedTable,
}

impl ClarinetState {
    /// `bore_delay` is the one-way bore delay `M` in samples. The bell
    /// reflection is `-g (1 - p) / (1 - p z^-1)`.
    pub fn new(bore_delay: usize, reed: ReedTable, bell_pole: f64, bell_gain: f64, sample_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&bell_gain) {
            return Err(Error::Range {
                name: "bell_gain",
                value: bell_gain,
                interval: "[0, 1]".into(),
            });
        }
        if !(0.0..1.0).contains(&bell_pole) {
            return Err(Error::Range {
                name: "bell_pole",
                value: bell_pole,
                interval: "[0, 1)".into(),
            });
        }
        let bell = TerminationFilter::new(LoopFilter::one_pole(bell_pole, bell_gain)?, Polarity::Inverting)?;
        Ok(Self {
            bore: TravelingWaveLine::new(bore_delay, StringMedium::default(), sample_rate)?,
            bell,
            reed,
        })
    }

    /// Default reed and bell.
    pub fn with_bore(bore_delay: usize, sample_rate: f64) -> Result<Self> {
        Self::new(
            bore_delay,
            reed_table_build(DEFAULT_EMBOUCHURE, 256)?,
            DEFAULT_BELL_POLE,
            DEFAULT_BELL_GAIN,
            sample_rate,
        )
    }

    pub fn bore_delay(&self) -> usize {
        self.bore.length()
    }

    pub fn reed(&self) -> &ReedTable {
        &self.reed
    }

    pub fn bell(&self) -> &TerminationFilter {
        &self.bell
    }

    /// One sample at mouth pressure `p_m`; returns the pressure radiated by
    /// the bell.
    #[inline]
    pub fn tick(&mut self, mouth_pressure: f64) -> f64 {
        let h_m = 0.5 * mouth_pressure;
        let h_delta = h_m - self.bore.left_end_outgoing();
        let into_bore = h_m - self.reed.lookup(h_delta) * h_delta;
        let at_bell = self.bore.right_end_outgoing();
        let reflected = self.bell.process(at_bell);
        self.bore.shift(into_bore, reflected);
        at_bell + reflected
    }
}

pub fn clarinet_render(state: &mut ClarinetState, mouth_pressure: &[f64], n_samples: usize) -> Result<Vec<f64>> {
    if mouth_pressure.len() < n_samples {
        return Err(Error::Argument(format!(
            "mouth pressure envelope has {} samples, need {n_samples}",
            mouth_pressure.len()
        )));
    }
    Ok(mouth_pressure[..n_samples].iter().map(|&p| state.tick(p)).collect())
}
