//! Bowed string: two waveguide segments joined at the bow by a nonlinear
//! two-port junction.
//!
//! At the bow the incoming velocities from both sides sum to the string
//! velocity a transparent junction would have. The differential velocity
//! `dv = v_bow - v_in` goes through the friction reflection function
//! `rho(dv)` and the correction `rho(dv) * dv` is added to both outgoing
//! waves. `rho = 0` is transparent and `rho = 1` makes the string stick to
//! the bow.

use crate::error::{check_range, Error, Result};
use crate::scattering::StringMedium;
use crate::table::LookupTable;

use super::line::{TerminationFilter, TravelingWaveLine};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BowParams {
    /// Bow velocity in m/s.
    pub bow_velocity: f64,
    /// Bow force in N.
    pub bow_force: f64,
    /// Bow contact point as a fraction of string length from the bridge.
    pub bow_position: f64,
    /// Friction curve parameter; the capture half-width in velocity is
    /// `bow_force / friction_slope`.
    pub friction_slope: f64,
}

impl BowParams {
    pub fn validate(&self) -> Result<()> {
        check_range("bow_velocity", self.bow_velocity, true, "finite")?;
        check_range("bow_force", self.bow_force, self.bow_force >= 0.0, "[0, inf)")?;
        check_range(
            "bow_position",
            self.bow_position,
            self.bow_position > 0.0 && self.bow_position < 1.0,
            "(0, 1)",
        )?;
        check_range("friction_slope", self.friction_slope, self.friction_slope > 0.0, "(0, inf)")?;
        Ok(())
    }

    /// Velocity half-width of the sticking region.
    pub fn capture_width(&self) -> f64 {
        self.bow_force / self.friction_slope
    }
}

/// Friction reflection function `rho(dv)`, even in `dv`, with values in
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum FrictionCurve {
    /// `rho = 1` for `|dv| <= w`, `(w / |dv|)^4` beyond, with
    /// `w = bow_force / friction_slope`. The correction `rho * dv` is odd,
    /// continuous at `|dv| = w` and decays on the slip branch.
    Saturating,
    /// User table of `rho` against `|dv|`, linearly interpolated; the bow
    /// force scales `|dv|` by `1 / capture_width` before lookup so the same
    /// curve serves every force.
    Table(LookupTable),
}

impl FrictionCurve {
    pub fn reflection(&self, dv: f64, bow: &BowParams) -> f64 {
        let w = bow.capture_width();
        if w <= 0.0 {
            return 0.0;
        }
        let a = dv.abs();
        match self {
            FrictionCurve::Saturating => {
                if a <= w {
                    1.0
                } else {
                    let q = w / a;
                    (q * q) * (q * q)
                }
            }
            FrictionCurve::Table(t) => t.lookup(a / w).clamp(0.0, 1.0),
        }
    }
}

/// Bowed string with the bridge at `m = 0` and the nut at `m = M - 1`.
#[derive(Debug, Clone)]
pub struct BowedString {
    bridge_side: TravelingWaveLine,
    nut_side: TravelingWaveLine,
    bridge: TerminationFilter,
    nut: TerminationFilter,
    curve: FrictionCurve,
    junction_velocity: f64,
}

impl BowedString {
    /// Splits a string of `length` spatial samples at `bow_position`.
    pub fn new(
        length: usize,
        bow_position: f64,
        bridge: TerminationFilter,
        nut: TerminationFilter,
        curve: FrictionCurve,
        sample_rate: f64,
    ) -> Result<Self> {
        if length < 2 {
            return Err(Error::Argument("bowed string needs at least 2 spatial samples".into()));
        }
        check_range("bow_position", bow_position, bow_position > 0.0 && bow_position < 1.0, "(0, 1)")?;
        let split = ((bow_position * length as f64).round() as usize).clamp(1, length - 1);
        let medium = StringMedium::default();
        Ok(Self {
            bridge_side: TravelingWaveLine::new(split, medium, sample_rate)?,
            nut_side: TravelingWaveLine::new(length - split, medium, sample_rate)?,
            bridge,
            nut,
            curve,
            junction_velocity: 0.0,
        })
    }

    pub fn length(&self) -> usize {
        self.bridge_side.length() + self.nut_side.length()
    }

    /// Segment lengths `(bridge side, nut side)`.
    pub fn segments(&self) -> (usize, usize) {
        (self.bridge_side.length(), self.nut_side.length())
    }

    /// String velocity at the bow after the last tick.
    pub fn junction_velocity(&self) -> f64 {
        self.junction_velocity
    }

    /// Velocity at position `m` along the whole string.
    pub fn velocity(&self, m: usize) -> f64 {
        let split = self.bridge_side.length();
        if m < split {
            self.bridge_side.velocity(m)
        } else {
            self.nut_side.velocity(m - split)
        }
    }

    pub fn inject(&mut self, position: usize, amplitude: f64) -> Result<()> {
        let split = self.bridge_side.length();
        if position < split {
            self.bridge_side.inject(position, amplitude)
        } else {
            self.nut_side.inject(position - split, amplitude)
        }
    }

    /// One tick; returns the velocity wave arriving at the bridge.
    pub fn tick(&mut self, bow: &BowParams) -> f64 {
        let from_bridge = self.bridge_side.right_end_outgoing();
        let from_nut = self.nut_side.left_end_outgoing();
        let v_in = from_bridge + from_nut;
        let dv = bow.bow_velocity - v_in;
        let correction = self.curve.reflection(dv, bow) * dv;
        self.junction_velocity = v_in + correction;

        let at_bridge = self.bridge_side.left_end_outgoing();
        let into_bridge_side = self.bridge.process(at_bridge);
        let into_nut_side = self.nut.process(self.nut_side.right_end_outgoing());
        self.bridge_side.shift(into_bridge_side, from_nut + correction);
        self.nut_side.shift(from_bridge + correction, into_nut_side);
        at_bridge
    }

    pub fn render(&mut self, bow: &BowParams, n_samples: usize) -> Result<Vec<f64>> {
        bow.validate()?;
        Ok((0..n_samples).map(|_| self.tick(bow)).collect())
    }
}
