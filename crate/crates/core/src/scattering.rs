//! Wave impedances, reflection coefficients and lossless scattering at
//! two-port and equal-impedance N-port junctions.
//!
//! Sign conventions follow the series (common-velocity) junction: force
//! waves reflect with `+r` and velocity waves with `-r`, where
//! `r = (R2 - R1) / (R1 + R2)` is the force reflection coefficient seen from
//! the left side. A parallel (common-force) junction is the same computation
//! with the roles of [`WaveKind`] swapped.

use crate::error::{check_positive, check_range, Error, Result};

/// Wave impedance of a medium. The rigid and free limits are kept symbolic
/// so that reflection coefficients at terminations come out exactly `±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Impedance {
    Finite(f64),
    /// Infinite impedance (rigid termination).
    Rigid,
    /// Zero impedance (free end).
    Free,
}

impl Impedance {
    pub fn finite(value: f64) -> Result<Self> {
        check_positive("impedance", value).map(Impedance::Finite)
    }
}

/// Which traveling-wave variable is being scattered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    ForceOrPressure,
    Velocity,
}

/// An ideal string: tension `K` (N) and linear density `mu` (kg/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringMedium {
    tension: f64,
    linear_density: f64,
}

impl StringMedium {
    pub fn new(tension: f64, linear_density: f64) -> Result<Self> {
        Ok(Self {
            tension: check_positive("tension", tension)?,
            linear_density: check_positive("linear_density", linear_density)?,
        })
    }

    pub fn tension(&self) -> f64 {
        self.tension
    }

    pub fn linear_density(&self) -> f64 {
        self.linear_density
    }

    /// `sqrt(K mu)`
    pub fn impedance(&self) -> f64 {
        (self.tension * self.linear_density).sqrt()
    }

    /// `sqrt(K / mu)`
    pub fn wave_speed(&self) -> f64 {
        (self.tension / self.linear_density).sqrt()
    }
}

impl Default for StringMedium {
    fn default() -> Self {
        Self {
            tension: 1.0,
            linear_density: 1.0,
        }
    }
}

/// Returns `(impedance, wave_speed)` of an ideal string.
pub fn string_impedance(tension: f64, linear_density: f64) -> Result<(f64, f64)> {
    let m = StringMedium::new(tension, linear_density)?;
    Ok((m.impedance(), m.wave_speed()))
}

/// Acoustic tube impedance `rho c / A` (pressure over volume velocity).
pub fn tube_impedance(area: f64, air_density: f64, sound_speed: f64) -> Result<f64> {
    let a = check_positive("area", area)?;
    let rho = check_positive("air_density", air_density)?;
    let c = check_positive("sound_speed", sound_speed)?;
    Ok(rho * c / a)
}

/// Force reflection coefficient `(R2 - R1) / (R1 + R2)` seen from side 1.
pub fn reflection_coefficient(r1: Impedance, r2: Impedance) -> Result<f64> {
    use Impedance::*;
    match (r1, r2) {
        (Rigid, Rigid) => Err(Error::DegenerateJunction("rigid")),
        (Free, Free) => Err(Error::DegenerateJunction("free")),
        (Finite(a), Finite(b)) => {
            check_positive("r1_impedance", a)?;
            check_positive("r2_impedance", b)?;
            Ok((b - a) / (a + b))
        }
        (Finite(_) | Free, Rigid) => Ok(1.0),
        (Finite(_) | Rigid, Free) => Ok(-1.0),
        (Rigid, Finite(_)) => Ok(-1.0),
        (Free, Finite(_)) => Ok(1.0),
    }
}

/// Reflection coefficient of the junction between tube sections of areas
/// `A_m` and `A_{m+1}`: `(A_m - A_{m+1}) / (A_m + A_{m+1})`.
pub fn area_reflection_coefficient(area_m: f64, area_next: f64) -> Result<f64> {
    let a = check_positive("area_m", area_m)?;
    let b = check_positive("area_next", area_next)?;
    Ok((a - b) / (a + b))
}

/// Two impedances meeting at a series junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionSpec {
    pub left_impedance: Impedance,
    pub right_impedance: Impedance,
    pub reflection: f64,
}

impl JunctionSpec {
    pub fn new(left: Impedance, right: Impedance) -> Result<Self> {
        Ok(Self {
            left_impedance: left,
            right_impedance: right,
            reflection: reflection_coefficient(left, right)?,
        })
    }

    /// Scatters a wave incident from the left. Valid at the rigid/free
    /// limits, where it yields total reflection.
    pub fn scatter(&self, incident: f64, kind: WaveKind) -> (f64, f64) {
        scatter_raw(self.reflection, incident, kind)
    }
}

#[inline]
fn scatter_raw(r: f64, incident: f64, kind: WaveKind) -> (f64, f64) {
    match kind {
        WaveKind::ForceOrPressure => (r * incident, (1.0 + r) * incident),
        WaveKind::Velocity => (-r * incident, (1.0 - r) * incident),
    }
}

/// Returns `(reflected, transmitted)` for a wave incident from the left of a
/// junction with force reflection coefficient `r`.
///
/// `|r| = 1` is accepted and corresponds to a termination.
pub fn scatter_two_port(r: f64, incident: f64, kind: WaveKind) -> Result<(f64, f64)> {
    check_range("r", r, r.abs() <= 1.0, "[-1, 1]")?;
    Ok(scatter_raw(r, incident, kind))
}

/// Converts velocity waves to force waves: `f+ = R v+`, `f- = -R v-`.
pub fn wave_convert(impedance: f64, v_plus: f64, v_minus: f64) -> (f64, f64) {
    (impedance * v_plus, -impedance * v_minus)
}

/// Incident power `f+ v+` and outgoing power `f2+ v2+ - f1- v1-` at a series
/// junction, each computed from the scattering equations.
pub fn junction_power(r: f64, f_plus: f64, v_plus: f64) -> (f64, f64) {
    let (f1_minus, f2_plus) = scatter_raw(r, f_plus, WaveKind::ForceOrPressure);
    let (v1_minus, v2_plus) = scatter_raw(r, v_plus, WaveKind::Velocity);
    (f_plus * v_plus, f2_plus * v2_plus - f1_minus * v1_minus)
}

/// Pairwise sum. The pairing makes the 4-port sum `(a + b) + (c + d)`
/// invariant under the symmetries of the square, and bit-identical to the
/// mesh's unrolled junction.
pub(crate) fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        2 => x[0] + x[1],
        n => {
            let mid = n.div_ceil(2);
            pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
        }
    }
}

/// Equal-impedance N-port junction: `v_J = (2/N) sum(in)`,
/// `out[i] = v_J - in[i]`. Returns `(v_J, outgoing)`.
pub fn scatter_nport_equal(incoming: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = incoming.len();
    if n < 2 {
        return Err(Error::Arity(n));
    }
    let vj = (2.0 / n as f64) * pairwise_sum(incoming);
    Ok((vj, incoming.iter().map(|x| vj - x).collect()))
}

/// In-place variant of [`scatter_nport_equal`] that returns `v_J`.
#[inline]
pub fn scatter_nport_in_place(waves: &mut [f64]) -> f64 {
    let vj = (2.0 / waves.len() as f64) * pairwise_sum(waves);
    waves.iter_mut().for_each(|x| *x = vj - *x);
    vj
}
