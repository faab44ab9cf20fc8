//! 2D rectilinear waveguide mesh of equal-impedance 4-port junctions.
//!
//! Port order is `[N, S, E, W]`; north is `y - 1`, east is `x + 1`.
//! Each step scatters every junction, then moves every outgoing wave into
//! the facing port of the neighbor. Waves leaving through an edge come back
//! into the same port scaled by that edge's reflection coefficient.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{check_range, Error, Result};

pub const NORTH: usize = 0;
pub const SOUTH: usize = 1;
pub const EAST: usize = 2;
pub const WEST: usize = 3;

/// Grids at least this large scatter rows in parallel.
const PARALLEL_THRESHOLD: usize = 64 * 64;

/// Reflection coefficients of the four edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub north: f64,
    pub south: f64,
    pub east: f64,
    pub west: f64,
}

impl Boundary {
    pub fn uniform(r: f64) -> Self {
        Self {
            north: r,
            south: r,
            east: r,
            west: r,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("boundary.north", self.north),
            ("boundary.south", self.south),
            ("boundary.east", self.east),
            ("boundary.west", self.west),
        ] {
            check_range(name, r, r.abs() <= 1.0, "[-1, 1]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MeshGrid {
    width: usize,
    height: usize,
    boundary: Boundary,
    /// `incoming[j * 4 + port]`, `j = y * width + x`.
    incoming: Vec<f64>,
    outgoing: Vec<f64>,
}

/// Junction scattering with a single halving: `v_J = ((n + s) + (e + w)) / 2`.
#[inline(always)]
fn scatter_junction(inc: &[f64], out: &mut [f64]) {
    let vj = 0.5 * ((inc[0] + inc[1]) + (inc[2] + inc[3]));
    out[0] = vj - inc[0];
    out[1] = vj - inc[1];
    out[2] = vj - inc[2];
    out[3] = vj - inc[3];
}

impl MeshGrid {
    pub fn new(width: usize, height: usize, boundary: Boundary) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::Argument(format!("mesh must be at least 2x2, got {width}x{height}")));
        }
        boundary.validate()?;
        let n = 4 * width * height;
        Ok(Self {
            width,
            height,
            boundary,
            incoming: vec![0.0; n],
            outgoing: vec![0.0; n],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    fn index(&self, x: usize, y: usize) -> Result<usize> {
        if x >= self.width || y >= self.height {
            return Err(Error::Range {
                name: if x >= self.width { "x" } else { "y" },
                value: if x >= self.width { x as f64 } else { y as f64 },
                interval: format!("[0, {}] x [0, {}]", self.width - 1, self.height - 1),
            });
        }
        Ok(y * self.width + x)
    }

    /// Incoming waves `[N, S, E, W]` at a junction.
    pub fn incoming(&self, x: usize, y: usize) -> Result<[f64; 4]> {
        let j = self.index(x, y)?;
        let s = &self.incoming[4 * j..4 * j + 4];
        Ok([s[0], s[1], s[2], s[3]])
    }

    pub fn set_incoming(&mut self, x: usize, y: usize, waves: [f64; 4]) -> Result<()> {
        let j = self.index(x, y)?;
        self.incoming[4 * j..4 * j + 4].copy_from_slice(&waves);
        Ok(())
    }

    /// All incoming waves, junction-major.
    pub fn waves(&self) -> &[f64] {
        &self.incoming
    }

    pub fn waves_mut(&mut self) -> &mut [f64] {
        &mut self.incoming
    }

    /// Outgoing waves produced by the last scatter, junction-major.
    pub fn outgoing(&self) -> &[f64] {
        &self.outgoing
    }

    /// `sum(incoming^2)` over all ports.
    pub fn energy(&self) -> f64 {
        self.incoming.iter().map(|v| v * v).sum()
    }

    /// Junction values `v_J` in row-major order.
    pub fn field(&self) -> Vec<f64> {
        self.incoming
            .chunks_exact(4)
            .map(|s| 0.5 * ((s[0] + s[1]) + (s[2] + s[3])))
            .collect()
    }

    pub fn clear(&mut self) {
        self.incoming.fill(0.0);
        self.outgoing.fill(0.0);
    }

    pub fn step(&mut self) {
        let row = 4 * self.width;
        if self.width * self.height >= PARALLEL_THRESHOLD {
            self.outgoing
                .par_chunks_mut(row)
                .zip(self.incoming.par_chunks(row))
                .for_each(|(out, inc)| {
                    for (o, i) in out.chunks_exact_mut(4).zip(inc.chunks_exact(4)) {
                        scatter_junction(i, o);
                    }
                });
        } else {
            for (o, i) in self.outgoing.chunks_exact_mut(4).zip(self.incoming.chunks_exact(4)) {
                scatter_junction(i, o);
            }
        }
        self.propagate();
    }

    fn propagate(&mut self) {
        let (w, h) = (self.width, self.height);
        let b = self.boundary;
        let out = &self.outgoing;
        let inc = &mut self.incoming;
        for y in 0..h {
            for x in 0..w {
                let j = y * w + x;
                inc[4 * j + NORTH] = if y > 0 {
                    out[4 * (j - w) + SOUTH]
                } else {
                    b.north * out[4 * j + NORTH]
                };
                inc[4 * j + SOUTH] = if y + 1 < h {
                    out[4 * (j + w) + NORTH]
                } else {
                    b.south * out[4 * j + SOUTH]
                };
                inc[4 * j + EAST] = if x + 1 < w {
                    out[4 * (j + 1) + WEST]
                } else {
                    b.east * out[4 * j + EAST]
                };
                inc[4 * j + WEST] = if x > 0 {
                    out[4 * (j - 1) + EAST]
                } else {
                    b.west * out[4 * j + WEST]
                };
            }
        }
    }

    /// Adds `amplitude / 4` to each incoming port of a junction.
    pub fn excite(&mut self, x: usize, y: usize, amplitude: f64) -> Result<()> {
        let j = self.index(x, y)?;
        for v in &mut self.incoming[4 * j..4 * j + 4] {
            *v += 0.25 * amplitude;
        }
        Ok(())
    }

    /// `v_J = (1/2) sum(incoming)` at a junction.
    pub fn read(&self, x: usize, y: usize) -> Result<f64> {
        let j = self.index(x, y)?;
        let s = &self.incoming[4 * j..4 * j + 4];
        Ok(0.5 * ((s[0] + s[1]) + (s[2] + s[3])))
    }

    /// Writes the junction field: width and height as little-endian `i32`,
    /// then `f64` values row-major.
    pub fn dump_field(&self, out: &mut impl Write) -> std::io::Result<()> {
        out.write_all(&(self.width as i32).to_le_bytes())?;
        out.write_all(&(self.height as i32).to_le_bytes())?;
        for v in self.field() {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

pub fn mesh_step(grid: &mut MeshGrid) {
    grid.step()
}

pub fn mesh_excite(grid: &mut MeshGrid, x: usize, y: usize, amplitude: f64) -> Result<()> {
    grid.excite(x, y, amplitude)
}

pub fn mesh_read(grid: &MeshGrid, x: usize, y: usize) -> Result<f64> {
    grid.read(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Axial,
    Diagonal,
}

/// Result of a pulse-propagation measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispersion {
    /// Euclidean source-probe distance in junction spacings.
    pub distance: f64,
    /// Tick of the largest `|v_J|` at the probe.
    pub arrival_tick: usize,
    /// `distance / arrival_tick`, junction spacings per tick.
    pub speed: f64,
    /// Nominal mesh speed, `1 / sqrt(2)` spacings per tick.
    pub nominal_speed: f64,
    /// Ticks from onset (first `|v_J|` of at least 1% of the peak) to the
    /// peak. Zero for a wavefront that arrives in one piece.
    pub spread: usize,
    /// Probe signal `v_J[n]` over the measurement window.
    pub probe: Vec<f64>,
}

/// Drives the center of a `grid_size` square lossless mesh with `pulse`
/// (one sample per tick) and records the junction `steps` junctions away,
/// either along an axis or along the diagonal. The window closes before any
/// boundary reflection can reach the probe.
pub fn mesh_measure_dispersion(grid_size: usize, direction: Direction, steps: usize, pulse: &[f64]) -> Result<Dispersion> {
    if pulse.iter().all(|&v| v == 0.0) {
        return Err(Error::Measurement("pulse is zero".into()));
    }
    if steps == 0 {
        return Err(Error::Measurement("probe coincides with the source".into()));
    }
    let mut grid = MeshGrid::new(grid_size, grid_size, Boundary::uniform(1.0))?;
    let c = grid_size / 2;
    let (px, py) = match direction {
        Direction::Axial => (c + steps, c),
        Direction::Diagonal => (c + steps, c + steps),
    };
    if px >= grid_size || py >= grid_size {
        return Err(Error::Measurement(format!("probe at ({px}, {py}) lies outside the {grid_size}-junction grid")));
    }
    // earliest tick at which a wave reflected off any edge reaches the probe
    let last = grid_size - 1;
    let (dx, dy) = (px.abs_diff(c), py.abs_diff(c));
    let reflected = [
        c + 1 + px + dy,
        (last - c) + 1 + (last - px) + dy,
        c + 1 + py + dx,
        (last - c) + 1 + (last - py) + dx,
    ]
    .into_iter()
    .min()
    .unwrap();
    let distance = ((dx * dx + dy * dy) as f64).sqrt();
    let nominal_speed = std::f64::consts::FRAC_1_SQRT_2;
    let nominal_arrival = distance / nominal_speed;
    let window = reflected.saturating_sub(pulse.len());
    if (window as f64) < 1.25 * nominal_arrival {
        return Err(Error::Measurement(format!(
            "pulse reaches the boundary before the measurement ends: grid {grid_size} is too small for a probe {steps} junctions away"
        )));
    }
    let mut probe = Vec::with_capacity(window);
    for n in 0..window {
        if let Some(&a) = pulse.get(n) {
            grid.excite(c, c, a)?;
        }
        probe.push(grid.read(px, py)?);
        grid.step();
    }
    let (arrival_tick, _) = probe
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (n, &v)| if v.abs() > acc.1 { (n, v.abs()) } else { acc });
    if arrival_tick == 0 {
        return Err(Error::Measurement("no arrival at the probe within the window".into()));
    }
    let peak = probe[arrival_tick].abs();
    let onset = probe.iter().position(|v| v.abs() >= 0.01 * peak).unwrap_or(arrival_tick);
    let spread = arrival_tick - onset;
    Ok(Dispersion {
        distance,
        arrival_tick,
        speed: distance / arrival_tick as f64,
        nominal_speed,
        spread,
        probe,
    })
}
