//! Scattering delay network room reverberator.
//!
//! One scattering node per wall sits at the first-order specular reflection
//! point of the source-receiver pair. Nodes are fully connected by
//! bidirectional delay lines; the source feeds each node and each node feeds
//! the receiver through one-way taps, and a separate line carries the direct
//! path.
//!
//! Conventions:
//! - node scattering `out = beta * (S p)`, `S = (2/K) J - I`, `K` = number of
//!   other nodes;
//! - the source sample arriving at a node is added to every port as
//!   `0.5 * s`;
//! - a node sends `(2/K) sum(out)` to the receiver;
//! - tap gains are `1 / d_sk` (source to node), `d_sk / (d_sk + d_kr)`
//!   (node to receiver) and `1 / d` on the direct path, so a first-order
//!   reflection arrives with amplitude `beta / (d_sk + d_kr)`.
//!
//! Node-to-node lines use allpass interpolation (lossless); taps and the
//! direct path use third-order Lagrange interpolation.

use crate::delay::DelayLine;
use crate::error::{check_positive, check_range, Error, Result};
use crate::filter::LoopFilter;
use crate::interp::FractionalDelay;

/// Minimum node-to-node delay in samples.
const MIN_LINK_DELAY: f64 = 2.0;

/// Frequency-independent or one-pole wall absorption applied to every
/// outgoing node port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Absorption {
    Gain(f64),
    /// `gain * (1 - pole) / (1 - pole z^-1)`.
    OnePole { pole: f64, gain: f64 },
}

impl Absorption {
    fn validate(&self) -> Result<()> {
        match *self {
            Absorption::Gain(g) => {
                check_range("wall_gain", g, (0.0..=1.0).contains(&g), "[0, 1]")?;
            }
            Absorption::OnePole { pole, gain } => {
                check_range("wall_gain", gain, (0.0..=1.0).contains(&gain), "[0, 1]")?;
                check_range("wall_pole", pole, (0.0..1.0).contains(&pole), "[0, 1)")?;
            }
        }
        Ok(())
    }

    fn filter(&self) -> Result<LoopFilter> {
        match *self {
            Absorption::Gain(g) => Ok(LoopFilter::gain(g)),
            Absorption::OnePole { pole, gain } => LoopFilter::one_pole(pole, gain),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(*self, Absorption::Gain(g) if g == 0.0) || matches!(*self, Absorption::OnePole { gain, .. } if gain == 0.0)
    }
}

/// Room geometry, node placement and path delays.
#[derive(Debug, Clone)]
pub struct SdnRoom {
    dims: Vec<f64>,
    source: Vec<f64>,
    receiver: Vec<f64>,
    absorption: Vec<Absorption>,
    nodes: Vec<Vec<f64>>,
    sample_rate: f64,
    sound_speed: f64,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Wall `w` of a room: axis `w / 2`, at coordinate 0 for even `w` and at the
/// room size for odd `w`.
fn wall_plane(dims: &[f64], wall: usize) -> (usize, f64) {
    let axis = wall / 2;
    (axis, if wall.is_multiple_of(2) { 0.0 } else { dims[axis] })
}

impl SdnRoom {
    /// Walls are ordered `x = 0, x = Lx, y = 0, y = Ly[, z = 0, z = Lz]`.
    pub fn new(
        room_dims: &[f64],
        source: &[f64],
        receiver: &[f64],
        absorption: Vec<Absorption>,
        sample_rate: f64,
        sound_speed: f64,
    ) -> Result<Self> {
        let dim = room_dims.len();
        if dim != 2 && dim != 3 {
            return Err(Error::Geometry(format!("room must be 2D or 3D, got {dim} dimensions")));
        }
        for &l in room_dims {
            check_positive("room dimension", l)?;
        }
        check_positive("sample_rate", sample_rate)?;
        check_positive("sound_speed", sound_speed)?;
        for (name, p) in [("source", source), ("receiver", receiver)] {
            if p.len() != dim {
                return Err(Error::Geometry(format!("{name} must have {dim} coordinates")));
            }
            if p.iter().zip(room_dims).any(|(&x, &l)| !(x > 0.0 && x < l)) {
                return Err(Error::Geometry(format!("{name} {p:?} is not strictly inside the room {room_dims:?}")));
            }
        }
        if distance(source, receiver) == 0.0 {
            return Err(Error::Geometry("source and receiver coincide".into()));
        }
        if absorption.len() != 2 * dim {
            return Err(Error::Argument(format!("expected {} wall absorptions, got {}", 2 * dim, absorption.len())));
        }
        for a in &absorption {
            a.validate()?;
        }
        let nodes = (0..2 * dim)
            .map(|w| {
                let (axis, plane) = wall_plane(room_dims, w);
                let mut image = source.to_vec();
                image[axis] = 2.0 * plane - source[axis];
                let t = (plane - image[axis]) / (receiver[axis] - image[axis]);
                let mut p: Vec<f64> = image.iter().zip(receiver).map(|(a, b)| a + t * (b - a)).collect();
                p[axis] = plane;
                p
            })
            .collect();
        Ok(Self {
            dims: room_dims.to_vec(),
            source: source.to_vec(),
            receiver: receiver.to_vec(),
            absorption,
            nodes,
            sample_rate,
            sound_speed,
        })
    }

    pub fn dims(&self) -> &[f64] {
        &self.dims
    }

    pub fn source(&self) -> &[f64] {
        &self.source
    }

    pub fn receiver(&self) -> &[f64] {
        &self.receiver
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn wall_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_positions(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn absorption(&self) -> &[Absorption] {
        &self.absorption
    }

    /// Number of bidirectional node-to-node lines.
    pub fn line_count(&self) -> usize {
        let n = self.wall_count();
        n * (n - 1) / 2
    }

    fn samples(&self, meters: f64) -> f64 {
        meters / self.sound_speed * self.sample_rate
    }

    pub fn direct_distance(&self) -> f64 {
        distance(&self.source, &self.receiver)
    }

    /// Direct-path delay in samples.
    pub fn direct_delay(&self) -> f64 {
        self.samples(self.direct_distance())
    }

    /// `(d_sk, d_kr)` in meters for each wall.
    pub fn tap_distances(&self) -> Vec<(f64, f64)> {
        self.nodes
            .iter()
            .map(|p| (distance(&self.source, p), distance(p, &self.receiver)))
            .collect()
    }

    /// First-order reflection delays in samples, one per wall.
    pub fn first_order_delays(&self) -> Vec<f64> {
        self.tap_distances().iter().map(|&(a, b)| self.samples(a + b)).collect()
    }

    /// Delay in samples of the line from node `j` to node `k`.
    pub fn link_delay(&self, j: usize, k: usize) -> f64 {
        self.samples(distance(&self.nodes[j], &self.nodes[k])).max(MIN_LINK_DELAY)
    }
}

pub fn sdn_build(
    room_dims: &[f64],
    source: &[f64],
    receiver: &[f64],
    wall_gains: &[f64],
    fs: f64,
    c: f64,
) -> Result<SdnRoom> {
    let absorption = wall_gains.iter().map(|&g| Absorption::Gain(g)).collect();
    SdnRoom::new(room_dims, source, receiver, absorption, fs, c)
}

/// One-way path: push, then read through a fractional delay.
#[derive(Debug, Clone)]
struct Tap {
    line: DelayLine,
    interp: FractionalDelay,
    gain: f64,
}

impl Tap {
    fn new(delay: f64, gain: f64) -> Result<Self> {
        let order = if delay >= 1.0 { 3 } else { 1 };
        let interp = FractionalDelay::lagrange(order, delay)?;
        Ok(Self {
            line: DelayLine::new(interp.span() + 1)?,
            interp,
            gain,
        })
    }

    #[inline]
    fn tick(&mut self, x: f64) -> f64 {
        self.line.push(x);
        self.gain * self.interp.read(&self.line)
    }
}

/// Node-to-node line: read last tick's contents, then push.
#[derive(Debug, Clone)]
struct Link {
    line: DelayLine,
    interp: FractionalDelay,
}

impl Link {
    fn new(delay: f64) -> Result<Self> {
        let interp = FractionalDelay::allpass(delay - 1.0)?;
        Ok(Self {
            line: DelayLine::new(interp.span() + 1)?,
            interp,
        })
    }
}

#[derive(Debug, Clone)]
struct Node {
    /// `links[i]` carries waves from the i-th other node into this one.
    links: Vec<Link>,
    /// Index of the sending node for each entry of `links`.
    senders: Vec<usize>,
    filters: Vec<LoopFilter>,
    source_tap: Tap,
    receiver_tap: Tap,
    silent: bool,
}

/// Running network for one render.
#[derive(Debug, Clone)]
pub struct SdnNetwork {
    direct: Tap,
    nodes: Vec<Node>,
    // scratch
    incoming: Vec<Vec<f64>>,
    outgoing: Vec<Vec<f64>>,
}

impl SdnNetwork {
    pub fn new(room: &SdnRoom) -> Result<Self> {
        let n = room.wall_count();
        let direct = Tap::new(room.direct_delay(), 1.0 / room.direct_distance())?;
        let mut nodes = Vec::with_capacity(n);
        for (k, &(dsk, dkr)) in room.tap_distances().iter().enumerate() {
            let senders: Vec<usize> = (0..n).filter(|&j| j != k).collect();
            let links = senders.iter().map(|&j| Link::new(room.link_delay(j, k))).collect::<Result<_>>()?;
            let filters = senders
                .iter()
                .map(|_| room.absorption[k].filter())
                .collect::<Result<_>>()?;
            nodes.push(Node {
                links,
                senders,
                filters,
                source_tap: Tap::new(room.samples(dsk), 1.0 / dsk)?,
                receiver_tap: Tap::new(room.samples(dkr), dsk / (dsk + dkr))?,
                silent: room.absorption[k].is_zero(),
            });
        }
        Ok(Self {
            direct,
            incoming: vec![vec![0.0; n - 1]; n],
            outgoing: vec![vec![0.0; n - 1]; n],
            nodes,
        })
    }

    /// One sample of source input; returns the receiver sample.
    pub fn tick(&mut self, x: f64) -> f64 {
        let mut y = self.direct.tick(x);
        for (node, inc) in self.nodes.iter_mut().zip(self.incoming.iter_mut()) {
            for (v, link) in inc.iter_mut().zip(node.links.iter_mut()) {
                *v = link.interp.read(&link.line);
            }
        }
        let k_ports = (self.nodes.len() - 1) as f64;
        for (k, node) in self.nodes.iter_mut().enumerate() {
            let s = node.source_tap.tick(x);
            let inc = &mut self.incoming[k];
            let out = &mut self.outgoing[k];
            if node.silent {
                out.fill(0.0);
            } else {
                inc.iter_mut().for_each(|p| *p += 0.5 * s);
                let vj = (2.0 / k_ports) * inc.iter().sum::<f64>();
                for ((o, &p), f) in out.iter_mut().zip(inc.iter()).zip(node.filters.iter_mut()) {
                    *o = f.process(vj - p);
                }
            }
            y += node.receiver_tap.tick((2.0 / k_ports) * out.iter().sum::<f64>());
        }
        // outgoing[j][i] goes to the i-th other node of j
        for k in 0..self.nodes.len() {
            for i in 0..self.nodes[k].links.len() {
                let j = self.nodes[k].senders[i];
                let slot = if k < j { k } else { k - 1 };
                let v = self.outgoing[j][slot];
                self.nodes[k].links[i].line.push(v);
            }
        }
        y
    }
}

/// Impulse response of `duration_s` seconds.
pub fn sdn_render_ir(room: &SdnRoom, duration_s: f64) -> Result<Vec<f64>> {
    check_positive("duration", duration_s)?;
    let mut net = SdnNetwork::new(room)?;
    let n = (duration_s * room.sample_rate).round() as usize;
    Ok((0..n).map(|i| net.tick(if i == 0 { 1.0 } else { 0.0 })).collect())
}

/// Schroeder energy decay curve in dB relative to the total energy.
pub fn schroeder_curve(ir: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut edc: Vec<f64> = ir
        .iter()
        .rev()
        .map(|v| {
            acc += v * v;
            acc
        })
        .collect();
    edc.reverse();
    let total = edc.first().copied().unwrap_or(0.0);
    edc.iter().map(|&e| 10.0 * (e / total).log10()).collect()
}

/// Reverberation time from the -5 to -35 dB span of the Schroeder curve,
/// extrapolated to 60 dB by a least-squares line.
pub fn sdn_rt60(ir: &[f64], fs: f64) -> Result<f64> {
    check_positive("fs", fs)?;
    if !ir.iter().any(|&v| v != 0.0) {
        return Err(Error::Measurement("impulse response is silent".into()));
    }
    let edc = schroeder_curve(ir);
    let start = edc.iter().position(|&d| d <= -5.0);
    let end = edc.iter().position(|&d| d <= -35.0);
    let (start, end) = match (start, end) {
        (Some(s), Some(e)) if e > s + 1 => (s, e),
        _ => return Err(Error::Measurement("decay never reaches -35 dB".into())),
    };
    let n = (end - start + 1) as f64;
    let (mut st, mut sd, mut stt, mut std) = (0.0, 0.0, 0.0, 0.0);
    for (i, &d) in edc[start..=end].iter().enumerate() {
        let t = (start + i) as f64 / fs;
        st += t;
        sd += d;
        stt += t * t;
        std += t * d;
    }
    let slope = (n * std - st * sd) / (n * stt - st * st);
    if !(slope < 0.0) {
        return Err(Error::Measurement("energy decay curve is not decreasing".into()));
    }
    Ok(-60.0 / slope)
}
