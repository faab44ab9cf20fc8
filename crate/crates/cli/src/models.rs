//! Per-model parameter schemas and rendering.

use waveguide::calibration::{synthesize, ModalComponent};
use waveguide::filter::LoopFilter;
use waveguide::mesh::{Boundary, MeshGrid};
use waveguide::scattering::StringMedium;
use waveguide::sdn::{sdn_render_ir, Absorption, SdnRoom};
use waveguide::string::{
    commuted_render, terminated_string_render, BowParams, BowedString, CommutedOrder, Excitation, FdlParams,
    FrictionCurve, IdealString, Interpolation, Polarity, TerminationFilter, TravelingWaveLine, Tuning,
};
use waveguide::tube::{clarinet_render, ClarinetState, KellyLochbaumTract, ReedTable};

use crate::config::{ConfigError, Fields};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    IdealString,
    TerminatedString,
    Fdl,
    Commuted,
    BowedString,
    KellyLochbaum,
    Clarinet,
    Mesh2d,
    Sdn,
}

const ALL: [Model; 9] = [
    Model::IdealString,
    Model::TerminatedString,
    Model::Fdl,
    Model::Commuted,
    Model::BowedString,
    Model::KellyLochbaum,
    Model::Clarinet,
    Model::Mesh2d,
    Model::Sdn,
];

impl Model {
    pub fn all() -> &'static [Model] {
        &ALL
    }

    pub fn names() -> Vec<&'static str> {
        ALL.iter().map(|m| m.name()).collect()
    }

    pub fn from_name(name: &str) -> Option<Model> {
        ALL.iter().copied().find(|m| m.name() == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::IdealString => "ideal_string",
            Model::TerminatedString => "terminated_string",
            Model::Fdl => "fdl",
            Model::Commuted => "commuted",
            Model::BowedString => "bowed_string",
            Model::KellyLochbaum => "kelly_lochbaum",
            Model::Clarinet => "clarinet",
            Model::Mesh2d => "mesh2d",
            Model::Sdn => "sdn",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            Model::IdealString => "lossless string, rigid ends",
            Model::TerminatedString => "string with a lowpass bridge reflection",
            Model::Fdl => "filtered delay loop (extended Karplus-Strong)",
            Model::Commuted => "plucked string with a modal body, commuted",
            Model::BowedString => "bowed string with a friction junction",
            Model::KellyLochbaum => "piecewise-cylindrical vocal tract",
            Model::Clarinet => "reed and cylindrical bore",
            Model::Mesh2d => "rectilinear membrane mesh",
            Model::Sdn => "scattering delay network room impulse response",
        }
    }

    /// `(name, default)` pairs shown by `list-models`.
    pub fn parameters(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            Model::IdealString => &[
                ("length", "100"),
                ("excite_at", "length/5"),
                ("pickup", "length/2"),
                ("excitation", "\"pluck\" | \"noise\" | \"impulse\""),
            ],
            Model::TerminatedString => &[
                ("length", "100"),
                ("bridge_gain", "0.99"),
                ("excite_at", "length/5"),
                ("pickup", "length/2"),
                ("excitation", "\"pluck\" | \"noise\" | \"impulse\""),
            ],
            Model::Fdl => &[
                ("f0", "required"),
                ("loop_gain", "0.996"),
                ("loss_filter", "\"averager\" | \"one_pole\" | \"none\""),
                ("loss_pole", "0.5"),
                ("interpolation", "\"linear\" | \"allpass\" | \"lagrange3\""),
                ("tuning", "\"compensated\" | \"rounded\""),
                ("excitation", "\"noise\" | \"pluck\" | \"impulse\""),
            ],
            Model::Commuted => &[
                ("f0", "required"),
                ("loop_gain", "0.996"),
                ("excitation", "\"noise\" | \"pluck\" | \"impulse\""),
                ("body_modes", "[[hz, damping, amplitude], ...]"),
                ("body_length", "0.1 s"),
                ("order", "\"string_body\" | \"body_string\""),
            ],
            Model::BowedString => &[
                ("f0", "220"),
                ("bow_position", "0.2"),
                ("bow_velocity", "0.2"),
                ("bow_force", "0.05"),
                ("friction_slope", "1.0"),
            ],
            Model::KellyLochbaum => &[
                ("areas", "17 sections, /a/-like"),
                ("glottal_reflection", "0.75"),
                ("lip_reflection", "-0.85"),
                ("f0", "110"),
                ("source", "\"pulse\" | \"impulse\" | \"noise\""),
            ],
            Model::Clarinet => &[
                ("f0", "220"),
                ("mouth_pressure", "1.2"),
                ("attack", "0.01 s"),
                ("embouchure", "0.7"),
                ("reed_slope", "0.3"),
                ("bell_pole", "0.5"),
                ("bell_gain", "0.95"),
            ],
            Model::Mesh2d => &[
                ("width", "32"),
                ("height", "32"),
                ("boundary", "-1.0"),
                ("excite", "[width/2, height/2]"),
                ("pickup", "[width/4, height/4]"),
            ],
            Model::Sdn => &[
                ("room", "[5.0, 4.0]"),
                ("source", "[1.2, 1.5]"),
                ("receiver", "[3.7, 2.9]"),
                ("wall_gain", "0.9 (or one per wall)"),
                ("wall_pole", "0.0"),
                ("sound_speed", "343.0"),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Pluck,
    Noise,
    Impulse,
}

impl Shape {
    fn excitation(&self, seed: u64) -> Excitation {
        match self {
            Shape::Pluck => Excitation::PluckRamp { length: None, peak: 0.3 },
            Shape::Noise => Excitation::NoiseBurst { length: None, seed },
            Shape::Impulse => Excitation::Impulse,
        }
    }
}

/// Glottal source of the vocal tract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Pulse,
    Impulse,
    Noise,
}

fn shape(f: &mut Fields, key: &str, choices: &[&'static str]) -> Result<Shape, ConfigError> {
    Ok(match f.choice(key, choices)? {
        "pluck" => Shape::Pluck,
        "noise" => Shape::Noise,
        _ => Shape::Impulse,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StringLine {
    pub length: usize,
    pub excite_at: usize,
    pub pickup: usize,
    pub excitation: Shape,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum ModelParams {
    IdealString(StringLine),
    TerminatedString { line: StringLine, bridge_gain: f64 },
    Fdl(FdlParams),
    Commuted { string: FdlParams, body: Vec<ModalComponent>, body_length: usize, order: CommutedOrder },
    BowedString { length: usize, bow: BowParams },
    KellyLochbaum { areas: Vec<f64>, glottal_reflection: f64, lip_reflection: f64, period: usize, source: Source, seed: u64 },
    Clarinet { bore_delay: usize, mouth_pressure: f64, attack: usize, reed: ReedTable, bell_pole: f64, bell_gain: f64 },
    Mesh2d { width: usize, height: usize, boundary: Boundary, excite: (usize, usize), pickup: (usize, usize) },
    Sdn(SdnRoom),
}

/// Vocal-tract areas in cm^2, glottis to lips, for an open vowel.
const DEFAULT_AREAS: [f64; 17] = [
    0.6, 0.9, 1.3, 1.6, 1.1, 0.8, 0.6, 0.7, 1.0, 1.6, 2.4, 3.2, 4.0, 4.6, 5.0, 5.2, 5.0,
];

const DEFAULT_BODY: [[f64; 3]; 3] = [[180.0, 12.0, 1.0], [420.0, 20.0, 0.6], [1100.0, 35.0, 0.3]];

fn core_error(f: &Fields, key: &str, e: waveguide::Error) -> ConfigError {
    let field = match &e {
        waveguide::Error::Range { name, .. } | waveguide::Error::Domain { name, .. } => name,
        _ => key,
    };
    f.error(field, e.to_string())
}

fn check(f: &Fields, key: &str, value: f64, ok: bool, constraint: &str) -> Result<f64, ConfigError> {
    if ok && value.is_finite() {
        Ok(value)
    } else {
        Err(f.error(key, format!("{constraint}, got {value}")))
    }
}

fn frequency(f: &mut Fields, key: &str, default: Option<f64>, fs: f64) -> Result<f64, ConfigError> {
    let v = match default {
        Some(d) => f.f64_or(key, d)?,
        None => f.req_f64(key)?,
    };
    check(f, key, v, v > 0.0 && v < fs / 2.0, "must be positive and below fs/2")
}

fn unit_interval(f: &mut Fields, key: &str, default: f64, open_low: bool) -> Result<f64, ConfigError> {
    let v = f.f64_or(key, default)?;
    let ok = if open_low { v > 0.0 && v <= 1.0 } else { (0.0..=1.0).contains(&v) };
    check(f, key, v, ok, if open_low { "must be in (0, 1]" } else { "must be in [0, 1]" })
}

fn string_line(f: &mut Fields, seed: u64) -> Result<StringLine, ConfigError> {
    let length = f.usize_or("length", 100)?;
    if length < 4 {
        return Err(f.error("length", format!("must be at least 4 samples, got {length}")));
    }
    let excite_at = f.usize_or("excite_at", length / 5)?;
    let pickup = f.usize_or("pickup", length / 2)?;
    for (key, v) in [("excite_at", excite_at), ("pickup", pickup)] {
        if v >= length {
            return Err(f.error(key, format!("must be below length ({length}), got {v}")));
        }
    }
    let excitation = shape(f, "excitation", &["pluck", "noise", "impulse"])?;
    Ok(StringLine {
        length,
        excite_at,
        pickup,
        excitation,
        seed,
    })
}

fn fdl_params(f: &mut Fields, fs: f64, duration: f64, seed: u64, with_filter: bool) -> Result<FdlParams, ConfigError> {
    let f0 = frequency(f, "f0", None, fs)?;
    let loop_gain = unit_interval(f, "loop_gain", 0.996, true)?;
    let mut p = FdlParams::new(fs, f0, loop_gain, duration);
    p.excitation = shape(f, "excitation", &["noise", "pluck", "impulse"])?.excitation(seed);
    if with_filter {
        p.loss_filter = match f.choice("loss_filter", &["averager", "one_pole", "none"])? {
            "averager" => LoopFilter::averager(),
            "none" => LoopFilter::identity(),
            _ => {
                let pole = f.f64_or("loss_pole", 0.5)?;
                let pole = check(f, "loss_pole", pole, (0.0..1.0).contains(&pole), "must be in [0, 1)")?;
                LoopFilter::one_pole(pole, 1.0).map_err(|e| core_error(f, "loss_pole", e))?
            }
        };
        p.interp = match f.choice("interpolation", &["linear", "allpass", "lagrange3"])? {
            "linear" => Interpolation::LINEAR,
            "allpass" => Interpolation::ALLPASS,
            _ => Interpolation::lagrange(3),
        };
        p.tuning = match f.choice("tuning", &["compensated", "rounded"])? {
            "compensated" => Tuning::Compensated,
            _ => Tuning::Rounded,
        };
    }
    p.validate().map_err(|e| core_error(f, "f0", e))?;
    Ok(p)
}

fn point(f: &mut Fields, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
    Ok(f.opt_f64_array(key)?.unwrap_or_else(|| default.to_vec()))
}

fn cell(f: &mut Fields, key: &str, default: (usize, usize), w: usize, h: usize) -> Result<(usize, usize), ConfigError> {
    match f.opt_f64_array(key)? {
        None => Ok(default),
        Some(v) if v.len() == 2 && v.iter().all(|x| x.fract() == 0.0 && *x >= 0.0) && (v[0] as usize) < w && (v[1] as usize) < h => {
            Ok((v[0] as usize, v[1] as usize))
        }
        Some(v) => Err(f.error(key, format!("must be [x, y] integers inside the {w}x{h} mesh, got {v:?}"))),
    }
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::IdealString(_) => Model::IdealString,
            ModelParams::TerminatedString { .. } => Model::TerminatedString,
            ModelParams::Fdl(_) => Model::Fdl,
            ModelParams::Commuted { .. } => Model::Commuted,
            ModelParams::BowedString { .. } => Model::BowedString,
            ModelParams::KellyLochbaum { .. } => Model::KellyLochbaum,
            ModelParams::Clarinet { .. } => Model::Clarinet,
            ModelParams::Mesh2d { .. } => Model::Mesh2d,
            ModelParams::Sdn(_) => Model::Sdn,
        }
    }

    pub(crate) fn parse(model: Model, f: &mut Fields, fs: f64, duration: f64, seed: u64) -> Result<Self, ConfigError> {
        Ok(match model {
            Model::IdealString => ModelParams::IdealString(string_line(f, seed)?),
            Model::TerminatedString => ModelParams::TerminatedString {
                bridge_gain: unit_interval(f, "bridge_gain", 0.99, true)?,
                line: string_line(f, seed)?,
            },
            Model::Fdl => ModelParams::Fdl(fdl_params(f, fs, duration, seed, true)?),
            Model::Commuted => {
                let string = fdl_params(f, fs, duration, seed, false)?;
                let rows = f
                    .opt_f64_rows("body_modes", 3)?
                    .unwrap_or_else(|| DEFAULT_BODY.iter().map(|r| r.to_vec()).collect());
                if rows.is_empty() {
                    return Err(f.error("body_modes", "must list at least one mode"));
                }
                let mut body = Vec::with_capacity(rows.len());
                for r in rows {
                    if !(r[0] > 0.0 && r[0] < fs / 2.0 && r[1] >= 0.0) {
                        return Err(f.error("body_modes", format!("mode {r:?}: frequency must be in (0, fs/2) and damping non-negative")));
                    }
                    body.push(ModalComponent::from_hz(r[2], r[0], r[1], 0.0));
                }
                let body_length = f.f64_or("body_length", 0.1)?;
                let body_length = check(f, "body_length", body_length, body_length > 0.0 && body_length <= 10.0, "must be in (0, 10] s")?;
                let order = match f.choice("order", &["string_body", "body_string"])? {
                    "string_body" => CommutedOrder::ExcitationStringBody,
                    _ => CommutedOrder::ExcitationBodyString,
                };
                ModelParams::Commuted {
                    string,
                    body,
                    body_length: ((body_length * fs).round() as usize).max(1),
                    order,
                }
            }
            Model::BowedString => {
                let f0 = frequency(f, "f0", Some(220.0), fs)?;
                let length = (fs / (2.0 * f0)).round() as usize;
                if length < 4 {
                    return Err(f.error("f0", format!("{f0} Hz leaves fewer than 4 samples of string at fs = {fs}")));
                }
                let bow = BowParams {
                    bow_position: f.f64_or("bow_position", 0.2)?,
                    bow_velocity: f.f64_or("bow_velocity", 0.2)?,
                    bow_force: f.f64_or("bow_force", 0.05)?,
                    friction_slope: f.f64_or("friction_slope", 1.0)?,
                };
                bow.validate().map_err(|e| core_error(f, "bow_force", e))?;
                ModelParams::BowedString { length, bow }
            }
            Model::KellyLochbaum => {
                let areas = f.opt_f64_array("areas")?.unwrap_or_else(|| DEFAULT_AREAS.to_vec());
                let glottal_reflection = f.f64_or("glottal_reflection", 0.75)?;
                let lip_reflection = f.f64_or("lip_reflection", -0.85)?;
                KellyLochbaumTract::new(&areas, glottal_reflection, lip_reflection).map_err(|e| core_error(f, "areas", e))?;
                let f0 = frequency(f, "f0", Some(110.0), fs)?;
                ModelParams::KellyLochbaum {
                    areas,
                    glottal_reflection,
                    lip_reflection,
                    period: ((fs / f0).round() as usize).max(1),
                    source: match f.choice("source", &["pulse", "impulse", "noise"])? {
                        "pulse" => Source::Pulse,
                        "impulse" => Source::Impulse,
                        _ => Source::Noise,
                    },
                    seed,
                }
            }
            Model::Clarinet => {
                let f0 = frequency(f, "f0", Some(220.0), fs)?;
                let bore_delay = (fs / (4.0 * f0)).round() as usize;
                if bore_delay < 2 {
                    return Err(f.error("f0", format!("{f0} Hz leaves a bore shorter than 2 samples at fs = {fs}")));
                }
                let mouth_pressure = f.f64_or("mouth_pressure", 1.2)?;
                let mouth_pressure = check(f, "mouth_pressure", mouth_pressure, (0.0..=4.0).contains(&mouth_pressure), "must be in [0, 4]")?;
                let attack = f.f64_or("attack", 0.01)?;
                let attack = check(f, "attack", attack, attack >= 0.0, "must be non-negative")?;
                let embouchure = unit_interval(f, "embouchure", 0.7, false)?;
                let slope = f.f64_or("reed_slope", 0.3)?;
                let reed = ReedTable::with_slope(embouchure, slope, 256).map_err(|e| core_error(f, "reed_slope", e))?;
                let bell_pole = f.f64_or("bell_pole", 0.5)?;
                let bell_gain = f.f64_or("bell_gain", 0.95)?;
                ClarinetState::new(bore_delay, reed.clone(), bell_pole, bell_gain, fs).map_err(|e| core_error(f, "bell_gain", e))?;
                ModelParams::Clarinet {
                    bore_delay,
                    mouth_pressure,
                    attack: (attack * fs).round() as usize,
                    reed,
                    bell_pole,
                    bell_gain,
                }
            }
            Model::Mesh2d => {
                let width = f.usize_or("width", 32)?;
                let height = f.usize_or("height", 32)?;
                for (key, v) in [("width", width), ("height", height)] {
                    if !(2..=1024).contains(&v) {
                        return Err(f.error(key, format!("must be in [2, 1024], got {v}")));
                    }
                }
                let r = f.f64_or("boundary", -1.0)?;
                let r = check(f, "boundary", r, r.abs() <= 1.0, "must be in [-1, 1]")?;
                ModelParams::Mesh2d {
                    width,
                    height,
                    boundary: Boundary::uniform(r),
                    excite: cell(f, "excite", (width / 2, height / 2), width, height)?,
                    pickup: cell(f, "pickup", (width / 4, height / 4), width, height)?,
                }
            }
            Model::Sdn => {
                let room = point(f, "room", &[5.0, 4.0])?;
                let source = point(f, "source", &[1.2, 1.5])?;
                let receiver = point(f, "receiver", &[3.7, 2.9])?;
                let walls = 2 * room.len();
                let gains = f.opt_numbers("wall_gain")?.unwrap_or(vec![0.9]);
                // a single value applies to every wall
                let gains = if gains.len() == 1 { vec![gains[0]; walls] } else { gains };
                if gains.len() != walls {
                    return Err(f.error("wall_gain", format!("must be a number or {walls} numbers, got {}", gains.len())));
                }
                for &g in &gains {
                    check(f, "wall_gain", g, (0.0..=1.0).contains(&g), "must be in [0, 1]")?;
                }
                let pole = f.f64_or("wall_pole", 0.0)?;
                let pole = check(f, "wall_pole", pole, (0.0..1.0).contains(&pole), "must be in [0, 1)")?;
                let c = f.f64_or("sound_speed", 343.0)?;
                let c = check(f, "sound_speed", c, c > 0.0, "must be positive")?;
                let absorption = gains
                    .iter()
                    .map(|&gain| if pole == 0.0 { Absorption::Gain(gain) } else { Absorption::OnePole { pole, gain } })
                    .collect();
                let room = SdnRoom::new(&room, &source, &receiver, absorption, fs, c).map_err(|e| core_error(f, "room", e))?;
                ModelParams::Sdn(room)
            }
        })
    }

    /// Renders `n` samples at `fs`.
    pub fn render(&self, fs: f64, n: usize) -> waveguide::Result<Vec<f64>> {
        let line = |m: usize| TravelingWaveLine::new(m, StringMedium::default(), fs);
        match self {
            ModelParams::IdealString(s) => {
                let e = s.excitation.excitation(s.seed).samples(2 * s.length)?;
                let mut string = IdealString::new(line(s.length)?);
                (0..n)
                    .map(|i| string.tick(e.get(i).map(|&v| (s.excite_at, v)), s.pickup))
                    .collect()
            }
            ModelParams::TerminatedString { line: s, bridge_gain } => {
                let e = s.excitation.excitation(s.seed).samples(2 * s.length)?;
                let bridge = TerminationFilter::new(LoopFilter::averager().scaled(*bridge_gain), Polarity::Inverting)?;
                terminated_string_render(line(s.length)?, bridge, TerminationFilter::rigid(), &e, s.excite_at, s.pickup, n)
            }
            ModelParams::Fdl(p) => {
                let mut p = p.clone();
                p.duration = n as f64 / fs;
                let mut y = waveguide::string::fdl_render(&p)?;
                y.resize(n, 0.0);
                Ok(y)
            }
            ModelParams::Commuted {
                string,
                body,
                body_length,
                order,
            } => {
                let mut p = string.clone();
                p.duration = n as f64 / fs;
                let e = p.excitation.samples(p.validate()?.integer_delay)?;
                let b = synthesize(body, fs, *body_length);
                let mut y = commuted_render(&e, &p, &b, *order)?;
                y.resize(n, 0.0);
                Ok(y)
            }
            ModelParams::BowedString { length, bow } => {
                let mut s = BowedString::new(
                    *length,
                    bow.bow_position,
                    TerminationFilter::rigid(),
                    TerminationFilter::rigid(),
                    FrictionCurve::Saturating,
                    fs,
                )?;
                s.render(bow, n)
            }
            ModelParams::KellyLochbaum {
                areas,
                glottal_reflection,
                lip_reflection,
                period,
                source,
                seed,
            } => {
                let mut tract = KellyLochbaumTract::new(areas, *glottal_reflection, *lip_reflection)?;
                let input: Vec<f64> = match source {
                    Source::Pulse => {
                        // derivative of a raised-cosine glottal pulse open
                        // for 40% of each period
                        let open = (0.4 * *period as f64).max(1.0);
                        let flow = |i: usize| {
                            let t = (i % period) as f64;
                            if t < open {
                                0.5 - 0.5 * (2.0 * std::f64::consts::PI * t / open).cos()
                            } else {
                                0.0
                            }
                        };
                        let scale = open / std::f64::consts::PI;
                        (0..n).map(|i| scale * (flow(i) - if i > 0 { flow(i - 1) } else { 0.0 })).collect()
                    }
                    Source::Impulse => (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
                    Source::Noise => {
                        let mut e = Excitation::NoiseBurst { length: None, seed: *seed }.samples(n.max(1))?;
                        e.truncate(n);
                        e.iter_mut().for_each(|v| *v *= 0.1);
                        e
                    }
                };
                Ok(tract.render(&input))
            }
            ModelParams::Clarinet {
                bore_delay,
                mouth_pressure,
                attack,
                reed,
                bell_pole,
                bell_gain,
            } => {
                let mut state = ClarinetState::new(*bore_delay, reed.clone(), *bell_pole, *bell_gain, fs)?;
                let env: Vec<f64> = (0..n)
                    .map(|i| if i < *attack { mouth_pressure * i as f64 / *attack as f64 } else { *mouth_pressure })
                    .collect();
                clarinet_render(&mut state, &env, n)
            }
            ModelParams::Mesh2d {
                width,
                height,
                boundary,
                excite,
                pickup,
            } => {
                let mut grid = MeshGrid::new(*width, *height, *boundary)?;
                grid.excite(excite.0, excite.1, 1.0)?;
                let mut y = Vec::with_capacity(n);
                for _ in 0..n {
                    y.push(grid.read(pickup.0, pickup.1)?);
                    grid.step();
                }
                Ok(y)
            }
            ModelParams::Sdn(room) => {
                let mut y = sdn_render_ir(room, n as f64 / fs)?;
                y.resize(n, 0.0);
                Ok(y)
            }
        }
    }
}
