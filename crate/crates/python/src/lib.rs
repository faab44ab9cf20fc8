//! Python bindings: `import waveguide`.
//!
//! Signals cross the boundary as lists of floats.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use waveguide::calibration::{self, GaConfig, GaModel, Weighting};
use waveguide::filter::LoopFilter;
use waveguide::mesh::{Boundary, MeshGrid};
use waveguide::scattering::{self, Impedance};
use waveguide::sdn::{self, Absorption, SdnRoom};
use waveguide::string::{self, BowParams, BowedString, Excitation, FdlParams, FrictionCurve, Interpolation, TerminationFilter};
use waveguide::tube::{self, ClarinetState, KellyLochbaumTract};
use waveguide::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Range { .. }
        | Error::Domain { .. }
        | Error::DegenerateJunction(_)
        | Error::Arity(_)
        | Error::Argument(_)
        | Error::Geometry(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn impedance(r: f64) -> Impedance {
    if r == 0.0 {
        Impedance::Free
    } else if r.is_infinite() {
        Impedance::Rigid
    } else {
        Impedance::Finite(r)
    }
}

/// Reflection coefficient between impedances `r1` and `r2`
/// (`0.0` is a free end, `inf` a rigid one).
#[pyfunction]
fn reflection_coefficient(r1: f64, r2: f64) -> PyResult<f64> {
    scattering::reflection_coefficient(impedance(r1), impedance(r2)).map_err(py_err)
}

/// `(power_in, power_out)` at a junction with reflection coefficient `r`.
#[pyfunction]
fn junction_power(r: f64, f_plus: f64, v_plus: f64) -> (f64, f64) {
    scattering::junction_power(r, f_plus, v_plus)
}

fn interpolation(name: &str) -> PyResult<Interpolation> {
    match name {
        "linear" => Ok(Interpolation::LINEAR),
        "allpass" => Ok(Interpolation::ALLPASS),
        other => other
            .strip_prefix("lagrange")
            .and_then(|n| n.parse().ok())
            .map(Interpolation::lagrange)
            .ok_or_else(|| PyValueError::new_err(format!("unknown interpolation \"{other}\""))),
    }
}

fn loss_filter(name: &str) -> PyResult<LoopFilter> {
    match name {
        "averager" => Ok(LoopFilter::averager()),
        "none" => Ok(LoopFilter::identity()),
        other => Err(PyValueError::new_err(format!("unknown loss filter \"{other}\""))),
    }
}

#[allow(clippy::too_many_arguments)]
fn fdl_params(
    fs: f64,
    f0: f64,
    loop_gain: f64,
    duration: f64,
    interp: &str,
    filter: &str,
    excitation: &str,
    seed: u64,
) -> PyResult<FdlParams> {
    let mut p = FdlParams::new(fs, f0, loop_gain, duration);
    p.interp = interpolation(interp)?;
    p.loss_filter = loss_filter(filter)?;
    p.excitation = match excitation {
        "noise" => Excitation::NoiseBurst { length: None, seed },
        "pluck" => Excitation::PluckRamp { length: None, peak: 0.5 },
        "impulse" => Excitation::Impulse,
        other => return Err(PyValueError::new_err(format!("unknown excitation \"{other}\""))),
    };
    Ok(p)
}

/// `(integer_delay, fractional_delay)` tuning a loop to `f0`.
#[pyfunction]
#[pyo3(signature = (fs, f0, loss_filter="averager", interpolation="linear"))]
fn fdl_tune(fs: f64, f0: f64, loss_filter: &str, interpolation: &str) -> PyResult<(usize, f64)> {
    let filter = self::loss_filter(loss_filter)?;
    let t = string::fdl_tune(fs, f0, &filter, self::interpolation(interpolation)?).map_err(py_err)?;
    Ok((t.integer_delay, t.fractional_delay))
}

/// Karplus-Strong style plucked string.
#[pyfunction]
#[pyo3(signature = (f0, duration=1.0, loop_gain=0.996, fs=44100.0, interpolation="linear", loss_filter="averager", excitation="noise", seed=0))]
#[allow(clippy::too_many_arguments)]
fn fdl_render(
    f0: f64,
    duration: f64,
    loop_gain: f64,
    fs: f64,
    interpolation: &str,
    loss_filter: &str,
    excitation: &str,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let p = fdl_params(fs, f0, loop_gain, duration, interpolation, loss_filter, excitation, seed)?;
    string::fdl_render(&p).map_err(py_err)
}

/// Commuted synthesis: excitation, string loop and body response.
#[pyfunction]
#[pyo3(signature = (excitation, body, f0, duration=1.0, loop_gain=0.996, fs=44100.0, body_first=false))]
fn commuted_render(
    excitation: Vec<f64>,
    body: Vec<f64>,
    f0: f64,
    duration: f64,
    loop_gain: f64,
    fs: f64,
    body_first: bool,
) -> PyResult<Vec<f64>> {
    let p = FdlParams::new(fs, f0, loop_gain, duration);
    let order = if body_first {
        string::CommutedOrder::ExcitationBodyString
    } else {
        string::CommutedOrder::ExcitationStringBody
    };
    string::commuted_render(&excitation, &p, &body, order).map_err(py_err)
}

/// Bowed string between rigid terminations; returns bridge output.
#[pyfunction]
#[pyo3(signature = (length, n_samples, bow_velocity=0.2, bow_force=0.05, bow_position=0.2, friction_slope=1.0, fs=44100.0))]
fn bowed_render(
    length: usize,
    n_samples: usize,
    bow_velocity: f64,
    bow_force: f64,
    bow_position: f64,
    friction_slope: f64,
    fs: f64,
) -> PyResult<Vec<f64>> {
    let mut s = BowedString::new(
        length,
        bow_position,
        TerminationFilter::rigid(),
        TerminationFilter::rigid(),
        FrictionCurve::Saturating,
        fs,
    )
    .map_err(py_err)?;
    let bow = BowParams {
        bow_velocity,
        bow_force,
        bow_position,
        friction_slope,
    };
    s.render(&bow, n_samples).map_err(py_err)
}

/// Single-reed clarinet with a bore of `bore_delay` samples each way.
#[pyfunction]
#[pyo3(signature = (bore_delay, mouth_pressure, n_samples, fs=44100.0))]
fn clarinet_render(bore_delay: usize, mouth_pressure: f64, n_samples: usize, fs: f64) -> PyResult<Vec<f64>> {
    let mut st = ClarinetState::with_bore(bore_delay, fs).map_err(py_err)?;
    tube::clarinet_render(&mut st, &vec![mouth_pressure; n_samples], n_samples).map_err(py_err)
}

/// Kelly-Lochbaum vocal tract.
#[pyclass(name = "KellyLochbaum")]
struct PyKellyLochbaum(KellyLochbaumTract);

#[pymethods]
impl PyKellyLochbaum {
    #[new]
    #[pyo3(signature = (areas, glottal_reflection=0.75, lip_reflection=-0.85))]
    fn new(areas: Vec<f64>, glottal_reflection: f64, lip_reflection: f64) -> PyResult<Self> {
        tube::kl_build(&areas, glottal_reflection, lip_reflection).map(Self).map_err(py_err)
    }

    fn render(&mut self, input: Vec<f64>) -> Vec<f64> {
        self.0.render(&input)
    }
}

/// Rectilinear 2-D waveguide mesh.
#[pyclass(name = "Mesh")]
struct PyMesh(MeshGrid);

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (width, height, reflection=-1.0))]
    fn new(width: usize, height: usize, reflection: f64) -> PyResult<Self> {
        MeshGrid::new(width, height, Boundary::uniform(reflection)).map(Self).map_err(py_err)
    }

    #[pyo3(signature = (steps=1))]
    fn step(&mut self, steps: usize) {
        for _ in 0..steps {
            self.0.step();
        }
    }

    fn excite(&mut self, x: usize, y: usize, amplitude: f64) -> PyResult<()> {
        self.0.excite(x, y, amplitude).map_err(py_err)
    }

    fn read(&self, x: usize, y: usize) -> PyResult<f64> {
        self.0.read(x, y).map_err(py_err)
    }

    fn energy(&self) -> f64 {
        self.0.energy()
    }
}

/// Scattering delay network room.
#[pyclass(name = "Room")]
struct PyRoom(SdnRoom);

#[pymethods]
impl PyRoom {
    /// `wall_gains` holds one gain per wall, or a single value for all.
    #[new]
    #[pyo3(signature = (dims, source, receiver, wall_gains, fs=44100.0, c=343.0))]
    fn new(dims: Vec<f64>, source: Vec<f64>, receiver: Vec<f64>, wall_gains: Vec<f64>, fs: f64, c: f64) -> PyResult<Self> {
        let gains = match wall_gains.as_slice() {
            [g] => vec![*g; 2 * dims.len()],
            _ => wall_gains,
        };
        let absorption = gains.into_iter().map(Absorption::Gain).collect();
        SdnRoom::new(&dims, &source, &receiver, absorption, fs, c).map(Self).map_err(py_err)
    }

    #[getter]
    fn direct_delay(&self) -> f64 {
        self.0.direct_delay()
    }

    fn impulse_response(&self, duration: f64) -> PyResult<Vec<f64>> {
        sdn::sdn_render_ir(&self.0, duration).map_err(py_err)
    }
}

/// Reverberation time of an impulse response in seconds.
#[pyfunction]
#[pyo3(signature = (ir, fs=44100.0))]
fn rt60(ir: Vec<f64>, fs: f64) -> PyResult<f64> {
    sdn::sdn_rt60(&ir, fs).map_err(py_err)
}

/// Fundamental frequency in Hz; raises ValueError for unvoiced input.
#[pyfunction]
#[pyo3(signature = (signal, fs=44100.0))]
fn estimate_f0(signal: Vec<f64>, fs: f64) -> PyResult<f64> {
    calibration::estimate_f0(&signal, fs).map_err(|e| match e {
        Error::Unvoiced(_) => PyValueError::new_err(e.to_string()),
        other => py_err(other),
    })
}

/// Damped sinusoids as `(amplitude, frequency_hz, damping, phase)` tuples.
#[pyfunction]
#[pyo3(signature = (signal, fs=44100.0, max_modes=8))]
fn modal_fit(signal: Vec<f64>, fs: f64, max_modes: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let modes = calibration::modal_fit(&signal, fs, max_modes).map_err(py_err)?;
    Ok(modes.iter().map(|m| (m.amplitude, m.frequency_hz(), m.damping, m.phase)).collect())
}

/// Fits `(f0, loop_gain)` of a plucked string to `target`. Returns
/// `(f0, loop_gain, fitness)`.
#[pyfunction]
#[pyo3(signature = (target, fs=44100.0, population=64, generations=60, seed=0))]
fn calibrate_fdl(target: Vec<f64>, fs: f64, population: usize, generations: usize, seed: u64) -> PyResult<(f64, f64, f64)> {
    let f0 = calibration::estimate_f0(&target, fs).map_err(py_err)?;
    let mut template = FdlParams::new(fs, f0, 0.99, target.len() as f64 / fs);
    template.excitation = Excitation::NoiseBurst { length: None, seed };
    let config = GaConfig {
        population,
        generations,
        bounds: vec![(f0 / 1.25, (f0 * 1.25).min(0.45 * fs)), (0.9, 1.0)],
        mutation_rate: 0.25,
        crossover_rate: 0.7,
        harmonic_count: 10,
        weighting: Weighting::Db,
        seed,
    };
    let r = calibration::ga_optimize(&target, fs, GaModel::Fdl(template), &config).map_err(py_err)?;
    Ok((r.params[0], r.params[1], r.fitness))
}

#[pymodule]
#[pyo3(name = "waveguide")]
fn waveguide_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(reflection_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(junction_power, m)?)?;
    m.add_function(wrap_pyfunction!(fdl_tune, m)?)?;
    m.add_function(wrap_pyfunction!(fdl_render, m)?)?;
    m.add_function(wrap_pyfunction!(commuted_render, m)?)?;
    m.add_function(wrap_pyfunction!(bowed_render, m)?)?;
    m.add_function(wrap_pyfunction!(clarinet_render, m)?)?;
    m.add_function(wrap_pyfunction!(rt60, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_f0, m)?)?;
    m.add_function(wrap_pyfunction!(modal_fit, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_fdl, m)?)?;
    m.add_class::<PyKellyLochbaum>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyRoom>()?;
    Ok(())
}
