use thiserror::Error;

/// Errors raised by model construction, processing and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument fell outside its valid interval.
    #[error("{name} = {value} is out of range: must be in {interval}")]
    Range {
        name: &'static str,
        value: f64,
        interval: String,
    },

    /// A physical quantity that must be strictly positive and finite was not.
    #[error("{name} = {value} is outside the domain: must be positive and finite")]
    Domain { name: &'static str, value: f64 },

    #[error("degenerate junction: both sides are {0}")]
    DegenerateJunction(&'static str),

    #[error("junction needs at least 2 ports, got {0}")]
    Arity(usize),

    #[error("unstable filter: {0}")]
    Unstable(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    /// The signal has no periodicity strong enough to assign a pitch.
    #[error("unvoiced signal (peak normalized autocorrelation {0:.3} below threshold)")]
    Unvoiced(f64),

    #[error("measurement failed: {0}")]
    Measurement(String),

    #[error("infeasible target: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { name, value })
    }
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    interval: impl Into<String>,
) -> Result<f64> {
    if ok && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range {
            name,
            value,
            interval: interval.into(),
        })
    }
}
