//! String models: traveling-wave lines, filtered delay loops, commuted
//! synthesis and the bowed string.

pub mod bowed;
pub mod commuted;
pub mod excitation;
pub mod fdl;
pub mod line;

pub use bowed::{BowParams, BowedString, FrictionCurve};
pub use commuted::{commuted_render, convolve_truncated, CommutedOrder};
pub use excitation::Excitation;
pub use fdl::{fdl_render, fdl_tune, fdl_tune_with, FdlParams, FilteredDelayLoop, Interpolation, LoopTuning, Tuning};
pub use line::{terminated_string_render, IdealString, Polarity, TerminatedString, TerminationFilter, TravelingWaveLine};
