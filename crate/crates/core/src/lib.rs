//! Digital waveguide physical modeling.

// negated comparisons are how NaN arguments get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod delay;
pub mod error;
pub mod filter;
pub mod interp;
pub mod mesh;
pub mod scattering;
pub mod sdn;
pub mod string;
pub mod table;
pub mod tube;

pub use error::{Error, Result};
