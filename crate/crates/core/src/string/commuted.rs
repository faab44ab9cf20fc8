//! Commuted synthesis: `y = e * h * b` evaluated in either order.

use crate::error::{Error, Result};

use super::fdl::{FdlParams, FilteredDelayLoop};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutedOrder {
    /// Drive the string with `e`, then filter by the body.
    ExcitationStringBody,
    /// Precompute the pluck response `e * b`, then drive the string with it.
    ExcitationBodyString,
}

/// Direct-form linear convolution truncated to `n` samples.
pub fn convolve_truncated(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0.0 {
            continue;
        }
        for (j, &h) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * h;
        }
    }
    out
}

/// Renders `string.duration` seconds of `e * h * b` where `h` is the string
/// loop described by `string` (its own excitation field is ignored).
pub fn commuted_render(
    excitation: &[f64],
    string: &FdlParams,
    body_ir: &[f64],
    order: CommutedOrder,
) -> Result<Vec<f64>> {
    if excitation.is_empty() || body_ir.is_empty() {
        return Err(Error::Argument("excitation and body impulse response must be non-empty".into()));
    }
    let n = string.n_samples();
    let mut loop_ = FilteredDelayLoop::new(string)?;
    Ok(match order {
        CommutedOrder::ExcitationStringBody => {
            let y = loop_.drive(excitation, n);
            convolve_truncated(&y, body_ir, n)
        }
        CommutedOrder::ExcitationBodyString => {
            let pluck = convolve_truncated(excitation, body_ir, n);
            loop_.drive(&pluck, n)
        }
    })
}
