//! Fractional-delay interpolators: centered Lagrange FIR and first-order
//! allpass.

use crate::delay::DelayLine;
use crate::error::{check_range, Error, Result};

/// Lagrange interpolation weights for a fractional delay.
///
/// `delay` is measured from the newest of the `order + 1` taps and must lie in
/// the centered window `[(order-1)/2, (order+1)/2]`.
pub fn lagrange_coefficients(order: usize, delay: f64) -> Result<Vec<f64>> {
    if !(1..=5).contains(&order) {
        return Err(Error::Argument(format!(
            "lagrange order must be in 1..=5, got {order}"
        )));
    }
    let lo = (order as f64 - 1.0) / 2.0;
    let hi = (order as f64 + 1.0) / 2.0;
    check_range(
        "delay",
        delay,
        delay >= lo && delay <= hi,
        format!("[{lo}, {hi}] for order {order}"),
    )?;
    Ok(lagrange_weights(order, delay))
}

fn lagrange_weights(order: usize, delay: f64) -> Vec<f64> {
    (0..=order)
        .map(|k| {
            (0..=order)
                .filter(|&m| m != k)
                .map(|m| (delay - m as f64) / (k as f64 - m as f64))
                .product()
        })
        .collect()
}

/// First-order allpass coefficient `(1 - d) / (1 + d)` for `d` in `(0, 1]`.
pub fn allpass_coefficient(fractional_delay: f64) -> Result<f64> {
    let d = check_range(
        "fractional_delay",
        fractional_delay,
        fractional_delay > 0.0 && fractional_delay <= 1.0,
        "(0, 1]",
    )?;
    Ok((1.0 - d) / (1.0 + d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpKind {
    Lagrange,
    Allpass,
}

/// A fractional-delay read head for a [`DelayLine`].
///
/// The requested delay is split into an integer base (absorbed by the line)
/// and a fractional part inside the interpolator's valid window.
#[derive(Debug, Clone)]
pub struct FractionalDelay {
    kind: InterpKind,
    order: usize,
    delay: f64,
    base: usize,
    coefficients: Vec<f64>,
    // allpass memory
    x1: f64,
    y1: f64,
}

impl FractionalDelay {
    pub fn lagrange(order: usize, delay: f64) -> Result<Self> {
        let lo = (order as f64 - 1.0) / 2.0;
        check_range(
            "read_delay",
            delay,
            delay >= lo,
            format!("[{lo}, inf) for lagrange order {order}"),
        )?;
        // place the fraction at the top of the window so integer delays
        // touch no tap beyond the delay itself
        let hi = (order as f64 + 1.0) / 2.0;
        let base = (delay - hi).ceil().max(0.0) as usize;
        let coefficients = lagrange_coefficients(order, delay - base as f64)?;
        Ok(Self {
            kind: InterpKind::Lagrange,
            order,
            delay,
            base,
            coefficients,
            x1: 0.0,
            y1: 0.0,
        })
    }

    pub fn allpass(delay: f64) -> Result<Self> {
        check_range("read_delay", delay, delay > 0.0, "(0, inf) for allpass")?;
        let base = delay.ceil() as usize - 1;
        let a = allpass_coefficient(delay - base as f64)?;
        Ok(Self {
            kind: InterpKind::Allpass,
            order: 1,
            delay,
            base,
            coefficients: vec![a],
            x1: 0.0,
            y1: 0.0,
        })
    }

    pub fn new(kind: InterpKind, order: usize, delay: f64) -> Result<Self> {
        match kind {
            InterpKind::Lagrange => Self::lagrange(order, delay),
            InterpKind::Allpass => Self::allpass(delay),
        }
    }

    pub fn kind(&self) -> InterpKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Total delay in samples (integer base plus fractional part).
    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Integer part absorbed by the delay line.
    pub fn base(&self) -> usize {
        self.base
    }

    /// Delay handled by the interpolator itself.
    pub fn fractional(&self) -> f64 {
        self.delay - self.base as f64
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Oldest tap index touched on the delay line.
    pub fn span(&self) -> usize {
        match self.kind {
            InterpKind::Lagrange => self.base + self.order,
            InterpKind::Allpass => self.base,
        }
    }

    /// Interpolated read relative to the most recent push. Allpass reads must
    /// happen exactly once per tick since the filter carries state.
    #[inline]
    pub fn read(&mut self, line: &DelayLine) -> f64 {
        match self.kind {
            InterpKind::Lagrange => self
                .coefficients
                .iter()
                .enumerate()
                .map(|(k, h)| h * line.get(self.base + k))
                .sum(),
            InterpKind::Allpass => {
                let a = self.coefficients[0];
                let x = line.get(self.base);
                let y = a * x + self.x1 - a * self.y1;
                self.x1 = x;
                self.y1 = y;
                y
            }
        }
    }

    pub fn reset(&mut self) {
        self.x1 = 0.0;
        self.y1 = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rustfft::num_complex::Complex64;

    #[test]
    fn lagrange_examples() {
        assert_eq!(lagrange_coefficients(1, 0.5).unwrap(), vec![0.5, 0.5]);
        assert_eq!(lagrange_coefficients(1, 0.0).unwrap(), vec![1.0, 0.0]);
        let h = lagrange_coefficients(3, 1.5).unwrap();
        let expected = [-0.0625, 0.5625, 0.5625, -0.0625];
        for (a, b) in h.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn lagrange_window_enforced() {
        let err = lagrange_coefficients(3, 0.5).unwrap_err();
        assert!(err.to_string().contains("[1, 2]"), "{err}");
        assert!(lagrange_coefficients(1, 1.01).is_err());
        assert!(lagrange_coefficients(0, 0.0).is_err());
        assert!(lagrange_coefficients(6, 3.0).is_err());
    }

    #[test]
    fn allpass_examples() {
        assert_eq!(allpass_coefficient(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(allpass_coefficient(0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(allpass_coefficient(0.2).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert!(allpass_coefficient(0.0).is_err());
        assert!(allpass_coefficient(1.5).is_err());
        assert!(allpass_coefficient(-0.1).is_err());
    }

    #[test]
    fn allpass_is_unit_magnitude() {
        for d in [0.05, 0.2, 0.5, 0.9, 1.0] {
            let a = allpass_coefficient(d).unwrap();
            for i in 0..1024 {
                let w = std::f64::consts::PI * i as f64 / 1024.0;
                let z1 = Complex64::from_polar(1.0, -w);
                let h = (a + z1) / (1.0 + a * z1);
                assert!((h.norm() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn allpass_low_frequency_phase_delay() {
        for d in [0.2, 0.5, 0.8] {
            let a = allpass_coefficient(d).unwrap();
            let w = 1e-4;
            let z1 = Complex64::from_polar(1.0, -w);
            let h = (a + z1) / (1.0 + a * z1);
            assert_abs_diff_eq!(-h.arg() / w, d, epsilon = 1e-6);
        }
    }

    #[test]
    fn split_into_base_and_fraction() {
        let f = FractionalDelay::lagrange(3, 10.25).unwrap();
        assert_eq!(f.base(), 9);
        assert_abs_diff_eq!(f.fractional(), 1.25);
        let f = FractionalDelay::lagrange(1, 7.0).unwrap();
        assert_eq!((f.base(), f.span()), (6, 7));
        assert_eq!(f.coefficients(), &[0.0, 1.0]);
        assert_eq!(FractionalDelay::lagrange(1, 0.0).unwrap().base(), 0);
        let f = FractionalDelay::allpass(7.0).unwrap();
        assert_eq!((f.base(), f.fractional()), (6, 1.0));
        let f = FractionalDelay::allpass(7.3).unwrap();
        assert_eq!(f.base(), 7);
        assert!(FractionalDelay::allpass(0.0).is_err());
        assert!(FractionalDelay::lagrange(3, 0.5).is_err());
    }

    fn cubic(c: &[f64; 4], t: f64) -> f64 {
        c[0] + t * (c[1] + t * (c[2] + t * c[3]))
    }

    proptest! {
        #[test]
        fn lagrange_sums_to_one(order in 1usize..=5, u in 0.0f64..=1.0) {
            let d = (order as f64 - 1.0) / 2.0 + u;
            let s: f64 = lagrange_coefficients(order, d).unwrap().iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn order_three_reproduces_cubics(
            c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, c3 in -3.0f64..3.0,
            u in 1.0f64..=2.0,
        ) {
            // samples of the cubic at tap positions t = -k, evaluated at t = -u
            let c = [c0, c1, c2, c3];
            let h = lagrange_coefficients(3, u).unwrap();
            let y: f64 = h.iter().enumerate().map(|(k, w)| w * cubic(&c, -(k as f64))).sum();
            prop_assert!((y - cubic(&c, -u)).abs() <= 1e-10);
        }
    }
}
