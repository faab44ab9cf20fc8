//! Small IIR filters used as loop attenuation and termination filters.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{check_range, Error, Result};

/// A rational transfer function `B(z) / A(z)` with `a[0] == 1`, run in
/// transposed direct form II.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopFilter {
    feedforward: Vec<f64>,
    feedback: Vec<f64>,
    state: Vec<f64>,
}

impl LoopFilter {
    /// Builds a filter, normalizing by the leading feedback coefficient and
    /// rejecting unstable denominators.
    pub fn new(feedforward: Vec<f64>, feedback: Vec<f64>) -> Result<Self> {
        if feedforward.is_empty() || feedforward.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument("feedforward coefficients must be finite and non-empty".into()));
        }
        let feedback = if feedback.is_empty() { vec![1.0] } else { feedback };
        if feedback.iter().any(|c| !c.is_finite()) || feedback[0] == 0.0 {
            return Err(Error::Argument("feedback coefficients must be finite with a[0] != 0".into()));
        }
        let a0 = feedback[0];
        let b: Vec<f64> = feedforward.iter().map(|c| c / a0).collect();
        let a: Vec<f64> = feedback.iter().map(|c| c / a0).collect();
        if !is_stable(&a) {
            return Err(Error::Unstable(format!("poles of {a:?} are not inside the unit circle")));
        }
        let order = b.len().max(a.len()) - 1;
        Ok(Self {
            feedforward: b,
            feedback: a,
            state: vec![0.0; order],
        })
    }

    pub fn identity() -> Self {
        Self::gain(1.0)
    }

    pub fn gain(g: f64) -> Self {
        Self {
            feedforward: vec![g],
            feedback: vec![1.0],
            state: Vec::new(),
        }
    }

    /// The Karplus-Strong two-point average `(1 + z^-1) / 2`.
    pub fn averager() -> Self {
        Self {
            feedforward: vec![0.5, 0.5],
            feedback: vec![1.0],
            state: vec![0.0],
        }
    }

    /// Pure one-sample delay.
    pub fn unit_delay() -> Self {
        Self {
            feedforward: vec![0.0, 1.0],
            feedback: vec![1.0],
            state: vec![0.0],
        }
    }

    /// `dc_gain * (1 - p) / (1 - p z^-1)`, unity-normalized at DC.
    pub fn one_pole(pole: f64, dc_gain: f64) -> Result<Self> {
        check_range("pole", pole, pole.abs() < 1.0, "(-1, 1)")?;
        Self::new(vec![dc_gain * (1.0 - pole)], vec![1.0, -pole])
    }

    /// Same filter with the numerator scaled by `g`.
    pub fn scaled(&self, g: f64) -> Self {
        Self {
            feedforward: self.feedforward.iter().map(|c| c * g).collect(),
            feedback: self.feedback.clone(),
            state: vec![0.0; self.state.len()],
        }
    }

    pub fn feedforward(&self) -> &[f64] {
        &self.feedforward
    }

    pub fn feedback(&self) -> &[f64] {
        &self.feedback
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        let b = &self.feedforward;
        let a = &self.feedback;
        let n = self.state.len();
        if n == 0 {
            return b[0] * x;
        }
        let y = b[0] * x + self.state[0];
        for i in 0..n {
            let bi = b.get(i + 1).copied().unwrap_or(0.0);
            let ai = a.get(i + 1).copied().unwrap_or(0.0);
            let next = if i + 1 < n { self.state[i + 1] } else { 0.0 };
            self.state[i] = bi * x - ai * y + next;
        }
        y
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|s| *s = 0.0);
    }

    /// `H(e^{jw})` at normalized radian frequency `w`.
    pub fn response(&self, w: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -w);
        let poly = |c: &[f64]| {
            c.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z1 + ck)
        };
        poly(&self.feedforward) / poly(&self.feedback)
    }

    pub fn magnitude(&self, w: f64) -> f64 {
        self.response(w).norm()
    }

    /// Largest magnitude over a dense frequency grid.
    pub fn peak_magnitude(&self) -> f64 {
        (0..=2048)
            .map(|i| self.magnitude(PI * i as f64 / 2048.0))
            .fold(0.0, f64::max)
    }

    /// DC gain `H(1)`.
    pub fn dc_gain(&self) -> f64 {
        self.feedforward.iter().sum::<f64>() / self.feedback.iter().sum::<f64>()
    }
}

/// Phase delay `-arg H(e^{jw}) / w` in samples, with the phase unwrapped
/// along a path from near DC so it is continuous in frequency.
pub fn filter_phase_delay(filter: &LoopFilter, frequency_hz: f64, sample_rate_hz: f64) -> Result<f64> {
    let nyquist = sample_rate_hz / 2.0;
    check_range(
        "frequency_hz",
        frequency_hz,
        frequency_hz > 0.0 && frequency_hz < nyquist,
        format!("(0, {nyquist})"),
    )?;
    let w = 2.0 * PI * frequency_hz / sample_rate_hz;
    const STEPS: usize = 512;
    let start = w / STEPS as f64;
    let mut phase = filter.response(start).arg();
    let mut prev = phase;
    for i in 2..=STEPS {
        let p = filter.response(start * i as f64).arg();
        let mut d = p - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        phase += d;
        prev = p;
    }
    Ok(-phase / w)
}

/// Schur-Cohn step-down test: every reflection coefficient of the
/// denominator must have magnitude below one.
pub fn is_stable(feedback: &[f64]) -> bool {
    let mut a: Vec<f64> = feedback.iter().map(|c| c / feedback[0]).collect();
    while a.len() > 1 && a[a.len() - 1] == 0.0 {
        a.pop();
    }
    while a.len() > 1 {
        let m = a.len() - 1;
        let k = a[m];
        if k.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - k * k;
        a = (0..m).map(|i| (a[i] - k * a[m - i]) / denom).collect();
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn averager_phase_delay_is_half_sample() {
        let avg = LoopFilter::averager();
        for f in [20.0, 441.0, 1000.0, 5000.0, 12000.0, 20000.0] {
            let pd = filter_phase_delay(&avg, f, 44100.0).unwrap();
            assert_abs_diff_eq!(pd, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn trivial_phase_delays() {
        assert_abs_diff_eq!(filter_phase_delay(&LoopFilter::identity(), 440.0, 44100.0).unwrap(), 0.0);
        let pd = filter_phase_delay(&LoopFilter::unit_delay(), 440.0, 44100.0).unwrap();
        assert_abs_diff_eq!(pd, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nyquist_rejected() {
        let avg = LoopFilter::averager();
        assert!(filter_phase_delay(&avg, 22050.0, 44100.0).is_err());
        assert!(filter_phase_delay(&avg, 0.0, 44100.0).is_err());
    }

    #[test]
    fn phase_unwrapped_for_long_delays() {
        // z^-5 crosses -pi well below Nyquist
        let f = LoopFilter::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0], vec![1.0]).unwrap();
        let pd = filter_phase_delay(&f, 15000.0, 44100.0).unwrap();
        assert_abs_diff_eq!(pd, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn stability_check() {
        assert!(LoopFilter::new(vec![1.0], vec![1.0, -1.2]).is_err());
        assert!(LoopFilter::new(vec![1.0], vec![1.0, -0.9]).is_ok());
        // poles at 0.95 e^{+-j0.3}: stable second order
        let r: f64 = 0.95;
        let a = vec![1.0, -2.0 * r * 0.3f64.cos(), r * r];
        assert!(LoopFilter::new(vec![1.0], a).is_ok());
        // poles at 1.01 e^{+-j0.3}
        let r: f64 = 1.01;
        let a = vec![1.0, -2.0 * r * 0.3f64.cos(), r * r];
        assert!(LoopFilter::new(vec![1.0], a).is_err());
        assert!(is_stable(&[1.0, -0.5, 0.06, 0.0]));
    }

    #[test]
    fn one_pole_unity_dc_and_impulse() {
        let mut f = LoopFilter::one_pole(0.5, 1.0).unwrap();
        assert_abs_diff_eq!(f.dc_gain(), 1.0);
        let h: Vec<f64> = (0..4).map(|n| f.process(if n == 0 { 1.0 } else { 0.0 })).collect();
        assert_eq!(h, vec![0.5, 0.25, 0.125, 0.0625]);
        assert!(LoopFilter::one_pole(1.0, 1.0).is_err());
    }

    #[test]
    fn process_matches_response() {
        // run a sinusoid through a biquad and compare steady-state gain
        let mut f = LoopFilter::new(vec![0.2, 0.3, 0.1], vec![1.0, -0.4, 0.1]).unwrap();
        let w: f64 = 0.37;
        let h = f.response(w);
        let n0 = 2000;
        let mut last = 0.0;
        for n in 0..=n0 {
            last = f.process((w * n as f64).cos());
        }
        let expected = h.norm() * (w * n0 as f64 + h.arg()).cos();
        assert_abs_diff_eq!(last, expected, epsilon = 1e-12);
    }
}
