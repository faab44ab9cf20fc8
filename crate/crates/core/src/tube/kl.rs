//! Kelly-Lochbaum piecewise-cylindrical tube ladder in pressure waves.
//!
//! Each section delays one sample one-way. `plus[i]` is the right-going wave
//! arriving at the right end of section `i`, `minus[i]` the left-going wave
//! arriving at its left end.

use crate::error::{check_range, Error, Result};
use crate::scattering::area_reflection_coefficient;

#[derive(Debug, Clone)]
pub struct KellyLochbaumTract {
    areas: Vec<f64>,
    junction_reflections: Vec<f64>,
    glottal_reflection: f64,
    lip_reflection: f64,
    plus: Vec<f64>,
    minus: Vec<f64>,
    next_plus: Vec<f64>,
    next_minus: Vec<f64>,
}

impl KellyLochbaumTract {
    /// `areas` from glottis to lips.
    pub fn new(areas: &[f64], glottal_reflection: f64, lip_reflection: f64) -> Result<Self> {
        if areas.is_empty() {
            return Err(Error::Argument("tract needs at least one section".into()));
        }
        for &a in areas {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Domain { name: "area", value: a });
            }
        }
        check_range("glottal_reflection", glottal_reflection, glottal_reflection.abs() <= 1.0, "[-1, 1]")?;
        check_range("lip_reflection", lip_reflection, lip_reflection.abs() <= 1.0, "[-1, 1]")?;
        let junction_reflections = areas
            .windows(2)
            .map(|w| area_reflection_coefficient(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let m = areas.len();
        Ok(Self {
            areas: areas.to_vec(),
            junction_reflections,
            glottal_reflection,
            lip_reflection,
            plus: vec![0.0; m],
            minus: vec![0.0; m],
            next_plus: vec![0.0; m],
            next_minus: vec![0.0; m],
        })
    }

    pub fn sections(&self) -> usize {
        self.areas.len()
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn junction_reflections(&self) -> &[f64] {
        &self.junction_reflections
    }

    pub fn glottal_reflection(&self) -> f64 {
        self.glottal_reflection
    }

    pub fn lip_reflection(&self) -> f64 {
        self.lip_reflection
    }

    /// Right-going and left-going wave state.
    pub fn waves(&self) -> (&[f64], &[f64]) {
        (&self.plus, &self.minus)
    }

    pub fn set_waves(&mut self, plus: &[f64], minus: &[f64]) -> Result<()> {
        let m = self.sections();
        if plus.len() != m || minus.len() != m {
            return Err(Error::Argument(format!("wave state must have {m} entries per direction")));
        }
        self.plus.copy_from_slice(plus);
        self.minus.copy_from_slice(minus);
        Ok(())
    }

    /// Advances one sample; returns the pressure transmitted at the lips.
    pub fn tick(&mut self, glottal_input: f64) -> f64 {
        let m = self.sections();
        let last = self.plus[m - 1];
        self.next_plus[0] = glottal_input + self.glottal_reflection * self.minus[0];
        for (j, &r) in self.junction_reflections.iter().enumerate() {
            let a = self.plus[j];
            let b = self.minus[j + 1];
            self.next_plus[j + 1] = (1.0 + r) * a - r * b;
            self.next_minus[j] = r * a + (1.0 - r) * b;
        }
        self.next_minus[m - 1] = self.lip_reflection * last;
        std::mem::swap(&mut self.plus, &mut self.next_plus);
        std::mem::swap(&mut self.minus, &mut self.next_minus);
        (1.0 + self.lip_reflection) * last
    }

    pub fn render(&mut self, input: &[f64]) -> Vec<f64> {
        input.iter().map(|&x| self.tick(x)).collect()
    }

    pub fn clear(&mut self) {
        self.plus.fill(0.0);
        self.minus.fill(0.0);
    }
}

pub fn kl_build(areas: &[f64], glottal_reflection: f64, lip_reflection: f64) -> Result<KellyLochbaumTract> {
    KellyLochbaumTract::new(areas, glottal_reflection, lip_reflection)
}

pub fn kl_tick(tract: &mut KellyLochbaumTract, glottal_input: f64) -> f64 {
    tract.tick(glottal_input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn junction_coefficients() {
        assert!(kl_build(&[1.0; 4], 0.0, 0.0).unwrap().junction_reflections().iter().all(|&r| r == 0.0));
        let t = kl_build(&[2.0, 1.0], 0.0, 0.0).unwrap();
        assert!((t.junction_reflections()[0] - 1.0 / 3.0).abs() < 1e-15);
        let t = kl_build(&[1.0, 3.0], 0.0, 0.0).unwrap();
        assert_eq!(t.junction_reflections()[0], -0.5);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(kl_build(&[1.0, 0.0], 0.0, 0.0), Err(Error::Domain { .. })));
        assert!(kl_build(&[1.0, -2.0], 0.0, 0.0).is_err());
        assert!(kl_build(&[1.0], 1.5, 0.0).is_err());
        assert!(kl_build(&[], 0.0, 0.0).is_err());
    }

    #[test]
    fn uniform_tract_is_a_delay() {
        let mut t = kl_build(&[1.0; 8], 0.0, 0.0).unwrap();
        let mut input = vec![0.0; 40];
        input[0] = 1.0;
        let y = t.render(&input);
        for (n, &v) in y.iter().enumerate() {
            assert_eq!(v, if n == 8 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn two_section_direct_arrival() {
        let mut t = kl_build(&[2.0, 1.0], 0.0, 0.0).unwrap();
        let mut input = vec![0.0; 10];
        input[0] = 1.0;
        let y = t.render(&input);
        assert_eq!(y[..2], [0.0, 0.0]);
        assert!((y[2] - 4.0 / 3.0).abs() < 1e-15);
        // transparent ends: the reflected wave leaves through the glottis
        assert!(y[3..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn junction_power_balance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a1: f64 = rng.random_range(0.1..5.0);
            let a2: f64 = rng.random_range(0.1..5.0);
            let r = area_reflection_coefficient(a1, a2).unwrap();
            let a: f64 = rng.random_range(-1.0..1.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            let right = (1.0 + r) * a - r * b;
            let left = r * a + (1.0 - r) * b;
            // power of a pressure wave in a tube of area A is proportional to A p^2
            let p_in = a1 * a * a + a2 * b * b;
            let p_out = a2 * right * right + a1 * left * left;
            assert!((p_in - p_out).abs() <= 1e-12 * p_in.max(1.0));
        }
    }
}
