use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Excitation signal `e[n]` fed into a string loop.
///
/// `NoiseBurst` draws uniform samples in `[-1, 1)` from a ChaCha8 stream
/// seeded with `seed` (`rand`'s standard uniform `f64` sampler), so renders
/// are reproducible across platforms.
#[derive(Debug, Clone, PartialEq)]
pub enum Excitation {
    /// `length: None` means one loop length.
    NoiseBurst { length: Option<usize>, seed: u64 },
    /// Triangular pluck shape peaking at fraction `peak` of its length.
    PluckRamp { length: Option<usize>, peak: f64 },
    Impulse,
    Samples(Vec<f64>),
}

impl Excitation {
    /// Materializes the excitation for a loop of `loop_length` samples.
    pub fn samples(&self, loop_length: usize) -> Result<Vec<f64>> {
        let fit = |length: Option<usize>| -> Result<usize> {
            let n = length.unwrap_or(loop_length);
            if n == 0 {
                return Err(Error::Argument("excitation length must be at least 1".into()));
            }
            Ok(n)
        };
        Ok(match self {
            Excitation::NoiseBurst { length, seed } => {
                let n = fit(*length)?;
                if n > loop_length.max(1) {
                    return Err(Error::Argument(format!(
                        "noise burst of {n} samples exceeds the loop length {loop_length}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
            }
            Excitation::PluckRamp { length, peak } => {
                let n = fit(*length)?;
                if !(*peak > 0.0 && *peak < 1.0) {
                    return Err(Error::Argument(format!("pluck peak {peak} must be in (0, 1)")));
                }
                let top = peak * n as f64;
                (0..n)
                    .map(|i| {
                        let x = i as f64 + 0.5;
                        if x <= top {
                            x / top
                        } else {
                            (n as f64 - x) / (n as f64 - top)
                        }
                    })
                    .collect()
            }
            Excitation::Impulse => vec![1.0],
            Excitation::Samples(s) => {
                if s.is_empty() {
                    return Err(Error::Argument("excitation samples are empty".into()));
                }
                s.clone()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_seeded_and_bounded() {
        let e = Excitation::NoiseBurst { length: None, seed: 42 };
        let a = e.samples(100).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a, e.samples(100).unwrap());
        assert!(a.iter().all(|x| (-1.0..1.0).contains(x)));
        let b = Excitation::NoiseBurst { length: None, seed: 43 }.samples(100).unwrap();
        assert_ne!(a, b);
        assert!(Excitation::NoiseBurst { length: Some(101), seed: 1 }.samples(100).is_err());
    }

    #[test]
    fn pluck_is_triangular() {
        let p = Excitation::PluckRamp { length: Some(10), peak: 0.5 }.samples(50).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(p[4], 0.9);
        assert_eq!(p[5], 0.9);
        assert!(p.iter().all(|&x| x > 0.0 && x <= 1.0));
    }
}
