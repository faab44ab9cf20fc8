//! Sample-accurate circular delay line.

use crate::error::{Error, Result};
use crate::interp::FractionalDelay;

/// A circular delay line holding the last `capacity` samples pushed into it.
///
/// The backing buffer is rounded up to a power of two so that indexing is a
/// mask, but only `capacity` samples are ever observable.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buffer: Vec<f64>,
    mask: usize,
    capacity: usize,
    write_index: usize,
}

impl DelayLine {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Argument("delay line capacity must be at least 1".into()));
        }
        let size = capacity.next_power_of_two();
        Ok(Self {
            buffer: vec![0.0; size],
            mask: size - 1,
            capacity,
            write_index: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Writes one sample and advances the line by one tick.
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.buffer[self.write_index] = x;
        self.write_index = (self.write_index + 1) & self.mask;
    }

    /// Sample pushed `delay` ticks ago; `get(0)` is the most recent push.
    #[inline]
    pub fn get(&self, delay: usize) -> f64 {
        assert!(delay < self.capacity, "delay {delay} >= capacity {}", self.capacity);
        self.buffer[self.write_index.wrapping_sub(1 + delay) & self.mask]
    }

    /// Adds `value` in place to the sample pushed `delay` ticks ago.
    #[inline]
    pub fn add(&mut self, delay: usize, value: f64) {
        assert!(delay < self.capacity, "delay {delay} >= capacity {}", self.capacity);
        let idx = self.write_index.wrapping_sub(1 + delay) & self.mask;
        self.buffer[idx] += value;
    }

    /// Writes `input`, then returns the sample `interp.delay()` ticks behind
    /// it. A delay of 0 returns `input` itself.
    pub fn tick(&mut self, input: f64, interp: &mut FractionalDelay) -> Result<f64> {
        let span = interp.span();
        if span >= self.capacity {
            return Err(Error::Range {
                name: "read_delay",
                value: interp.delay(),
                interval: format!(
                    "a delay whose interpolation taps stay below capacity {}",
                    self.capacity
                ),
            });
        }
        self.push(input);
        Ok(interp.read(self))
    }

    /// Iterates the observable contents from most recent to oldest.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.capacity).map(move |d| self.get(d))
    }

    /// Sum of squares of the observable contents.
    pub fn energy(&self) -> f64 {
        self.iter().map(|x| x * x).sum()
    }

    pub fn clear(&mut self) {
        self.buffer.iter_mut().for_each(|x| *x = 0.0);
        self.write_index = 0;
    }
}
