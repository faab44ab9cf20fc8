//! Uniformly sampled lookup table with linear interpolation.

use std::path::Path;

use crate::error::{Error, Result};

/// Uniform grid over `[x_min, x_max]`; lookups outside the grid clamp to the
/// end values.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    x_min: f64,
    x_max: f64,
    values: Vec<f64>,
}

impl LookupTable {
    pub fn new(x_min: f64, x_max: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Argument("lookup table needs at least 2 points".into()));
        }
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Argument(format!("invalid table domain [{x_min}, {x_max}]")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("lookup table values must be finite".into()));
        }
        Ok(Self { x_min, x_max, values })
    }

    /// Samples `f` on `size` uniformly spaced points.
    pub fn sample(x_min: f64, x_max: f64, size: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if size < 2 {
            return Err(Error::Argument("lookup table needs at least 2 points".into()));
        }
        let step = (x_max - x_min) / (size - 1) as f64;
        Self::new(x_min, x_max, (0..size).map(|i| f(x_min + step * i as f64)).collect())
    }

    /// Builds a table from arbitrary `(x, y)` pairs by resampling the
    /// piecewise-linear curve through them onto `size` uniform points.
    pub fn from_pairs(pairs: &[(f64, f64)], size: usize) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Argument("need at least 2 (x, y) pairs".into()));
        }
        if pairs.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Argument("x values must be strictly increasing".into()));
        }
        let x_min = pairs[0].0;
        let x_max = pairs[pairs.len() - 1].0;
        Self::sample(x_min, x_max, size.max(pairs.len()), |x| {
            let i = pairs.partition_point(|p| p.0 <= x).clamp(1, pairs.len() - 1);
            let (x0, y0) = pairs[i - 1];
            let (x1, y1) = pairs[i];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        })
    }

    /// Reads a plain-text two-column file, one `x y` pair per line. Blank
    /// lines and `#` comments are skipped; commas are accepted as separators.
    pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?;
        parse_pairs(&text).map_err(|e| Error::Argument(format!("{}: {e}", path.display())))
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.values.len() - 1) as f64
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        self.x_min + self.step() * i as f64
    }

    #[inline]
    pub fn lookup(&self, x: f64) -> f64 {
        let n = self.values.len();
        if x <= self.x_min {
            return self.values[0];
        }
        if x >= self.x_max {
            return self.values[n - 1];
        }
        let pos = (x - self.x_min) / self.step();
        let i = (pos.floor() as usize).min(n - 2);
        let t = pos - i as f64;
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}

pub(crate) fn parse_pairs(text: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(format!("line {}: expected two columns", lineno + 1));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| format!("line {}: '{s}' is not a number", lineno + 1))
        };
        pairs.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(pairs)
}
