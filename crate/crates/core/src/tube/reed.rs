//! Memoryless reed reflection table.
//!
//! Default curve: `rho(h) = clamp(e + s * h, 0, 1)` with embouchure offset
//! `e` and slope `s = 0.3`. The reed closes (`rho = 1`) at
//! `h_c = (1 - e) / s`; below `h_c - 1 / s` it is fully open (`rho = 0`).

use std::path::Path;

use crate::error::{check_range, Error, Result};
use crate::table::LookupTable;

pub const DEFAULT_EMBOUCHURE: f64 = 0.7;
pub const DEFAULT_REED_SLOPE: f64 = 0.3;

/// Reflection coefficient `rho(h_delta)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReedTable {
    table: LookupTable,
    /// `None` for user-supplied tables.
    embouchure: Option<f64>,
}

impl ReedTable {
    pub fn closure(embouchure: f64, slope: f64) -> f64 {
        (1.0 - embouchure) / slope
    }

    pub fn with_slope(embouchure: f64, slope: f64, grid_size: usize) -> Result<Self> {
        check_range("embouchure", embouchure, true, "finite")?;
        check_range("reed slope", slope, slope > 0.0, "(0, inf)")?;
        if grid_size < 16 {
            return Err(Error::Range {
                name: "grid_size",
                value: grid_size as f64,
                interval: "[16, inf)".into(),
            });
        }
        let hc = Self::closure(embouchure, slope);
        let open = hc - 1.0 / slope;
        let table = LookupTable::sample(open - 1.0, hc + 1.0, grid_size, |h| (embouchure + slope * h).clamp(0.0, 1.0))?;
        Ok(Self {
            table,
            embouchure: Some(embouchure),
        })
    }

    /// Builds a table from user `(h_delta, rho)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)], grid_size: usize) -> Result<Self> {
        if pairs.iter().any(|&(_, r)| !(0.0..=1.0).contains(&r)) {
            return Err(Error::Argument("reed reflection values must lie in [0, 1]".into()));
        }
        let table = LookupTable::from_pairs(pairs, grid_size.max(16))?;
        let values = table.values();
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Argument("reed table must be non-decreasing in h_delta".into()));
        }
        if values[values.len() - 1] != 1.0 {
            return Err(Error::Argument("reed table must reach 1 at closure".into()));
        }
        Ok(Self { table, embouchure: None })
    }

    /// Reads a two-column `h_delta rho` text file.
    pub fn read(path: &Path, grid_size: usize) -> Result<Self> {
        Self::from_pairs(&LookupTable::read_pairs(path)?, grid_size)
    }

    pub fn embouchure(&self) -> Option<f64> {
        self.embouchure
    }

    pub fn table(&self) -> &LookupTable {
        &self.table
    }

    #[inline]
    pub fn lookup(&self, h_delta: f64) -> f64 {
        self.table.lookup(h_delta)
    }
}

/// Default-slope reed table.
pub fn reed_table_build(embouchure: f64, grid_size: usize) -> Result<ReedTable> {
    ReedTable::with_slope(embouchure, DEFAULT_REED_SLOPE, grid_size)
}
