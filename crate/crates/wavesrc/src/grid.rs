//! Regular periodic grids over axis-aligned boxes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cubic grid: `n` cells per axis, spacing `h`, nodes at cell centers.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(dim: usize, origin: Vec<f64>, n: usize, h: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Spec(format!("dimension must be 2 or 3, got {dim}")));
        }
        if origin.len() != dim {
            return Err(Error::Spec("origin length must match dimension".into()));
        }
        if n == 0 || h <= 0.0 {
            return Err(Error::Spec("grid needs n > 0 and h > 0".into()));
        }
        Ok(Grid { dim, origin, n, h })
    }

    /// Centered cubic box of side `side`.
    pub fn centered(dim: usize, center: &[f64], side: f64, n: usize) -> Result<Self> {
        let origin = center.iter().map(|c| c - side / 2.0).collect();
        Grid::new(dim, origin, n, side / n as f64)
    }

    pub fn side(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Flat index -> per-axis index, row-major (axis 0 slowest).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// Node coordinate (cell center) for a flat index.
    pub fn node(&self, idx: usize) -> [f64; 3] {
        let ia = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.origin[a] + (ia[a] as f64 + 0.5) * self.h;
        }
        x
    }

    /// Angular frequency 2*pi*k/L for FFT bin index i along one axis.
    pub fn freq(&self, i: usize) -> f64 {
        let k = if i <= self.n / 2 {
            i as f64
        } else {
            i as f64 - self.n as f64
        };
        2.0 * std::f64::consts::PI * k / self.side()
    }

    /// |xi| for the flat FFT index.
    pub fn freq_norm(&self, idx: usize) -> f64 {
        let ia = self.unravel(idx);
        let mut s = 0.0;
        for a in 0..self.dim {
            let f = self.freq(ia[a]);
            s += f * f;
        }
        s.sqrt()
    }

    /// True if the point lies inside the box hull (closed).
    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|a| {
            x[a] >= self.origin[a] && x[a] <= self.origin[a] + self.side()
        })
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}
