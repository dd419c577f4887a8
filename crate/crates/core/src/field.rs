//! Grid functions: nodal values with the discrete Dirichlet condition built in.

use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{check_exponent, Grid2D};

/// Values on every node of a grid; masked nodes always hold 0.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid2D>,
    values: Vec<f64>,
}

/// Exponent pair (q, β) of the weighted Lebesgue space L^q_β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub q: f64,
    pub beta: f64,
}

impl NormSpec {
    pub fn new(q: f64, beta: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(invalid("q", format!("need q >= 1, got {q}")));
        }
        check_exponent(beta)?;
        Ok(Self { q, beta })
    }
}

impl GridFunction {
    pub fn zeros(grid: &Arc<Grid2D>) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    /// Samples `f` on interior nodes; masked nodes get 0.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: &Arc<Grid2D>, f: F) -> Self {
        let mut values = vec![0.0; grid.len()];
        for &n in &grid.interior {
            let (x, y) = grid.coords(n);
            values[n] = f(x, y);
        }
        Self { grid: grid.clone(), values }
    }

    /// Wraps a full-length value vector; masked entries are zeroed.
    pub fn from_values(grid: &Arc<Grid2D>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite grid value".into()));
        }
        for (v, &m) in values.iter_mut().zip(&grid.mask) {
            if !m {
                *v = 0.0;
            }
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Internal constructor for vectors already known to be masked and finite.
    pub(crate) fn from_raw(grid: &Arc<Grid2D>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    fn check(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        let mut values = vec![0.0; self.values.len()];
        for &n in &self.grid.interior {
            values[n] = f(self.values[n]);
        }
        GridFunction { grid: self.grid.clone(), values }
    }

    /// self + c·other
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        self.check(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(GridFunction { grid: self.grid.clone(), values })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.axpy(-1.0, other)
    }

    pub fn abs(&self) -> GridFunction {
        self.map(f64::abs)
    }

    pub fn positive_part(&self) -> GridFunction {
        self.map(|v| v.max(0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.grid.interior.iter().map(|&n| self.values[n]).fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Unweighted discrete L² pairing Σ u v hx hy.
    pub fn dot(&self, other: &GridFunction) -> Result<f64> {
        self.check(other)?;
        Ok(dot(&self.values, &other.values) * self.grid.hx * self.grid.hy)
    }

    /// ∫ |x|^{2a} g(u) with cell-exact weights.
    pub fn weighted_integral<F: Fn(f64) -> f64>(&self, a: f64, g: F) -> Result<f64> {
        let w = self.grid.weights(a)?;
        let nx = self.grid.nx;
        let mut s = 0.0;
        for &n in &self.grid.interior {
            s += w[n % nx] * g(self.values[n]);
        }
        Ok(s * self.grid.hy)
    }

    /// ∫ |x|^{2a} u v with cell-exact weights.
    pub fn weighted_pairing(&self, other: &GridFunction, a: f64) -> Result<f64> {
        self.check(other)?;
        let w = self.grid.weights(a)?;
        let nx = self.grid.nx;
        let mut s = 0.0;
        for &n in &self.grid.interior {
            s += w[n % nx] * self.values[n] * other.values[n];
        }
        Ok(s * self.grid.hy)
    }

    /// Bilinear interpolation of the zero-extended function at (x, y).
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let fx = (x - g.bounds[0]) / g.hx - 0.5;
        let fy = (y - g.bounds[2]) / g.hy - 0.5;
        let i0 = fx.floor();
        let j0 = fy.floor();
        let (tx, ty) = (fx - i0, fy - j0);
        let at = |i: i64, j: i64| -> f64 {
            if i < 0 || j < 0 || i >= g.nx as i64 || j >= g.ny as i64 {
                0.0
            } else {
                self.values[j as usize * g.nx + i as usize]
            }
        };
        let (i0, j0) = (i0 as i64, j0 as i64);
        (1.0 - tx) * (1.0 - ty) * at(i0, j0)
            + tx * (1.0 - ty) * at(i0 + 1, j0)
            + (1.0 - tx) * ty * at(i0, j0 + 1)
            + tx * ty * at(i0 + 1, j0 + 1)
    }

    /// Bilinear prolongation onto another grid over the same bounding box.
    pub fn prolong(&self, fine: &Arc<Grid2D>) -> GridFunction {
        GridFunction::from_fn(fine, |x, y| self.interpolate(x, y))
    }

    /// CSV node dump: a commented grid header, then `x,y,value` rows.
    pub fn write_node_dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        let g = &self.grid;
        writeln!(
            w,
            "# nx={} ny={} hx={:e} hy={:e} bounds={:e},{:e},{:e},{:e}",
            g.nx, g.ny, g.hx, g.hy, g.bounds[0], g.bounds[1], g.bounds[2], g.bounds[3]
        )?;
        writeln!(w, "x,y,value")?;
        for &n in &g.interior {
            let (x, y) = g.coords(n);
            writeln!(w, "{:e},{:e},{:e}", x, y, self.values[n])?;
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
