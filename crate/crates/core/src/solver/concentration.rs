//! Bubbling diagnostics: peak value and the homogeneous radius holding half
//! of ∫|x|^{2k}|u|^{p+1}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremals::{critical_exponent, homogeneous_radius};
use crate::field::GridFunction;
use crate::grid::Grid2D;

/// A refinement pair counts as concentrating when r50 shrinks below this
/// fraction while the peak grows by more than [`MAX_GROWTH`].
pub const RADIUS_SHRINK: f64 = 0.8;
pub const MAX_GROWTH: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationIndex {
    pub max_value: f64,
    /// peak location; the radius is measured about (0, y_peak)
    pub peak: (f64, f64),
    pub r50: f64,
    /// homogeneous radius of one cell, max(hx^{k+1}, (k+1)hy)
    pub grid_scale: f64,
    /// half the mass sits within two cells of the peak
    pub flagged: bool,
}

/// Pure diagnostic; `u` must not vanish identically.
pub fn concentration_index(u: &GridFunction, k: u32) -> Result<ConcentrationIndex> {
    let p = critical_exponent(k)?;
    let g: &Grid2D = u.grid();
    let v = u.values();
    let (mut peak_n, mut max_value) = (usize::MAX, 0.0f64);
    for &n in &g.interior {
        if v[n].abs() > max_value {
            max_value = v[n].abs();
            peak_n = n;
        }
    }
    if peak_n == usize::MAX {
        return Err(Error::Degenerate("concentration index of the zero function".into()));
    }
    let peak = g.coords(peak_n);
    let w = g.weights(k as f64)?;
    let mut mass: Vec<(f64, f64)> = g
        .interior
        .iter()
        .map(|&n| {
            let (x, y) = g.coords(n);
            (homogeneous_radius(k, x, y, peak.1), w[n % g.nx] * v[n].abs().powf(p + 1.0))
        })
        .collect();
    mass.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = mass.iter().map(|m| m.1).sum();
    let mut acc = 0.0;
    let mut r50 = mass.last().map_or(0.0, |m| m.0);
    for &(r, m) in &mass {
        acc += m;
        if acc >= 0.5 * total {
            r50 = r;
            break;
        }
    }
    let kp = k as f64 + 1.0;
    let grid_scale = g.hx.powf(kp).max(kp * g.hy);
    Ok(ConcentrationIndex { max_value, peak, r50, grid_scale, flagged: r50 <= 2.0 * grid_scale })
}

/// Concentration across a refinement: radius shrinks and the peak grows.
pub fn concentrates(coarse: &ConcentrationIndex, fine: &ConcentrationIndex) -> bool {
    fine.r50 < RADIUS_SHRINK * coarse.r50 && fine.max_value > MAX_GROWTH * coarse.max_value
}
