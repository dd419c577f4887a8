//! Cell-centered tensor grid over the bounding box of a domain.

use serde::{Deserialize, Serialize};

use crate::domain::DomainShape;
use crate::error::{invalid, Error, Result};

/// Smallest boundary fraction kept in the ghost extrapolation. Nodes closer to
/// ∂Ω than this (relative to h) would make the stencil arbitrarily stiff.
pub const THETA_MIN: f64 = 0.01;

/// Directions in the order used by [`Grid2D::theta`].
pub const WEST: usize = 0;
pub const EAST: usize = 1;
pub const SOUTH: usize = 2;
pub const NORTH: usize = 3;

/// Grid geometry echoed into reports and node dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub bounds: [f64; 4],
    pub interior_nodes: usize,
    pub domain: String,
}

#[derive(Debug, Clone)]
pub struct Grid2D {
    pub domain: DomainShape,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub bounds: [f64; 4],
    /// node abscissae (cell centers), length nx
    pub xs: Vec<f64>,
    /// node ordinates, length ny
    pub ys: Vec<f64>,
    /// row-major: index = j * nx + i
    pub mask: Vec<bool>,
    /// indices of interior nodes in increasing order
    pub interior: Vec<usize>,
    /// Per node, fraction of the way to ∂Ω for each direction (W, E, S, N);
    /// 0 marks an interior neighbor.
    pub theta: Vec<[f64; 4]>,
    weights: Vec<(f64, Vec<f64>)>,
}

/// ∫_{lo}^{hi} |x|^{2a} dx in closed form.
pub fn cell_weight_integral(a: f64, lo: f64, hi: f64) -> Result<f64> {
    if 2.0 * a <= -1.0 {
        return Err(Error::NonIntegrableWeight(a));
    }
    if lo >= hi {
        return Err(invalid("cell", "need x_lo < x_hi"));
    }
    Ok(weight_primitive(a, hi) - weight_primitive(a, lo))
}

fn weight_primitive(a: f64, x: f64) -> f64 {
    let e = 2.0 * a + 1.0;
    x.signum() * x.abs().powf(e) / e
}

pub(crate) fn check_exponent(a: f64) -> Result<()> {
    if 2.0 * a <= -1.0 || !a.is_finite() {
        Err(Error::NonIntegrableWeight(a))
    } else {
        Ok(())
    }
}

/// Cell integrals of |x|^{2a} for every column of a grid with the given bounds.
fn column_weights(a: f64, x_lo: f64, hx: f64, nx: usize) -> Vec<f64> {
    (0..nx)
        .map(|i| {
            let lo = x_lo + i as f64 * hx;
            let hi = x_lo + (i + 1) as f64 * hx;
            weight_primitive(a, hi) - weight_primitive(a, lo)
        })
        .collect()
}

impl Grid2D {
    pub fn new(domain: DomainShape, nx: usize, ny: usize, exponents: &[f64]) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(invalid("resolution", "nx and ny must be at least 8"));
        }
        for &a in exponents {
            check_exponent(a)?;
        }
        let bounds = domain.bounding_box();
        let hx = (bounds[1] - bounds[0]) / nx as f64;
        let hy = (bounds[3] - bounds[2]) / ny as f64;
        let xs: Vec<f64> = (0..nx).map(|i| bounds[0] + (i as f64 + 0.5) * hx).collect();
        let ys: Vec<f64> = (0..ny).map(|j| bounds[2] + (j as f64 + 0.5) * hy).collect();
        let mut mask = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                mask[j * nx + i] = domain.contains(xs[i], ys[j]);
            }
        }
        let interior: Vec<usize> = (0..nx * ny).filter(|&n| mask[n]).collect();
        if interior.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut theta = vec![[0.0; 4]; nx * ny];
        for &n in &interior {
            let (i, j) = (n % nx, n / nx);
            let p = (xs[i], ys[j]);
            let nbrs = [
                (i.checked_sub(1).map(|ii| j * nx + ii), (p.0 - hx, p.1)),
                ((i + 1 < nx).then(|| j * nx + i + 1), (p.0 + hx, p.1)),
                (j.checked_sub(1).map(|jj| jj * nx + i), (p.0, p.1 - hy)),
                ((j + 1 < ny).then(|| (j + 1) * nx + i), (p.0, p.1 + hy)),
            ];
            for (d, (idx, q)) in nbrs.into_iter().enumerate() {
                let inside = idx.map(|m| mask[m]).unwrap_or(false);
                if !inside {
                    theta[n][d] = domain.crossing_fraction(p, q).max(THETA_MIN);
                }
            }
        }
        let mut weights = Vec::new();
        for &a in exponents {
            if !weights.iter().any(|(b, _): &(f64, Vec<f64>)| *b == a) {
                weights.push((a, column_weights(a, bounds[0], hx, nx)));
            }
        }
        Ok(Self { domain, nx, ny, hx, hy, bounds, xs, ys, mask, interior, theta, weights })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, n: usize) -> (f64, f64) {
        (self.xs[n % self.nx], self.ys[n / self.nx])
    }

    /// Column cell integrals W_a(i) = ∫_{cell i} |x|^{2a} dx.
    pub fn weights(&self, a: f64) -> Result<std::borrow::Cow<'_, [f64]>> {
        check_exponent(a)?;
        if let Some((_, w)) = self.weights.iter().find(|(b, _)| *b == a) {
            return Ok(std::borrow::Cow::Borrowed(w));
        }
        Ok(std::borrow::Cow::Owned(column_weights(a, self.bounds[0], self.hx, self.nx)))
    }

    /// Diagonal of the weighted mass matrix, W_a(i)·hy, zero off the mask.
    pub fn mass_diagonal(&self, a: f64) -> Result<Vec<f64>> {
        let w = self.weights(a)?;
        let mut m = vec![0.0; self.len()];
        for &n in &self.interior {
            m[n] = w[n % self.nx] * self.hy;
        }
        Ok(m)
    }

    /// Whether all four stencil neighbors of `n` are interior nodes.
    pub fn is_deep_interior(&self, n: usize) -> bool {
        self.mask[n] && self.theta[n].iter().all(|&t| t == 0.0)
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            nx: self.nx,
            ny: self.ny,
            hx: self.hx,
            hy: self.hy,
            bounds: self.bounds,
            interior_nodes: self.interior.len(),
            domain: self.domain.label(),
        }
    }
}
