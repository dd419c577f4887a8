//! The discrete Grushin operator −Δ_G = −(∂²_x + |x|^{2k} ∂²_y), the G-gradient
//! and the weighted norms.
//!
//! The operator is stored as the symmetric stiffness form K with
//! (Ku)_n = (hy/hx) Σ_x (u_n − u_nb) + |x_i|^{2k} (hx/hy) Σ_y (u_n − u_nb),
//! so that K/(hx·hy) ≈ −Δ_G and uᵀKu ≈ ∫|∇_G u|². A neighbor outside Ω is
//! replaced by the linear extrapolation that vanishes on ∂Ω, which turns its
//! difference into u_n/θ with θ the boundary fraction.

use std::sync::Arc;

use crate::error::Result;
use crate::field::{GridFunction, NormSpec};
use crate::grid::{Grid2D, EAST, NORTH, SOUTH, WEST};

/// Matrix-free stiffness operator for a fixed grid and order k.
#[derive(Debug, Clone)]
pub struct Stiffness {
    grid: Arc<Grid2D>,
    k: u32,
    cx: f64,
    cy: Vec<f64>,
    diag: Vec<f64>,
}

impl Stiffness {
    pub fn new(grid: &Arc<Grid2D>, k: u32) -> Self {
        let cx = grid.hy / grid.hx;
        let cy: Vec<f64> = grid
            .xs
            .iter()
            .map(|x| x.abs().powi(2 * k as i32) * grid.hx / grid.hy)
            .collect();
        let mut diag = vec![0.0; grid.len()];
        for &n in &grid.interior {
            let t = grid.theta[n];
            let c = cy[n % grid.nx];
            let inv = |th: f64| if th == 0.0 { 1.0 } else { 1.0 / th };
            diag[n] = cx * (inv(t[WEST]) + inv(t[EAST])) + c * (inv(t[SOUTH]) + inv(t[NORTH]));
        }
        Self { grid: grid.clone(), k, cx, cy, diag }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// out = K u; entries off the mask are left at 0.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let g = &*self.grid;
        let nx = g.nx;
        for &n in &g.interior {
            let t = &g.theta[n];
            let u0 = u[n];
            let c = self.cy[n % nx];
            let mut s = self.diag[n] * u0;
            if t[WEST] == 0.0 {
                s -= self.cx * u[n - 1];
            }
            if t[EAST] == 0.0 {
                s -= self.cx * u[n + 1];
            }
            if t[SOUTH] == 0.0 {
                s -= c * u[n - nx];
            }
            if t[NORTH] == 0.0 {
                s -= c * u[n + nx];
            }
            out[n] = s;
        }
    }

    /// uᵀKu, accumulated face by face so it is a sum of squares.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let g = &*self.grid;
        let nx = g.nx;
        let mut e = 0.0;
        for &n in &g.interior {
            let t = &g.theta[n];
            let u0 = u[n];
            let c = self.cy[n % nx];
            // each interior face counted once, from its west/south node
            if t[EAST] == 0.0 {
                let d = u0 - u[n + 1];
                e += self.cx * d * d;
            }
            if t[NORTH] == 0.0 {
                let d = u0 - u[n + nx];
                e += c * d * d;
            }
            for (d, w) in [(WEST, self.cx), (EAST, self.cx), (SOUTH, c), (NORTH, c)] {
                if t[d] > 0.0 {
                    e += w * u0 * u0 / t[d];
                }
            }
        }
        e
    }
}

/// (g₁, g₂) ≈ (u_x, |x|^k u_y), second order, using the boundary zero where
/// a neighbor is outside Ω.
pub fn grad_g(u: &GridFunction, k: u32) -> (GridFunction, GridFunction) {
    let g = &**u.grid();
    let v = u.values();
    let nx = g.nx;
    let mut g1 = vec![0.0; g.len()];
    let mut g2 = vec![0.0; g.len()];
    for &n in &g.interior {
        let t = &g.theta[n];
        let side = |dir: usize, step: f64, idx: usize| -> (f64, f64) {
            if t[dir] == 0.0 {
                (step, v[idx])
            } else {
                (t[dir] * step, 0.0)
            }
        };
        let (dl, ul) = side(WEST, g.hx, n.wrapping_sub(1));
        let (dr, ur) = side(EAST, g.hx, n + 1);
        g1[n] = three_point(dl, ul, v[n], dr, ur);
        let (dl, ul) = side(SOUTH, g.hy, n.wrapping_sub(nx));
        let (dr, ur) = side(NORTH, g.hy, n + nx);
        g2[n] = g.xs[n % nx].abs().powi(k as i32) * three_point(dl, ul, v[n], dr, ur);
    }
    (
        GridFunction::from_raw(u.grid(), g1),
        GridFunction::from_raw(u.grid(), g2),
    )
}

/// Derivative at 0 of the parabola through (−dl, ul), (0, u0), (dr, ur).
fn three_point(dl: f64, ul: f64, u0: f64, dr: f64, ur: f64) -> f64 {
    (dl * dl * ur - dr * dr * ul - (dl * dl - dr * dr) * u0) / (dl * dr * (dl + dr))
}

/// −Δ_G u evaluated by the stencil.
pub fn apply_grushin(u: &GridFunction, k: u32) -> GridFunction {
    let op = Stiffness::new(u.grid(), k);
    apply_with(&op, u)
}

pub(crate) fn apply_with(op: &Stiffness, u: &GridFunction) -> GridFunction {
    let g = u.grid();
    let mut out = vec![0.0; g.len()];
    op.apply(u.values(), &mut out);
    let s = 1.0 / (g.hx * g.hy);
    for v in &mut out {
        *v *= s;
    }
    GridFunction::from_raw(g, out)
}

/// Discrete ∫|∇_G u|² = uᵀKu.
pub fn energy(u: &GridFunction, k: u32) -> f64 {
    Stiffness::new(u.grid(), k).energy(u.values())
}

/// ‖u‖_{S²_{1,0}} from the face-based energy.
pub fn norm_s210(u: &GridFunction, k: u32) -> f64 {
    energy(u, k).sqrt()
}

/// (∫ |x|^{2β} |u|^q)^{1/q} with cell-exact weights.
pub fn norm_lqbeta(u: &GridFunction, spec: NormSpec) -> Result<f64> {
    let q = spec.q;
    let s = u.weighted_integral(spec.beta, |v| v.abs().powf(q))?;
    Ok(s.powf(1.0 / q))
}

/// ⟨Au, v⟩ in the unweighted discrete L² pairing.
pub fn operator_pairing(u: &GridFunction, v: &GridFunction, k: u32) -> Result<f64> {
    let au = apply_grushin(u, k);
    au.dot(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainShape;
    use std::f64::consts::PI;

    fn square(n: usize) -> Arc<Grid2D> {
        let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        Arc::new(Grid2D::new(d, n, n, &[0.0, 0.5, 1.0]).unwrap())
    }

    #[test]
    fn affine_gradient_is_exact() {
        let g = square(16);
        let u = GridFunction::from_fn(&g, |x, _| x);
        let (g1, g2) = grad_g(&u, 0);
        for &n in &g.interior {
            if g.is_deep_interior(n) {
                assert!((g1.values()[n] - 1.0).abs() < 1e-12);
                assert!(g2.values()[n].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sine_energy() {
        let g = square(128);
        let u = GridFunction::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sin());
        let e = energy(&u, 0);
        assert!((e / (PI * PI / 2.0) - 1.0).abs() < 0.01);
        let (g1, g2) = grad_g(&u, 0);
        let q = g1.dot(&g1).unwrap() + g2.dot(&g2).unwrap();
        assert!((q / (PI * PI / 2.0) - 1.0).abs() < 0.01);
        assert!((norm_s210(&u, 0) - PI / 2f64.sqrt()).abs() < 0.01 * PI);
    }

    #[test]
    fn energy_is_the_quadratic_form() {
        let g = square(24);
        let u = GridFunction::from_fn(&g, |x, y| (3.0 * x).cos() * y * (1.3 - y) + x * x);
        let op = Stiffness::new(&g, 2);
        let mut s = vec![0.0; g.len()];
        op.apply(u.values(), &mut s);
        let q = crate::field::dot(u.values(), &s);
        assert!((q - op.energy(u.values())).abs() < 1e-12 * q);
    }

    #[test]
    fn weighted_norm_examples() {
        let g = square(16);
        let one = GridFunction::from_fn(&g, |_, _| 1.0);
        let v = norm_lqbeta(&one, NormSpec::new(2.0, 0.5).unwrap()).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        let v = norm_lqbeta(&one, NormSpec::new(1.0, 0.0).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = norm_lqbeta(&one, NormSpec::new(2.0, -0.25).unwrap()).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        assert!(NormSpec::new(2.0, -0.5).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = square(16);
        let z = GridFunction::zeros(&g);
        assert!(apply_grushin(&z, 1).is_zero());
        assert_eq!(norm_s210(&z, 1), 0.0);
    }
}
