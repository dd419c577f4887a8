//! Jacobi-preconditioned conjugate gradients for (K + σ M_a) u = b.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::GridFunction;
use crate::grid::Grid2D;
use crate::operator::Stiffness;

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// ‖b − Ax‖₂ / ‖b‖₂
    pub residual: f64,
}

/// Statistics of a single solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// PCG restricted to the index set `idx`; other entries of `x` stay 0.
pub fn pcg<A: Fn(&[f64], &mut [f64])>(
    apply: A,
    diag: &[f64],
    idx: &[usize],
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let len = b.len();
    let bnorm = idx.iter().map(|&n| b[n] * b[n]).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(CgOutcome { x: vec![0.0; len], iterations: 0, residual: 0.0 });
    }
    let mut x = match x0 {
        Some(v) => v.to_vec(),
        None => vec![0.0; len],
    };
    let mut ax = vec![0.0; len];
    apply(&x, &mut ax);
    let mut r = vec![0.0; len];
    for &n in idx {
        r[n] = b[n] - ax[n];
    }
    let mut rnorm = idx.iter().map(|&n| r[n] * r[n]).sum::<f64>().sqrt();
    if rnorm <= tol * bnorm {
        return Ok(CgOutcome { x, iterations: 0, residual: rnorm / bnorm });
    }
    let mut z = vec![0.0; len];
    for &n in idx {
        z[n] = r[n] / diag[n];
    }
    let mut p = z.clone();
    let mut rz: f64 = idx.iter().map(|&n| r[n] * z[n]).sum();
    let mut ap = ax;
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap: f64 = idx.iter().map(|&n| p[n] * ap[n]).sum();
        if pap <= 0.0 {
            return Err(Error::Degenerate("operator not positive definite".into()));
        }
        let alpha = rz / pap;
        for &n in idx {
            x[n] += alpha * p[n];
            r[n] -= alpha * ap[n];
        }
        rnorm = idx.iter().map(|&n| r[n] * r[n]).sum::<f64>().sqrt();
        if rnorm <= tol * bnorm {
            return Ok(CgOutcome { x, iterations: it, residual: rnorm / bnorm });
        }
        for &n in idx {
            z[n] = r[n] / diag[n];
        }
        let rz_new: f64 = idx.iter().map(|&n| r[n] * z[n]).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for &n in idx {
            p[n] = z[n] + beta * p[n];
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual: rnorm / bnorm })
}

/// The SPD system K + σ M_a with a reusable workspace description.
#[derive(Debug, Clone)]
pub struct ShiftedSystem {
    pub stiffness: Stiffness,
    shift: Vec<f64>,
    diag: Vec<f64>,
}

impl ShiftedSystem {
    pub fn new(grid: &Arc<Grid2D>, k: u32, sigma: f64, a: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(invalid("sigma", "shift must be nonnegative"));
        }
        let stiffness = Stiffness::new(grid, k);
        let shift: Vec<f64> = if sigma == 0.0 {
            vec![0.0; grid.len()]
        } else {
            grid.mass_diagonal(a)?.into_iter().map(|m| sigma * m).collect()
        };
        let diag = stiffness.diagonal().iter().zip(&shift).map(|(d, s)| d + s).collect();
        Ok(Self { stiffness, shift, diag })
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        self.stiffness.grid()
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.stiffness.apply(u, out);
        for &n in &self.grid().interior {
            out[n] += self.shift[n] * u[n];
        }
    }

    pub fn max_iter(&self) -> usize {
        20 * self.grid().interior.len() + 1000
    }

    /// Solves the system with load vector `b` (already integrated against test functions).
    pub fn solve(&self, b: &[f64], x0: Option<&[f64]>, tol: f64) -> Result<CgOutcome> {
        pcg(
            |u, out| self.apply(u, out),
            &self.diag,
            &self.grid().interior,
            b,
            x0,
            tol,
            self.max_iter(),
        )
    }
}

/// Solves (−Δ_G + σ|x|^{2a}) u = rhs with Dirichlet data.
pub fn solve_spd(
    k: u32,
    sigma: f64,
    a: f64,
    rhs: &GridFunction,
    tol: f64,
) -> Result<(GridFunction, SolveStats)> {
    if !(tol > 1e-14 && tol < 1e-2) {
        return Err(invalid("tol", "relative tolerance must lie in (1e-14, 1e-2)"));
    }
    let grid = rhs.grid();
    let sys = ShiftedSystem::new(grid, k, sigma, a)?;
    let area = grid.hx * grid.hy;
    let b: Vec<f64> = rhs.values().iter().map(|v| v * area).collect();
    let out = sys.solve(&b, None, tol)?;
    Ok((
        GridFunction::from_raw(grid, out.x),
        SolveStats { iterations: out.iterations, residual: out.residual },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainShape;
    use std::f64::consts::PI;

    #[test]
    fn manufactured_sine() {
        let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let g = Arc::new(Grid2D::new(d, 64, 64, &[]).unwrap());
        let rhs = GridFunction::from_fn(&g, |x, y| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin());
        let (u, stats) = solve_spd(0, 0.0, 0.0, &rhs, 1e-10).unwrap();
        assert!(stats.residual <= 1e-10);
        let exact = GridFunction::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sin());
        assert!(u.sub(&exact).unwrap().max_abs() < 1e-3);
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let g = Arc::new(Grid2D::new(d, 16, 16, &[]).unwrap());
        let (u, stats) = solve_spd(1, 0.0, 0.0, &GridFunction::zeros(&g), 1e-8).unwrap();
        assert!(u.is_zero());
        assert!(stats.iterations <= 1);
    }

    #[test]
    fn iteration_budget_is_reported() {
        let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let g = Arc::new(Grid2D::new(d, 32, 32, &[]).unwrap());
        let sys = ShiftedSystem::new(&g, 0, 0.0, 0.0).unwrap();
        let b = vec![1.0; g.len()];
        let err = pcg(|u, o| sys.apply(u, o), &vec![1.0; g.len()], &g.interior, &b, None, 1e-12, 3)
            .unwrap_err();
        assert!(matches!(err, Error::NotConverged { iterations: 3, .. }));
    }
}
