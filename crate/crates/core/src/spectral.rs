//! Principal eigenpair of −Δ_G u = λ |x|^{2β} u with Dirichlet data.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cg::ShiftedSystem;
use crate::error::{invalid, Result};
use crate::field::{dot, GridFunction};
use crate::grid::{check_exponent, Grid2D, GridDescriptor};
use crate::trial::smooth_random;

const MAX_OUTER: usize = 500;

#[derive(Debug, Clone)]
pub struct EigenReport {
    pub k: u32,
    pub beta: f64,
    pub lambda1: f64,
    /// nonnegative, ‖φ₁‖_{L²_β} = 1
    pub phi1: GridFunction,
    /// discrete L² norm of −Δ_G φ₁ − λ₁|x|^{2β}φ₁
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
}

/// Serializable part of an [`EigenReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub k: u32,
    pub beta: f64,
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    pub grid: GridDescriptor,
}

impl EigenReport {
    pub fn summary(&self) -> EigenSummary {
        EigenSummary {
            k: self.k,
            beta: self.beta,
            lambda1: self.lambda1,
            residual: self.residual,
            iterations: self.iterations,
            converged: self.converged,
            tol: self.tol,
            grid: self.phi1.grid().descriptor(),
        }
    }
}

/// Inverse power iteration on K u = λ M_β u.
///
/// Stops once the Rayleigh quotient moves by at most tol·λ and the normalized
/// iterate moves by at most tol in the M-norm.
pub fn principal_eigenpair(k: u32, beta: f64, grid: &Arc<Grid2D>, tol: f64) -> Result<EigenReport> {
    check_exponent(beta)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", "eigenvalue tolerance must lie in (0, 1)"));
    }
    let sys = ShiftedSystem::new(grid, k, 0.0, 0.0)?;
    let mass = grid.mass_diagonal(beta)?;
    let idx = &grid.interior;
    let len = grid.len();
    let inner_tol = (tol * 1e-3).clamp(1e-13, 1e-6);

    let mnorm = |u: &[f64]| idx.iter().map(|&n| mass[n] * u[n] * u[n]).sum::<f64>().sqrt();

    let mut u = vec![0.0; len];
    for &n in idx {
        u[n] = 1.0;
    }
    let s = mnorm(&u);
    u.iter_mut().for_each(|v| *v /= s);
    let mut ku = vec![0.0; len];
    sys.apply(&u, &mut ku);
    let mut lambda = dot(&u, &ku);
    let mut warm: Option<Vec<f64>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut b = vec![0.0; len];
    while iterations < MAX_OUTER {
        iterations += 1;
        for &n in idx {
            b[n] = mass[n] * u[n];
        }
        let out = sys.solve(&b, warm.as_deref(), inner_tol)?;
        let mut w = out.x;
        let s = mnorm(&w);
        w.iter_mut().for_each(|v| *v /= s);
        sys.apply(&w, &mut ku);
        let lambda_new = dot(&w, &ku);
        let dv = idx
            .iter()
            .map(|&n| mass[n] * (w[n] - u[n]).powi(2))
            .sum::<f64>()
            .sqrt();
        let dl = (lambda_new - lambda).abs();
        // next solve is ≈ w/λ
        warm = Some(w.iter().map(|v| v / lambda_new).collect());
        u = w;
        lambda = lambda_new;
        if dl <= tol * lambda && dv <= tol {
            converged = true;
            break;
        }
    }

    // sign: largest-magnitude node positive, then clamp machine-scale undershoots
    let (mut big, mut at) = (0.0f64, 0);
    for &n in idx {
        if u[n].abs() > big {
            big = u[n].abs();
            at = n;
        }
    }
    if u[at] < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    for v in u.iter_mut() {
        if *v < 0.0 && *v >= -1e-10 {
            *v = 0.0;
        }
    }

    sys.apply(&u, &mut ku);
    let area = grid.hx * grid.hy;
    let residual = idx
        .iter()
        .map(|&n| ((ku[n] - lambda * mass[n] * u[n]) / area).powi(2))
        .sum::<f64>()
        .sqrt()
        * area.sqrt();
    Ok(EigenReport {
        k,
        beta,
        lambda1: lambda,
        phi1: GridFunction::from_raw(grid, u),
        residual,
        iterations,
        converged,
        tol,
    })
}

/// |⟨∇_Gφ, ∇_Gφ₁⟩ − λ₁⟨φ, φ₁⟩_{L²_β}| / (‖φ‖_{S²}‖φ₁‖_{S²}) for one test function.
pub fn weak_form_residual_for(report: &EigenReport, phi: &GridFunction) -> Result<f64> {
    let grid = report.phi1.grid();
    let sys = ShiftedSystem::new(grid, report.k, 0.0, 0.0)?;
    let mut kp1 = vec![0.0; grid.len()];
    sys.apply(report.phi1.values(), &mut kp1);
    let e1 = dot(report.phi1.values(), &kp1);
    let e_phi = sys.stiffness.energy(phi.values());
    if e_phi == 0.0 {
        return Ok(0.0);
    }
    let a = dot(phi.values(), &kp1);
    let m = phi.weighted_pairing(&report.phi1, report.beta)?;
    Ok((a - report.lambda1 * m).abs() / (e_phi.sqrt() * e1.sqrt()))
}

/// Max weak-form residual over `trial_count` seeded smooth random test functions.
pub fn weak_form_residual(report: &EigenReport, trial_count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trial_count {
        let phi = smooth_random(report.phi1.grid(), 7, &mut rng);
        worst = worst.max(weak_form_residual_for(report, &phi)?);
    }
    Ok(worst)
}

/// ‖u‖²_{S²} / ‖u‖²_{L²_β}.
pub fn rayleigh_quotient(u: &GridFunction, k: u32, beta: f64) -> Result<f64> {
    let m = u.weighted_integral(beta, |v| v * v)?;
    if m == 0.0 {
        return Err(crate::error::Error::Degenerate("zero function".into()));
    }
    Ok(crate::operator::energy(u, k) / m)
}
