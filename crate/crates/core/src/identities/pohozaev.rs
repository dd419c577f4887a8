//! Boundary-flux identity ½∫_{∂Ω}(T·ν)(ν₁² + |x|^{2k}ν₂²)|∂_νu|² dS = (volume term),
//! with T = (x, (1+k)y).

use serde::{Deserialize, Serialize};

use crate::domain::{boundary_samples, BoundarySample};
use crate::error::{invalid, Error, Result};
use crate::field::GridFunction;
use crate::grid::GridDescriptor;
use crate::problem::{Case, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / max(|lhs|, |rhs|, floor)
    pub gap: f64,
    pub floor: f64,
    pub samples: usize,
    pub grid: GridDescriptor,
}

/// Outward normal derivative at a boundary point by the quadratic through
/// the boundary zero and two interpolated values along −ν.
pub fn normal_derivative(u: &GridFunction, b: &BoundarySample) -> f64 {
    let g = u.grid();
    let h = b.nx.abs() * g.hx + b.ny.abs() * g.hy;
    let (d1, d2) = (0.5 * h, 1.5 * h);
    let u1 = u.interpolate(b.x - d1 * b.nx, b.y - d1 * b.ny);
    let u2 = u.interpolate(b.x - d2 * b.nx, b.y - d2 * b.ny);
    // u(b − dν) ≈ a d + c d², and ∂_ν u = −a
    -(d2 * d2 * u1 - d1 * d1 * u2) / (d1 * d2 * (d2 - d1))
}

/// ½ Σ (T·ν)(ν₁² + |x|^{2k}ν₂²)|∂_νu|² ds
pub fn boundary_flux(u: &GridFunction, k: u32, samples: &[BoundarySample]) -> f64 {
    let kf = k as f64;
    0.5 * samples
        .iter()
        .map(|b| {
            let t_nu = b.x * b.nx + (1.0 + kf) * b.y * b.ny;
            let w = b.nx * b.nx + b.x.abs().powi(2 * k as i32) * b.ny * b.ny;
            t_nu * w * normal_derivative(u, b).powi(2) * b.ds
        })
        .sum::<f64>()
}

fn report(u: &GridFunction, k: u32, samples: &[BoundarySample], rhs: f64) -> PohozaevReport {
    let lhs = boundary_flux(u, k, samples);
    let scale = crate::operator::energy(u, k).max(1.0);
    let floor = 1e-14 * scale;
    let gap = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(floor);
    PohozaevReport { lhs, rhs, gap, floor, samples: samples.len(), grid: u.grid().descriptor() }
}

fn samples_for(u: &GridFunction, spec: &ProblemSpec, m: usize) -> Result<Vec<BoundarySample>> {
    if u.grid().domain != spec.domain {
        return Err(Error::GridMismatch);
    }
    boundary_samples(&spec.domain, m)
}

/// Case 1: right-hand side λ(1+β)∫|x|^{2β}u².
pub fn pohozaev_case1(u: &GridFunction, spec: &ProblemSpec, m: usize) -> Result<PohozaevReport> {
    let Case::Case1 { lambda } = spec.case else {
        return Err(invalid("case", "expected a Case-1 spec"));
    };
    let samples = samples_for(u, spec, m)?;
    let rhs = lambda * (1.0 + spec.beta) * u.weighted_integral(spec.beta, |v| v * v)?;
    Ok(report(u, spec.k, &samples, rhs))
}

/// Case 2 with h = 0: right-hand side μ[4(β+1) − (q−1)k]/(2(q+1)) ∫|x|^{2β}u^{q+1}.
pub fn pohozaev_case2(u: &GridFunction, spec: &ProblemSpec, m: usize) -> Result<PohozaevReport> {
    let Case::Case2 { mu, q, h } = &spec.case else {
        return Err(invalid("case", "expected a Case-2 spec"));
    };
    if !h.is_zero() {
        return Err(Error::Unsupported("the Case-2 flux identity needs h = 0".into()));
    }
    let samples = samples_for(u, spec, m)?;
    let bracket = 4.0 * (spec.beta + 1.0) - (q - 1.0) * spec.k as f64;
    let rhs = mu * bracket / (2.0 * (q + 1.0))
        * u.weighted_integral(spec.beta, |v| v.max(0.0).powf(q + 1.0))?;
    Ok(report(u, spec.k, &samples, rhs))
}
