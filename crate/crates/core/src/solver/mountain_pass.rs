//! Mountain-pass search for Φ. Each path is the ray from 0 through a
//! direction d, so the path maximum is the ray maximum; the direction moves
//! against the Riesz gradient taken at that maximum until Φ′ vanishes there.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::GridFunction;
use crate::grid::GridDescriptor;
use crate::problem::{Case, ProblemSpec};
use crate::solver::case1::{ARMIJO, SHRINK, STEP_MAX, STEP_MIN};
use crate::solver::energy::Functional;
use crate::solver::nehari::{ray_max, threshold_value};
use crate::trial::smooth_random_positive;

const MAX_BACKTRACK: usize = 40;
/// Random directions probed for the rim constant, besides the initial and final ones.
const RIM_PROBES: usize = 8;

#[derive(Debug, Clone)]
pub struct MountainPassReport {
    /// mountain-pass level estimate
    pub level: f64,
    /// the final path, 0 to its negative-energy endpoint
    pub path: Vec<GridFunction>,
    pub path_max: f64,
    pub u: GridFunction,
    /// ‖Φ′(u)‖ in the dual norm
    pub dual_norm: f64,
    /// dual norm relative to ‖u‖_{S²}
    pub relative_dual_norm: f64,
    pub rho: f64,
    pub rim_radius: f64,
    pub iterations: usize,
    pub converged: bool,
    /// the threshold of the compactness argument, when an S estimate was given
    pub threshold: Option<f64>,
    pub flags: Vec<String>,
    pub min_value: f64,
    /// |Φ(u) − Ψ(u)|
    pub phi_psi_gap: f64,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MountainPassSummary {
    pub level: f64,
    pub path_points: usize,
    pub path_max: f64,
    pub dual_norm: f64,
    pub relative_dual_norm: f64,
    pub rho: f64,
    pub rim_radius: f64,
    pub iterations: usize,
    pub converged: bool,
    pub threshold: Option<f64>,
    pub flags: Vec<String>,
    pub min_value: f64,
    pub max_value: f64,
    pub phi_psi_gap: f64,
    pub grid: GridDescriptor,
}

impl MountainPassReport {
    pub fn summary(&self) -> MountainPassSummary {
        MountainPassSummary {
            level: self.level,
            path_points: self.path.len(),
            path_max: self.path_max,
            dual_norm: self.dual_norm,
            relative_dual_norm: self.relative_dual_norm,
            rho: self.rho,
            rim_radius: self.rim_radius,
            iterations: self.iterations,
            converged: self.converged,
            threshold: self.threshold,
            flags: self.flags.clone(),
            min_value: self.min_value,
            max_value: self.u.max_abs(),
            phi_psi_gap: self.phi_psi_gap,
            grid: self.u.grid().descriptor(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MountainPassOptions {
    pub path_points: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// replaces p in the power term (subcritical surrogate runs)
    pub exponent: Option<f64>,
    /// S estimate for the compactness threshold
    pub s_est: Option<f64>,
    pub seed: u64,
}

impl Default for MountainPassOptions {
    fn default() -> Self {
        Self { path_points: 33, tol: 1e-6, max_iter: 5000, exponent: None, s_est: None, seed: 0 }
    }
}

fn unit(f: &Functional, v: &GridFunction) -> Result<GridFunction> {
    let n = f.stiffness_energy(v.values()).sqrt();
    if !(n > 0.0) {
        return Err(Error::Degenerate("zero direction".into()));
    }
    Ok(v.scale(1.0 / n))
}

/// (t*, Φ(t* d)) for a unit direction.
fn ray_peak(f: &Functional, d: &GridFunction) -> Result<(f64, f64)> {
    let ray = f.ray(d)?;
    match ray_max(&ray) {
        (Some(t), _) => Ok((t, ray.value(t))),
        (None, _) => Err(Error::Degenerate("energy is nonpositive along the whole ray".into())),
    }
}

pub fn mountain_pass(spec: &ProblemSpec, v0: &GridFunction, opts: &MountainPassOptions) -> Result<MountainPassReport> {
    if !spec.is_case2() {
        return Err(invalid("case", "the mountain-pass search is a Case-2 operation"));
    }
    if opts.path_points < 3 {
        return Err(invalid("path_points", "need at least 3 points"));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let grid = v0.grid().clone();
    let mut f = Functional::new(spec, &grid)?;
    if let Some(s) = opts.exponent {
        f = f.with_exponent(s)?;
    }
    if !(f.phi(v0)? < 0.0) {
        return Err(invalid("v0", "endpoint must satisfy Phi(v0) < 0"));
    }

    let mut d = unit(&f, v0)?;
    let (mut t, mut level) = ray_peak(&f, &d)?;
    let mut trace = vec![level];
    let mut alpha: f64 = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    let mut u = d.scale(t);
    let mut grad = f.phi_gradient(&u)?;
    let mut flags = Vec::new();
    while iterations < opts.max_iter {
        let unorm = f.stiffness_energy(u.values()).sqrt();
        if grad.dual_norm <= opts.tol * unorm {
            converged = true;
            break;
        }
        iterations += 1;
        let slope = grad.dual_norm * grad.dual_norm;
        let mut step = alpha.clamp(STEP_MIN, STEP_MAX);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let w = u.axpy(-step, &grad.riesz)?;
            if let Ok(dn) = unit(&f, &w) {
                if let Ok((tn, ln)) = ray_peak(&f, &dn) {
                    if ln <= level - ARMIJO * step * slope {
                        accepted = Some((dn, tn, ln));
                        break;
                    }
                }
            }
            step *= SHRINK;
        }
        let Some((dn, tn, ln)) = accepted else {
            flags.push("line search stalled".into());
            break;
        };
        // grow the step after an unshrunk acceptance
        alpha = if step >= alpha { 2.0 * step } else { step };
        d = dn;
        t = tn;
        level = ln;
        trace.push(level);
        u = d.scale(t);
        let prev = grad.riesz.into_values();
        grad = f.phi_gradient_warm(&u, Some(&prev))?;
    }
    if !converged {
        flags.push("iteration budget exhausted".into());
    }

    // rim: half the smallest ray maximizer over the probes, ρ the smallest energy there
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut probes = vec![unit(&f, v0)?, d.clone()];
    for _ in 0..RIM_PROBES {
        probes.push(unit(&f, &smooth_random_positive(&grid, 5, &mut rng))?);
    }
    let peaks: Vec<f64> = probes.iter().map(|p| ray_peak(&f, p).map(|x| x.0)).collect::<Result<_>>()?;
    let rim_radius = 0.5 * peaks.iter().cloned().fold(f64::INFINITY, f64::min);
    let rho = probes
        .iter()
        .map(|p| f.ray(p).map(|r| r.value(rim_radius)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    // final path: the ray out to its first negative-energy point
    let ray = f.ray(&d)?;
    let mut t_end = 2.0 * t;
    while ray.value(t_end) >= 0.0 && t_end < 1e6 * t {
        t_end *= 2.0;
    }
    let n = opts.path_points;
    let path: Vec<GridFunction> = (0..n).map(|j| d.scale(t_end * j as f64 / (n - 1) as f64)).collect();
    let path_max = path.iter().map(|w| f.phi(w)).collect::<Result<Vec<f64>>>()?.into_iter().fold(f64::MIN, f64::max);

    let threshold = match opts.s_est {
        Some(s) => Some(threshold_value(spec.k, s)?),
        None => None,
    };
    if let Some(th) = threshold {
        if level >= th {
            flags.push("compactness not certified".into());
        }
    }
    let psi = f.psi(&u)?;
    let phi = f.phi(&u)?;
    let unorm = f.stiffness_energy(u.values()).sqrt();
    Ok(MountainPassReport {
        level,
        path,
        path_max,
        dual_norm: grad.dual_norm,
        relative_dual_norm: grad.dual_norm / unorm,
        rho,
        rim_radius,
        iterations,
        converged,
        threshold,
        flags,
        min_value: u.min(),
        phi_psi_gap: (phi - psi).abs(),
        trace,
        u,
    })
}

/// Ground-state level of the pure power problem −Δ_G u = |x|^{2k}u^s by
/// normalized inverse iteration u ← K⁻¹(W_k u^s): (½ − 1/(s+1)) Q^{(s+1)/(s−1)}
/// with Q the Sobolev-type quotient at the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub level: f64,
    pub quotient: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn nehari_ground_state(
    grid: &Arc<crate::grid::Grid2D>,
    k: u32,
    s: f64,
    init: &GridFunction,
    tol: f64,
) -> Result<GroundState> {
    if !(s > 1.0) {
        return Err(invalid("s", "need s > 1"));
    }
    let sys = crate::cg::ShiftedSystem::new(grid, k, 0.0, 0.0)?;
    let wk = grid.mass_diagonal(k as f64)?;
    let idx = &grid.interior;
    let quotient = |u: &[f64]| {
        let b: f64 = idx.iter().map(|&n| wk[n] * u[n].abs().powf(s + 1.0)).sum();
        sys.stiffness.energy(u) / b.powf(2.0 / (s + 1.0))
    };
    let mut u = init.values().to_vec();
    let mut qv = quotient(&u);
    let mut iterations = 0;
    let mut converged = false;
    let mut b = vec![0.0; grid.len()];
    while iterations < 2000 {
        iterations += 1;
        for &n in idx {
            b[n] = wk[n] * u[n].abs().powf(s);
        }
        let mut w = sys.solve(&b, Some(&u), 1e-12)?.x;
        let norm = sys.stiffness.energy(&w).sqrt();
        w.iter_mut().for_each(|v| *v /= norm);
        let qn = quotient(&w);
        u = w;
        let done = (qv - qn).abs() <= tol * qn;
        qv = qn;
        if done {
            converged = true;
            break;
        }
    }
    Ok(GroundState {
        level: (0.5 - 1.0 / (s + 1.0)) * qv.powf((s + 1.0) / (s - 1.0)),
        quotient: qv,
        iterations,
        converged,
    })
}

/// Whether a spec is the pure-power setting (μ = 0, h = 0) of the surrogate check.
pub fn is_pure_power(spec: &ProblemSpec) -> bool {
    matches!(&spec.case, Case::Case2 { mu, h, .. } if *mu == 0.0 && h.is_zero())
}
