//! Case 1: minimization of ‖u‖²_{S²} − λ‖u‖²_{L²_β} on ‖u‖_{L^{p+1}_k} = 1 and
//! the rescaled solution λ̃^{1/(p−1)}|V|.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{dot, GridFunction};
use crate::grid::{Grid2D, GridDescriptor};
use crate::problem::{Case, ProblemSpec};
use crate::solver::concentration::{concentrates, concentration_index, ConcentrationIndex};
use crate::solver::energy::{Functional, PsiTerms};

pub const ARMIJO: f64 = 1e-4;
pub const SHRINK: f64 = 0.5;
pub const STEP_MIN: f64 = 1e-8;
pub const STEP_MAX: f64 = 1e4;
/// Relative change allowed between two grids for a stable solution.
pub const TWO_GRID_TOL: f64 = 0.05;

const MAX_BACKTRACK: usize = 60;

#[derive(Debug, Clone)]
pub struct SlambdaResult {
    /// objective at the returned minimizer
    pub value: f64,
    /// |V| with ‖V‖_{L^{p+1}_k} = 1
    pub minimizer: GridFunction,
    pub iterations: usize,
    pub converged: bool,
    /// the line search failed before the tolerance was met
    pub stalled: bool,
    /// ‖Riesz gradient‖_{S²} / ‖V‖_{S²} at exit
    pub gradient_norm: f64,
    /// objective after each accepted step
    pub trace: Vec<f64>,
    pub warning: Option<String>,
}

/// Iteration budget and starting point.
#[derive(Debug, Clone, Default)]
pub struct MinimizeOptions {
    pub max_iter: Option<usize>,
    pub init: Option<GridFunction>,
}

struct Quotient<'a> {
    f: &'a Functional,
    lambda: f64,
    p: f64,
}

impl Quotient<'_> {
    /// ‖u‖_{L^{p+1}_k}^{p+1}
    fn constraint(&self, u: &[f64]) -> f64 {
        let wk = self.f.wk();
        self.f.grid().interior.iter().map(|&n| wk[n] * u[n].abs().powf(self.p + 1.0)).sum()
    }

    fn numerator(&self, u: &[f64]) -> f64 {
        let wb = self.f.wb();
        let m: f64 = self.f.grid().interior.iter().map(|&n| wb[n] * u[n] * u[n]).sum();
        self.f.stiffness_energy(u) - self.lambda * m
    }

    /// Scale-invariant quotient; equals the objective on the constraint.
    fn value(&self, u: &[f64]) -> f64 {
        self.numerator(u) / self.constraint(u).powf(2.0 / (self.p + 1.0))
    }

    fn normalize(&self, u: &mut [f64]) -> Result<()> {
        let c = self.constraint(u);
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Degenerate("iterate left the constraint manifold".into()));
        }
        let s = c.powf(-1.0 / (self.p + 1.0));
        u.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }
}

fn default_init(grid: &Arc<Grid2D>) -> GridFunction {
    let b = grid.bounds;
    let (cx, cy) = (0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3]));
    let (ax, ay) = (0.5 * (b[1] - b[0]), 0.5 * (b[3] - b[2]));
    GridFunction::from_fn(grid, |x, y| {
        let tx = (x - cx) / ax;
        let ty = (y - cy) / ay;
        ((1.0 - tx * tx) * (1.0 - ty * ty)).max(0.0)
    })
}

/// Riesz-gradient descent with Barzilai–Borwein steps and Armijo backtracking,
/// renormalizing after every accepted step.
pub fn minimize_slambda(spec: &ProblemSpec, grid: &Arc<Grid2D>, tol: f64) -> Result<SlambdaResult> {
    minimize_slambda_with(spec, grid, tol, &MinimizeOptions::default())
}

pub fn minimize_slambda_with(
    spec: &ProblemSpec,
    grid: &Arc<Grid2D>,
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<SlambdaResult> {
    let Case::Case1 { lambda } = spec.case else {
        return Err(invalid("case", "S_lambda minimization is a Case-1 operation"));
    };
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", "must lie in (0, 1)"));
    }
    let f = Functional::new(spec, grid)?;
    let q = Quotient { f: &f, lambda, p: f.exponent };
    let sys = f.system();
    let idx = &grid.interior;
    let len = grid.len();
    let inner_tol = (tol * 1e-2).clamp(1e-12, 1e-6);
    let max_iter = opts.max_iter.unwrap_or(5000);

    let mut u = match &opts.init {
        Some(u0) if Arc::ptr_eq(u0.grid(), grid) => u0.values().to_vec(),
        Some(_) => return Err(Error::GridMismatch),
        None => default_init(grid).into_values(),
    };
    q.normalize(&mut u)?;

    // Riesz gradient g = 2(u − K⁻¹(λMu + E W|u|^{p−1}u)) on the constraint.
    let wk = f.wk().to_vec();
    let wb = f.wb().to_vec();
    let mut warm: Option<Vec<f64>> = None;
    let riesz = |u: &[f64], e: f64, warm: &mut Option<Vec<f64>>| -> Result<Vec<f64>> {
        let mut b = vec![0.0; len];
        for &n in idx {
            b[n] = lambda * wb[n] * u[n] + e * wk[n] * u[n].abs().powf(q.p - 1.0) * u[n];
        }
        let w = sys.solve(&b, warm.as_deref().or(Some(u)), inner_tol)?.x;
        let mut g = vec![0.0; len];
        for &n in idx {
            g[n] = 2.0 * (u[n] - w[n]);
        }
        *warm = Some(w);
        Ok(g)
    };
    let knorm2 = |v: &[f64]| sys.stiffness.energy(v);

    let mut e = q.value(&u);
    let mut g = riesz(&u, e, &mut warm)?;
    let mut kg = vec![0.0; len];
    let mut alpha: f64 = 0.5;
    let mut trace = vec![e];
    let mut iterations = 0;
    let mut converged = false;
    let mut stalled = false;
    let mut gnorm = (knorm2(&g) / knorm2(&u)).sqrt();
    let mut trial = vec![0.0; len];
    while iterations < max_iter {
        if gnorm <= tol {
            converged = true;
            break;
        }
        iterations += 1;
        let slope = knorm2(&g);
        let mut step = alpha.clamp(STEP_MIN, STEP_MAX);
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACK {
            for &n in idx {
                trial[n] = u[n] - step * g[n];
            }
            let et = q.value(&trial);
            if et.is_finite() && et <= e - ARMIJO * step * slope {
                accepted = true;
                break;
            }
            step *= SHRINK;
        }
        if !accepted {
            stalled = true;
            break;
        }
        q.normalize(&mut trial)?;
        let e_new = q.value(&trial);
        let g_new = riesz(&trial, e_new, &mut warm)?;
        // BB1 in the S² metric: ⟨s, s⟩_K / ⟨s, y⟩_K
        let s: Vec<f64> = trial.iter().zip(&u).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        sys.stiffness.apply(&y, &mut kg);
        let sy = dot(&s, &kg);
        alpha = if sy > 0.0 { knorm2(&s) / sy } else { STEP_MAX };
        std::mem::swap(&mut u, &mut trial);
        g = g_new;
        e = e_new;
        trace.push(e);
        gnorm = (knorm2(&g) / knorm2(&u)).sqrt();
    }
    if !converged && gnorm <= tol {
        converged = true;
    }
    u.iter_mut().for_each(|v| *v = v.abs());
    let minimizer = GridFunction::from_raw(grid, u);
    let value = q.value(minimizer.values());
    let warning = if value <= 0.0 {
        Some("objective is nonpositive: lambda >= lambda_1 makes the problem unbounded below".into())
    } else if stalled {
        Some("line search stalled before reaching the tolerance".into())
    } else {
        None
    };
    Ok(SlambdaResult {
        value,
        minimizer,
        iterations,
        converged,
        stalled,
        gradient_norm: gnorm,
        trace,
        warning,
    })
}

/// ‖V‖²_{S²} − λ‖V‖²_{L²_β} recomputed from the grid function alone.
pub fn slambda_objective(v: &GridFunction, k: u32, beta: f64, lambda: f64) -> Result<f64> {
    Ok(crate::operator::energy(v, k) - lambda * v.weighted_integral(beta, |t| t * t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Solved,
    /// λ̃ ≤ 0: the variational mechanism produced no positive multiplier
    NonexistenceConsistent,
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub k: u32,
    pub beta: f64,
    pub lambda: f64,
    pub u: GridFunction,
    pub energy: PsiTerms,
    /// recomputed from `u`
    pub residual: f64,
    /// residual of the unscaled minimizer |V|
    pub unscaled_residual: f64,
    pub s_lambda: f64,
    pub lambda_tilde: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stalled: bool,
    pub trace: Vec<f64>,
    pub min_value: f64,
    pub concentration: ConcentrationIndex,
    pub status: SolveStatus,
}

/// Serializable part of a [`SolveReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub k: u32,
    pub beta: f64,
    pub lambda: f64,
    pub energy: PsiTerms,
    pub residual: f64,
    pub unscaled_residual: f64,
    pub s_lambda: f64,
    pub lambda_tilde: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stalled: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub concentration: ConcentrationIndex,
    pub status: SolveStatus,
    pub grid: GridDescriptor,
}

impl SolveReport {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            k: self.k,
            beta: self.beta,
            lambda: self.lambda,
            energy: self.energy,
            residual: self.residual,
            unscaled_residual: self.unscaled_residual,
            s_lambda: self.s_lambda,
            lambda_tilde: self.lambda_tilde,
            iterations: self.iterations,
            converged: self.converged,
            stalled: self.stalled,
            min_value: self.min_value,
            max_value: self.u.max_abs(),
            concentration: self.concentration,
            status: self.status,
            grid: self.u.grid().descriptor(),
        }
    }
}

/// Minimizes, extracts λ̃ = S_λ and rescales to v = λ̃^{1/(p−1)}|V|.
pub fn case1_solution(spec: &ProblemSpec, grid: &Arc<Grid2D>, tol: f64) -> Result<SolveReport> {
    case1_solution_with(spec, grid, tol, &MinimizeOptions::default())
}

pub fn case1_solution_with(
    spec: &ProblemSpec,
    grid: &Arc<Grid2D>,
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<SolveReport> {
    let lambda = spec.lambda().ok_or_else(|| invalid("case", "Case-1 solve needs a Case-1 spec"))?;
    let m = minimize_slambda_with(spec, grid, tol, opts)?;
    let f = Functional::new(spec, grid)?;
    let p = f.exponent;
    let lambda_tilde = m.value;
    let unscaled_residual = f.pde_residual(&m.minimizer)?;
    let status = if lambda_tilde <= 0.0 {
        SolveStatus::NonexistenceConsistent
    } else if !m.converged {
        SolveStatus::NotConverged
    } else {
        SolveStatus::Solved
    };
    let u = if lambda_tilde > 0.0 {
        m.minimizer.scale(lambda_tilde.powf(1.0 / (p - 1.0)))
    } else {
        m.minimizer.clone()
    };
    Ok(SolveReport {
        k: spec.k,
        beta: spec.beta,
        lambda,
        energy: f.psi_terms(&u)?,
        residual: f.pde_residual(&u)?,
        unscaled_residual,
        s_lambda: m.value,
        lambda_tilde,
        iterations: m.iterations,
        converged: m.converged,
        stalled: m.stalled,
        trace: m.trace,
        min_value: u.min(),
        concentration: concentration_index(&u, spec.k)?,
        status,
        u,
    })
}

/// Solves on each resolution in turn, starting every solve from the bilinear
/// prolongation of the previous solution.
pub fn case1_ladder(spec: &ProblemSpec, resolutions: &[(usize, usize)], tol: f64) -> Result<Vec<SolveReport>> {
    let mut out: Vec<SolveReport> = Vec::with_capacity(resolutions.len());
    for &(nx, ny) in resolutions {
        let grid = spec.grid_at(nx, ny)?;
        let init = out.last().map(|r| r.u.prolong(&grid));
        let opts = MinimizeOptions { max_iter: None, init };
        out.push(case1_solution_with(spec, &grid, tol, &opts)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoGridReport {
    pub coarse: SolveSummary,
    pub fine: SolveSummary,
    /// |Ψ_fine − Ψ_coarse| / |Ψ_fine|
    pub energy_change: f64,
    /// |max_fine − max_coarse| / max_fine
    pub max_change: f64,
    pub concentration: bool,
    pub stable: bool,
}

/// Two-grid stability of a pair of solves on nested resolutions.
pub fn two_grid_check(coarse: &SolveReport, fine: &SolveReport) -> TwoGridReport {
    let (ec, ef) = (coarse.energy.total, fine.energy.total);
    let (mc, mf) = (coarse.u.max_abs(), fine.u.max_abs());
    let energy_change = (ef - ec).abs() / ef.abs().max(f64::MIN_POSITIVE);
    let max_change = (mf - mc).abs() / mf.max(f64::MIN_POSITIVE);
    let conc = concentrates(&coarse.concentration, &fine.concentration)
        || fine.concentration.flagged;
    let solved = coarse.status == SolveStatus::Solved && fine.status == SolveStatus::Solved;
    TwoGridReport {
        coarse: coarse.summary(),
        fine: fine.summary(),
        energy_change,
        max_change,
        concentration: conc,
        stable: solved && !conc && energy_change < TWO_GRID_TOL && max_change < TWO_GRID_TOL,
    }
}

/// The two sides of ∫|x|^{2k}u^pφ₁ = (λ₁ − λ)∫|x|^{2β}uφ₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignObstruction {
    pub lhs: f64,
    pub rhs: f64,
    pub signs_match: bool,
}

pub fn sign_obstruction(
    u: &GridFunction,
    phi1: &GridFunction,
    lambda1: f64,
    lambda: f64,
    k: u32,
    beta: f64,
) -> Result<SignObstruction> {
    let p = crate::extremals::critical_exponent(k)?;
    let up = u.map(|v| v.max(0.0).powf(p));
    let lhs = up.weighted_pairing(phi1, k as f64)?;
    let rhs = (lambda1 - lambda) * u.weighted_pairing(phi1, beta)?;
    Ok(SignObstruction { lhs, rhs, signs_match: lhs.signum() == rhs.signum() })
}
