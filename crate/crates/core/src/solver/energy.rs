//! The energies Ψ and Φ, the weak derivative Φ′ and its Riesz representative.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cg::ShiftedSystem;
use crate::error::{Error, Result};
use crate::field::{dot, GridFunction};
use crate::grid::Grid2D;
use crate::nonlinearity::NonlinearitySpec;
use crate::problem::{Case, ProblemSpec};

/// Relative tolerance of the Riesz solves.
pub const RIESZ_TOL: f64 = 1e-10;

/// Ψ(u) split into its terms; `total = gradient − critical − lower − primitive`.
///
/// For Case 1 `lower` is λ‖u‖²_{L²_β}/2 and `primitive` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiTerms {
    pub gradient: f64,
    pub critical: f64,
    pub lower: f64,
    pub primitive: f64,
    pub total: f64,
}

/// Φ′(u) in three forms.
#[derive(Debug, Clone)]
pub struct PhiGradient {
    /// r with ⟨Φ′(u), v⟩ = Σ r_n v_n
    pub load: Vec<f64>,
    /// r/(hx·hy), so that ⟨Φ′(u), v⟩ is the discrete L² pairing with v
    pub l2: GridFunction,
    /// g with ⟨∇_G g, ∇_G v⟩ = ⟨Φ′(u), v⟩
    pub riesz: GridFunction,
    /// ‖g‖_{S²}, the dual norm of Φ′(u)
    pub dual_norm: f64,
}

/// Discrete functional for one spec on one grid.
#[derive(Debug, Clone)]
pub struct Functional {
    grid: Arc<Grid2D>,
    pub k: u32,
    pub beta: f64,
    /// exponent of the |x|^{2k} power term, p unless overridden
    pub exponent: f64,
    sys: ShiftedSystem,
    wk: Vec<f64>,
    wb: Vec<f64>,
    case: Case,
}

impl Functional {
    pub fn new(spec: &ProblemSpec, grid: &Arc<Grid2D>) -> Result<Self> {
        spec.validate()?;
        if grid.domain != spec.domain {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: grid.clone(),
            k: spec.k,
            beta: spec.beta,
            exponent: spec.p(),
            sys: ShiftedSystem::new(grid, spec.k, 0.0, 0.0)?,
            wk: grid.mass_diagonal(spec.k as f64)?,
            wb: grid.mass_diagonal(spec.beta)?,
            case: spec.case.clone(),
        })
    }

    /// Same functional with the power exponent replaced (subcritical surrogate).
    pub fn with_exponent(mut self, s: f64) -> Result<Self> {
        if !(s > 1.0) {
            return Err(crate::error::invalid("exponent", "need s > 1"));
        }
        self.exponent = s;
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn system(&self) -> &ShiftedSystem {
        &self.sys
    }

    pub fn case(&self) -> &Case {
        &self.case
    }

    pub(crate) fn wk(&self) -> &[f64] {
        &self.wk
    }

    pub(crate) fn wb(&self) -> &[f64] {
        &self.wb
    }

    fn h(&self) -> Option<&NonlinearitySpec> {
        match &self.case {
            Case::Case2 { h, .. } if !h.is_zero() => Some(h),
            _ => None,
        }
    }

    fn mu1(&self) -> f64 {
        match &self.case {
            Case::Case2 { h, .. } => h.mu1,
            Case::Case1 { .. } => 0.0,
        }
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        if Arc::ptr_eq(u.grid(), &self.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// uᵀKu
    pub fn stiffness_energy(&self, u: &[f64]) -> f64 {
        self.sys.stiffness.energy(u)
    }

    /// Σ_n W_k(n) H(x_n, y_n, u_n)
    fn primitive_sum(&self, u: &[f64]) -> f64 {
        let Some(h) = self.h() else { return 0.0 };
        let mut s = 0.0;
        for &n in &self.grid.interior {
            if u[n] > 0.0 {
                let (x, y) = self.grid.coords(n);
                s += self.wk[n] * h.primitive(x, y, u[n]);
            }
        }
        s
    }

    /// Ψ(u) term by term. H vanishes for negative arguments, so no sign
    /// clamping is needed in the nonlinear terms beyond |u|.
    pub fn psi_terms(&self, u: &GridFunction) -> Result<PsiTerms> {
        self.check(u)?;
        let v = u.values();
        let p1 = self.exponent + 1.0;
        let mut critical = 0.0;
        let mut lower = 0.0;
        for &n in &self.grid.interior {
            let a = v[n].abs();
            critical += self.wk[n] * a.powf(p1);
            lower += match &self.case {
                Case::Case1 { .. } => self.wb[n] * a * a,
                Case::Case2 { q, .. } => self.wb[n] * a.powf(q + 1.0),
            };
        }
        let lower = match &self.case {
            Case::Case1 { lambda } => lambda * lower / 2.0,
            Case::Case2 { mu, q, .. } => mu * lower / (q + 1.0),
        };
        let t = PsiTerms {
            gradient: self.stiffness_energy(v) / 2.0,
            critical: critical / p1,
            lower,
            primitive: self.primitive_sum(v),
            total: 0.0,
        };
        Ok(PsiTerms { total: t.gradient - t.critical - t.lower - t.primitive, ..t })
    }

    pub fn psi(&self, u: &GridFunction) -> Result<f64> {
        Ok(self.psi_terms(u)?.total)
    }

    /// Φ(u): the Case-2 functional acting on u⁺ plus the μ₁ pair. For Case 1
    /// the same construction uses the λ-quadratic term.
    pub fn phi(&self, u: &GridFunction) -> Result<f64> {
        self.check(u)?;
        Ok(self.phi_raw(u.values()))
    }

    pub(crate) fn phi_raw(&self, v: &[f64]) -> f64 {
        let p1 = self.exponent + 1.0;
        let mu1 = self.mu1();
        let mut pair = 0.0;
        let mut critical = 0.0;
        let mut lower = 0.0;
        for &n in &self.grid.interior {
            let u = v[n];
            let up = u.max(0.0);
            pair += self.wk[n] * (u * u - up * up);
            critical += self.wk[n] * up.powf(p1);
            lower += match &self.case {
                Case::Case1 { .. } => self.wb[n] * up * up,
                Case::Case2 { q, .. } => self.wb[n] * up.powf(q + 1.0),
            };
        }
        let lower = match &self.case {
            Case::Case1 { lambda } => lambda * lower / 2.0,
            Case::Case2 { mu, q, .. } => mu * lower / (q + 1.0),
        };
        self.stiffness_energy(v) / 2.0 + mu1 * pair / 2.0
            - critical / p1
            - lower
            - self.primitive_sum(v)
    }

    /// Load vector of Φ′(u).
    pub(crate) fn load(&self, v: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.grid.len()];
        self.sys.stiffness.apply(v, &mut r);
        let mu1 = self.mu1();
        let p = self.exponent;
        let h = self.h();
        for &n in &self.grid.interior {
            let u = v[n];
            let up = u.max(0.0);
            let mut s = mu1 * self.wk[n] * (u - up) - self.wk[n] * up.powf(p);
            s -= match &self.case {
                Case::Case1 { lambda } => lambda * self.wb[n] * up,
                Case::Case2 { mu, q, .. } => mu * self.wb[n] * up.powf(*q),
            };
            if let Some(h) = h {
                if up > 0.0 {
                    let (x, y) = self.grid.coords(n);
                    s -= self.wk[n] * h.h(x, y, up);
                }
            }
            r[n] += s;
        }
        r
    }

    /// ⟨Φ′(u), v⟩
    pub fn directional(&self, u: &GridFunction, v: &GridFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(dot(&self.load(u.values()), v.values()))
    }

    /// Φ′(u) with its Riesz representative (one SPD solve).
    pub fn phi_gradient(&self, u: &GridFunction) -> Result<PhiGradient> {
        self.phi_gradient_warm(u, None)
    }

    pub(crate) fn phi_gradient_warm(&self, u: &GridFunction, warm: Option<&[f64]>) -> Result<PhiGradient> {
        self.check(u)?;
        let load = self.load(u.values());
        let g = self.sys.solve(&load, warm, RIESZ_TOL)?.x;
        let dual_norm = dot(&load, &g).max(0.0).sqrt();
        let area = self.grid.hx * self.grid.hy;
        let l2 = GridFunction::from_raw(&self.grid, load.iter().map(|v| v / area).collect());
        Ok(PhiGradient { load, l2, riesz: GridFunction::from_raw(&self.grid, g), dual_norm })
    }

    /// Discrete L² norm of −Δ_G u − |x|^{2k}|u|^{p−1}u − f(·,·,u), nodewise
    /// with cell-averaged weights.
    pub fn pde_residual(&self, u: &GridFunction) -> Result<f64> {
        self.check(u)?;
        let v = u.values();
        let mut r = vec![0.0; self.grid.len()];
        self.sys.stiffness.apply(v, &mut r);
        let p = self.exponent;
        let area = self.grid.hx * self.grid.hy;
        let mut s = 0.0;
        for &n in &self.grid.interior {
            let a = v[n];
            let mut t = r[n] - self.wk[n] * a.abs().powf(p - 1.0) * a;
            t -= match &self.case {
                Case::Case1 { lambda } => lambda * self.wb[n] * a,
                Case::Case2 { mu, q, .. } => mu * self.wb[n] * a.abs().powf(q - 1.0) * a,
            };
            if let Some(h) = self.h() {
                let (x, y) = self.grid.coords(n);
                t -= self.wk[n] * h.h(x, y, a);
            }
            s += (t / area).powi(2);
        }
        Ok((s * area).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainShape;
    use crate::trial::{smooth_random, smooth_random_positive};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(mu: f64, h: NonlinearitySpec) -> (Functional, Arc<Grid2D>) {
        let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let spec = ProblemSpec::case2(1, 0.25, mu, 3.0, h, d, (24, 24), 1e-8).unwrap();
        let g = spec.grid().unwrap();
        (Functional::new(&spec, &g).unwrap(), g)
    }

    #[test]
    fn zero_has_zero_energy_and_gradient() {
        let (f, g) = setup(1.0, NonlinearitySpec::power(1.0, 2.0, 1.0).unwrap());
        let z = GridFunction::zeros(&g);
        assert_eq!(f.phi(&z).unwrap(), 0.0);
        assert_eq!(f.psi(&z).unwrap(), 0.0);
        assert_eq!(f.phi_gradient(&z).unwrap().dual_norm, 0.0);
    }

    #[test]
    fn phi_equals_psi_on_nonnegative_functions() {
        let (f, g) = setup(2.0, NonlinearitySpec::power(0.5, 2.0, 1.0).unwrap());
        let u = smooth_random_positive(&g, 5, &mut ChaCha8Rng::seed_from_u64(5));
        let (a, b) = (f.phi(&u).unwrap(), f.psi(&u).unwrap());
        assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
    }

    #[test]
    fn negative_functions_only_see_the_quadratic_terms() {
        let (f, g) = setup(3.0, NonlinearitySpec::power(1.0, 2.0, 1.5).unwrap());
        let u = smooth_random_positive(&g, 4, &mut ChaCha8Rng::seed_from_u64(9)).scale(-1.0);
        let want = f.stiffness_energy(u.values()) / 2.0
            + 1.5 * u.weighted_integral(1.0, |v| v * v).unwrap() / 2.0;
        assert!((f.phi(&u).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn riesz_norm_bounds_pairings() {
        let (f, g) = setup(1.0, NonlinearitySpec::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = smooth_random(&g, 5, &mut rng);
        let v = smooth_random(&g, 5, &mut rng);
        let grad = f.phi_gradient(&u).unwrap();
        let pair = f.directional(&u, &v).unwrap();
        let vn = f.stiffness_energy(v.values()).sqrt();
        assert!(pair.abs() <= grad.dual_norm * vn * (1.0 + 1e-8));
        assert!((grad.l2.dot(&v).unwrap() - pair).abs() < 1e-10 * pair.abs().max(1.0));
    }
}
