//! Problem specification: order k, weight exponent β, the right-hand side
//! case and the discretization.

use std::sync::Arc;

use crate::domain::DomainShape;
use crate::error::{invalid, Result};
use crate::extremals::critical_exponent;
use crate::grid::{check_exponent, Grid2D};
use crate::nonlinearity::NonlinearitySpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Case {
    /// f = λ|x|^{2β} ξ
    Case1 { lambda: f64 },
    /// f = μ|x|^{2β} ξ^q + |x|^{2k} h(x, y, ξ)
    Case2 { mu: f64, q: f64, h: NonlinearitySpec },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub k: u32,
    pub beta: f64,
    pub case: Case,
    pub domain: DomainShape,
    pub resolution: (usize, usize),
    pub tol: f64,
}

impl ProblemSpec {
    pub fn case1(
        k: u32,
        beta: f64,
        lambda: f64,
        domain: DomainShape,
        resolution: (usize, usize),
        tol: f64,
    ) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(invalid("lambda", "must be finite"));
        }
        let s = Self { k, beta, case: Case::Case1 { lambda }, domain, resolution, tol };
        s.validate()?;
        Ok(s)
    }

    pub fn case2(
        k: u32,
        beta: f64,
        mu: f64,
        q: f64,
        h: NonlinearitySpec,
        domain: DomainShape,
        resolution: (usize, usize),
        tol: f64,
    ) -> Result<Self> {
        let s = Self { k, beta, case: Case::Case2 { mu, q, h }, domain, resolution, tol };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(invalid("k", "the semilinear problem needs k >= 1"));
        }
        check_exponent(self.beta)?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", "must lie in (0, 1)"));
        }
        if self.resolution.0 < 8 || self.resolution.1 < 8 {
            return Err(invalid("resolution", "need at least 8 cells per axis"));
        }
        if let Case::Case2 { mu, q, .. } = &self.case {
            let p = self.p();
            if !(1.0 < *q && *q < p) {
                return Err(invalid("q", format!("need 1<q<p with p = {p}, got q = {q}")));
            }
            if !mu.is_finite() {
                return Err(invalid("mu", "must be finite"));
            }
            if (self.k as f64) < self.beta.max(0.0) {
                return Err(invalid("beta", "Case 2 needs k >= max(0, beta)"));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        critical_exponent(self.k).expect("k >= 1 checked at construction")
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.case {
            Case::Case1 { lambda } => Some(lambda),
            Case::Case2 { .. } => None,
        }
    }

    pub fn is_case2(&self) -> bool {
        matches!(self.case, Case::Case2 { .. })
    }

    /// A grid at the spec's resolution with the weights the solvers need.
    pub fn grid(&self) -> Result<Arc<Grid2D>> {
        self.grid_at(self.resolution.0, self.resolution.1)
    }

    pub fn grid_at(&self, nx: usize, ny: usize) -> Result<Arc<Grid2D>> {
        Ok(Arc::new(Grid2D::new(
            self.domain.clone(),
            nx,
            ny,
            &[0.0, self.beta, self.k as f64],
        )?))
    }

    pub fn with_case(&self, case: Case) -> Result<Self> {
        let s = Self { case, ..self.clone() };
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> DomainShape {
        DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    #[test]
    fn q_must_be_subcritical() {
        let e = ProblemSpec::case2(1, 0.0, 1.0, 9.0, NonlinearitySpec::zero(), sq(), (16, 16), 1e-6)
            .unwrap_err();
        assert!(e.to_string().contains("1<q<p"));
        assert!(ProblemSpec::case2(1, 0.0, 1.0, 3.0, NonlinearitySpec::zero(), sq(), (16, 16), 1e-6).is_ok());
    }

    #[test]
    fn case2_needs_k_above_beta() {
        assert!(ProblemSpec::case2(1, 1.5, 1.0, 3.0, NonlinearitySpec::zero(), sq(), (16, 16), 1e-6).is_err());
    }

    #[test]
    fn weight_must_be_integrable() {
        assert!(ProblemSpec::case1(1, -0.5, 1.0, sq(), (16, 16), 1e-6).is_err());
        assert!(ProblemSpec::case1(0, 0.0, 1.0, sq(), (16, 16), 1e-6).is_err());
        assert_eq!(ProblemSpec::case1(2, 0.0, 1.0, sq(), (16, 16), 1e-6).unwrap().p(), 7.0);
    }
}
