//! Experiment configuration: TOML on disk, every numeric field checked before
//! anything runs.

use std::path::Path;

use anyhow::{Context, Result};
use grushin_core::identities::TeqParams;
use grushin_core::{critical_exponent, DomainShape, NonlinearitySpec, ProblemSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Eigen,
    Sobolev,
    Asymptotics,
    Case1,
    Case2,
    Pohozaev,
    Starshape,
    Inequalities,
    Classify,
    Convergence,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Eigen => "eigen",
            Kind::Sobolev => "sobolev",
            Kind::Asymptotics => "asymptotics",
            Kind::Case1 => "case1",
            Kind::Case2 => "case2",
            Kind::Pohozaev => "pohozaev",
            Kind::Starshape => "starshape",
            Kind::Inequalities => "inequalities",
            Kind::Classify => "classify",
            Kind::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    pub seed: u64,
    pub out: Option<String>,
    pub resolutions: Vec<usize>,
    /// scale parameters of the extremal family; empty selects a per-experiment default
    pub eps: Vec<f64>,
    /// β values of the eigenvalue sweep
    pub betas: Vec<f64>,
    pub problem: ProblemConfig,
    pub domain: DomainConfig,
    pub extremals: ExtremalConfig,
    pub inequalities: InequalityConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: 0,
            out: None,
            resolutions: vec![64],
            eps: Vec::new(),
            betas: Vec::new(),
            problem: ProblemConfig::default(),
            domain: DomainConfig::default(),
            extremals: ExtremalConfig::default(),
            inequalities: InequalityConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub k: u32,
    pub beta: f64,
    pub tol: f64,
    /// Case 1: λ directly, or as a multiple of λ₁
    pub lambda: Option<f64>,
    pub lambda_fraction: Option<f64>,
    /// Case 2
    pub mu: Option<f64>,
    pub q: Option<f64>,
    pub h: HConfig,
    /// boundary samples for the star-shape test and Pohozaev quadrature, per cell of the finest grid
    pub boundary_samples: usize,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            k: 1,
            beta: 0.0,
            tol: 1e-8,
            lambda: None,
            lambda_fraction: None,
            mu: None,
            q: None,
            h: HConfig::Zero,
            boundary_samples: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HConfig {
    #[default]
    Zero,
    /// h = coef ξ^s
    Power { coef: f64, s: f64, mu1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    Rectangle { x: [f64; 2], y: [f64; 2] },
    Ellipse { center: [f64; 2], axes: [f64; 2] },
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig::Rectangle { x: [-1.0, 1.0], y: [-1.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtremalConfig {
    /// inner radius of the cutoff, in homogeneous-radius units
    pub r_in: f64,
    pub quadrature_panels: usize,
    pub r_max: f64,
}

impl Default for ExtremalConfig {
    fn default() -> Self {
        Self { r_in: 0.5, quadrature_panels: 20, r_max: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InequalityConfig {
    pub trials: usize,
    pub thetas: Vec<f64>,
    /// second exponent of the interpolation pair is q0 + 1 with weight k
    pub q0: f64,
    pub gamma: f64,
    pub hardy_beta: f64,
    pub hardy_eps: Vec<f64>,
    pub teq_beta: f64,
    pub teq_q: f64,
    pub teq_s: f64,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            thetas: vec![0.25, 0.5, 0.75],
            q0: 3.0,
            gamma: 0.5,
            hardy_beta: -0.2,
            hardy_eps: vec![0.2, 0.1, 0.05, 0.025],
            teq_beta: 3.0,
            teq_q: 2.0,
            teq_s: 2.0,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Fills per-experiment defaults so the echoed config states exactly what ran.
    pub fn resolve(&mut self, kind: Kind) {
        self.kind.get_or_insert(kind);
        if self.eps.is_empty() {
            self.eps = match kind {
                Kind::Asymptotics | Kind::Classify => (3..=9).map(|j| 10f64.powi(-j)).collect(),
                Kind::Sobolev => vec![0.25, 0.5, 1.0, 2.0, 4.0],
                _ => Vec::new(),
            };
        }
        let case1 = matches!(kind, Kind::Case1)
            || (matches!(kind, Kind::Pohozaev | Kind::Classify) && self.problem.q.is_none());
        if case1 && self.problem.lambda.is_none() && self.problem.lambda_fraction.is_none() {
            self.problem.lambda_fraction = Some(0.5);
        }
        if (matches!(kind, Kind::Case2) || self.problem.q.is_some()) && self.problem.mu.is_none() {
            self.problem.mu = Some(1.0);
        }
    }

    /// Case 2 when q is present, else Case 1.
    pub fn is_case2(&self, kind: Kind) -> bool {
        kind == Kind::Case2 || (kind != Kind::Case1 && self.problem.q.is_some())
    }

    pub fn out_dir(&self) -> &str {
        self.out.as_deref().unwrap_or("out")
    }

    pub fn finest(&self) -> usize {
        self.resolutions.iter().copied().max().unwrap_or(0)
    }

    pub fn domain_shape(&self) -> grushin_core::Result<DomainShape> {
        match self.domain {
            DomainConfig::Rectangle { x, y } => DomainShape::rectangle(x[0], x[1], y[0], y[1]),
            DomainConfig::Ellipse { center, axes } => DomainShape::ellipse(center[0], center[1], axes[0], axes[1]),
        }
    }

    pub fn nonlinearity(&self) -> grushin_core::Result<NonlinearitySpec> {
        match self.problem.h {
            HConfig::Zero => Ok(NonlinearitySpec::zero()),
            HConfig::Power { coef, s, mu1 } => NonlinearitySpec::power(coef, s, mu1),
        }
    }

    /// The problem at the finest resolution; λ is supplied by the caller for Case 1.
    pub fn problem_spec(&self, kind: Kind, lambda: f64) -> grushin_core::Result<ProblemSpec> {
        let p = &self.problem;
        let n = self.finest();
        let d = self.domain_shape()?;
        if self.is_case2(kind) {
            let q = p.q.unwrap_or(f64::NAN);
            ProblemSpec::case2(p.k, p.beta, p.mu.unwrap_or(1.0), q, self.nonlinearity()?, d, (n, n), p.tol)
        } else {
            ProblemSpec::case1(p.k, p.beta, lambda, d, (n, n), p.tol)
        }
    }

    pub fn teq_params(&self) -> TeqParams {
        let i = &self.inequalities;
        TeqParams { k: self.problem.k, beta: i.teq_beta, q: i.teq_q, q0: i.q0, s: i.teq_s }
    }

    /// Every violated precondition, not just the first.
    pub fn validate(&self, kind: Kind) -> Vec<String> {
        let mut errs = Vec::new();
        let p = &self.problem;
        if let Some(k) = self.kind {
            if k != kind {
                errs.push(format!("config kind `{}` does not match the subcommand `{}`", k.name(), kind.name()));
            }
        }
        if self.resolutions.is_empty() {
            errs.push("resolutions: need at least one".into());
        }
        if let Some(&n) = self.resolutions.iter().find(|&&n| !(8..=4096).contains(&n)) {
            errs.push(format!("resolutions: {n} is outside [8, 4096]"));
        }
        if kind == Kind::Convergence {
            errs.extend(check_geometric(&self.resolutions).err());
        }
        let eigen_only = kind == Kind::Eigen
            || (kind == Kind::Convergence && p.lambda.is_none() && p.lambda_fraction.is_none());
        let min_k = if eigen_only { 0 } else { 1 };
        if p.k < min_k || p.k > 16 {
            errs.push(format!("problem.k: need {min_k} <= k <= 16, got {}", p.k));
        }
        if !(2.0 * p.beta > -1.0) || !p.beta.is_finite() {
            errs.push(format!("problem.beta: need 2 beta > -1, got {}", p.beta));
        }
        if let Some(b) = self.betas.iter().find(|b| !(2.0 * **b > -1.0) || !b.is_finite()) {
            errs.push(format!("betas: need 2 beta > -1, got {b}"));
        }
        if !(p.tol > 1e-14 && p.tol < 1e-2) {
            errs.push(format!("problem.tol: need 1e-14 < tol < 1e-2, got {}", p.tol));
        }
        if p.boundary_samples == 0 {
            errs.push("problem.boundary_samples: must be positive".into());
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            errs.push(format!("eps: values must be positive and finite, got {e}"));
        }
        if kind == Kind::Asymptotics && self.eps.len() < 3 {
            errs.push("eps: the asymptotic fit needs at least 3 values".into());
        }
        if let Err(e) = self.domain_shape() {
            errs.push(format!("domain: {e}"));
        }
        let x = &self.extremals;
        if !(x.r_in > 0.0 && x.r_in.is_finite()) {
            errs.push(format!("extremals.r_in: must be positive, got {}", x.r_in));
        }
        if x.quadrature_panels < 2 {
            errs.push("extremals.quadrature_panels: need at least 2".into());
        }
        if !(x.r_max > 1.0) {
            errs.push(format!("extremals.r_max: must exceed 1, got {}", x.r_max));
        }

        let exponent = if p.k >= 1 { critical_exponent(p.k).ok() } else { None };
        if self.is_case2(kind) {
            match (p.q, exponent) {
                (None, _) => errs.push("problem.q: required for Case 2".into()),
                (Some(q), Some(pe)) if !(1.0 < q && q < pe) => {
                    errs.push(format!("problem.q: need 1<q<p with p = {pe}, got q = {q}"))
                }
                _ => {}
            }
            if let Some(mu) = p.mu {
                if !mu.is_finite() {
                    errs.push("problem.mu: must be finite".into());
                }
            }
            if (p.k as f64) < p.beta.max(0.0) {
                errs.push(format!("problem.beta: Case 2 needs k >= max(0, beta), got k = {}, beta = {}", p.k, p.beta));
            }
            if let Err(e) = self.nonlinearity() {
                errs.push(format!("problem.h: {e}"));
            }
        } else if matches!(kind, Kind::Case1 | Kind::Pohozaev | Kind::Classify) {
            match (p.lambda, p.lambda_fraction) {
                (Some(_), Some(_)) => errs.push("problem: give lambda or lambda_fraction, not both".into()),
                (Some(l), None) | (None, Some(l)) if !l.is_finite() => {
                    errs.push("problem.lambda: must be finite".into())
                }
                _ => {}
            }
            if p.q.is_some() || p.mu.is_some() || p.h != HConfig::Zero {
                if kind == Kind::Case1 {
                    errs.push("problem: q, mu and h belong to Case 2".into());
                }
            }
        } else if kind == Kind::Convergence {
            if let (Some(_), Some(_)) = (p.lambda, p.lambda_fraction) {
                errs.push("problem: give lambda or lambda_fraction, not both".into());
            }
        }

        if kind == Kind::Inequalities {
            let i = &self.inequalities;
            if i.trials == 0 {
                errs.push("inequalities.trials: must be positive".into());
            }
            if let Some(t) = i.thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                errs.push(format!("inequalities.thetas: need theta in [0, 1], got {t}"));
            }
            if !(i.q0 >= 1.0) {
                errs.push(format!("inequalities.q0: need q0 >= 1, got {}", i.q0));
            }
            if !(i.gamma > 0.0 && i.gamma < 1.0) {
                errs.push(format!("inequalities.gamma: need 0 < gamma < 1, got {}", i.gamma));
            }
            if !(2.0 * i.hardy_beta > -1.0) || !(i.gamma + 2.0 * i.hardy_beta > 0.0) {
                errs.push(format!(
                    "inequalities.hardy_beta: need 2 beta > -1 and gamma + 2 beta > 0, got beta = {}",
                    i.hardy_beta
                ));
            }
            if i.hardy_eps.len() < 2 || i.hardy_eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                errs.push("inequalities.hardy_eps: need at least 2 values in (0, 1)".into());
            }
            if p.k >= 1 {
                if let Err(e) = self.teq_params().admissible() {
                    errs.push(format!("inequalities (teq): {e}"));
                }
            }
        }
        errs
    }
}

/// At least three resolutions with one common integer refinement ratio.
pub fn check_geometric(res: &[usize]) -> std::result::Result<usize, String> {
    if res.len() < 3 {
        return Err(format!("resolutions: a convergence study needs at least 3, got {}", res.len()));
    }
    let r = res[1] / res[0].max(1);
    let ok = r >= 2 && res.windows(2).all(|w| w[1] == r * w[0]);
    if ok {
        Ok(r)
    } else {
        Err(format!("resolutions: need geometric refinement by an integer ratio, got {res:?}"))
    }
}
