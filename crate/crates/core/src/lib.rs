//! Numerical toolkit for the critical semilinear Grushin problem
//! −Δ_G u = |x|^{2k} u^p + f(x, y, u) in Ω, u = 0 on ∂Ω,
//! with Δ_G = ∂²_x + |x|^{2k} ∂²_y and p = (4 + 5k)/k.

pub mod cg;
pub mod domain;
pub mod error;
pub mod extremals;
pub mod field;
pub mod grid;
pub mod identities;
pub mod nonlinearity;
pub mod operator;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod trial;

pub use cg::{solve_spd, SolveStats};
pub use domain::{boundary_samples, starshape_check, BoundarySample, DomainShape, StarshapeReport};
pub use error::{Error, Result};
pub use field::{GridFunction, NormSpec};
pub use grid::{cell_weight_integral, Grid2D, GridDescriptor};
pub use operator::{apply_grushin, energy, grad_g, norm_lqbeta, norm_s210};
pub use extremals::{
    asymptotic_slopes, critical_exponent, cutoff_family, estimate_s, extremal_u, q_family_decay,
    sobolev_quotient, AsymptoticsReport, CutoffGeometry, ExtremalSpec,
};
pub use spectral::{principal_eigenpair, weak_form_residual, EigenReport};
pub use nonlinearity::{validate_nonlinearity, NonlinearitySpec};
pub use problem::{Case, ProblemSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
