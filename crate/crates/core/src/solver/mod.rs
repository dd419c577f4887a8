//! Existence machinery: energies, Case-1 minimization, Nehari rays,
//! the mountain-pass search and concentration diagnostics.

pub mod case1;
pub mod concentration;
pub mod energy;
pub mod mountain_pass;
pub mod nehari;

pub use case1::{
    case1_ladder, case1_solution, minimize_slambda, sign_obstruction, two_grid_check, SlambdaResult,
    SolveReport, SolveStatus, TwoGridReport,
};
pub use concentration::{concentration_index, ConcentrationIndex};
pub use energy::{Functional, PhiGradient, PsiTerms};
pub use mountain_pass::{mountain_pass, nehari_ground_state, MountainPassOptions, MountainPassReport};
pub use nehari::{check_threshold, nehari_ray_max, threshold_value, NehariRayReport, Ray, ThresholdCheck};
