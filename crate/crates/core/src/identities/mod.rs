//! Pohozaev identities, the inequality harness and the regime classifier.

pub mod classify;
pub mod inequalities;
pub mod pohozaev;

pub use classify::{regime_classify, RegimeVerdict, Rule, Verdict};
pub use inequalities::{
    compact_embedding_condition, hardy_check, hardy_slope, interpolation_check, teq_ratio, teq_theta,
    weak_lorentz_norm, HardyReport, HardySlope, InterpolationReport, InterpolationTriple, TeqParams, TeqReport,
};
pub use pohozaev::{boundary_flux, normal_derivative, pohozaev_case1, pohozaev_case2, PohozaevReport};
