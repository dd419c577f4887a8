//! Decision table over the published existence and nonexistence conditions.
//! Pure: the verdict depends only on the arguments.

use serde::{Deserialize, Serialize};

use crate::domain::StarshapeReport;
use crate::identities::inequalities::compact_embedding_condition;
use crate::problem::{Case, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Existence,
    Nonexistence,
    /// a solution exists once μ exceeds some unquantified μ₀
    ExistenceForLargeMu,
    /// no classical solution for 0 < μ < μ₁ with an unquantified μ₁
    NonexistenceForSmallMu,
    OutsideKnownRegimes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// λ ≥ λ₁
    AboveFirstEigenvalue,
    /// λ ≤ 0 on a G-starshaped domain
    NonpositiveLambdaStarshaped,
    /// 0 < λ < λ₁ and k ≥ 2(β+1)
    SubcriticalLambdaLargeK,
    /// μ ≤ 0 under the compactness condition, G-starshaped, h = 0
    NonpositiveMuCompact,
    /// μ[4(β+1) − (q−1)k] ≤ 0, G-starshaped, h = 0
    PohozaevSign,
    /// sup_t Ψ(t v₀) certified below the compactness threshold
    ThresholdCertificate,
    /// μ > 0, (q+1)k > 4(β+1), compactness condition, h = 0
    LargeQ,
    /// strictly G-starshaped, 1 < q < p−2 and the weak-norm conditions
    SmallMuWeakNorm,
    /// μ > 0 with the compactness condition, h = 0
    LargeMu,
    NoRuleApplies,
}

impl Rule {
    pub fn citation(&self) -> &'static str {
        match self {
            Rule::AboveFirstEigenvalue => "Theorem 2.1(a)",
            Rule::NonpositiveLambdaStarshaped => "Theorem 2.1(b)",
            Rule::SubcriticalLambdaLargeK => "Theorem 2.1(c)",
            Rule::NonpositiveMuCompact => "Corollary 6.1",
            Rule::PohozaevSign => "Theorem 6.1",
            Rule::ThresholdCertificate => "Theorem 2.2",
            Rule::LargeQ => "Corollary 2.1(a)",
            Rule::SmallMuWeakNorm => "Corollary 6.2",
            Rule::LargeMu => "Corollary 2.1(b)",
            Rule::NoRuleApplies => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    /// "case1" or "case2"
    pub case: String,
    pub k: u32,
    pub beta: f64,
    pub p: f64,
    pub lambda: Option<f64>,
    pub lambda1: Option<f64>,
    pub mu: Option<f64>,
    pub q: Option<f64>,
    pub h: Option<String>,
    pub g_starshaped: bool,
    pub strictly_starshaped: bool,
    pub threshold_certified: bool,
    pub verdict: Verdict,
    pub rule: Rule,
    pub citation: String,
}

/// Corollary 6.2 hypotheses apart from geometry, h and the sign of μ.
fn weak_norm_conditions(k: u32, beta: f64, q: f64, p: f64) -> bool {
    let kf = k as f64;
    if !(q > 1.0 && q < p - 2.0) {
        return false;
    }
    if kf <= beta {
        q <= p - 2.0 * (p - 1.0) / (p - 5.0)
    } else {
        (kf + 0.5) / (beta + 0.5) < (p - 1.0) * (p - 3.0) / (2.0 * (p + 3.0) + (q + 1.0) * (p - 5.0))
    }
}

fn case1_rule(lambda: f64, lambda1: f64, k: u32, beta: f64, starshaped: bool) -> (Verdict, Rule) {
    if lambda >= lambda1 {
        (Verdict::Nonexistence, Rule::AboveFirstEigenvalue)
    } else if lambda <= 0.0 {
        if starshaped {
            (Verdict::Nonexistence, Rule::NonpositiveLambdaStarshaped)
        } else {
            (Verdict::OutsideKnownRegimes, Rule::NoRuleApplies)
        }
    } else if k as f64 >= 2.0 * (beta + 1.0) {
        (Verdict::Existence, Rule::SubcriticalLambdaLargeK)
    } else {
        (Verdict::OutsideKnownRegimes, Rule::NoRuleApplies)
    }
}

#[allow(clippy::too_many_arguments)]
fn case2_rule(
    k: u32,
    beta: f64,
    p: f64,
    mu: f64,
    q: f64,
    h_zero: bool,
    geometry: (bool, bool),
    certified: bool,
) -> (Verdict, Rule) {
    let (starshaped, strictly) = geometry;
    let kf = k as f64;
    let compact = compact_embedding_condition(k, beta, q);
    let bracket = 4.0 * (beta + 1.0) - (q - 1.0) * kf;
    if h_zero && starshaped && compact && mu <= 0.0 {
        return (Verdict::Nonexistence, Rule::NonpositiveMuCompact);
    }
    if h_zero && starshaped && mu * bracket <= 0.0 {
        return (Verdict::Nonexistence, Rule::PohozaevSign);
    }
    if certified && mu >= 0.0 && compact {
        return (Verdict::Existence, Rule::ThresholdCertificate);
    }
    if h_zero && mu > 0.0 && compact && (q + 1.0) * kf > 4.0 * (beta + 1.0) {
        return (Verdict::Existence, Rule::LargeQ);
    }
    if h_zero && strictly && mu > 0.0 && weak_norm_conditions(k, beta, q, p) {
        return (Verdict::NonexistenceForSmallMu, Rule::SmallMuWeakNorm);
    }
    if h_zero && mu > 0.0 && compact {
        return (Verdict::ExistenceForLargeMu, Rule::LargeMu);
    }
    (Verdict::OutsideKnownRegimes, Rule::NoRuleApplies)
}

/// Classifies a problem against the published conditions, checked in a fixed
/// order so that each verdict carries exactly one rule. `lambda1` is only read
/// for Case 1; `threshold_certified` records a passed threshold test for some
/// v₀ ≥ 0 and is only read for Case 2.
pub fn regime_classify(
    spec: &ProblemSpec,
    geometry: &StarshapeReport,
    lambda1: f64,
    threshold_certified: bool,
) -> RegimeVerdict {
    let p = spec.p();
    let mut out = RegimeVerdict {
        case: String::new(),
        k: spec.k,
        beta: spec.beta,
        p,
        lambda: None,
        lambda1: None,
        mu: None,
        q: None,
        h: None,
        g_starshaped: geometry.g_starshaped,
        strictly_starshaped: geometry.strictly,
        threshold_certified,
        verdict: Verdict::OutsideKnownRegimes,
        rule: Rule::NoRuleApplies,
        citation: String::new(),
    };
    let (verdict, rule) = match &spec.case {
        Case::Case1 { lambda } => {
            out.case = "case1".into();
            out.lambda = Some(*lambda);
            out.lambda1 = Some(lambda1);
            case1_rule(*lambda, lambda1, spec.k, spec.beta, geometry.g_starshaped)
        }
        Case::Case2 { mu, q, h } => {
            out.case = "case2".into();
            out.mu = Some(*mu);
            out.q = Some(*q);
            out.h = Some(h.label());
            let geo = (geometry.g_starshaped, geometry.strictly);
            case2_rule(spec.k, spec.beta, p, *mu, *q, h.is_zero(), geo, threshold_certified)
        }
    };
    out.verdict = verdict;
    out.rule = rule;
    out.citation = rule.citation().to_string();
    out
}
