//! The perturbation h(x, y, ξ) of Case 2 together with its primitive
//! H(x, y, ξ) = ∫₀^ξ h(x, y, s) ds (ξ ≥ 0; H = 0 for ξ < 0) and the growth
//! constant μ₁ with |h| ≤ ξ^p + μ₁ξ.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::DomainShape;
use crate::error::{invalid, Error, Result};
use crate::extremals::critical_exponent;
use crate::quadrature::adaptive_simpson;

pub type NonlinearFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Absolute tolerance of the numeric primitive.
pub const PRIMITIVE_TOL: f64 = 1e-10;

#[derive(Clone)]
pub enum NonlinearityKind {
    Zero,
    /// h = coef · ξ^s for ξ ≥ 0
    Power { coef: f64, s: f64 },
    /// User supplied h; the primitive falls back to adaptive Simpson.
    Custom {
        label: String,
        h: NonlinearFn,
        primitive: Option<NonlinearFn>,
    },
}

#[derive(Clone)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    pub mu1: f64,
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mu1 = {})", self.label(), self.mu1)
    }
}

impl PartialEq for NonlinearitySpec {
    fn eq(&self, other: &Self) -> bool {
        self.mu1 == other.mu1
            && match (&self.kind, &other.kind) {
                (NonlinearityKind::Zero, NonlinearityKind::Zero) => true,
                (
                    NonlinearityKind::Power { coef, s },
                    NonlinearityKind::Power { coef: c, s: t },
                ) => coef == c && s == t,
                (
                    NonlinearityKind::Custom { label, h, .. },
                    NonlinearityKind::Custom { label: l, h: g, .. },
                ) => label == l && Arc::ptr_eq(h, g),
                _ => false,
            }
    }
}

impl NonlinearitySpec {
    pub fn zero() -> Self {
        Self { kind: NonlinearityKind::Zero, mu1: 0.0 }
    }

    pub fn power(coef: f64, s: f64, mu1: f64) -> Result<Self> {
        if !coef.is_finite() || !(s > 0.0) || !s.is_finite() {
            return Err(invalid("h", "power nonlinearity needs finite coef and s > 0"));
        }
        check_mu1(mu1)?;
        Ok(Self { kind: NonlinearityKind::Power { coef, s }, mu1 })
    }

    pub fn custom<F>(label: impl Into<String>, h: F, mu1: f64) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        check_mu1(mu1)?;
        Ok(Self {
            kind: NonlinearityKind::Custom { label: label.into(), h: Arc::new(h), primitive: None },
            mu1,
        })
    }

    /// Attaches an analytic primitive to a custom nonlinearity.
    pub fn with_primitive<F>(mut self, big_h: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        if let NonlinearityKind::Custom { primitive, .. } = &mut self.kind {
            *primitive = Some(Arc::new(big_h));
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        match self.kind {
            NonlinearityKind::Zero => true,
            NonlinearityKind::Power { coef, .. } => coef == 0.0,
            NonlinearityKind::Custom { .. } => false,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            NonlinearityKind::Zero => "0".into(),
            NonlinearityKind::Power { coef, s } => format!("{coef}*xi^{s}"),
            NonlinearityKind::Custom { label, .. } => label.clone(),
        }
    }

    /// h(x, y, ξ); only ξ ≥ 0 is meaningful, negative ξ is treated as 0.
    pub fn h(&self, x: f64, y: f64, xi: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::Power { coef, s } => {
                if xi > 0.0 {
                    coef * xi.powf(*s)
                } else {
                    0.0
                }
            }
            NonlinearityKind::Custom { h, .. } => h(x, y, xi.max(0.0)),
        }
    }

    /// H(x, y, ξ), zero for ξ ≤ 0.
    pub fn primitive(&self, x: f64, y: f64, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::Power { coef, s } => coef * xi.powf(s + 1.0) / (s + 1.0),
            NonlinearityKind::Custom { h, primitive, .. } => match primitive {
                Some(big_h) => big_h(x, y, xi),
                None => adaptive_simpson(&|t: f64| h(x, y, t), 0.0, xi, PRIMITIVE_TOL),
            },
        }
    }
}

fn check_mu1(mu1: f64) -> Result<()> {
    if !(mu1 >= 0.0) || !mu1.is_finite() {
        return Err(invalid("mu1", "growth constant must be finite and >= 0"));
    }
    Ok(())
}

/// Outcome of [`validate_nonlinearity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityValidation {
    pub label: String,
    pub mu1: f64,
    pub samples: usize,
    /// max |h(x, y, 0)|
    pub h_at_zero: f64,
    /// max |h/ξ| at ξ = 1e-6 and 1e-4
    pub small_xi_ratio: [f64; 2],
    /// max |h/ξ^p| at ξ = 1e4 and 1e6
    pub large_xi_ratio: [f64; 2],
    /// sampled sup of (|h| − ξ^p)/ξ, the smallest μ₁ consistent with the samples
    pub required_mu1: f64,
}

const XI_LO: f64 = 1e-6;
const XI_HI: f64 = 1e6;
/// A limit estimate above this that does not decrease counts as nonzero.
const LIMIT_TOL: f64 = 1e-3;

/// Samples (x, y, ξ) and checks (h1), (h2) and the declared growth bound (h3).
/// A violation is returned as an error carrying the witness point.
pub fn validate_nonlinearity(
    spec: &NonlinearitySpec,
    k: u32,
    domain: &DomainShape,
    sample_count: usize,
    seed: u64,
) -> Result<NonlinearityValidation> {
    let p = critical_exponent(k)?;
    if sample_count == 0 {
        return Err(invalid("sample_count", "need at least one sample"));
    }
    let b = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(sample_count);
    let mut tries = 0;
    while points.len() < sample_count {
        tries += 1;
        if tries > 1000 * sample_count {
            return Err(Error::EmptyDomain);
        }
        let x = rng.gen_range(b[0]..b[1]);
        let y = rng.gen_range(b[2]..b[3]);
        if domain.contains(x, y) {
            points.push((x, y, rng.gen_range(XI_LO.ln()..XI_HI.ln()).exp()));
        }
    }
    let violation = |property, x, y, xi, detail: String| Error::NonlinearityViolation {
        property,
        x,
        y,
        xi,
        detail,
    };

    let mut h_at_zero = 0.0f64;
    for &(x, y, _) in &points {
        let v = spec.h(x, y, 0.0);
        h_at_zero = h_at_zero.max(v.abs());
        if !(v.abs() <= 1e-14) {
            return Err(violation("h1", x, y, 0.0, format!("h = {v}")));
        }
    }

    let ratio_at = |xi: f64, pow: f64| -> (f64, (f64, f64)) {
        let mut worst = (0.0f64, (0.0, 0.0));
        for &(x, y, _) in &points {
            let r = (spec.h(x, y, xi) / xi.powf(pow)).abs();
            if !(r <= worst.0) {
                worst = (r, (x, y));
            }
        }
        worst
    };
    let (s6, _) = ratio_at(1e-6, 1.0);
    let (s4, _) = ratio_at(1e-4, 1.0);
    if !(s6 < s4 || s6 <= LIMIT_TOL) {
        let (_, (x, y)) = ratio_at(1e-6, 1.0);
        return Err(violation("h2", x, y, 1e-6, format!("h/xi does not vanish as xi -> 0 ({s6:.3e})")));
    }
    let (l4, _) = ratio_at(1e4, p);
    let (l6, (x6, y6)) = ratio_at(1e6, p);
    if !(l6 < l4 || l6 <= LIMIT_TOL) {
        return Err(violation(
            "h2",
            x6,
            y6,
            1e6,
            format!("h/xi^p does not vanish as xi -> infinity ({l4:.3e} at 1e4, {l6:.3e} at 1e6)"),
        ));
    }

    let mut required = 0.0f64;
    for &(x, y, xi) in &points {
        let v = spec.h(x, y, xi).abs();
        let bound = xi.powf(p) + spec.mu1 * xi;
        required = required.max((v - xi.powf(p)) / xi);
        if !(v <= bound * (1.0 + 1e-12)) {
            return Err(violation("h3", x, y, xi, format!("|h| = {v:.6e} > xi^p + mu1*xi = {bound:.6e}")));
        }
    }

    Ok(NonlinearityValidation {
        label: spec.label(),
        mu1: spec.mu1,
        samples: sample_count,
        h_at_zero,
        small_xi_ratio: [s6, s4],
        large_xi_ratio: [l4, l6],
        required_mu1: required.max(0.0),
    })
}
