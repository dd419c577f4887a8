//! Maximization of the energy along rays {t v : t ≥ 0} and the threshold test.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::GridFunction;
use crate::nonlinearity::NonlinearitySpec;
use crate::problem::{Case, ProblemSpec};
use crate::solver::energy::Functional;

/// Φ(t d) as a function of t ≥ 0 in coefficient form:
/// t²a/2 − t^{p+1}b/(p+1) − μ t^{q+1}c/(q+1) − Σ w H(x, y, t d⁺).
///
/// For d ≥ 0 this is Ψ(t d). The Case-1 term λt²‖d‖²_{L²_β}/2 is folded into `a`.
#[derive(Debug, Clone)]
pub struct Ray {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    h: Option<(NonlinearitySpec, Vec<(f64, f64, f64, f64)>)>,
}

impl Ray {
    /// Pure-power ray with the given coefficients.
    pub fn from_coefficients(a: f64, b: f64, p: f64, c: f64, mu: f64, q: f64) -> Self {
        Self { a, b, c, p, q, mu, h: None }
    }

    pub fn value(&self, t: f64) -> f64 {
        let mut v = t * t * self.a / 2.0 - t.powf(self.p + 1.0) * self.b / (self.p + 1.0);
        if self.mu != 0.0 {
            v -= self.mu * t.powf(self.q + 1.0) * self.c / (self.q + 1.0);
        }
        if let Some((h, nodes)) = &self.h {
            v -= nodes.iter().map(|&(w, x, y, d)| w * h.primitive(x, y, t * d)).sum::<f64>();
        }
        v
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let mut v = t * self.a - t.powf(self.p) * self.b;
        if self.mu != 0.0 {
            v -= self.mu * t.powf(self.q) * self.c;
        }
        if let Some((h, nodes)) = &self.h {
            v -= nodes.iter().map(|&(w, x, y, d)| w * h.h(x, y, t * d) * d).sum::<f64>();
        }
        v
    }

    pub fn has_perturbation(&self) -> bool {
        self.h.is_some()
    }
}

impl Functional {
    /// The ray through `d` (any sign) for this functional.
    pub fn ray(&self, d: &GridFunction) -> Result<Ray> {
        let g = self.grid().clone();
        if !std::sync::Arc::ptr_eq(d.grid(), &g) {
            return Err(crate::error::Error::GridMismatch);
        }
        let v = d.values();
        let (wk, wb) = (self.wk(), self.wb());
        let p = self.exponent;
        let (mut neg, mut b, mut c, mut m2) = (0.0, 0.0, 0.0, 0.0);
        let (mu, q, mu1, hspec) = match self.case() {
            Case::Case1 { .. } => (0.0, 2.0, 0.0, None),
            Case::Case2 { mu, q, h } => (*mu, *q, h.mu1, (!h.is_zero()).then(|| h.clone())),
        };
        let mut nodes = Vec::new();
        for &n in &g.interior {
            let dp = v[n].max(0.0);
            let dm = v[n].min(0.0);
            neg += wk[n] * dm * dm;
            b += wk[n] * dp.powf(p + 1.0);
            c += wb[n] * dp.powf(q + 1.0);
            m2 += wb[n] * dp * dp;
            if hspec.is_some() && dp > 0.0 {
                let (x, y) = g.coords(n);
                nodes.push((wk[n], x, y, dp));
            }
        }
        let mut a = self.stiffness_energy(v) + mu1 * neg;
        if let Case::Case1 { lambda } = self.case() {
            a -= lambda * m2;
        }
        Ok(Ray { a, b, c, p, q, mu, h: hspec.map(|h| (h, nodes)) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NehariRayReport {
    /// X = ‖v‖²_{S²}
    pub x_norm_sq: f64,
    /// ‖v⁺‖^{p+1}_{L^{p+1}_k}
    pub b: f64,
    pub t_star: Option<f64>,
    /// Y = Ψ(t* v)
    pub y: Option<f64>,
    /// Ψ′ along the ray at t*
    pub derivative_at_t: f64,
    /// ((A − λ‖v‖²_{L²_β})/B)^{1/(p−1)} when the ray is a pure two-term power
    pub closed_form_t: Option<f64>,
    pub degenerate: bool,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Global maximizer of a ray: log-spaced scan, golden section on the best
/// bracket, then Newton steps on the derivative.
pub fn ray_max(ray: &Ray) -> (Option<f64>, f64) {
    let mut best = (0.0, 0.0f64);
    let mut prev = None;
    let mut bracket = None;
    for j in -120..=120 {
        let t = 2f64.powf(j as f64 / 4.0);
        let v = ray.value(t);
        if !v.is_finite() {
            break;
        }
        if v > best.1 {
            best = (t, v);
            bracket = Some((prev.unwrap_or(0.0), 2f64.powf((j + 1) as f64 / 4.0)));
        }
        prev = Some(t);
        // past the max of every term once the value is very negative
        if v < -1e6 * best.1.abs().max(1e-300) && best.1 > 0.0 {
            break;
        }
    }
    let Some((mut lo, mut hi)) = bracket else {
        return (None, ray.derivative(0.0));
    };
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (ray.value(x1), ray.value(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = ray.value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = ray.value(x1);
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..8 {
        let d = ray.derivative(t);
        let dt = 1e-6 * t;
        let d2 = (ray.derivative(t + dt) - ray.derivative(t - dt)) / (2.0 * dt);
        if !(d2 < 0.0) {
            break;
        }
        let next = t - d / d2;
        if !(next > 0.0) || (next - t).abs() > 0.1 * t {
            break;
        }
        let done = (next - t).abs() <= 1e-15 * t;
        t = next;
        if done {
            break;
        }
    }
    (Some(t), ray.derivative(t))
}

fn report_for(ray: &Ray, x_norm_sq: f64) -> NehariRayReport {
    let (t, dpsi) = ray_max(ray);
    let closed = (ray.mu == 0.0 && !ray.has_perturbation() && ray.a > 0.0 && ray.b > 0.0)
        .then(|| (ray.a / ray.b).powf(1.0 / (ray.p - 1.0)));
    NehariRayReport {
        x_norm_sq,
        b: ray.b,
        t_star: t,
        y: t.map(|t| ray.value(t)),
        derivative_at_t: dpsi,
        closed_form_t: closed,
        degenerate: t.is_none(),
    }
}

/// sup_{t ≥ 0} Ψ(t v) for v ≥ 0.
pub fn nehari_ray_max(v: &GridFunction, spec: &ProblemSpec) -> Result<NehariRayReport> {
    if v.min() < 0.0 || v.is_zero() {
        return Err(invalid("v", "ray direction must be nonnegative and nonzero"));
    }
    let f = Functional::new(spec, v.grid())?;
    let ray = f.ray(v)?;
    Ok(report_for(&ray, f.stiffness_energy(v.values())))
}

/// The same maximization for a coefficient-form ray.
pub fn nehari_ray_max_coefficients(ray: &Ray) -> NehariRayReport {
    report_for(ray, ray.a)
}

/// (1+k)/(2+3k) · S^{(2+3k)/(2(1+k))}
pub fn threshold_value(k: u32, s_est: f64) -> Result<f64> {
    if !(s_est > 0.0) {
        return Err(invalid("S", "Sobolev constant estimate must be positive"));
    }
    let kf = k as f64;
    Ok((1.0 + kf) / (2.0 + 3.0 * kf) * s_est.powf((2.0 + 3.0 * kf) / (2.0 * (1.0 + kf))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub sup: f64,
    pub threshold: f64,
    /// propagated from the error bar of the S estimate
    pub threshold_error: f64,
    /// sup < threshold − threshold_error
    pub satisfied: bool,
    pub ray: NehariRayReport,
}

fn threshold_check(rep: NehariRayReport, k: u32, s_est: f64, s_err: f64) -> Result<ThresholdCheck> {
    let threshold = threshold_value(k, s_est)?;
    let kf = k as f64;
    let threshold_error = threshold * (2.0 + 3.0 * kf) / (2.0 * (1.0 + kf)) * s_err / s_est;
    let sup = rep.y.unwrap_or(0.0).max(0.0);
    Ok(ThresholdCheck {
        sup,
        threshold,
        threshold_error,
        satisfied: rep.y.is_some() && sup < threshold - threshold_error,
        ray: rep,
    })
}

/// sup_t Ψ(t v₀) against the threshold built from (S_est ± s_err).
pub fn check_threshold(v0: &GridFunction, spec: &ProblemSpec, s_est: f64, s_err: f64) -> Result<ThresholdCheck> {
    threshold_check(nehari_ray_max(v0, spec)?, spec.k, s_est, s_err)
}

pub fn check_threshold_coefficients(ray: &Ray, k: u32, s_est: f64, s_err: f64) -> Result<ThresholdCheck> {
    threshold_check(nehari_ray_max_coefficients(ray), k, s_est, s_err)
}
