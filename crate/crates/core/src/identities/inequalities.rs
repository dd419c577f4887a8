//! Inequality harness: weighted interpolation, the Hardy split near x = 0,
//! the weak Lorentz norm and the weak-norm interpolation behind the small-μ
//! nonexistence argument. Constants the theory leaves unspecified are reported
//! as empirical values, never compared against a fixed bound here.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::extremals::{critical_exponent, SlopeFit};
use crate::field::GridFunction;
use crate::grid::{cell_weight_integral, check_exponent};
use crate::quadrature::linear_fit;

/// (∫|x|^{2β}|u|^q)^{1/q}
fn lq_norm(u: &GridFunction, q: f64, beta: f64) -> Result<f64> {
    Ok(u.weighted_integral(beta, |v| v.abs().powf(q))?.powf(1.0 / q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationTriple {
    pub q1: f64,
    pub beta1: f64,
    pub q2: f64,
    pub beta2: f64,
    pub theta: f64,
}

impl InterpolationTriple {
    /// The interpolated pair (q, β) from 1/q = θ/q₁ + (1−θ)/q₂ and
    /// β/q = θβ₁/q₁ + (1−θ)β₂/q₂.
    pub fn derived(&self) -> Result<(f64, f64)> {
        let Self { q1, beta1, q2, beta2, theta } = *self;
        if !(q1 >= 1.0 && q2 >= 1.0) || !q1.is_finite() || !q2.is_finite() {
            return Err(Error::Inadmissible(format!("need q1, q2 >= 1, got q1 = {q1}, q2 = {q2}")));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Inadmissible(format!("need theta in [0, 1], got {theta}")));
        }
        for b in [beta1, beta2] {
            check_exponent(b)?;
        }
        let q = 1.0 / (theta / q1 + (1.0 - theta) / q2);
        let beta = q * (theta * beta1 / q1 + (1.0 - theta) * beta2 / q2);
        Ok((q, beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub q: f64,
    pub beta: f64,
    /// ‖u‖_{L^q_β}
    pub lhs: f64,
    /// ‖u‖^θ_{L^{q₁}_{β₁}} ‖u‖^{1−θ}_{L^{q₂}_{β₂}}
    pub rhs: f64,
    pub ratio: f64,
}

/// ‖u‖_{L^q_β} / (‖u‖^θ_{L^{q₁}_{β₁}} ‖u‖^{1−θ}_{L^{q₂}_{β₂}}). With cell-exact
/// weights the discrete ratio obeys Hölder exactly, so it is ≤ 1 up to rounding.
pub fn interpolation_check(u: &GridFunction, t: &InterpolationTriple) -> Result<InterpolationReport> {
    let (q, beta) = t.derived()?;
    if u.is_zero() {
        return Err(Error::Degenerate("interpolation ratio of the zero function".into()));
    }
    let lhs = lq_norm(u, q, beta)?;
    let rhs = if t.theta == 1.0 {
        lq_norm(u, t.q1, t.beta1)?
    } else if t.theta == 0.0 {
        lq_norm(u, t.q2, t.beta2)?
    } else {
        lq_norm(u, t.q1, t.beta1)?.powf(t.theta) * lq_norm(u, t.q2, t.beta2)?.powf(1.0 - t.theta)
    };
    Ok(InterpolationReport { q, beta, lhs, rhs, ratio: lhs / rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub gamma: f64,
    pub eps: f64,
    pub beta: f64,
    /// ∫_{|x|<ε} |x|^{2β}u²
    pub near: f64,
    /// ∫_{|x|≥ε} |x|^{2β}u²
    pub far: f64,
    /// ∫ |u_x|², which the S² norm dominates
    pub ux_sq: f64,
    pub l2_sq: f64,
    /// near / (ε^{γ+2β} ∫|u_x|²)
    pub constant: f64,
    /// sup_{|x|≥ε} |x|^{2β} · ∫u², an upper bound for `far`
    pub far_bound: f64,
}

fn check_hardy(gamma: f64, beta: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Inadmissible(format!("need gamma in (0, 1), got {gamma}")));
    }
    check_exponent(beta)?;
    if !(gamma + 2.0 * beta > 0.0) {
        return Err(Error::Inadmissible(format!("need gamma + 2 beta > 0, got {}", gamma + 2.0 * beta)));
    }
    Ok(())
}

/// ∫_{|x|<ε} |x|^{2β}u², clipping each column cell to (−ε, ε).
fn near_integral(u: &GridFunction, eps: f64, beta: f64) -> Result<f64> {
    let g = u.grid();
    let mut col = vec![0.0; g.nx];
    for (i, c) in col.iter_mut().enumerate() {
        let lo = (g.bounds[0] + i as f64 * g.hx).max(-eps);
        let hi = (g.bounds[0] + (i + 1) as f64 * g.hx).min(eps);
        if lo < hi {
            *c = cell_weight_integral(beta, lo, hi)?;
        }
    }
    let v = u.values();
    Ok(g.interior.iter().map(|&n| col[n % g.nx] * v[n] * v[n]).sum::<f64>() * g.hy)
}

/// The two pieces of the Hardy split of ‖u‖²_{L²_β} at |x| = ε.
pub fn hardy_check(u: &GridFunction, gamma: f64, eps: f64, beta: f64) -> Result<HardyReport> {
    check_hardy(gamma, beta)?;
    if !(eps > 0.0) {
        return Err(invalid("eps", "split radius must be positive"));
    }
    let near = near_integral(u, eps, beta)?;
    let total = u.weighted_integral(beta, |v| v * v)?;
    let far = (total - near).max(0.0);
    let ux = crate::operator::grad_g(u, 0).0;
    let ux_sq = ux.dot(&ux)?;
    let l2_sq = u.dot(u)?;
    let b = u.grid().bounds;
    let r = b[0].abs().max(b[1].abs());
    let sup_w = if beta < 0.0 { eps.powf(2.0 * beta) } else { r.max(eps).powf(2.0 * beta) };
    let constant = if ux_sq > 0.0 { near / (eps.powf(gamma + 2.0 * beta) * ux_sq) } else { 0.0 };
    Ok(HardyReport { gamma, eps, beta, near, far, ux_sq, l2_sq, constant, far_bound: sup_w * l2_sq })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardySlope {
    pub eps: Vec<f64>,
    pub near: Vec<f64>,
    pub fit: SlopeFit,
    /// γ + 2β, the rate of the ε-dependent constant
    pub expected: f64,
}

/// Log-log slope of the near-axis piece against ε for a fixed u.
pub fn hardy_slope(u: &GridFunction, gamma: f64, beta: f64, eps: &[f64]) -> Result<HardySlope> {
    check_hardy(gamma, beta)?;
    if eps.len() < 2 {
        return Err(invalid("eps", "need at least two split radii"));
    }
    let near = eps.iter().map(|&e| hardy_check(u, gamma, e, beta).map(|r| r.near)).collect::<Result<Vec<_>>>()?;
    if near.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Degenerate("u vanishes near the axis for some split radius".into()));
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = near.iter().map(|v| v.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(HardySlope { eps: eps.to_vec(), near, fit: SlopeFit { slope, intercept, r2 }, expected: gamma + 2.0 * beta })
}

/// sup_{v>0} v · (∫_{|u|>v} |x|^{2k})^{1/s}, evaluated exactly: the supremum is
/// approached from below each attained level of |u|.
pub fn weak_lorentz_norm(u: &GridFunction, s: f64, k: u32) -> Result<f64> {
    if !(s > 0.0) {
        return Err(invalid("s", "index must be positive"));
    }
    let g = u.grid();
    let w = g.weights(k as f64)?;
    let v = u.values();
    let mut levels: Vec<(f64, f64)> = g
        .interior
        .iter()
        .filter(|&&n| v[n] != 0.0)
        .map(|&n| (v[n].abs(), w[n % g.nx] * g.hy))
        .collect();
    levels.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut measure = 0.0;
    let mut i = 0;
    while i < levels.len() {
        let level = levels[i].0;
        while i < levels.len() && levels[i].0 == level {
            measure += levels[i].1;
            i += 1;
        }
        best = best.max(level * measure.powf(1.0 / s));
    }
    Ok(best)
}

/// Parameters of the weak-norm interpolation estimate
/// ∫|x|^{2β}|u|^{q+1} ≤ C_s (∫|x|^{2k}|u|^p)^{θ(q+1)/p} ‖u‖^{(1−θ)(q+1)}_{L^{s,∞}_k}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeqParams {
    pub k: u32,
    pub beta: f64,
    pub q: f64,
    pub q0: f64,
    pub s: f64,
}

impl TeqParams {
    /// Checks every hypothesis and names the first one that fails.
    pub fn admissible(&self) -> Result<()> {
        let Self { k, beta, q, q0, s } = *self;
        let p = critical_exponent(k)?;
        let kf = k as f64;
        let fail = |what: &str| Err(Error::Inadmissible(what.to_string()));
        if !(beta > -0.5) {
            return fail(&format!("need beta > -1/2, got {beta}"));
        }
        if !(q >= 1.0 && q < p - 2.0) {
            return fail(&format!("need 1 <= q < p-2 = {}, got q = {q}", p - 2.0));
        }
        if !((p - 1.0) * (beta + 0.5) > (q + 1.0) * (kf + 0.5)) {
            return fail("need (p-1)(beta+1/2) > (q+1)(k+1/2)");
        }
        if !(q0 >= q && q0 < p - 2.0) {
            return fail(&format!("need q0 in [q, p-2) = [{q}, {}), got {q0}", p - 2.0));
        }
        if !(s >= 1.0 && s < q0 + 1.0) {
            return fail(&format!("need s in [1, q0+1) = [1, {}), got {s}", q0 + 1.0));
        }
        Ok(())
    }

    /// θ = (q₀+1−s)p / ((p−s)(q₀+1))
    pub fn theta(&self) -> Result<f64> {
        teq_theta(self.k, self.q0, self.s)
    }
}

pub fn teq_theta(k: u32, q0: f64, s: f64) -> Result<f64> {
    let p = critical_exponent(k)?;
    Ok((q0 + 1.0 - s) * p / ((p - s) * (q0 + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeqReport {
    pub theta: f64,
    /// ∫|x|^{2β}|u|^{q+1}
    pub lhs: f64,
    /// ∫|x|^{2k}|u|^p
    pub strong: f64,
    /// ‖u‖_{L^{s,∞}_k}
    pub weak: f64,
    /// lhs over the right-hand side without C_s
    pub ratio: f64,
}

pub fn teq_ratio(u: &GridFunction, params: &TeqParams) -> Result<TeqReport> {
    params.admissible()?;
    if u.is_zero() {
        return Err(Error::Degenerate("ratio of the zero function".into()));
    }
    let TeqParams { k, beta, q, s, .. } = *params;
    let p = critical_exponent(k)?;
    let theta = params.theta()?;
    let lhs = u.weighted_integral(beta, |v| v.abs().powf(q + 1.0))?;
    let strong = u.weighted_integral(k as f64, |v| v.abs().powf(p))?;
    let weak = weak_lorentz_norm(u, s, k)?;
    let rhs = strong.powf(theta * (q + 1.0) / p) * weak.powf((1.0 - theta) * (q + 1.0));
    Ok(TeqReport { theta, lhs, strong, weak, ratio: lhs / rhs })
}

/// 1 < q < p and 2k(q−1) + q < 2β(p−1) + p, the sufficient condition for
/// S²_{1,0} ↪ L^{q+1}_β to be compact.
pub fn compact_embedding_condition(k: u32, beta: f64, q: f64) -> bool {
    let Ok(p) = critical_exponent(k) else { return false };
    let kf = k as f64;
    beta > -0.5 && q > 1.0 && q < p && 2.0 * kf * (q - 1.0) + q < 2.0 * beta * (p - 1.0) + p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainShape;
    use crate::grid::Grid2D;
    use std::sync::Arc;

    fn square(n: usize) -> Arc<Grid2D> {
        let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        Arc::new(Grid2D::new(d, n, n, &[0.0, 1.0]).unwrap())
    }

    #[test]
    fn theta_one_is_the_identity() {
        let g = square(16);
        let u = GridFunction::from_fn(&g, |x, y| x * (1.0 - x) * y);
        let t = InterpolationTriple { q1: 3.0, beta1: 0.5, q2: 2.0, beta2: 0.0, theta: 1.0 };
        assert_eq!(interpolation_check(&u, &t).unwrap().ratio, 1.0);
    }

    #[test]
    fn constants_obey_hoelder() {
        let g = square(16);
        let u = GridFunction::from_fn(&g, |_, _| 1.0);
        let t = InterpolationTriple { q1: 4.0, beta1: 1.0, q2: 2.0, beta2: -0.2, theta: 0.3 };
        assert!(interpolation_check(&u, &t).unwrap().ratio <= 1.0 + 1e-10);
    }

    #[test]
    fn inadmissible_triples_are_rejected() {
        let t = InterpolationTriple { q1: 0.5, beta1: 0.0, q2: 2.0, beta2: 0.0, theta: 0.5 };
        assert!(t.derived().is_err());
        let t = InterpolationTriple { q1: 2.0, beta1: -0.6, q2: 2.0, beta2: 0.0, theta: 0.5 };
        assert!(t.derived().is_err());
        let t = InterpolationTriple { q1: 2.0, beta1: 0.0, q2: 2.0, beta2: 0.0, theta: 1.5 };
        assert!(t.derived().is_err());
    }

    #[test]
    fn weak_norm_of_the_unit_constant() {
        let g = square(32);
        let u = GridFunction::from_fn(&g, |_, _| 1.0);
        let v = weak_lorentz_norm(&u, 3.0, 1).unwrap();
        assert!((v - (1.0f64 / 3.0).powf(1.0 / 3.0)).abs() < 1e-14);
        let v2 = weak_lorentz_norm(&u.scale(2.5), 3.0, 1).unwrap();
        assert!((v2 - 2.5 * v).abs() < 1e-14);
        assert_eq!(weak_lorentz_norm(&GridFunction::zeros(&g), 3.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn theta_instance() {
        assert!((teq_theta(1, 3.0, 2.0).unwrap() - 9.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn teq_names_the_violated_condition() {
        let ok = TeqParams { k: 1, beta: 3.0, q: 2.0, q0: 3.0, s: 2.0 };
        ok.admissible().unwrap();
        let msg = |p: TeqParams| p.admissible().unwrap_err().to_string();
        assert!(msg(TeqParams { beta: -0.6, ..ok }).contains("beta > -1/2"));
        assert!(msg(TeqParams { q: 7.5, ..ok }).contains("q < p-2"));
        assert!(msg(TeqParams { beta: 0.0, ..ok }).contains("(p-1)(beta+1/2)"));
        assert!(msg(TeqParams { q0: 1.5, ..ok }).contains("q0"));
        assert!(msg(TeqParams { s: 4.0, ..ok }).contains("s in"));
    }

    #[test]
    fn hardy_split_adds_up() {
        let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = Arc::new(Grid2D::new(d, 64, 64, &[0.0]).unwrap());
        let u = GridFunction::from_fn(&g, |x, y| (1.0 - x * x) * (1.0 - y * y));
        let r = hardy_check(&u, 0.5, 0.25, -0.2).unwrap();
        let total = u.weighted_integral(-0.2, |v| v * v).unwrap();
        assert!((r.near + r.far - total).abs() < 1e-12 * total);
        assert!(r.far <= r.far_bound);
        assert!(r.constant.is_finite() && r.constant > 0.0);
        assert!(hardy_check(&u, 0.5, 0.25, -0.3).is_err());
        assert!(hardy_check(&u, 1.0, 0.25, 0.0).is_err());
    }

    #[test]
    fn support_away_from_the_axis_has_no_near_term() {
        let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
        let g = Arc::new(Grid2D::new(d, 64, 64, &[0.0]).unwrap());
        let u = GridFunction::from_fn(&g, |x, y| if x > 0.5 { (1.0 - x) * (1.0 - y * y) } else { 0.0 });
        let r = hardy_check(&u, 0.5, 0.25, -0.2).unwrap();
        assert_eq!(r.near, 0.0);
        assert!(r.far <= r.far_bound);
    }

    #[test]
    fn compact_condition_examples() {
        // k = 1, p = 9: 2(q−1) + q < 16β + 9
        assert!(compact_embedding_condition(1, 0.0, 3.5));
        assert!(!compact_embedding_condition(1, 0.0, 4.0));
        assert!(!compact_embedding_condition(1, 0.0, 1.0));
        assert!(!compact_embedding_condition(1, -0.6, 2.0));
    }
}
