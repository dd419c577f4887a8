//! Extremal functions, the sharp Sobolev constant and the cutoff-family
//! asymptotics.
//!
//! With r² = x^{2(k+1)} + (k+1)² y² and the substitution x^{k+1} = r cos θ,
//! (k+1) y = r sin θ, a radial U = Φ(r) satisfies |∇_G U|² = (k+1)² x^{2k} Φ'²
//! and dx dy = r^{1/(k+1)} cos^{1/(k+1)-1}θ dr dθ / (k+1)² on each half plane.
//! Hence
//!   ∫ |∇_G U|²        = 2 A(c) ∫ Φ'² r^{1+c} dr,                 c = k/(k+1),
//!   ∫ |x|^{2a} F(Φ)   = 2 A((2a-k)/(k+1)) / (k+1)² ∫ F(Φ) r^{(2a+1)/(k+1)} dr,
//! with A(γ) = ∫_{-π/2}^{π/2} cos^γ θ dθ.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::DomainShape;
use crate::error::{invalid, Error, Result};
use crate::field::GridFunction;
use crate::grid::{check_exponent, Grid2D};
use crate::operator::energy;
use crate::quadrature::{graded_breaks, linear_fit, tanh_sinh, GaussLegendre};

/// p = (4 + 5k)/k.
pub fn critical_exponent(k: u32) -> Result<f64> {
    let (num, den) = critical_exponent_rational(k)?;
    Ok(num as f64 / den as f64)
}

/// p as a reduced fraction.
pub fn critical_exponent_rational(k: u32) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(invalid("k", "the critical exponent needs k >= 1"));
    }
    let (mut a, mut b) = (4 + 5 * k as u64, k as u64);
    let g = gcd(a, b);
    a /= g;
    b /= g;
    Ok((a, b))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Decay exponent m = k/(2(k+1)) of U_ε.
pub fn bubble_exponent(k: u32) -> f64 {
    k as f64 / (2.0 * (k as f64 + 1.0))
}

/// Homogeneous radius about (0, yc).
pub fn homogeneous_radius(k: u32, x: f64, y: f64, yc: f64) -> f64 {
    let kp = k as f64 + 1.0;
    (x.abs().powf(2.0 * kp) + kp * kp * (y - yc).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub k: u32,
    pub eps: f64,
}

impl ExtremalSpec {
    pub fn new(k: u32, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid("eps", "scale must be positive"));
        }
        Ok(Self { k, eps })
    }
}

/// U_ε(x, y) = (ε² + r²)^{-k/(2(k+1))} at the given points.
pub fn extremal_u(spec: ExtremalSpec, points: &[(f64, f64)]) -> Vec<f64> {
    let m = bubble_exponent(spec.k);
    points
        .iter()
        .map(|&(x, y)| {
            let r = homogeneous_radius(spec.k, x, y, 0.0);
            (spec.eps * spec.eps + r * r).powf(-m)
        })
        .collect()
}

/// A(γ) = ∫_{-π/2}^{π/2} cos^γ θ dθ for γ > -1.
pub fn angular_factor(gamma: f64) -> Result<f64> {
    if !(gamma > -1.0) {
        return Err(invalid("gamma", "angular factor needs gamma > -1"));
    }
    // 2 ∫_0^{π/2} sin^γ t dt, singular end at t = 0
    Ok(2.0 * tanh_sinh(0.5 * PI, 8, |t| t.sin().powf(gamma)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueWithError {
    pub value: f64,
    pub error: f64,
}

/// Radial profiles Φ(r) handled by the 1D route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// (ε² + r²)^{-m} on the whole plane
    Bubble { eps: f64 },
    /// ψ(r)(ε² + r²)^{-m}, ψ = 1 on [0, r_in], cubic ramp to 0 at r_out
    Cutoff { eps: f64, r_in: f64, r_out: f64 },
}

impl RadialProfile {
    fn eps(&self) -> f64 {
        match *self {
            RadialProfile::Bubble { eps } | RadialProfile::Cutoff { eps, .. } => eps,
        }
    }

    fn ramp(&self, r: f64) -> (f64, f64) {
        match *self {
            RadialProfile::Bubble { .. } => (1.0, 0.0),
            RadialProfile::Cutoff { r_in, r_out, .. } => ramp(r, r_in, r_out),
        }
    }

    /// (Φ(r), Φ'(r))
    pub fn eval(&self, k: u32, r: f64) -> (f64, f64) {
        let m = bubble_exponent(k);
        let e2 = self.eps() * self.eps();
        let base = (e2 + r * r).powf(-m);
        let dbase = -2.0 * m * r * base / (e2 + r * r);
        let (psi, dpsi) = self.ramp(r);
        (psi * base, dpsi * base + psi * dbase)
    }
}

/// C¹ cubic ramp: 1 on [0, r_in], 1 − 3t² + 2t³ on the annulus, 0 beyond.
pub fn ramp(r: f64, r_in: f64, r_out: f64) -> (f64, f64) {
    if r <= r_in {
        (1.0, 0.0)
    } else if r >= r_out {
        (0.0, 0.0)
    } else {
        let w = r_out - r_in;
        let t = (r - r_in) / w;
        (1.0 - 3.0 * t * t + 2.0 * t * t * t, 6.0 * t * (t - 1.0) / w)
    }
}

/// Composite Gauss–Legendre in r with n and 2n points per panel.
#[derive(Debug, Clone)]
pub struct RadialQuadrature {
    pub k: u32,
    pub r_max: f64,
    coarse: GaussLegendre,
    fine: GaussLegendre,
}

impl RadialQuadrature {
    pub fn new(k: u32, n: usize, r_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", "need at least 2 points per panel"));
        }
        if !(r_max > 0.0) {
            return Err(invalid("r_max", "truncation radius must be positive"));
        }
        Ok(Self { k, r_max, coarse: GaussLegendre::new(n), fine: GaussLegendre::new(2 * n) })
    }

    pub fn standard(k: u32) -> Self {
        Self::new(k, 20, 100.0).expect("valid defaults")
    }

    fn breaks(&self, prof: &RadialProfile) -> Vec<f64> {
        let eps = prof.eps();
        match *prof {
            RadialProfile::Bubble { .. } => {
                graded_breaks(eps.min(self.r_max) * 1e-8, self.r_max, 2.0, &[eps])
            }
            RadialProfile::Cutoff { r_in, r_out, .. } => {
                graded_breaks(eps.min(r_in) * 1e-8, r_out, 2.0, &[eps, r_in])
            }
        }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, breaks: &[f64], f: F) -> ValueWithError {
        let a: f64 = breaks.windows(2).map(|w| self.coarse.integrate(w[0], w[1], &f)).sum();
        let b: f64 = breaks.windows(2).map(|w| self.fine.integrate(w[0], w[1], &f)).sum();
        ValueWithError { value: b, error: (a - b).abs() + 4.0 * f64::EPSILON * b.abs() }
    }

    /// ∫ |∇_G u|² over the plane for u = Φ(r).
    pub fn energy(&self, prof: &RadialProfile) -> Result<ValueWithError> {
        let k = self.k;
        let c = k as f64 / (k as f64 + 1.0);
        let pref = 2.0 * angular_factor(c)?;
        let breaks = self.breaks(prof);
        let mut v = self.integrate(&breaks, |r| {
            let (_, d) = prof.eval(k, r);
            d * d * r.powf(1.0 + c)
        });
        if let RadialProfile::Bubble { eps } = *prof {
            let m = bubble_exponent(k);
            let t = power_tail(3.0 + c, 2.0 * m + 2.0, eps, self.r_max)?;
            v.value += 4.0 * m * m * t.value;
            v.error += 4.0 * m * m * t.error;
        }
        Ok(ValueWithError { value: pref * v.value, error: pref * v.error })
    }

    /// ∫ |x|^{2a} |u|^s over the plane for u = Φ(r).
    pub fn weighted_power(&self, prof: &RadialProfile, a: f64, s: f64) -> Result<ValueWithError> {
        check_exponent(a)?;
        let k = self.k;
        let kp = k as f64 + 1.0;
        let pref = 2.0 * angular_factor((2.0 * a - k as f64) / kp)? / (kp * kp);
        let e = (2.0 * a + 1.0) / kp;
        let breaks = self.breaks(prof);
        let mut v = self.integrate(&breaks, |r| {
            let (f, _) = prof.eval(k, r);
            f.abs().powf(s) * r.powf(e)
        });
        if let RadialProfile::Bubble { eps } = *prof {
            let m = bubble_exponent(k);
            let t = power_tail(e, m * s, eps, self.r_max)?;
            v.value += t.value;
            v.error += t.error;
        }
        Ok(ValueWithError { value: pref * v.value, error: pref * v.error })
    }

    /// Q(u) = ∫|∇_G u|² / (∫|x|^{2k}|u|^{p+1})^{2/(p+1)}.
    pub fn sobolev_quotient(&self, prof: &RadialProfile) -> Result<ValueWithError> {
        let p = critical_exponent(self.k)?;
        let n = self.energy(prof)?;
        let d = self.weighted_power(prof, self.k as f64, p + 1.0)?;
        let e = 2.0 / (p + 1.0);
        let q = n.value / d.value.powf(e);
        let rel = n.error / n.value + e * d.error / d.value;
        Ok(ValueWithError { value: q, error: q * rel })
    }
}

/// ∫_R^∞ r^a (ε² + r²)^{-b} dr by the binomial series in (ε/R)².
fn power_tail(a: f64, b: f64, eps: f64, big_r: f64) -> Result<ValueWithError> {
    if a - 2.0 * b >= -1.0 {
        return Err(Error::Degenerate(format!(
            "whole-plane integral diverges (r^{a} against (eps^2+r^2)^-{b})"
        )));
    }
    if eps >= big_r {
        return Err(invalid("r_max", "truncation radius must exceed eps"));
    }
    let x = (eps / big_r).powi(2);
    let mut coef = 1.0;
    let mut sum = 0.0;
    let mut last = 0.0;
    for j in 0..400 {
        let jf = j as f64;
        let term = coef * big_r.powf(a - 2.0 * b + 1.0) * x.powi(j) / (2.0 * b + 2.0 * jf - a - 1.0);
        sum += term;
        last = term.abs();
        if last <= 1e-18 * sum.abs() {
            break;
        }
        coef *= -(b + jf) / (jf + 1.0);
    }
    Ok(ValueWithError { value: sum, error: 2.0 * last })
}

/// Q(u) on the grid from the discrete energy and cell-exact weights.
pub fn sobolev_quotient(u: &GridFunction, k: u32) -> Result<f64> {
    let p = critical_exponent(k)?;
    let d = u.weighted_integral(k as f64, |v| v.abs().powf(p + 1.0))?;
    if d == 0.0 {
        return Err(Error::Degenerate("zero denominator in the Sobolev quotient".into()));
    }
    Ok(energy(u, k) / d.powf(2.0 / (p + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevEstimate {
    pub k: u32,
    pub value: f64,
    pub error_bar: f64,
    /// |Q_n − Q_{2n}| part of the error bar
    pub discretization: f64,
    /// remainder of the analytic tail beyond r_max
    pub truncation: f64,
    pub n: usize,
    pub r_max: f64,
}

/// S ≈ Q(U_1) by the radial route.
pub fn estimate_s(k: u32, n: usize, r_max: f64) -> Result<SobolevEstimate> {
    if r_max <= 1.0 {
        return Err(invalid("r_max", "truncation radius must exceed the bubble scale 1"));
    }
    let quad = RadialQuadrature::new(k, n, r_max)?;
    let prof = RadialProfile::Bubble { eps: 1.0 };
    let q = quad.sobolev_quotient(&prof)?;
    // the tail remainders, propagated to the quotient like the other errors
    let m = bubble_exponent(k);
    let c = k as f64 / (k as f64 + 1.0);
    let kp = k as f64 + 1.0;
    let p = critical_exponent(k)?;
    let num = quad.energy(&prof)?.value;
    let den = quad.weighted_power(&prof, k as f64, p + 1.0)?.value;
    let t1 = power_tail(3.0 + c, 2.0 * m + 2.0, 1.0, r_max)?;
    let t2 = power_tail((2.0 * k as f64 + 1.0) / kp, m * (p + 1.0), 1.0, r_max)?;
    let a = angular_factor(c)?;
    let truncation = q.value
        * (2.0 * a * 4.0 * m * m * t1.error / num
            + 2.0 / (p + 1.0) * (2.0 * a / (kp * kp)) * t2.error / den);
    Ok(SobolevEstimate {
        k,
        value: q.value,
        error_bar: q.error,
        discretization: (q.error - truncation).max(0.0),
        truncation,
        n,
        r_max,
    })
}

/// Geometry of the cutoff family about (0, yc).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffGeometry {
    pub k: u32,
    pub r_in: f64,
    pub r_out: f64,
    pub yc: f64,
}

impl CutoffGeometry {
    /// The outer radius is min(2R, r-inradius of Ω about (0, yc)). The center
    /// defaults to the origin when it lies in Ω.
    pub fn new(domain: &DomainShape, k: u32, r_in: f64, yc: Option<f64>) -> Result<Self> {
        let yc = match yc {
            Some(y) => y,
            None if domain.contains(0.0, 0.0) => 0.0,
            None => {
                return Err(invalid("yc", "origin not in the domain; choose a center on {x = 0}"))
            }
        };
        if !domain.contains(0.0, yc) {
            return Err(invalid("yc", "cutoff center must lie in the domain"));
        }
        if !(r_in > 0.0) {
            return Err(invalid("R", "inner radius must be positive"));
        }
        let inr = domain.r_inradius(k, yc);
        if r_in >= inr {
            return Err(invalid(
                "R",
                format!("B_R with R = {r_in} is not contained in the domain (r-inradius {inr})"),
            ));
        }
        Ok(Self { k, r_in, r_out: (2.0 * r_in).min(inr), yc })
    }

    pub fn profile(&self, eps: f64) -> RadialProfile {
        RadialProfile::Cutoff { eps, r_in: self.r_in, r_out: self.r_out }
    }

    /// Whether the grid resolves the bubble of scale ε in both directions.
    pub fn resolved(&self, grid: &Grid2D, eps: f64) -> bool {
        let kp = self.k as f64 + 1.0;
        grid.hx <= eps.powf(1.0 / kp) / 8.0 && grid.hy <= eps / (8.0 * kp)
    }
}

/// u_ε = φ U_ε sampled on the grid.
pub fn cutoff_family(eps: f64, geom: &CutoffGeometry, grid: &Arc<Grid2D>) -> Result<GridFunction> {
    if !(eps > 0.0) {
        return Err(invalid("eps", "scale must be positive"));
    }
    let prof = geom.profile(eps);
    Ok(GridFunction::from_fn(grid, |x, y| {
        prof.eval(geom.k, homogeneous_radius(geom.k, x, y, geom.yc)).0
    }))
}

/// Growth regime of ‖u_ε‖²_{L²_β} as ε → 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum L2Regime {
    /// k < 2(β+1): bounded
    #[serde(rename = "k<2(beta+1)")]
    Bounded,
    /// k = 2(β+1): grows like |ln ε|
    #[serde(rename = "k=2(beta+1)")]
    Logarithmic,
    /// k > 2(β+1): grows like ε^{(2(β+1)-k)/(k+1)}
    #[serde(rename = "k>2(beta+1)")]
    Power,
}

impl L2Regime {
    pub fn of(k: u32, beta: f64) -> Self {
        let d = k as f64 - 2.0 * (beta + 1.0);
        if d.abs() < 1e-12 {
            L2Regime::Logarithmic
        } else if d > 0.0 {
            L2Regime::Power
        } else {
            L2Regime::Bounded
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn loglog_fit(eps: &[f64], vals: &[f64]) -> SlopeFit {
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.abs().ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    SlopeFit { slope, intercept, r2 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub k: u32,
    pub beta: f64,
    pub geometry: CutoffGeometry,
    pub eps: Vec<f64>,
    /// ‖u_ε‖²_{S²}
    pub norm_s2_sq: Vec<f64>,
    /// ‖u_ε‖²_{L^{p+1}_k}
    pub norm_lp1k_sq: Vec<f64>,
    /// ‖u_ε‖²_{L²_β}
    pub norm_l2beta_sq: Vec<f64>,
    /// grid-route ‖u_ε‖²_{S²} where the grid resolves ε
    pub grid_norm_s2_sq: Vec<Option<f64>>,
    pub grid_norm_l2beta_sq: Vec<Option<f64>>,
    /// number of smallest ε used by the fits
    pub fit_window: usize,
    pub slope_s2: SlopeFit,
    pub slope_lp1k: SlopeFit,
    pub slope_l2beta: SlopeFit,
    /// coefficient C of ‖u_ε‖²_{L²_β} ≈ C|ln ε| + D, when the regime is logarithmic
    pub log_coefficient: Option<f64>,
    pub regime: L2Regime,
    pub observed_regime: L2Regime,
    /// growth exponent read off the last two increments of ‖u_ε‖²_{L²_β}
    pub increment_exponent: f64,
    pub flags: Vec<String>,
}

fn check_eps_list(eps: &[f64]) -> Result<()> {
    if eps.len() < 3 {
        return Err(invalid("eps", "need at least three scales"));
    }
    if eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("eps", "scales must be positive and strictly decreasing"));
    }
    Ok(())
}

/// Log–log slopes of the three norms of u_ε, computed by the radial route
/// (exact on the r-ball) with grid-route values alongside where resolved.
pub fn asymptotic_slopes(
    k: u32,
    beta: f64,
    eps: &[f64],
    geom: &CutoffGeometry,
    grid: Option<&Arc<Grid2D>>,
) -> Result<AsymptoticsReport> {
    check_exponent(beta)?;
    check_eps_list(eps)?;
    if geom.k != k {
        return Err(invalid("geometry", "cutoff geometry built for another k"));
    }
    let p = critical_exponent(k)?;
    let quad = RadialQuadrature::standard(k);
    let mut s2 = Vec::new();
    let mut lp = Vec::new();
    let mut l2 = Vec::new();
    let mut gs2 = Vec::new();
    let mut gl2 = Vec::new();
    let mut flags = Vec::new();
    for &e in eps {
        if e >= geom.r_in {
            return Err(invalid("eps", format!("scale {e} is not small against R = {}", geom.r_in)));
        }
        let prof = geom.profile(e);
        s2.push(quad.energy(&prof)?.value);
        lp.push(quad.weighted_power(&prof, k as f64, p + 1.0)?.value.powf(2.0 / (p + 1.0)));
        l2.push(quad.weighted_power(&prof, beta, 2.0)?.value);
        match grid {
            Some(g) if geom.resolved(g, e) => {
                let u = cutoff_family(e, geom, g)?;
                gs2.push(Some(energy(&u, k)));
                gl2.push(Some(u.weighted_integral(beta, |v| v * v)?));
            }
            Some(_) => {
                flags.push(format!("grid does not resolve eps = {e:e}; grid value omitted"));
                gs2.push(None);
                gl2.push(None);
            }
            None => {
                gs2.push(None);
                gl2.push(None);
            }
        }
    }
    let n = eps.len();
    let window = (n / 2).max(3).min(n);
    let tail = n - window;
    let slope_s2 = loglog_fit(&eps[tail..], &s2[tail..]);
    let slope_lp1k = loglog_fit(&eps[tail..], &lp[tail..]);
    let slope_l2beta = loglog_fit(&eps[tail..], &l2[tail..]);
    let regime = L2Regime::of(k, beta);
    let log_coefficient = (regime == L2Regime::Logarithmic).then(|| {
        let xs: Vec<f64> = eps[tail..].iter().map(|e| e.ln().abs()).collect();
        linear_fit(&xs, &l2[tail..]).0
    });
    let d1 = l2[n - 2] - l2[n - 3];
    let d2 = l2[n - 1] - l2[n - 2];
    let rho = eps[n - 2] / eps[n - 1];
    let increment_exponent = if d1 > 0.0 && d2 > 0.0 { (d2 / d1).ln() / rho.ln() } else { -1.0 };
    let observed_regime = if increment_exponent > 0.1 {
        L2Regime::Power
    } else if increment_exponent >= -0.1 {
        L2Regime::Logarithmic
    } else {
        L2Regime::Bounded
    };
    for (name, fit) in [("norm_s2_sq", slope_s2), ("norm_lp1k_sq", slope_lp1k)] {
        if fit.r2 < 0.99 {
            flags.push(format!("{name} fit has R^2 = {:.4} < 0.99", fit.r2));
        }
    }
    if regime == L2Regime::Power && slope_l2beta.r2 < 0.99 {
        flags.push(format!("norm_l2beta_sq fit has R^2 = {:.4} < 0.99", slope_l2beta.r2));
    }
    Ok(AsymptoticsReport {
        k,
        beta,
        geometry: *geom,
        eps: eps.to_vec(),
        norm_s2_sq: s2,
        norm_lp1k_sq: lp,
        norm_l2beta_sq: l2,
        grid_norm_s2_sq: gs2,
        grid_norm_l2beta_sq: gl2,
        fit_window: window,
        slope_s2,
        slope_lp1k,
        slope_l2beta,
        log_coefficient,
        regime,
        observed_regime,
        increment_exponent,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QFamilyReport {
    pub k: u32,
    pub beta: f64,
    pub q: f64,
    pub eps: Vec<f64>,
    /// ‖v_ε‖^{q+1}_{L^{q+1}_β} with v_ε = u_ε/‖u_ε‖_{L^{p+1}_k}
    pub values: Vec<f64>,
    pub fit: SlopeFit,
    /// min{(q+1)k/(2(k+1)), [4(β+1)-(q-1)k]/(2(k+1))}
    pub expected_slope: f64,
    /// 2β + 2 = qk: the decay carries an extra |ln ε|
    pub log_branch: bool,
    /// 2k(q−1) + q < 2β(p−1) + p
    pub compactness_condition: bool,
    /// values strictly decreasing over the tail of the ε list
    pub monotone_tail: bool,
    /// max |‖v_ε‖_{L^{p+1}_k} − 1| over grid-resolved ε
    pub normalization_defect: Option<f64>,
}

pub fn q_family_exponent(k: u32, beta: f64, q: f64) -> f64 {
    let kf = k as f64;
    let e1 = (q + 1.0) * kf / (2.0 * (kf + 1.0));
    let e2 = (4.0 * (beta + 1.0) - (q - 1.0) * kf) / (2.0 * (kf + 1.0));
    e1.min(e2)
}

/// Decay of ‖v_ε‖^{q+1}_{L^{q+1}_β} along the cutoff family.
pub fn q_family_decay(
    k: u32,
    beta: f64,
    q: f64,
    eps: &[f64],
    geom: &CutoffGeometry,
    grid: Option<&Arc<Grid2D>>,
) -> Result<QFamilyReport> {
    check_exponent(beta)?;
    check_eps_list(eps)?;
    let p = critical_exponent(k)?;
    if !(q > 1.0 && q < p) {
        return Err(invalid("q", format!("need 1<q<p, got q = {q}, p = {p}")));
    }
    let quad = RadialQuadrature::standard(k);
    let mut values = Vec::new();
    let mut defect: Option<f64> = None;
    for &e in eps {
        let prof = geom.profile(e);
        let den = quad.weighted_power(&prof, k as f64, p + 1.0)?.value;
        let num = quad.weighted_power(&prof, beta, q + 1.0)?.value;
        values.push(num / den.powf((q + 1.0) / (p + 1.0)));
        if let Some(g) = grid {
            if geom.resolved(g, e) {
                let u = cutoff_family(e, geom, g)?;
                let nrm = u.weighted_integral(k as f64, |v| v.abs().powf(p + 1.0))?.powf(1.0 / (p + 1.0));
                let v = u.scale(1.0 / nrm);
                let nv = v.weighted_integral(k as f64, |w| w.abs().powf(p + 1.0))?.powf(1.0 / (p + 1.0));
                let d = (nv - 1.0).abs();
                defect = Some(defect.map_or(d, |x: f64| x.max(d)));
            }
        }
    }
    let n = eps.len();
    let window = (n / 2).max(3).min(n);
    let tail = n - window;
    let fit = loglog_fit(&eps[tail..], &values[tail..]);
    let kf = k as f64;
    let monotone_tail = values[tail..].windows(2).all(|w| w[1] < w[0]);
    Ok(QFamilyReport {
        k,
        beta,
        q,
        eps: eps.to_vec(),
        values,
        fit,
        expected_slope: q_family_exponent(k, beta, q),
        log_branch: (2.0 * beta + 2.0 - q * kf).abs() < 1e-12,
        compactness_condition: 2.0 * kf * (q - 1.0) + q < 2.0 * beta * (p - 1.0) + p,
        monotone_tail,
        normalization_defect: defect,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaQuotientSweep {
    pub k: u32,
    pub beta: f64,
    pub lambda: f64,
    pub eps: Vec<f64>,
    /// (‖u_ε‖²_{S²} − λ‖u_ε‖²_{L²_β}) / ‖u_ε‖²_{L^{p+1}_k}
    pub quotients: Vec<ValueWithError>,
    pub best_index: usize,
}

/// The S_λ quotient along the cutoff family (radial route).
pub fn lambda_quotient_sweep(
    k: u32,
    beta: f64,
    lambda: f64,
    eps: &[f64],
    geom: &CutoffGeometry,
) -> Result<LambdaQuotientSweep> {
    check_exponent(beta)?;
    check_eps_list(eps)?;
    let p = critical_exponent(k)?;
    let quad = RadialQuadrature::standard(k);
    let mut quotients = Vec::new();
    for &e in eps {
        let prof = geom.profile(e);
        let a = quad.energy(&prof)?;
        let l = quad.weighted_power(&prof, beta, 2.0)?;
        let d = quad.weighted_power(&prof, k as f64, p + 1.0)?;
        let ex = 2.0 / (p + 1.0);
        let num = a.value - lambda * l.value;
        let den = d.value.powf(ex);
        let value = num / den;
        let num_err = a.error + lambda.abs() * l.error;
        let error = value.abs() * (num_err / num.abs() + ex * d.error / d.value);
        quotients.push(ValueWithError { value, error });
    }
    let best_index = quotients
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(LambdaQuotientSweep { k, beta, lambda, eps: eps.to_vec(), quotients, best_index })
}
