use std::f64::consts::PI;
use std::sync::Arc;

use grushin_core::extremals::{
    angular_factor, asymptotic_slopes, critical_exponent, cutoff_family, estimate_s,
    extremal_u, homogeneous_radius, q_family_decay, sobolev_quotient, CutoffGeometry,
    ExtremalSpec, L2Regime, RadialProfile, RadialQuadrature,
};
use grushin_core::{DomainShape, Grid2D, GridFunction};
use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

/// √π Γ((γ+1)/2) / Γ(γ/2 + 1)
fn angular_oracle(g: f64) -> f64 {
    PI.sqrt() * gamma((g + 1.0) / 2.0) / gamma(g / 2.0 + 1.0)
}

/// Q(U_1) from Beta functions.
fn sobolev_oracle(k: u32) -> f64 {
    let kf = k as f64;
    let c = kf / (kf + 1.0);
    let m = c / 2.0;
    let p = (4.0 + 5.0 * kf) / kf;
    let a = angular_oracle(c);
    let num = 2.0 * a * 4.0 * m * m * 0.5 * beta((4.0 + c) / 2.0, c / 2.0);
    let den = 2.0 * a / (kf + 1.0).powi(2) * 0.5 * beta((2.0 + c) / 2.0, (2.0 + c) / 2.0);
    num / den.powf(2.0 / (p + 1.0))
}

#[test]
fn angular_factor_matches_gamma_ratio() {
    for g in [-0.9, -0.5, -0.2, 0.3, 0.5, 0.8, 1.7] {
        let a = angular_factor(g).unwrap();
        assert!((a / angular_oracle(g) - 1.0).abs() < 1e-12, "gamma {g}: {a}");
    }
}

#[test]
fn sobolev_constant_matches_beta_oracle() {
    for k in 1..=4 {
        let s = estimate_s(k, 20, 100.0).unwrap();
        let o = sobolev_oracle(k);
        assert!((s.value / o - 1.0).abs() < 1e-10, "k={k}: {} vs {o}", s.value);
        assert!(s.error_bar < 1e-8 * s.value);
    }
}

#[test]
fn sobolev_estimate_self_convergence() {
    let a = estimate_s(1, 8, 50.0).unwrap();
    let b = estimate_s(1, 16, 50.0).unwrap();
    assert!((a.value - b.value).abs() <= a.error_bar + b.error_bar);
    let c = estimate_s(1, 16, 100.0).unwrap();
    assert!((b.value / c.value - 1.0).abs() < 1e-4);
}

#[test]
fn extremal_family_shares_the_quotient() {
    for k in [1, 2] {
        let quad = RadialQuadrature::new(k, 20, 400.0).unwrap();
        let qs: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&e| quad.sobolev_quotient(&RadialProfile::Bubble { eps: e }).unwrap().value)
            .collect();
        for q in &qs {
            assert!((q / qs[1] - 1.0).abs() < 1e-6, "{qs:?}");
        }
    }
}

#[test]
fn extremal_scaling_law() {
    // U_ε(x, y) = ε^{-k/(k+1)} U_1(x/√ε, y/ε) at k = 1
    let u2 = extremal_u(ExtremalSpec::new(1, 2.0).unwrap(), &[(2f64.sqrt(), 0.0)])[0];
    let u1 = extremal_u(ExtremalSpec::new(1, 1.0).unwrap(), &[(1.0, 0.0)])[0];
    assert!((u2 - 2f64.powf(-0.5) * u1).abs() < 1e-15);
}

#[test]
fn bounded_competitors_stay_above_s() {
    let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
    let g = Arc::new(Grid2D::new(d, 96, 96, &[1.0]).unwrap());
    let s = estimate_s(1, 20, 100.0).unwrap();
    let sine = GridFunction::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sin());
    let q = sobolev_quotient(&sine, 1).unwrap();
    assert!(q >= s.value - s.error_bar, "{q} < {}", s.value);
    let scaled = sobolev_quotient(&sine.scale(-3.7), 1).unwrap();
    assert!((scaled / q - 1.0).abs() < 1e-12);
}

#[test]
fn cutoff_family_equals_bubble_inside_the_ball() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let g = Arc::new(Grid2D::new(d.clone(), 64, 64, &[]).unwrap());
    let geom = CutoffGeometry::new(&d, 1, 0.3, None).unwrap();
    let eps = 0.05;
    let u = cutoff_family(eps, &geom, &g).unwrap();
    let spec = ExtremalSpec::new(1, eps).unwrap();
    for &n in &g.interior {
        let (x, y) = g.coords(n);
        let r = homogeneous_radius(1, x, y, 0.0);
        let v = u.values()[n];
        if r < geom.r_in {
            assert_eq!(v, extremal_u(spec, &[(x, y)])[0]);
        } else if r >= geom.r_out {
            assert_eq!(v, 0.0);
        }
    }
}

#[test]
fn grid_and_radial_routes_agree_when_resolved() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let g = Arc::new(Grid2D::new(d.clone(), 256, 256, &[0.0, 1.0]).unwrap());
    let geom = CutoffGeometry::new(&d, 1, 0.5, None).unwrap();
    let quad = RadialQuadrature::standard(1);
    let u = cutoff_family(0.3, &geom, &g).unwrap();
    let e_grid = grushin_core::energy(&u, 1);
    let e_rad = quad.energy(&geom.profile(0.3)).unwrap().value;
    assert!((e_grid / e_rad - 1.0).abs() < 1e-2, "{e_grid} vs {e_rad}");
    let l_grid = u.weighted_integral(0.0, |v| v * v).unwrap();
    let l_rad = quad.weighted_power(&geom.profile(0.3), 0.0, 2.0).unwrap().value;
    assert!((l_grid / l_rad - 1.0).abs() < 1e-2, "{l_grid} vs {l_rad}");
}

fn eps_list() -> Vec<f64> {
    (3..=9).map(|j| 10f64.powi(-j)).collect()
}

#[test]
fn energy_slope_is_minus_c() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    for k in [1, 2, 4] {
        let geom = CutoffGeometry::new(&d, k, 0.5, None).unwrap();
        let r = asymptotic_slopes(k, 0.0, &eps_list(), &geom, None).unwrap();
        let c = k as f64 / (k as f64 + 1.0);
        assert!((r.slope_s2.slope / -c - 1.0).abs() < 0.05, "k={k}: {}", r.slope_s2.slope);
        assert!((r.slope_lp1k.slope / -c - 1.0).abs() < 0.05);
    }
}

#[test]
fn trichotomy_sweep() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    for (k, beta) in [(1, 0.0), (2, 0.0), (4, 0.0), (1, 0.5), (4, 1.0), (3, 0.0)] {
        let geom = CutoffGeometry::new(&d, k, 0.5, None).unwrap();
        let r = asymptotic_slopes(k, beta, &eps_list(), &geom, None).unwrap();
        assert_eq!(r.observed_regime, r.regime, "(k, beta) = ({k}, {beta}): {}", r.increment_exponent);
        if r.regime == L2Regime::Power {
            let want = (2.0 * (beta + 1.0) - k as f64) / (k as f64 + 1.0);
            assert!((r.slope_l2beta.slope / want - 1.0).abs() < 0.1, "{}", r.slope_l2beta.slope);
        }
    }
}

#[test]
fn q_family_decays_at_the_predicted_rate() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let geom = CutoffGeometry::new(&d, 1, 0.5, None).unwrap();
    let r = q_family_decay(1, 0.0, 3.0, &eps_list(), &geom, None).unwrap();
    assert!(!r.log_branch);
    assert!((r.expected_slope - 0.5).abs() < 1e-15);
    assert!((r.fit.slope / r.expected_slope - 1.0).abs() < 0.1, "{}", r.fit.slope);
    let r = q_family_decay(1, 0.0, 2.0, &eps_list(), &geom, None).unwrap();
    assert!(r.log_branch && r.compactness_condition && r.monotone_tail);
    assert!(r.values.last().unwrap() < &1e-3);
    assert!(q_family_decay(1, 0.0, critical_exponent(1).unwrap(), &eps_list(), &geom, None).is_err());
}

#[test]
fn q_family_grid_normalization() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let g = Arc::new(Grid2D::new(d.clone(), 256, 256, &[0.0, 1.0]).unwrap());
    let geom = CutoffGeometry::new(&d, 1, 0.5, None).unwrap();
    let r = q_family_decay(1, 0.0, 2.0, &[0.9, 0.6, 0.4], &geom, Some(&g)).unwrap();
    assert!(r.normalization_defect.unwrap() < 1e-10);
}
