use std::sync::Arc;

use grushin_core::solver::case1::slambda_objective;
use grushin_core::solver::nehari::ray_max;
use grushin_core::solver::{
    mountain_pass, nehari_ground_state, Functional, MountainPassOptions, Ray,
};
use grushin_core::trial::{smooth_random, smooth_random_positive};
use grushin_core::{DomainShape, Grid2D, GridFunction, NonlinearitySpec, ProblemSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn square() -> DomainShape {
    DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
}

fn case2(h: NonlinearitySpec, mu: f64, q: f64, n: usize) -> (ProblemSpec, Arc<Grid2D>) {
    let s = ProblemSpec::case2(1, 0.0, mu, q, h, square(), (n, n), 1e-8).unwrap();
    let g = s.grid().unwrap();
    (s, g)
}

/// Smooth field with |u| ≥ 0.1 on every interior node, so small
/// perturbations never cross the kinks of u⁺ and u⁻.
fn off_zero(g: &Arc<Grid2D>, rng: &mut ChaCha8Rng) -> GridFunction {
    smooth_random(g, 5, rng).map(|v| if v >= 0.0 { v.max(0.1) } else { v.min(-0.1) })
}

fn central_difference_errors(f: &Functional, u: &GridFunction, v: &GridFunction) -> (f64, f64) {
    let exact = f.directional(u, v).unwrap();
    let fd = |d: f64| {
        let up = f.phi(&u.axpy(d, v).unwrap()).unwrap();
        let dn = f.phi(&u.axpy(-d, v).unwrap()).unwrap();
        (up - dn) / (2.0 * d)
    };
    ((fd(1e-2) - exact).abs(), (fd(1e-3) - exact).abs())
}

#[test]
fn directional_derivative_matches_central_differences() {
    let h = NonlinearitySpec::power(1.0, 2.0, 1.0).unwrap();
    for spec_h in [NonlinearitySpec::zero(), h] {
        let (s, g) = case2(spec_h, 1.0, 2.0, 24);
        let f = Functional::new(&s, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u = off_zero(&g, &mut rng);
            let v = smooth_random(&g, 4, &mut rng);
            let v = v.scale(1.0 / v.max_abs());
            let (e3, e4) = central_difference_errors(&f, &u, &v);
            let ratio = e3 / e4;
            assert!((50.0..200.0).contains(&ratio), "ratio {ratio} ({e3:e}, {e4:e})");
        }
    }
}

#[test]
fn ray_maximizer_is_the_unique_critical_point() {
    let (s, g) = case2(NonlinearitySpec::zero(), 2.0, 2.0, 24);
    let f = Functional::new(&s, &g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let v = smooth_random_positive(&g, 4, &mut rng);
        let ray = f.ray(&v).unwrap();
        let t = ray_max(&ray).0.unwrap();
        assert!(ray.derivative(t).abs() <= 1e-8 * ray.a * t);
        for j in 1..200 {
            let r = t * j as f64 / 100.0;
            if (r - t).abs() > 1e-3 * t {
                assert_eq!(ray.derivative(r) > 0.0, r < t, "sign change away from t* at {r}");
            }
        }
    }
}

#[test]
fn pure_power_ray_has_the_closed_form_level() {
    let (s, g) = case2(NonlinearitySpec::zero(), 0.0, 2.0, 24);
    let v = GridFunction::from_fn(&g, |x, y| (1.0 - x * x) * (1.0 - y * y));
    let r = grushin_core::solver::nehari_ray_max(&v, &s).unwrap();
    let t = r.closed_form_t.unwrap();
    assert!((r.t_star.unwrap() / t - 1.0).abs() < 1e-10);
    let p = s.p();
    let closed = (0.5 - 1.0 / (p + 1.0)) * t * t * r.x_norm_sq;
    assert!((r.y.unwrap() / closed - 1.0).abs() < 1e-10);
}

#[test]
fn large_mu_drives_the_ray_maximum_to_zero() {
    let (s, g) = case2(NonlinearitySpec::zero(), 1.0, 3.5, 24);
    let f = Functional::new(&s, &g).unwrap();
    let v = GridFunction::from_fn(&g, |x, y| (1.0 - x * x) * (1.0 - y * y));
    let base = f.ray(&v).unwrap();
    let sups: Vec<f64> = (0..=10)
        .map(|j| {
            let mu = 10f64.powf(j as f64 / 10.0) * 10.0;
            let ray = Ray::from_coefficients(base.a, base.b, base.p, base.c, mu, base.q);
            ray.value(ray_max(&ray).0.unwrap())
        })
        .collect();
    assert!(sups.windows(2).all(|w| w[1] < w[0]));
    // Ψ_μ ≤ t²a/2 − μ t^{q+1}c/(q+1) whose maximum decays like μ^{−2/(q−1)}
    let bound = |mu: f64| (0.5 - 1.0 / 4.5) * base.a.powf(4.5 / 2.5) * (mu * base.c).powf(-2.0 / 2.5);
    assert!(sups[10] <= bound(100.0) * (1.0 + 1e-12));
}

#[test]
fn slambda_numerator_is_quadratic() {
    let d = square();
    let g = Arc::new(Grid2D::new(d, 32, 32, &[0.0]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = smooth_random(&g, 4, &mut rng);
    let q1 = slambda_objective(&v, 1, 0.0, 1.0).unwrap();
    for c in [1e-3, -2.0, 50.0] {
        let qc = slambda_objective(&v.scale(c), 1, 0.0, 1.0).unwrap();
        assert!((qc / (c * c * q1) - 1.0).abs() < 1e-12);
    }
    assert!(slambda_objective(&v, 1, 0.0, 2.0).unwrap() < q1);
}

#[test]
fn surrogate_mountain_pass_matches_the_ground_state() {
    let (s, g) = case2(NonlinearitySpec::zero(), 0.0, 2.0, 32);
    let p = s.p() - 2.0;
    let bump = GridFunction::from_fn(&g, |x, y| (1.0 - x * x) * (1.0 - y * y));
    let opts = MountainPassOptions { exponent: Some(p), tol: 1e-6, ..Default::default() };
    let mp = mountain_pass(&s, &bump.scale(4.0), &opts).unwrap();
    let gs = nehari_ground_state(&g, 1, p, &bump, 1e-12).unwrap();
    assert!(gs.converged);
    assert!((mp.level / gs.level - 1.0).abs() < 0.02, "{} vs {}", mp.level, gs.level);
    assert!(mp.rho > 0.0 && mp.level >= mp.rho);
    assert!(mp.path_max >= mp.level * (1.0 - 1e-9));
    assert!(mp.min_value >= -1e-8 && mp.phi_psi_gap <= 1e-8);
}
