use std::sync::Arc;

use grushin_core::extremals::{extremal_u, ExtremalSpec};
use grushin_core::identities::*;
use grushin_core::solver::concentration_index;
use grushin_core::trial::smooth_random;
use grushin_core::{
    principal_eigenpair, starshape_check, DomainShape, Grid2D, GridFunction, NonlinearitySpec, ProblemSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid(x0: f64, x1: f64, y0: f64, y1: f64, n: usize) -> Arc<Grid2D> {
    let d = DomainShape::rectangle(x0, x1, y0, y1).unwrap();
    Arc::new(Grid2D::new(d, n, n, &[0.0, 1.0]).unwrap())
}

/// Triples built the way the compact-embedding argument builds them at k = 1.
fn k1_triples() -> Vec<InterpolationTriple> {
    let mut out = Vec::new();
    for (q0, beta0) in [(3.0, -0.25), (5.0, -0.4), (7.5, 0.0)] {
        for theta in [0.1, 0.37, 0.5, 0.9] {
            out.push(InterpolationTriple { q1: 2.0, beta1: beta0, q2: q0 + 1.0, beta2: 1.0, theta });
        }
    }
    out.push(InterpolationTriple { q1: 10.0, beta1: 1.0, q2: 2.0, beta2: 0.0, theta: 0.6 });
    out
}

#[test]
fn interpolation_ratio_never_exceeds_one() {
    let g = grid(-1.0, 1.0, -1.0, 1.0, 32);
    for t in k1_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let worst = (0..200)
            .map(|_| interpolation_check(&smooth_random(&g, 5, &mut rng), &t).unwrap().ratio)
            .fold(0.0, f64::max);
        assert!(worst <= 1.0 + 1e-8, "{t:?}: {worst}");
    }
}

#[test]
fn interpolation_endpoints() {
    let g = grid(0.0, 1.0, 0.0, 1.0, 16);
    let u = GridFunction::from_fn(&g, |x, y| x * (1.0 - x) * y * (1.0 - y));
    let mut t = InterpolationTriple { q1: 3.0, beta1: 0.5, q2: 2.0, beta2: -0.2, theta: 1.0 };
    assert_eq!(interpolation_check(&u, &t).unwrap().ratio, 1.0);
    t.theta = 0.0;
    assert_eq!(interpolation_check(&u, &t).unwrap().ratio, 1.0);
    assert_eq!(t.derived().unwrap(), (2.0, -0.2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hoelder_holds_for_arbitrary_triples(
        q1 in 1.0f64..12.0, q2 in 1.0f64..12.0,
        b1 in -0.45f64..3.0, b2 in -0.45f64..3.0,
        theta in 0.0f64..1.0, seed in 0u64..1000,
    ) {
        let g = grid(-1.0, 1.0, -1.0, 1.0, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = smooth_random(&g, 4, &mut rng);
        let t = InterpolationTriple { q1, beta1: b1, q2, beta2: b2, theta };
        prop_assert!(interpolation_check(&u, &t).unwrap().ratio <= 1.0 + 1e-8);
    }

    #[test]
    fn weak_norm_is_below_the_strong_norm(s in 1.0f64..6.0, seed in 0u64..1000) {
        let g = grid(0.0, 1.0, 0.0, 1.0, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = smooth_random(&g, 4, &mut rng);
        let strong = u.weighted_integral(1.0, |v| v.abs().powf(s)).unwrap().powf(1.0 / s);
        prop_assert!(weak_lorentz_norm(&u, s, 1).unwrap() <= strong * (1.0 + 1e-12));
    }
}

#[test]
fn weak_norm_matches_two_level_enumeration() {
    let g = grid(0.0, 1.0, 0.0, 1.0, 32);
    // u = 1 on columns [0, 0.5) × rows [0, 0.5), 2 on columns [0.5, 0.75) × all rows
    let u = GridFunction::from_fn(&g, |x, y| {
        if (0.5..0.75).contains(&x) {
            2.0
        } else if x < 0.5 && y < 0.5 {
            1.0
        } else {
            0.0
        }
    });
    // brute force over the two candidate levels 1⁻ and 2⁻ with node measures
    let w = g.weights(1.0).unwrap();
    let measure = |level: f64| -> f64 {
        g.interior.iter().filter(|&&n| u.values()[n] >= level).map(|&n| w[n % g.nx] * g.hy).sum()
    };
    // closed-form ∫x² over each set
    let cube = |a: f64, b: f64| (b.powi(3) - a.powi(3)) / 3.0;
    let (m_a, m_b) = (cube(0.0, 0.5) * 0.5, cube(0.5, 0.75));
    assert!((measure(1.0) - (m_a + m_b)).abs() < 1e-14 && (measure(2.0) - m_b).abs() < 1e-14);
    for s in [1.0, 2.0, 3.0, 4.5] {
        let oracle = (1.0 * measure(1.0).powf(1.0 / s)).max(2.0 * measure(2.0).powf(1.0 / s));
        let v = weak_lorentz_norm(&u, s, 1).unwrap();
        assert!((v - oracle).abs() <= 1e-14 * oracle, "s = {s}: {v} vs {oracle}");
        let closed = (m_a + m_b).powf(1.0 / s).max(2.0 * m_b.powf(1.0 / s));
        assert!((v - closed).abs() <= 1e-13 * closed);
    }
}

#[test]
fn weak_norm_of_the_constant() {
    let g = grid(0.0, 1.0, 0.0, 1.0, 32);
    let one = GridFunction::from_fn(&g, |_, _| 1.0);
    // p = 9 at k = 1, (p − 3)/2 = 3
    let v = weak_lorentz_norm(&one, 3.0, 1).unwrap();
    assert!((v - 0.693_361_274_350_634_7).abs() < 1e-12);
    for c in [0.5, 3.0] {
        assert!((weak_lorentz_norm(&one.scale(c), 3.0, 1).unwrap() - c * v).abs() < 1e-14);
    }
}

#[test]
fn teq_ratio_of_the_constant_has_a_closed_form() {
    let g = grid(0.0, 1.0, 0.0, 1.0, 32);
    let one = GridFunction::from_fn(&g, |_, _| 1.0);
    let params = TeqParams { k: 1, beta: 3.0, q: 2.0, q0: 3.0, s: 2.0 };
    let r = teq_ratio(&one, &params).unwrap();
    let theta = 9.0 / 14.0;
    assert!((r.theta - theta).abs() < 1e-15);
    let third: f64 = 1.0 / 3.0;
    let oracle = (1.0 / 7.0) / (third.powf(theta * 3.0 / 9.0) * third.powf(0.5 * (1.0 - theta) * 3.0));
    assert!((r.ratio / oracle - 1.0).abs() < 1e-12);
}

#[test]
fn teq_constant_is_bounded_over_a_bump_family() {
    let g = grid(0.0, 1.0, 0.0, 1.0, 128);
    let params = TeqParams { k: 1, beta: 3.0, q: 2.0, q0: 3.0, s: 2.0 };
    let ratios: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&w| {
            let u = GridFunction::from_fn(&g, |x, y| {
                let r2 = ((x - 0.5) / w).powi(2) + ((y - 0.5) / w).powi(2);
                if r2 < 1.0 { (1.0 - r2).powi(2) } else { 0.0 }
            });
            teq_ratio(&u, &params).unwrap().ratio
        })
        .collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 10.0, "{ratios:?}");
}

#[test]
fn hardy_constant_is_bounded_over_shrinking_bumps() {
    let g = grid(-1.0, 1.0, -1.0, 1.0, 256);
    let cs: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&d| {
            let u = GridFunction::from_fn(&g, |x, y| {
                let s = x / d;
                if s.abs() < 1.0 { (1.0 - s * s).powi(2) * (1.0 - y * y) } else { 0.0 }
            });
            hardy_check(&u, 0.5, 0.1, -0.2).unwrap().constant
        })
        .collect();
    assert!(cs.iter().all(|c| c.is_finite() && *c > 0.0));
    assert!(cs.windows(2).all(|w| w[1] <= 2.0 * w[0]), "{cs:?}");
}

fn hardy_fixture() -> (GridFunction, Vec<f64>) {
    let g = grid(-1.0, 1.0, -1.0, 1.0, 512);
    let u = GridFunction::from_fn(&g, |x, y| (1.0 - x * x) * (1.0 - y * y));
    (u, vec![0.2, 0.1, 0.05, 0.025])
}

/// For a fixed smooth u the near-axis piece decays like ε^{2β+1}, a faster
/// rate than the ε^{γ+2β} the split needs.
#[test]
fn hardy_near_term_decays_like_the_weight_integral() {
    let (u, eps) = hardy_fixture();
    let fit = hardy_slope(&u, 0.5, -0.2, &eps).unwrap();
    assert!((fit.fit.slope - 0.6).abs() < 0.03, "{}", fit.fit.slope);
}

#[test]
#[ignore = "the fixed-u slope is 2β+1, not γ+2β; see hardy_near_term_decays_like_the_weight_integral"]
fn hardy_slope_matches_gamma_plus_two_beta() {
    let (u, eps) = hardy_fixture();
    let fit = hardy_slope(&u, 0.5, -0.2, &eps).unwrap();
    assert!((fit.fit.slope - fit.expected).abs() <= 0.1 * fit.expected.abs(), "{} vs {}", fit.fit.slope, fit.expected);
}

#[test]
fn eigenfunction_satisfies_the_linear_flux_identity() {
    // with λ = λ₁ the eigenfunction solves the identity's linear part, and the
    // critical term drops out of the balance exactly
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let gaps: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let g = Arc::new(Grid2D::new(d.clone(), n, n, &[0.0, 1.0]).unwrap());
            let e = principal_eigenpair(1, 0.0, &g, 1e-10).unwrap();
            let s = ProblemSpec::case1(1, 0.0, e.lambda1, d.clone(), (n, n), 1e-8).unwrap();
            pohozaev_case1(&e.phi1, &s, 4 * n).unwrap().gap
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.02, "{gaps:?}");
}

#[test]
fn classifier_reproduces_the_quoted_rows() {
    let sq = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let star = starshape_check(&sq, 1, 400).unwrap();
    let l1 = 10.0;
    let c1 = |k: u32, lambda: f64| ProblemSpec::case1(k, 0.0, lambda, sq.clone(), (16, 16), 1e-6).unwrap();
    let v = regime_classify(&c1(1, 2.0 * l1), &star, l1, false);
    assert_eq!((v.verdict, v.citation.as_str()), (Verdict::Nonexistence, "Theorem 2.1(a)"));
    let v = regime_classify(&c1(4, 0.5 * l1), &star, l1, false);
    assert_eq!((v.verdict, v.citation.as_str()), (Verdict::Existence, "Theorem 2.1(c)"));
    let v = regime_classify(&c1(1, 0.0), &star, l1, false);
    assert_eq!((v.verdict, v.citation.as_str()), (Verdict::Nonexistence, "Theorem 2.1(b)"));
    let v = regime_classify(&c1(1, 0.5 * l1), &star, l1, false);
    assert_eq!((v.verdict, v.rule), (Verdict::OutsideKnownRegimes, Rule::NoRuleApplies));

    let star2 = starshape_check(&sq, 2, 400).unwrap();
    let s = ProblemSpec::case2(2, 0.0, -1.0, 2.5, NonlinearitySpec::zero(), sq.clone(), (16, 16), 1e-6).unwrap();
    let v = regime_classify(&s, &star2, l1, false);
    assert_eq!((v.verdict, v.citation.as_str()), (Verdict::Nonexistence, "Theorem 6.1"));
    assert_eq!(v, regime_classify(&s, &star2, l1, false));
    let json = serde_json::to_string(&v).unwrap();
    assert_eq!(serde_json::from_str::<RegimeVerdict>(&json).unwrap(), v);
}

#[test]
fn classifier_respects_geometry() {
    let shifted = DomainShape::rectangle(0.5, 1.5, 0.5, 1.5).unwrap();
    let geo = starshape_check(&shifted, 1, 400).unwrap();
    assert!(!geo.g_starshaped);
    let s = ProblemSpec::case1(1, 0.0, -1.0, shifted, (16, 16), 1e-6).unwrap();
    assert_eq!(regime_classify(&s, &geo, 10.0, false).verdict, Verdict::OutsideKnownRegimes);
}

#[test]
fn bubble_radius_scales_with_eps() {
    let d = DomainShape::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap();
    let g = Arc::new(Grid2D::new(d, 512, 512, &[1.0]).unwrap());
    let pts: Vec<(f64, f64)> = (0..g.len()).map(|n| g.coords(n)).collect();
    let eps = [0.2, 0.1, 0.05];
    let r: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let vals = extremal_u(ExtremalSpec::new(1, e).unwrap(), &pts);
            let u = GridFunction::from_values(&g, vals).unwrap();
            concentration_index(&u, 1).unwrap().r50 / e
        })
        .collect();
    for w in r.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.1, "{r:?}");
    }
    let tiny = extremal_u(ExtremalSpec::new(1, 0.002).unwrap(), &pts);
    assert!(concentration_index(&GridFunction::from_values(&g, tiny).unwrap(), 1).unwrap().flagged);
}
