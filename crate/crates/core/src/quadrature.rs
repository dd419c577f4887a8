//! One-dimensional quadrature rules used by the radial reductions and the
//! nonlinearity primitives.

use std::f64::consts::PI;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre over consecutive panels given by `breaks`.
pub fn composite<F: Fn(f64) -> f64>(rule: &GaussLegendre, breaks: &[f64], f: F) -> f64 {
    breaks
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &f))
        .sum()
}

/// Panels on [0, r_end] graded geometrically towards the origin.
///
/// The first panel is [0, r_min]; panel lengths then grow by `ratio` until `r_end`.
/// Extra break points (kinks of the integrand) are merged in.
pub fn graded_breaks(r_min: f64, r_end: f64, ratio: f64, extra: &[f64]) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut r = r_min.min(r_end);
    while r < r_end {
        breaks.push(r);
        r *= ratio;
    }
    breaks.push(r_end);
    for &e in extra {
        if e > 0.0 && e < r_end {
            breaks.push(e);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    breaks
}

/// Tanh–sinh (double exponential) quadrature on [0, len].
///
/// `f` receives the point `x` measured from the left endpoint, so integrands with an
/// algebraic singularity at 0 are evaluated without cancellation.
pub fn tanh_sinh<F: Fn(f64) -> f64>(len: f64, level: u32, f: F) -> f64 {
    let h = 2f64.powi(-(level as i32));
    let half = 0.5 * len;
    let mut sum = 0.0;
    // wide enough that the cut-off end mass is negligible even for x^{-0.99}
    let t_max = 6.5;
    let n = (t_max / h).ceil() as i64;
    for j in -n..=n {
        let t = j as f64 * h;
        let s = 0.5 * PI * t.sinh();
        let cosh_s = s.cosh();
        let w = 0.5 * PI * t.cosh() / (cosh_s * cosh_s);
        // distance from the left endpoint: half * (1 + tanh s) = len / (1 + e^{-2s})
        let x = len / (1.0 + (-2.0 * s).exp());
        if x <= 0.0 || x >= len {
            continue;
        }
        let fx = f(x);
        if fx.is_finite() {
            sum += w * fx;
        }
    }
    sum * half * h
}

/// Adaptive Simpson quadrature on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Ordinary least squares fit `y = slope * x + intercept`; returns (slope, intercept, R²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = tanh_sinh(1.0, 6, |x| x.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn simpson_matches_polynomial() {
        let v = adaptive_simpson(&|x: f64| x.powi(5), 0.0, 2.0, 1e-12);
        assert!((v - 64.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 3.0).collect();
        let (s, c, r2) = linear_fit(&xs, &ys);
        assert!((s + 0.5).abs() < 1e-14 && (c - 3.0).abs() < 1e-13 && (r2 - 1.0).abs() < 1e-14);
    }
}
