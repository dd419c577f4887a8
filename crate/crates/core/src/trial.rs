//! Seeded smooth random test functions (tensor cubic B-spline combinations).

use std::sync::Arc;

use rand::Rng;

use crate::field::GridFunction;
use crate::grid::Grid2D;

/// Uniform cubic B-spline with support [-2, 2].
fn bspline3(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

/// Σ c_ab B_a(x) B_b(y) with `modes` splines per axis spanning the bounding box
/// and coefficients uniform in [-1, 1].
pub fn smooth_random<R: Rng + ?Sized>(grid: &Arc<Grid2D>, modes: usize, rng: &mut R) -> GridFunction {
    let modes = modes.max(2);
    let coef: Vec<f64> = (0..modes * modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    spline_field(grid, modes, &coef)
}

/// As [`smooth_random`] with coefficients in [0, 1], so the result is nonnegative.
pub fn smooth_random_positive<R: Rng + ?Sized>(
    grid: &Arc<Grid2D>,
    modes: usize,
    rng: &mut R,
) -> GridFunction {
    let modes = modes.max(2);
    let coef: Vec<f64> = (0..modes * modes).map(|_| rng.gen_range(0.0..1.0)).collect();
    spline_field(grid, modes, &coef)
}

fn spline_field(grid: &Arc<Grid2D>, modes: usize, coef: &[f64]) -> GridFunction {
    let b = grid.bounds;
    // knots spaced so the splines cover the box
    let sx = (b[1] - b[0]) / (modes - 1) as f64;
    let sy = (b[3] - b[2]) / (modes - 1) as f64;
    let bx: Vec<Vec<f64>> = grid
        .xs
        .iter()
        .map(|&x| (0..modes).map(|a| bspline3((x - b[0]) / sx - a as f64)).collect())
        .collect();
    let by: Vec<Vec<f64>> = grid
        .ys
        .iter()
        .map(|&y| (0..modes).map(|a| bspline3((y - b[2]) / sy - a as f64)).collect())
        .collect();
    let mut values = vec![0.0; grid.len()];
    for &n in &grid.interior {
        let (i, j) = (n % grid.nx, n / grid.nx);
        let mut s = 0.0;
        for a in 0..modes {
            if bx[i][a] == 0.0 {
                continue;
            }
            for c in 0..modes {
                s += coef[c * modes + a] * bx[i][a] * by[j][c];
            }
        }
        values[n] = s;
    }
    GridFunction::from_raw(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainShape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partition_of_unity() {
        let s: f64 = (-3..=3).map(|a| bspline3(0.3 - a as f64)).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seeded_and_deterministic() {
        let d = DomainShape::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let g = Arc::new(Grid2D::new(d, 16, 16, &[]).unwrap());
        let a = smooth_random(&g, 5, &mut ChaCha8Rng::seed_from_u64(7));
        let b = smooth_random(&g, 5, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a.values(), b.values());
        assert!(smooth_random_positive(&g, 5, &mut ChaCha8Rng::seed_from_u64(1)).min() >= 0.0);
    }
}
