//! Domain geometry: shapes, boundary sampling and the G-starshape test.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Predicate = Arc<dyn Fn(f64, f64) -> bool + Send + Sync>;

/// A bounded open set in the plane.
#[derive(Clone)]
pub enum DomainShape {
    Rectangle {
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
    },
    /// ((x-cx)/ax)^2 + ((y-cy)/ay)^2 < 1
    Ellipse { cx: f64, cy: f64, ax: f64, ay: f64 },
    /// Membership predicate over a declared bounding box. Supports interior
    /// quadrature only.
    Indicator {
        label: String,
        bounds: [f64; 4],
        predicate: Predicate,
    },
}

impl fmt::Debug for DomainShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                write!(f, "Rectangle(({x_lo}, {x_hi}) x ({y_lo}, {y_hi}))")
            }
            DomainShape::Ellipse { cx, cy, ax, ay } => {
                write!(f, "Ellipse(center=({cx}, {cy}), axes=({ax}, {ay}))")
            }
            DomainShape::Indicator { label, bounds, .. } => {
                write!(f, "Indicator({label}, bounds={bounds:?})")
            }
        }
    }
}

impl PartialEq for DomainShape {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi },
                DomainShape::Rectangle { x_lo: a, x_hi: b, y_lo: c, y_hi: d },
            ) => x_lo == a && x_hi == b && y_lo == c && y_hi == d,
            (
                DomainShape::Ellipse { cx, cy, ax, ay },
                DomainShape::Ellipse { cx: a, cy: b, ax: c, ay: d },
            ) => cx == a && cy == b && ax == c && ay == d,
            (
                DomainShape::Indicator { label, bounds, predicate },
                DomainShape::Indicator { label: l, bounds: b, predicate: p },
            ) => label == l && bounds == b && Arc::ptr_eq(predicate, p),
            _ => false,
        }
    }
}

/// A point on the boundary with outward unit normal and arclength weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub x: f64,
    pub y: f64,
    pub nx: f64,
    pub ny: f64,
    pub ds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarshapeReport {
    pub k: u32,
    pub samples: usize,
    /// min over samples of T·ν with T = (x, (1+k) y)
    pub min_t_dot_nu: f64,
    pub worst_point: (f64, f64),
    pub tol: f64,
    pub g_starshaped: bool,
    pub strictly: bool,
    /// the strict margin ε₀ when `strictly` holds, else 0
    pub eps0: f64,
}

impl DomainShape {
    pub fn rectangle(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(x_lo < x_hi && y_lo < y_hi) || ![x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite()) {
            return Err(invalid("rectangle", "need finite x_lo < x_hi and y_lo < y_hi"));
        }
        Ok(DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi })
    }

    pub fn ellipse(cx: f64, cy: f64, ax: f64, ay: f64) -> Result<Self> {
        if !(ax > 0.0 && ay > 0.0) || ![cx, cy, ax, ay].iter().all(|v| v.is_finite()) {
            return Err(invalid("ellipse", "semi-axes must be positive and finite"));
        }
        Ok(DomainShape::Ellipse { cx, cy, ax, ay })
    }

    pub fn indicator<F>(label: impl Into<String>, bounds: [f64; 4], f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> bool + Send + Sync + 'static,
    {
        if !(bounds[0] < bounds[1] && bounds[2] < bounds[3]) {
            return Err(invalid("bounds", "need x_lo < x_hi and y_lo < y_hi"));
        }
        Ok(DomainShape::Indicator {
            label: label.into(),
            bounds,
            predicate: Arc::new(f),
        })
    }

    /// (x_lo, x_hi, y_lo, y_hi)
    pub fn bounding_box(&self) -> [f64; 4] {
        match *self {
            DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } => [x_lo, x_hi, y_lo, y_hi],
            DomainShape::Ellipse { cx, cy, ax, ay } => [cx - ax, cx + ax, cy - ay, cy + ay],
            DomainShape::Indicator { bounds, .. } => bounds,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                x > *x_lo && x < *x_hi && y > *y_lo && y < *y_hi
            }
            DomainShape::Ellipse { cx, cy, ax, ay } => {
                let u = (x - cx) / ax;
                let v = (y - cy) / ay;
                u * u + v * v < 1.0
            }
            DomainShape::Indicator { bounds, predicate, .. } => {
                x > bounds[0] && x < bounds[1] && y > bounds[2] && y < bounds[3] && predicate(x, y)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        let b = self.bounding_box();
        (b[1] - b[0]).hypot(b[3] - b[2])
    }

    /// Whether Ω meets the degeneracy line {x = 0}.
    pub fn meets_x_axis(&self) -> bool {
        match *self {
            DomainShape::Rectangle { x_lo, x_hi, .. } => x_lo < 0.0 && x_hi > 0.0,
            DomainShape::Ellipse { cx, ax, .. } => cx.abs() < ax,
            DomainShape::Indicator { bounds, .. } => {
                if !(bounds[0] < 0.0 && bounds[1] > 0.0) {
                    return false;
                }
                let n = 4096;
                (0..n).any(|j| {
                    let y = bounds[2] + (bounds[3] - bounds[2]) * (j as f64 + 0.5) / n as f64;
                    self.contains(0.0, y)
                })
            }
        }
    }

    pub fn label(&self) -> String {
        format!("{self:?}")
    }

    /// Fraction θ ∈ (0, 1] of the segment from the interior point `a` to the
    /// exterior point `b` at which the boundary is crossed.
    pub fn crossing_fraction(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        match *self {
            DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                let mut t = 1.0f64;
                if dx > 0.0 {
                    t = t.min((x_hi - a.0) / dx);
                } else if dx < 0.0 {
                    t = t.min((x_lo - a.0) / dx);
                }
                if dy > 0.0 {
                    t = t.min((y_hi - a.1) / dy);
                } else if dy < 0.0 {
                    t = t.min((y_lo - a.1) / dy);
                }
                t.clamp(0.0, 1.0)
            }
            DomainShape::Ellipse { cx, cy, ax, ay } => {
                // solve |((a + t d) - c) / axes|^2 = 1 for the positive root
                let (u0, v0) = ((a.0 - cx) / ax, (a.1 - cy) / ay);
                let (du, dv) = (dx / ax, dy / ay);
                let qa = du * du + dv * dv;
                let qb = 2.0 * (u0 * du + v0 * dv);
                let qc = u0 * u0 + v0 * v0 - 1.0;
                let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
                // qc < 0 so the roots have opposite signs; the stable form avoids cancellation
                let t = if qb >= 0.0 {
                    2.0 * qc / (-qb - disc.sqrt())
                } else {
                    (-qb + disc.sqrt()) / (2.0 * qa)
                };
                t.clamp(0.0, 1.0)
            }
            DomainShape::Indicator { .. } => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.contains(a.0 + mid * dx, a.1 + mid * dy) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Largest R such that the r-ball {x^{2(k+1)} + (k+1)^2 (y-yc)^2 < R^2}
    /// lies in Ω (up to sampling for non-rectangular shapes).
    pub fn r_inradius(&self, k: u32, yc: f64) -> f64 {
        if !self.contains(0.0, yc) {
            return 0.0;
        }
        let kp = (k + 1) as f64;
        if let DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } = *self {
            let rx = x_lo.abs().min(x_hi.abs()).powf(kp);
            let ry = kp * (yc - y_lo).min(y_hi - yc);
            return rx.min(ry);
        }
        // march along r-rays then bisect the first exit
        let r_far = {
            let b = self.bounding_box();
            let mx = b[0].abs().max(b[1].abs());
            let my = (b[2] - yc).abs().max((b[3] - yc).abs());
            mx.powf(kp).max(kp * my) * 1.01
        };
        let point = |r: f64, th: f64| {
            let c = r * th.cos();
            (c.signum() * c.abs().powf(1.0 / kp), yc + r * th.sin() / kp)
        };
        let n_dir = 1440;
        let n_step = 400;
        let mut best = r_far;
        for j in 0..n_dir {
            let th = 2.0 * PI * j as f64 / n_dir as f64;
            let mut lo = 0.0;
            let mut hi = None;
            for s in 1..=n_step {
                let r = r_far * s as f64 / n_step as f64;
                let (x, y) = point(r, th);
                if !self.contains(x, y) {
                    hi = Some(r);
                    break;
                }
                lo = r;
            }
            if let Some(mut hi) = hi {
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    let (x, y) = point(mid, th);
                    if self.contains(x, y) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                best = best.min(lo);
            }
        }
        // directional sampling overestimates slightly; shave a relative margin
        best * (1.0 - 1e-3)
    }
}

/// Boundary samples with outward normals and arclength weights.
pub fn boundary_samples(domain: &DomainShape, m: usize) -> Result<Vec<BoundarySample>> {
    if m < 16 {
        return Err(invalid("m", "need at least 16 boundary samples"));
    }
    match *domain {
        DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
            let (w, h) = (x_hi - x_lo, y_hi - y_lo);
            let perim = 2.0 * (w + h);
            let mut out = Vec::with_capacity(m + 4);
            // bottom, right, top, left; counterclockwise
            let edges = [
                ((x_lo, y_lo), (x_hi, y_lo), (0.0, -1.0), w),
                ((x_hi, y_lo), (x_hi, y_hi), (1.0, 0.0), h),
                ((x_hi, y_hi), (x_lo, y_hi), (0.0, 1.0), w),
                ((x_lo, y_hi), (x_lo, y_lo), (-1.0, 0.0), h),
            ];
            for (a, b, nrm, len) in edges {
                let n = ((m as f64 * len / perim).round() as usize).max(1);
                let ds = len / n as f64;
                for j in 0..n {
                    let t = (j as f64 + 0.5) / n as f64;
                    out.push(BoundarySample {
                        x: a.0 + t * (b.0 - a.0),
                        y: a.1 + t * (b.1 - a.1),
                        nx: nrm.0,
                        ny: nrm.1,
                        ds,
                    });
                }
            }
            Ok(out)
        }
        DomainShape::Ellipse { cx, cy, ax, ay } => {
            let dt = 2.0 * PI / m as f64;
            Ok((0..m)
                .map(|j| {
                    let t = (j as f64 + 0.5) * dt;
                    let (s, c) = t.sin_cos();
                    let speed = (ax * s).hypot(ay * c);
                    // normal ∝ (cos t / ax, sin t / ay)
                    let (gx, gy) = (c / ax, s / ay);
                    let g = gx.hypot(gy);
                    BoundarySample {
                        x: cx + ax * c,
                        y: cy + ay * s,
                        nx: gx / g,
                        ny: gy / g,
                        ds: speed * dt,
                    }
                })
                .collect())
        }
        DomainShape::Indicator { .. } => Err(Error::Unsupported(
            "indicator domains are unsupported for boundary integrals".into(),
        )),
    }
}

/// Sign test of T·ν on ∂Ω with T = (x, (1+k) y).
pub fn starshape_check(domain: &DomainShape, k: u32, m: usize) -> Result<StarshapeReport> {
    let samples = boundary_samples(domain, m)?;
    let tol = 1e-10 * domain.diameter();
    let kp = (k + 1) as f64;
    let mut min = f64::INFINITY;
    let mut worst = (0.0, 0.0);
    for s in &samples {
        let v = s.x * s.nx + kp * s.y * s.ny;
        if v < min {
            min = v;
            worst = (s.x, s.y);
        }
    }
    if let DomainShape::Rectangle { x_lo, x_hi, y_lo, y_hi } = *domain {
        // T·ν is constant along each edge, so the edge values are exact
        for (v, p) in [
            (-x_lo, (x_lo, 0.5 * (y_lo + y_hi))),
            (x_hi, (x_hi, 0.5 * (y_lo + y_hi))),
            (-kp * y_lo, (0.5 * (x_lo + x_hi), y_lo)),
            (kp * y_hi, (0.5 * (x_lo + x_hi), y_hi)),
        ] {
            if v < min {
                min = v;
                worst = p;
            }
        }
    }
    let strictly = min > tol;
    Ok(StarshapeReport {
        k,
        samples: samples.len(),
        min_t_dot_nu: min,
        worst_point: worst,
        tol,
        g_starshaped: min >= -tol,
        strictly,
        eps0: if strictly { min } else { 0.0 },
    })
}
