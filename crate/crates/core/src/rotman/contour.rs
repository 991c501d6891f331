//! Inner (array) contour of the lens from the three path-length equalities.

use super::params::RotmanDesignParams;
use crate::error::{Error, Result};

/// Residual accepted on each unsquared path equality (normalized by F).
pub const RESIDUAL_TOL: f64 = 1e-9;

/// A solved point of the array contour, normalized by F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPoint {
    pub eta: f64,
    pub x: f64,
    pub y: f64,
    /// `(W(n) - W(0)) / F`
    pub w: f64,
}

/// Focal points `(F0, F1, F2)` in the normalized frame. The array contour
/// passes through the origin and the foci lie on the negative x side.
pub fn focal_points(g: f64, alpha_rad: f64) -> [(f64, f64); 3] {
    let (b, a) = alpha_rad.sin_cos();
    [(-g, 0.0), (-a, b), (-a, -b)]
}

/// Signed errors of the three path equalities at `p`:
/// `|F1P| - (1 - w - eta b)`, `|F2P| - (1 - w + eta b)`, `|F0P| - (g - w)`.
pub fn path_residuals(g: f64, alpha_rad: f64, p: &ContourPoint) -> [f64; 3] {
    let [f0, f1, f2] = focal_points(g, alpha_rad);
    let b = alpha_rad.sin();
    let d = |f: (f64, f64)| (p.x - f.0).hypot(p.y - f.1);
    [
        d(f1) - (1.0 - p.w - p.eta * b),
        d(f2) - (1.0 - p.w + p.eta * b),
        d(f0) - (g - p.w),
    ]
}

fn max_residual(g: f64, alpha_rad: f64, p: &ContourPoint) -> f64 {
    path_residuals(g, alpha_rad, p)
        .iter()
        .map(|r| r.abs())
        .fold(0.0, f64::max)
}

/// Solves the contour point for normalized ordinate `eta`.
///
/// Subtracting the two off-axis equalities gives `y = eta (1 - w)`; the
/// on-axis one then makes `x` linear in `w`,
/// `x = -(2 w (g - 1) + eta^2 b^2) / (2 (g - a))`, and substituting both
/// into `x^2 + y^2 + 2 g x = w^2 - 2 g w` leaves a quadratic in `w`. The
/// root of smaller magnitude (the branch through `w = 0` at `eta = 0`) is
/// taken when it satisfies the unsquared equalities.
pub fn solve_normalized(g: f64, alpha_rad: f64, eta: f64) -> Result<ContourPoint> {
    if !(g > 1.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("g = {g}, eta = {eta}")));
    }
    let (b, a) = alpha_rad.sin_cos();
    let den = g - a;
    let e2 = eta * eta;
    let c1 = -(g - 1.0) / den;
    let c0 = -e2 * b * b / (2.0 * den);
    let qa = c1 * c1 + e2 - 1.0;
    let qb = 2.0 * c1 * c0 + 2.0 * g * c1 - 2.0 * e2 + 2.0 * g;
    let qc = c0 * c0 + 2.0 * g * c0 + e2;

    let mut roots = Vec::with_capacity(2);
    if qa.abs() < 1e-14 * (qb.abs() + qc.abs()).max(1.0) {
        if qb == 0.0 {
            return Err(Error::Geometry(format!("degenerate contour equation at eta = {eta}")));
        }
        roots.push(-qc / qb);
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(Error::UnsolvableAperture { eta });
        }
        let q = -0.5 * (qb + qb.signum() * disc.sqrt());
        if q == 0.0 {
            roots.push(0.0);
        } else {
            roots.push(q / qa);
            roots.push(qc / q);
        }
    }
    roots.sort_by(|u, v| u.abs().total_cmp(&v.abs()));

    for w0 in roots {
        let mut w = w0;
        // A Newton step on the quadratic tightens a cancellation-prone root.
        for _ in 0..2 {
            let f = (qa * w + qb) * w + qc;
            let df = 2.0 * qa * w + qb;
            if df.abs() > 1e-300 && f != 0.0 {
                let next = w - f / df;
                if ((qa * next + qb) * next + qc).abs() < f.abs() {
                    w = next;
                }
            }
        }
        let p = ContourPoint {
            eta,
            x: c1 * w + c0,
            y: eta * (1.0 - w),
            w,
        };
        if max_residual(g, alpha_rad, &p) < RESIDUAL_TOL {
            return Ok(p);
        }
    }
    Err(Error::Geometry(format!(
        "no contour branch satisfies the path equalities at eta = {eta}"
    )))
}

pub fn solve_array_contour(params: &RotmanDesignParams, eta: f64) -> Result<ContourPoint> {
    solve_normalized(params.focal_ratio, params.alpha_rad(), eta)
}

/// Largest `eta_max` such that every `|eta| <= eta_max` is solvable (to 1e-9),
/// capped at `cap`.
pub fn feasible_aperture(g: f64, alpha_rad: f64, cap: f64) -> f64 {
    let ok = |eta: f64| solve_normalized(g, alpha_rad, eta).is_ok();
    if ok(cap) {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Unit tangent `d(x, y)/d(eta)` of the contour, by central differences.
pub fn contour_tangent(g: f64, alpha_rad: f64, eta: f64) -> Result<(f64, f64)> {
    let h = 1e-6;
    let (p, m) = match (
        solve_normalized(g, alpha_rad, eta + h),
        solve_normalized(g, alpha_rad, eta - h),
    ) {
        (Ok(p), Ok(m)) => (p, m),
        (Ok(p), Err(_)) => (p, solve_normalized(g, alpha_rad, eta)?),
        (Err(_), Ok(m)) => (solve_normalized(g, alpha_rad, eta)?, m),
        (Err(e), Err(_)) => return Err(e),
    };
    let (dx, dy) = (p.x - m.x, p.y - m.y);
    let n = dx.hypot(dy);
    Ok((dx / n, dy / n))
}
