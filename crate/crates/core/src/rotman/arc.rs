//! Beam-port (focal) contour and feed phase error.

use super::contour::solve_normalized;
use super::params::RotmanDesignParams;
use crate::error::{Error, Result};

/// Normalized focal contour: an ellipse centred at `(-c, 0)` with semi-axis
/// `semi_x` along the lens axis and `semi_y = semi_x sqrt(1 - e^2)` across it,
/// sized so that it runs through all three focal points. `e = 0` is the
/// circle through the foci.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalArcShape {
    pub centre_offset: f64,
    pub semi_x: f64,
    pub semi_y: f64,
}

pub fn arc_shape(g: f64, alpha_rad: f64, eccentricity: f64) -> Result<FocalArcShape> {
    if !(0.0..1.0).contains(&eccentricity) {
        return Err(Error::InvalidParameter(format!(
            "eccentricity {eccentricity} outside [0, 1)"
        )));
    }
    let (b, a) = alpha_rad.sin_cos();
    let k = 1.0 - eccentricity * eccentricity;
    let c = 0.5 * (a + g - b * b / (k * (g - a)));
    let semi_x = g - c;
    if !(semi_x > 0.0) {
        return Err(Error::Geometry(format!(
            "no focal ellipse of eccentricity {eccentricity} passes through the foci at g = {g}"
        )));
    }
    Ok(FocalArcShape {
        centre_offset: c,
        semi_x,
        semi_y: semi_x * k.sqrt(),
    })
}

impl FocalArcShape {
    /// Point where the ray from the contour centre at feed angle `theta`
    /// (`R = rho (-cos theta, sin theta)`) meets the arc.
    pub fn point(&self, theta_rad: f64) -> Result<(f64, f64)> {
        let (st, ct) = theta_rad.sin_cos();
        let (c, ax, ay) = (self.centre_offset, self.semi_x, self.semi_y);
        let qa = ct * ct / (ax * ax) + st * st / (ay * ay);
        let qb = -2.0 * c * ct / (ax * ax);
        let qc = c * c / (ax * ax) - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return Err(Error::Geometry(format!(
                "feed ray at {} deg misses the focal arc",
                theta_rad.to_degrees()
            )));
        }
        let rho = (-qb + disc.sqrt()) / (2.0 * qa);
        if !(rho > 0.0) {
            return Err(Error::Geometry("focal arc lies behind the contour centre".into()));
        }
        Ok((-rho * ct, rho * st))
    }
}

/// Normalized phase error `R_a - R_b` for a feed at `theta` and the contour
/// point at `eta`: `|R| - (|R - P| + w + eta sin(theta))`.
pub fn phase_error_normalized(g: f64, alpha_rad: f64, eccentricity: f64, theta_rad: f64, eta: f64) -> Result<f64> {
    let shape = arc_shape(g, alpha_rad, eccentricity)?;
    let r = shape.point(theta_rad)?;
    let p = solve_normalized(g, alpha_rad, eta)?;
    let ra = r.0.hypot(r.1);
    let rb = (r.0 - p.x).hypot(r.1 - p.y) + p.w + eta * theta_rad.sin();
    Ok(ra - rb)
}

/// Normalized focal-arc point for feed angle `theta_deg`, `|theta| <= alpha`.
pub fn focal_arc_point(params: &RotmanDesignParams, theta_deg: f64) -> Result<(f64, f64)> {
    if theta_deg.abs() > params.focal_angle * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "feed angle {theta_deg} deg outside +-{} deg",
            params.focal_angle
        )));
    }
    arc_shape(params.focal_ratio, params.alpha_rad(), params.focal_arc.eccentricity())?.point(theta_deg.to_radians())
}

/// Phase error in meters for the lens described by `params`.
pub fn phase_error_length(params: &RotmanDesignParams, theta_deg: f64, eta: f64) -> Result<f64> {
    let d = phase_error_normalized(
        params.focal_ratio,
        params.alpha_rad(),
        params.focal_arc.eccentricity(),
        theta_deg.to_radians(),
        eta,
    )?;
    Ok(d * params.off_axis_focal_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotman::contour::focal_points;
    use crate::rotman::params::FocalArc;
    use approx::assert_abs_diff_eq;

    const ALPHA: f64 = 50.0 * std::f64::consts::PI / 180.0;

    #[test]
    fn arc_runs_through_the_foci() {
        for e in [0.0, 0.3, 0.6] {
            let s = arc_shape(1.27, ALPHA, e).unwrap();
            let [f0, f1, f2] = focal_points(1.27, ALPHA);
            let p0 = s.point(0.0).unwrap();
            let p1 = s.point(ALPHA).unwrap();
            let p2 = s.point(-ALPHA).unwrap();
            for (p, f) in [(p0, f0), (p1, f1), (p2, f2)] {
                assert_abs_diff_eq!(p.0, f.0, epsilon = 1e-14);
                assert_abs_diff_eq!(p.1, f.1, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn circle_limit_of_the_ellipse() {
        let circ = arc_shape(1.297, ALPHA, 0.0).unwrap();
        let ell = arc_shape(1.297, ALPHA, 1e-12).unwrap();
        // circle through the foci: centre (-(g^2 - 1) / (2 (g - cos a)), 0)
        let c = (1.297f64.powi(2) - 1.0) / (2.0 * (1.297 - ALPHA.cos()));
        assert_abs_diff_eq!(circ.centre_offset, c, epsilon = 1e-15);
        assert_eq!(circ.semi_x, circ.semi_y);
        for k in -60..=60 {
            let t = f64::from(k).to_radians();
            let (a, b) = (circ.point(t).unwrap(), ell.point(t).unwrap());
            assert!((a.0 - b.0).hypot(a.1 - b.1) < 1e-9);
        }
    }

    #[test]
    fn zero_error_at_the_foci() {
        for e in [0.0, 0.3] {
            for t in [-ALPHA, 0.0, ALPHA] {
                for k in -10..=10 {
                    let eta = 0.09 * f64::from(k);
                    let d = phase_error_normalized(1.297, ALPHA, e, t, eta).unwrap();
                    assert!(d.abs() < 1e-12, "e={e} t={t} eta={eta} d={d}");
                }
            }
        }
    }

    #[test]
    fn intermediate_feed_against_ray_lengths() {
        let (g, eta) = (1.297, 0.8);
        let t = ALPHA / 2.0;
        let d = phase_error_normalized(g, ALPHA, 0.0, t, eta).unwrap();
        // Independent rebuild: circle through the foci, ray from the origin.
        let c = (g * g - 1.0) / (2.0 * (g - ALPHA.cos()));
        let rad = g - c;
        let (ux, uy) = (-t.cos(), t.sin());
        // |rho u + (c, 0)| = rad
        let bq = 2.0 * c * ux;
        let rho = (-bq + (bq * bq - 4.0 * (c * c - rad * rad)).sqrt()) / 2.0;
        let (rx, ry) = (rho * ux, rho * uy);
        let p = solve_normalized(g, ALPHA, eta).unwrap();
        let want = rho - ((rx - p.x).hypot(ry - p.y) + p.w + eta * t.sin());
        assert_abs_diff_eq!(d, want, epsilon = 1e-14);
        assert!(d.abs() > 1e-6);
    }

    #[test]
    fn feed_angle_is_range_checked() {
        let p = crate::rotman::RotmanDesignParams::four_by_four();
        assert!(focal_arc_point(&p, 51.0).is_err());
        let f1 = focal_arc_point(&p, 50.0).unwrap();
        assert_abs_diff_eq!(f1.0, -ALPHA.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(f1.1, ALPHA.sin(), epsilon = 1e-14);
        let f0 = focal_arc_point(&p, 0.0).unwrap();
        assert_abs_diff_eq!(f0.0, -p.focal_ratio, epsilon = 1e-14);
        let mut q = p.clone();
        q.focal_arc = FocalArc::Elliptical { eccentricity: 0.3 };
        assert!(focal_arc_point(&q, 25.0).is_ok());
    }

    #[test]
    fn error_grows_with_aperture() {
        let feeds: Vec<f64> = (0..=40).map(|i| (-50.0 + 2.5 * f64::from(i)).to_radians()).collect();
        let etas: Vec<f64> = (-90..=90).map(|j| 0.01 * f64::from(j)).collect();
        let mut last = 0.0;
        for k in 1..=9 {
            let eta_max = 0.1 * f64::from(k);
            let worst = feeds
                .iter()
                .flat_map(|&t| {
                    etas.iter()
                        .filter(move |e| e.abs() <= eta_max + 1e-12)
                        .map(move |&e| (t, e))
                })
                .map(|(t, eta)| phase_error_normalized(1.297, ALPHA, 0.0, t, eta).unwrap().abs())
                .fold(0.0, f64::max);
            assert!(worst >= last);
            last = worst;
        }
        assert!(last > 0.0);
    }
}
