//! Aperture-theory port coupling and single-bounce spillover.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::geometry::{LensPort, PortKind, RotmanLensGeometry, Sidewall};
use crate::error::{Error, Result};
use crate::pattern::ExcitationVector;
use crate::substrate::{self, C0};

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `|sin|` of the angle between a unit pointing vector and the unit ray `u`.
fn sin_off_axis(pointing: [f64; 2], u: [f64; 2]) -> f64 {
    (pointing[0] * u[1] - pointing[1] * u[0]).abs()
}

fn pair_term(a: &LensPort, ua: [f64; 2], b: &LensPort, ub: [f64; 2], r: f64, k: f64) -> Complex64 {
    let lambda = 2.0 * PI / k;
    let xa = 0.5 * k * a.aperture_width * sin_off_axis(a.pointing, ua);
    let xb = 0.5 * k * b.aperture_width * sin_off_axis(b.pointing, ub);
    let mag = sinc(xa) * sinc(xb) * (a.aperture_width * b.aperture_width / (lambda * r)).sqrt();
    Complex64::from_polar(mag, -(k * r + FRAC_PI_4))
}

/// Direct coupling between two ports.
///
/// `S = sinc(x_i) sinc(x_j) sqrt(w_i w_j / (lambda r)) exp(-j (k r + pi/4))`
/// with `x = (k w / 2) sin(phi)`, `phi` the angle between a port's pointing
/// and the line to the other port. Lengths are design-frame (electrical)
/// so `lambda` is the free-space wavelength.
pub fn port_coupling(
    _geometry: &RotmanLensGeometry,
    from: &LensPort,
    to: &LensPort,
    frequency: f64,
) -> Result<Complex64> {
    let d = [to.position[0] - from.position[0], to.position[1] - from.position[1]];
    let r = d[0].hypot(d[1]);
    if !(r > 1e-12) {
        return Err(Error::Geometry("coupling between coincident ports".into()));
    }
    if !(frequency > 0.0) {
        return Err(Error::InvalidParameter("frequency must be > 0".into()));
    }
    let k = 2.0 * PI * frequency / C0;
    let u = [d[0] / r, d[1] / r];
    Ok(pair_term(from, u, to, [-u[0], -u[1]], r, k))
}

fn reflect(p: [f64; 2], wall: &Sidewall) -> [f64; 2] {
    let t = [wall.end[0] - wall.start[0], wall.end[1] - wall.start[1]];
    let tt = t[0] * t[0] + t[1] * t[1];
    let v = [p[0] - wall.start[0], p[1] - wall.start[1]];
    let s = (v[0] * t[0] + v[1] * t[1]) / tt;
    let foot = [wall.start[0] + s * t[0], wall.start[1] + s * t[1]];
    [2.0 * foot[0] - p[0], 2.0 * foot[1] - p[1]]
}

fn side(p: [f64; 2], wall: &Sidewall) -> f64 {
    let t = [wall.end[0] - wall.start[0], wall.end[1] - wall.start[1]];
    t[0] * (p[1] - wall.start[1]) - t[1] * (p[0] - wall.start[0])
}

/// Specular point on `wall` of the ray from `a` to `b`, if one exists.
pub fn bounce_point(a: [f64; 2], b: [f64; 2], wall: &Sidewall) -> Option<[f64; 2]> {
    let (sa, sb) = (side(a, wall), side(b, wall));
    if sa * sb <= 0.0 {
        return None;
    }
    let img = reflect(b, wall);
    let d = [img[0] - a[0], img[1] - a[1]];
    let t = [wall.end[0] - wall.start[0], wall.end[1] - wall.start[1]];
    let den = d[0] * t[1] - d[1] * t[0];
    if den.abs() < 1e-300 {
        return None;
    }
    let w = [wall.start[0] - a[0], wall.start[1] - a[1]];
    let s = (w[0] * t[1] - w[1] * t[0]) / den;
    let u = (w[0] * d[1] - w[1] * d[0]) / den;
    ((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&u)).then(|| [a[0] + s * d[0], a[1] + s * d[1]])
}

/// Coupling over one specular sidewall bounce, scaled by `wall_reflectivity`.
/// Ports with no geometric bounce path couple zero.
pub fn spillover_coupling(
    geometry: &RotmanLensGeometry,
    from: &LensPort,
    to: &LensPort,
    frequency: f64,
    wall_reflectivity: f64,
) -> Result<Complex64> {
    spillover_via(&geometry.sidewalls, from, to, frequency, wall_reflectivity)
}

pub fn spillover_via(
    walls: &[Sidewall],
    from: &LensPort,
    to: &LensPort,
    frequency: f64,
    wall_reflectivity: f64,
) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&wall_reflectivity) {
        return Err(Error::InvalidParameter("wall reflectivity must lie in [0, 1]".into()));
    }
    if !(frequency > 0.0) {
        return Err(Error::InvalidParameter("frequency must be > 0".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if wall_reflectivity == 0.0 {
        return Ok(zero);
    }
    let k = 2.0 * PI * frequency / C0;
    let mut total = zero;
    for wall in walls {
        let Some(q) = bounce_point(from.position, to.position, wall) else {
            continue;
        };
        let da = [q[0] - from.position[0], q[1] - from.position[1]];
        let db = [q[0] - to.position[0], q[1] - to.position[1]];
        let (ra, rb) = (da[0].hypot(da[1]), db[0].hypot(db[1]));
        if ra < 1e-12 || rb < 1e-12 {
            continue;
        }
        let ua = [da[0] / ra, da[1] / ra];
        let ub = [db[0] / rb, db[1] / rb];
        total += wall_reflectivity * pair_term(from, ua, to, ub, ra + rb, k);
    }
    Ok(total)
}

/// Complex weights at the radiators for a unit wave into `beam_port`
/// (1-based): lens coupling plus spillover, delayed by each element's line.
pub fn array_weights(geometry: &RotmanLensGeometry, beam_port: usize, frequency: f64) -> Result<Vec<Complex64>> {
    let beam = geometry.beam_port(beam_port)?;
    if beam.kind != PortKind::Beam {
        return Err(Error::InvalidPort {
            port: beam_port,
            n_ports: geometry.beam_ports.len(),
        });
    }
    let sub = &geometry.params.substrate;
    let lambda_g = substrate::guided_wavelength(sub, geometry.line_width, frequency)?;
    let k_line = 2.0 * PI / lambda_g;
    geometry
        .array_ports
        .iter()
        .zip(&geometry.physical_line_lengths)
        .map(|(a, &len)| {
            let s = port_coupling(geometry, beam, a, frequency)?
                + spillover_coupling(geometry, beam, a, frequency, geometry.params.wall_reflectivity)?;
            Ok(s * Complex64::from_polar(1.0, -k_line * len))
        })
        .collect()
}

/// [`array_weights`] as an excitation for the pattern module.
pub fn array_excitation(geometry: &RotmanLensGeometry, beam_port: usize, frequency: f64) -> Result<ExcitationVector> {
    let w = array_weights(geometry, beam_port, frequency)?;
    ExcitationVector::from_complex(&w, geometry.params.element_spacing * frequency / C0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotman::RotmanDesignParams;
    use approx::assert_abs_diff_eq;

    fn port(pos: [f64; 2], pointing: [f64; 2], w: f64) -> LensPort {
        LensPort {
            kind: PortKind::Beam,
            index: 1,
            position: pos,
            aperture_width: w,
            pointing,
            connected_line_length: None,
            feed_angle: None,
        }
    }

    fn lens4() -> RotmanLensGeometry {
        RotmanLensGeometry::synthesize(&RotmanDesignParams::four_by_four()).unwrap()
    }

    #[test]
    fn boresight_limit() {
        let g = lens4();
        let f = 3.15e9;
        let a = port([0.0, 0.0], [1.0, 0.0], 0.01);
        let b = port([0.1, 0.0], [-1.0, 0.0], 0.02);
        let s = port_coupling(&g, &a, &b, f).unwrap();
        let lambda = C0 / f;
        assert_abs_diff_eq!(s.norm(), (0.01 * 0.02 / (lambda * 0.1)).sqrt(), epsilon = 1e-15);
        let k = 2.0 * PI / lambda;
        let want = Complex64::from_polar(1.0, -(k * 0.1 + FRAC_PI_4));
        assert!((s / s.norm() - want).norm() < 1e-12);
    }

    #[test]
    fn first_sinc_null() {
        let g = lens4();
        let f = 3.15e9;
        let k = 2.0 * PI * f / C0;
        // x = (k w / 2) sin(phi) = pi with phi = 90 deg
        let w = 2.0 * PI / k;
        let a = port([0.0, 0.0], [0.0, 1.0], w);
        let b = port([0.1, 0.0], [-1.0, 0.0], 0.01);
        assert!(port_coupling(&g, &a, &b, f).unwrap().norm() < 1e-15);
    }

    #[test]
    fn coincident_ports_are_an_error() {
        let g = lens4();
        let a = port([0.0, 0.0], [1.0, 0.0], 0.01);
        assert!(matches!(port_coupling(&g, &a, &a, 3e9), Err(Error::Geometry(_))));
    }

    #[test]
    fn reciprocity_is_exact() {
        let g = lens4();
        for b in &g.beam_ports {
            for a in &g.array_ports {
                let f = port_coupling(&g, b, a, 3.15e9).unwrap();
                let r = port_coupling(&g, a, b, 3.15e9).unwrap();
                assert_eq!(f, r);
            }
        }
    }

    #[test]
    fn beam_to_array_power_budget() {
        let g = RotmanLensGeometry::synthesize(&RotmanDesignParams::eight_by_eight()).unwrap();
        let centre = &g.beam_ports[3];
        let total: f64 = g
            .array_ports
            .iter()
            .map(|a| port_coupling(&g, centre, a, 6.3e9).unwrap().norm_sqr())
            .sum();
        assert!(total > 0.0 && total < 1.0, "total = {total}");
    }

    #[test]
    fn absorbing_walls_spill_nothing() {
        let g = lens4();
        for b in &g.beam_ports {
            for a in &g.array_ports {
                assert_eq!(
                    spillover_coupling(&g, b, a, 3.15e9, 0.0).unwrap(),
                    Complex64::new(0.0, 0.0)
                );
            }
        }
    }

    #[test]
    fn image_principle() {
        let wall = Sidewall {
            start: [0.0, 0.1],
            end: [0.2, 0.1],
        };
        let a = port([0.0, 0.0], [1.0, 0.0], 0.015);
        let b = port([0.15, 0.03], [-0.6, 0.8], 0.02);
        // b mirrored in the wall, with mirrored pointing
        let img = port([0.15, 0.17], [-0.6, -0.8], 0.02);
        let g = lens4();
        let direct = port_coupling(&g, &a, &img, 3.15e9).unwrap();
        let spill = spillover_via(&[wall], &a, &b, 3.15e9, 1.0).unwrap();
        assert!((direct - spill).norm() < 1e-12 * direct.norm());
        let none = spillover_via(&[wall], &a, &port([0.5, 0.03], [-1.0, 0.0], 0.02), 3.15e9, 1.0).unwrap();
        assert_eq!(none, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn partial_reflection_is_weaker_than_direct() {
        let g = lens4();
        let mut found = false;
        for b in &g.beam_ports {
            for a in &g.array_ports {
                let s = spillover_coupling(&g, b, a, 3.15e9, 0.3).unwrap();
                let d = port_coupling(&g, b, a, 3.15e9).unwrap();
                if s.norm() > 0.0 {
                    found = true;
                    assert!(s.norm() < d.norm());
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn centre_beam_excitation_is_symmetric() {
        let p = RotmanDesignParams::eight_by_eight();
        let mut q = p.clone();
        q.n_beam_ports = 9;
        let g = RotmanLensGeometry::synthesize(&q).unwrap();
        let w = array_weights(&g, 5, q.frequency).unwrap();
        let n = w.len();
        for i in 0..n {
            assert_abs_diff_eq!(w[i].norm(), w[n - 1 - i].norm(), epsilon = 1e-12);
        }
        // centre feed sits on F0: element phases agree up to the residual path error
        let max_err = g
            .array_contour
            .iter()
            .map(|c| g.phase_error_deg(0.0, c.eta).unwrap().abs())
            .fold(0.0, f64::max);
        let ph: Vec<f64> = w.iter().map(|z| (z / w[0]).arg().to_degrees()).collect();
        for p in ph {
            assert!(p.abs() <= max_err + 1e-6, "{p}");
        }
    }
}
