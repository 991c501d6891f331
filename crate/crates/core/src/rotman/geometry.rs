//! Port layout and the synthesized lens.

use super::arc::{arc_shape, phase_error_length, FocalArcShape};
use super::contour::{contour_tangent, solve_normalized, ContourPoint};
use super::params::{FocalArc, RotmanDesignParams};
use crate::error::{Error, Result};
use crate::substrate;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    Beam,
    Array,
    Dummy,
}

/// A lens port aperture. Positions and widths are design-frame meters.
#[derive(Debug, Clone, PartialEq)]
pub struct LensPort {
    pub kind: PortKind,
    /// 1-based within its kind.
    pub index: usize,
    pub position: Point,
    pub aperture_width: f64,
    /// Unit vector the aperture faces.
    pub pointing: Point,
    /// Electrical length W(n) of the line behind an array port, meters.
    pub connected_line_length: Option<f64>,
    /// Feed angle on the focal arc (beam ports), degrees.
    pub feed_angle: Option<f64>,
}

/// Straight wall joining the ends of the focal arc and the array contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sidewall {
    pub start: Point,
    pub end: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotmanLensGeometry {
    pub params: RotmanDesignParams,
    pub array_contour: Vec<ContourPoint>,
    pub beam_ports: Vec<LensPort>,
    pub array_ports: Vec<LensPort>,
    /// One per sidewall on circular-arc lenses; empty on elliptical ones,
    /// where the sidewalls themselves absorb.
    pub dummy_ports: Vec<LensPort>,
    pub sidewalls: Vec<Sidewall>,
    /// Electrical line lengths W(n), meters, shortest = `base_line_length`.
    pub line_lengths: Vec<f64>,
    /// Printed 50 ohm line lengths, meters.
    pub physical_line_lengths: Vec<f64>,
    /// Width of the 50 ohm lines, meters.
    pub line_width: f64,
}

fn unit(v: Point) -> Point {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Normal of a contour with tangent `t`, oriented to face `toward`.
fn facing_normal(t: Point, from: Point, toward: Point) -> Point {
    let n = [-t[1], t[0]];
    if dot(n, sub(toward, from)) >= 0.0 {
        n
    } else {
        [-n[0], -n[1]]
    }
}

/// Samples per port-to-port segment when measuring contour arc length.
const ARC_SUBSAMPLES: usize = 32;

/// Arc length of a contour `curve(t)` for `t` from `a` to `b`.
fn arc_length(a: f64, b: f64, curve: impl Fn(f64) -> Result<Point>) -> Result<f64> {
    let mut prev = curve(a)?;
    let mut total = 0.0;
    for k in 1..=ARC_SUBSAMPLES {
        let p = curve(a + (b - a) * k as f64 / ARC_SUBSAMPLES as f64)?;
        total += dist(prev, p);
        prev = p;
    }
    Ok(total)
}

/// Aperture widths: the contour arc between the outer port centres is
/// divided equally among the ports, less the guard gap. On strongly curved
/// contours the share can exceed the tightest chord, so the common width is
/// capped to keep the guard gap there too.
fn divided_widths(
    params: &[f64],
    centres: &[Point],
    guard: f64,
    curve: impl Fn(f64) -> Result<Point>,
) -> Result<Vec<f64>> {
    let n = params.len();
    let mut total = 0.0;
    for w in params.windows(2) {
        total += arc_length(w[0], w[1], &curve)?;
    }
    let tightest = centres
        .windows(2)
        .map(|w| dist(w[0], w[1]))
        .fold(f64::INFINITY, f64::min);
    let share = total / (n - 1) as f64;
    Ok(vec![(1.0 - guard) * share.min(tightest); n])
}

fn check_overlap(ports: &[LensPort]) -> Result<()> {
    for w in ports.windows(2) {
        let gap = dist(w[0].position, w[1].position);
        let need = 0.5 * (w[0].aperture_width + w[1].aperture_width);
        if need > gap * (1.0 + 1e-12) {
            return Err(Error::InfeasibleLayout(format!(
                "{:?} ports {} and {} overlap ({:.4} mm apertures, {:.4} mm apart)",
                w[0].kind,
                w[0].index,
                w[1].index,
                need * 1e3,
                gap * 1e3
            )));
        }
    }
    Ok(())
}

fn shape_of(params: &RotmanDesignParams) -> Result<FocalArcShape> {
    arc_shape(params.focal_ratio, params.alpha_rad(), params.focal_arc.eccentricity())
}

/// Feed-angle limits of the focal arc: half a port spacing beyond the outer ports.
fn arc_edges(feeds: &[f64]) -> (f64, f64) {
    let n = feeds.len();
    let lo = feeds[0] - 0.5 * (feeds[1] - feeds[0]);
    let hi = feeds[n - 1] + 0.5 * (feeds[n - 1] - feeds[n - 2]);
    (lo, hi)
}

/// Beam ports on the focal arc in port (ascending feed-angle) order.
pub fn beam_port_layout(params: &RotmanDesignParams) -> Result<Vec<LensPort>> {
    params.validate()?;
    let f = params.off_axis_focal_length;
    let shape = shape_of(params)?;
    let feeds = params.feed_angles();
    let mut centres = Vec::with_capacity(feeds.len());
    let mut tangents = Vec::with_capacity(feeds.len());
    for &t in &feeds {
        let tr = t.to_radians();
        let p = shape.point(tr)?;
        let h = 1e-6;
        let (a, b) = (shape.point(tr + h)?, shape.point(tr - h)?);
        centres.push([p.0 * f, p.1 * f]);
        tangents.push(unit([a.0 - b.0, a.1 - b.1]));
    }
    let widths = match params.beam_port_width {
        Some(w) => vec![w; feeds.len()],
        None => divided_widths(&feeds, &centres, params.guard_gap, |t| {
            let (x, y) = shape.point(t.to_radians())?;
            Ok([x * f, y * f])
        })?,
    };
    let origin = [0.0, 0.0];
    let ports: Vec<LensPort> = (0..feeds.len())
        .map(|i| {
            let pointing = if params.port_pointing {
                unit(sub(origin, centres[i]))
            } else {
                facing_normal(tangents[i], centres[i], origin)
            };
            LensPort {
                kind: PortKind::Beam,
                index: i + 1,
                position: centres[i],
                aperture_width: widths[i],
                pointing,
                connected_line_length: None,
                feed_angle: Some(feeds[i]),
            }
        })
        .collect();
    check_overlap(&ports)?;
    Ok(ports)
}

impl RotmanLensGeometry {
    pub fn synthesize(params: &RotmanDesignParams) -> Result<Self> {
        params.validate()?;
        let f = params.off_axis_focal_length;
        let (g, alpha) = (params.focal_ratio, params.alpha_rad());
        let etas = params.element_etas();
        let array_contour = etas
            .iter()
            .map(|&eta| solve_normalized(g, alpha, eta))
            .collect::<Result<Vec<_>>>()?;

        let w_min = array_contour.iter().map(|p| p.w).fold(f64::INFINITY, f64::min);
        let line_lengths: Vec<f64> = array_contour
            .iter()
            .map(|p| params.base_line_length + (p.w - w_min) * f)
            .collect();
        let line_width = substrate::width_for_impedance(&params.substrate, 50.0)?;
        let eps_eff = substrate::effective_permittivity(&params.substrate, line_width)?;
        let physical_line_lengths = line_lengths.iter().map(|l| l / eps_eff.sqrt()).collect();

        let beam_ports = beam_port_layout(params)?;

        let f0 = [-g * f, 0.0];
        let centres: Vec<Point> = array_contour.iter().map(|p| [p.x * f, p.y * f]).collect();
        let widths = divided_widths(&etas, &centres, params.guard_gap, |eta| {
            let c = solve_normalized(g, alpha, eta)?;
            Ok([c.x * f, c.y * f])
        })?;
        let mut array_ports = Vec::with_capacity(centres.len());
        for (i, p) in array_contour.iter().enumerate() {
            let pointing = if params.port_pointing {
                unit(sub(f0, centres[i]))
            } else {
                let (tx, ty) = contour_tangent(g, alpha, p.eta)?;
                facing_normal([tx, ty], centres[i], f0)
            };
            array_ports.push(LensPort {
                kind: PortKind::Array,
                index: i + 1,
                position: centres[i],
                aperture_width: widths[i],
                pointing,
                connected_line_length: Some(line_lengths[i]),
                feed_angle: None,
            });
        }
        check_overlap(&array_ports)?;

        let sidewalls = Self::sidewalls_for(params, &array_contour, &array_ports)?;
        let dummy_ports = match params.focal_arc {
            FocalArc::Circular => {
                let centre = [-0.5 * g * f, 0.0];
                sidewalls
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let mid = [0.5 * (s.start[0] + s.end[0]), 0.5 * (s.start[1] + s.end[1])];
                        LensPort {
                            kind: PortKind::Dummy,
                            index: i + 1,
                            position: mid,
                            aperture_width: dist(s.start, s.end) * (1.0 - params.guard_gap),
                            pointing: facing_normal(unit(sub(s.end, s.start)), mid, centre),
                            connected_line_length: None,
                            feed_angle: None,
                        }
                    })
                    .collect()
            }
            FocalArc::Elliptical { .. } => Vec::new(),
        };

        Ok(Self {
            params: params.clone(),
            array_contour,
            beam_ports,
            array_ports,
            dummy_ports,
            sidewalls,
            line_lengths,
            physical_line_lengths,
            line_width,
        })
    }

    /// Walls run from the focal-arc edge (half a port spacing beyond the outer
    /// feed) to the outer aperture edge of the last array port.
    fn sidewalls_for(
        params: &RotmanDesignParams,
        contour: &[ContourPoint],
        array_ports: &[LensPort],
    ) -> Result<Vec<Sidewall>> {
        let f = params.off_axis_focal_length;
        let shape = shape_of(params)?;
        let (lo, hi) = arc_edges(&params.feed_angles());
        let top = contour[contour.len() - 1];
        let (tx, ty) = contour_tangent(params.focal_ratio, params.alpha_rad(), top.eta)?;
        let half = 0.5 * array_ports[array_ports.len() - 1].aperture_width;
        let edge = [top.x * f + half * tx, top.y * f + half * ty];
        let mut walls = Vec::with_capacity(2);
        for (theta, sign) in [(hi, 1.0), (lo, -1.0)] {
            let a = shape.point(theta.to_radians())?;
            walls.push(Sidewall {
                start: [a.0 * f, a.1 * f],
                end: [edge[0], sign * edge[1]],
            });
        }
        Ok(walls)
    }

    /// Phase error in meters for a feed at `feed_theta` degrees and contour ordinate `eta`.
    pub fn phase_error(&self, feed_theta: f64, eta: f64) -> Result<f64> {
        phase_error_length(&self.params, feed_theta, eta)
    }

    /// Phase error in degrees at the design frequency.
    pub fn phase_error_deg(&self, feed_theta: f64, eta: f64) -> Result<f64> {
        Ok(360.0 * self.phase_error(feed_theta, eta)? / self.params.wavelength())
    }

    /// Table of phase errors (meters) at every beam port and element.
    pub fn phase_error_table(&self) -> Result<Vec<Vec<f64>>> {
        self.beam_ports
            .iter()
            .map(|b| {
                self.array_contour
                    .iter()
                    .map(|p| self.phase_error(b.feed_angle.expect("beam port"), p.eta))
                    .collect()
            })
            .collect()
    }

    /// Scale from design-frame (electrical) to printed lens-body lengths.
    pub fn physical_scale(&self) -> f64 {
        1.0 / self.params.substrate.relative_permittivity.sqrt()
    }

    pub fn beam_port(&self, port: usize) -> Result<&LensPort> {
        port.checked_sub(1)
            .and_then(|i| self.beam_ports.get(i))
            .ok_or(Error::InvalidPort {
                port,
                n_ports: self.beam_ports.len(),
            })
    }
}
