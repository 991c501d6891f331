//! Layered SVG drawing of a synthesized lens at printed scale (millimeters).

use std::fmt::Write as _;

use crate::error::Result;
use crate::io::format::num;
use crate::rotman::{contour, LensPort, RotmanLensGeometry};

const CONTOUR_SAMPLES: usize = 96;
const ARC_SAMPLES: usize = 96;
const MARGIN_MM: f64 = 5.0;

struct Canvas {
    scale: f64,
    min: [f64; 2],
    max: [f64; 2],
}

impl Canvas {
    /// Electrical meters to printed millimeters, y pointing down.
    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] * self.scale, -p[1] * self.scale]
    }

    fn grow(&mut self, p: [f64; 2]) {
        for (i, v) in p.into_iter().enumerate() {
            self.min[i] = self.min[i].min(v);
            self.max[i] = self.max[i].max(v);
        }
    }
}

fn polyline(out: &mut String, pts: &[[f64; 2]], class: &str) {
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p[0]), num(p[1]))).collect();
    writeln!(out, "    <polyline class=\"{class}\" points=\"{}\"/>", coords.join(" ")).unwrap();
}

fn line(out: &mut String, a: [f64; 2], b: [f64; 2], class: &str) {
    writeln!(
        out,
        "    <line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        num(a[0]),
        num(a[1]),
        num(b[0]),
        num(b[1])
    )
    .unwrap();
}

fn aperture(port: &LensPort) -> ([f64; 2], [f64; 2]) {
    let t = [-port.pointing[1], port.pointing[0]];
    let h = 0.5 * port.aperture_width;
    let p = port.position;
    ([p[0] - h * t[0], p[1] - h * t[1]], [p[0] + h * t[0], p[1] + h * t[1]])
}

/// Feed-ray angles (radians) of the two wall starts, bounding the drawn arc.
fn arc_span(geometry: &RotmanLensGeometry) -> (f64, f64) {
    let angle = |p: [f64; 2]| p[1].atan2(-p[0]);
    match geometry.sidewalls.as_slice() {
        [a, b] => {
            let (u, v) = (angle(a.start), angle(b.start));
            (u.min(v), u.max(v))
        }
        _ => {
            let a = geometry.params.alpha_rad();
            (-a, a)
        }
    }
}

pub fn lens_svg(geometry: &RotmanLensGeometry) -> Result<String> {
    let p = &geometry.params;
    let f = p.off_axis_focal_length;
    let (g, alpha) = (p.focal_ratio, p.alpha_rad());
    let mut canvas = Canvas {
        scale: 1e3 * geometry.physical_scale(),
        min: [f64::MAX; 2],
        max: [f64::MIN; 2],
    };

    let etas = p.element_etas();
    let (e0, e1) = (etas[0], etas[etas.len() - 1]);
    let contour_pts: Vec<[f64; 2]> = (0..=CONTOUR_SAMPLES)
        .map(|i| {
            let eta = e0 + (e1 - e0) * i as f64 / CONTOUR_SAMPLES as f64;
            contour::solve_normalized(g, alpha, eta).map(|c| canvas.map([c.x * f, c.y * f]))
        })
        .collect::<Result<_>>()?;

    let shape = crate::rotman::arc_shape(g, alpha, p.focal_arc.eccentricity())?;
    let (lo, hi) = arc_span(geometry);
    let arc_pts: Vec<[f64; 2]> = (0..=ARC_SAMPLES)
        .map(|i| {
            let th = lo + (hi - lo) * i as f64 / ARC_SAMPLES as f64;
            shape.point(th).map(|(x, y)| canvas.map([x * f, y * f]))
        })
        .collect::<Result<_>>()?;

    // Stubs run outward along +x by each line's printed length.
    let stubs: Vec<([f64; 2], [f64; 2])> = geometry
        .array_ports
        .iter()
        .zip(&geometry.physical_line_lengths)
        .map(|(port, &len)| {
            let a = canvas.map(port.position);
            (a, [a[0] + len * 1e3, a[1]])
        })
        .collect();

    let ports: Vec<(&LensPort, [f64; 2], [f64; 2])> = geometry
        .beam_ports
        .iter()
        .chain(&geometry.array_ports)
        .chain(&geometry.dummy_ports)
        .map(|port| {
            let (a, b) = aperture(port);
            (port, canvas.map(a), canvas.map(b))
        })
        .collect();
    let walls: Vec<([f64; 2], [f64; 2])> = geometry
        .sidewalls
        .iter()
        .map(|w| (canvas.map(w.start), canvas.map(w.end)))
        .collect();

    let everything = contour_pts
        .iter()
        .chain(&arc_pts)
        .copied()
        .chain(stubs.iter().flat_map(|s| [s.0, s.1]))
        .chain(ports.iter().flat_map(|p| [p.1, p.2]))
        .chain(walls.iter().flat_map(|w| [w.0, w.1]))
        .collect::<Vec<_>>();
    for q in everything {
        canvas.grow(q);
    }
    let (x0, y0) = (canvas.min[0] - MARGIN_MM, canvas.min[1] - MARGIN_MM);
    let (w, h) = (
        canvas.max[0] - canvas.min[0] + 2.0 * MARGIN_MM,
        canvas.max[1] - canvas.min[1] + 2.0 * MARGIN_MM,
    );

    let mut out = String::new();
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}mm\" height=\"{}mm\" viewBox=\"{} {} {} {}\">",
        num(w),
        num(h),
        num(x0),
        num(y0),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(
        out,
        "  <style>polyline, line {{ fill: none; stroke-width: 0.3; }} .contour {{ stroke: #1f4e79; }} .arc {{ stroke: #7a1f1f; }} \
.beam {{ stroke: #c00000; stroke-width: 0.8; }} .array {{ stroke: #2e75b6; stroke-width: 0.8; }} .dummy {{ stroke: #7f7f7f; stroke-width: 0.8; }} \
.wall {{ stroke: #000000; }} .stub {{ stroke: #548235; stroke-width: {}; }}</style>",
        num(geometry.line_width * 1e3)
    )
    .unwrap();

    writeln!(out, "  <g id=\"array-contour\">").unwrap();
    polyline(&mut out, &contour_pts, "contour");
    writeln!(out, "  </g>\n  <g id=\"focal-arc\">").unwrap();
    polyline(&mut out, &arc_pts, "arc");
    writeln!(out, "  </g>\n  <g id=\"sidewalls\">").unwrap();
    for (a, b) in &walls {
        line(&mut out, *a, *b, "wall");
    }
    writeln!(out, "  </g>\n  <g id=\"ports\">").unwrap();
    for (port, a, b) in &ports {
        let class = match port.kind {
            crate::rotman::PortKind::Beam => "beam",
            crate::rotman::PortKind::Array => "array",
            crate::rotman::PortKind::Dummy => "dummy",
        };
        line(&mut out, *a, *b, class);
    }
    writeln!(out, "  </g>\n  <g id=\"lines\">").unwrap();
    for (a, b) in &stubs {
        line(&mut out, *a, *b, "stub");
    }
    writeln!(out, "  </g>\n</svg>").unwrap();
    Ok(out)
}
