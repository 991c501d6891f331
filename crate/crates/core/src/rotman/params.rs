use crate::error::{Error, Result};
use crate::substrate::{Substrate, C0};

/// Shape of the beam-port (focal) contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FocalArc {
    /// Circle through the three focal points.
    Circular,
    /// Ellipse through the three focal points, centred on the lens axis.
    Elliptical { eccentricity: f64 },
}

impl FocalArc {
    pub fn eccentricity(&self) -> f64 {
        match *self {
            FocalArc::Circular => 0.0,
            FocalArc::Elliptical { eccentricity } => eccentricity,
        }
    }
}

/// How requested beam directions map to feed angles on the focal arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeedMapping {
    /// `theta = -psi * alpha / psi_max`
    #[default]
    Linear,
    /// `sin(theta) = -sin(psi) * sin(alpha) / sin(psi_max)`
    Sine,
}

/// Phase-error objective used when tuning the focal ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMetric {
    #[default]
    MaxAbs,
    Rms,
}

/// Rotman lens design inputs.
///
/// Lens lengths (`off_axis_focal_length` and everything derived from it)
/// are electrical, free-space-equivalent lengths; the printed lens body is
/// smaller by `sqrt(eps_r)`. Element spacing is the physical spacing of the
/// radiators in air.
#[derive(Debug, Clone, PartialEq)]
pub struct RotmanDesignParams {
    /// F, meters.
    pub off_axis_focal_length: f64,
    /// g = G/F.
    pub focal_ratio: f64,
    /// alpha, degrees.
    pub focal_angle: f64,
    pub n_array_elements: usize,
    /// d, meters.
    pub element_spacing: f64,
    pub n_beam_ports: usize,
    /// psi_max, degrees.
    pub max_scan_angle: f64,
    pub frequency: f64,
    pub substrate: Substrate,
    pub focal_arc: FocalArc,
    pub feed_mapping: FeedMapping,
    pub port_pointing: bool,
    /// Fraction of each port's share of contour left as a gap.
    pub guard_gap: f64,
    /// Fixed beam-port aperture width in meters instead of equal division.
    pub beam_port_width: Option<f64>,
    /// Reflectivity of the sidewalls or dummy ports seen by spillover rays.
    pub wall_reflectivity: f64,
    /// Electrical length added to every array line, meters.
    pub base_line_length: f64,
}

impl RotmanDesignParams {
    /// 4 beams, 4 elements, +-50 deg at 3.15 GHz, 47 mm spacing, circular arc on FR4.
    pub fn four_by_four() -> Self {
        Self {
            off_axis_focal_length: 0.078,
            focal_ratio: 1.2970,
            focal_angle: 50.0,
            n_array_elements: 4,
            element_spacing: 0.047,
            n_beam_ports: 4,
            max_scan_angle: 50.0,
            frequency: 3.15e9,
            substrate: Substrate::fr4_0_8(),
            focal_arc: FocalArc::Circular,
            feed_mapping: FeedMapping::Linear,
            port_pointing: true,
            guard_gap: 0.1,
            beam_port_width: None,
            wall_reflectivity: 0.0,
            base_line_length: 0.0,
        }
    }

    /// 8 beams, 8 elements, +-50 deg at 6.3 GHz, 28 mm spacing, elliptical arc on TLC-30.
    pub fn eight_by_eight() -> Self {
        Self {
            off_axis_focal_length: 0.107,
            focal_ratio: 1.2670,
            focal_angle: 50.0,
            n_array_elements: 8,
            element_spacing: 0.028,
            n_beam_ports: 8,
            max_scan_angle: 50.0,
            frequency: 6.3e9,
            substrate: Substrate::tlc30_1_3(),
            focal_arc: FocalArc::Elliptical { eccentricity: 0.3 },
            feed_mapping: FeedMapping::Linear,
            port_pointing: true,
            guard_gap: 0.1,
            beam_port_width: None,
            wall_reflectivity: 0.0,
            base_line_length: 0.0,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "4x4" | "rotman-4x4" => Ok(Self::four_by_four()),
            "8x8" | "rotman-8x8" => Ok(Self::eight_by_eight()),
            other => Err(Error::Config(format!("unknown lens preset {other:?}"))),
        }
    }

    pub fn with_focal_ratio(&self, g: f64) -> Self {
        Self {
            focal_ratio: g,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.off_axis_focal_length > 0.0) {
            return bad("off-axis focal length must be > 0");
        }
        if !(self.focal_ratio > 1.0 && self.focal_ratio <= 2.0) {
            return bad("focal ratio g must lie in (1, 2]");
        }
        if !(self.focal_angle > 0.0 && self.focal_angle < 90.0) {
            return bad("focal angle must lie in (0, 90) deg");
        }
        if self.n_array_elements < 2 || self.n_beam_ports < 2 {
            return bad("at least 2 array elements and 2 beam ports are required");
        }
        if !(self.element_spacing > 0.0) {
            return bad("element spacing must be > 0");
        }
        if !(self.max_scan_angle > 0.0 && self.max_scan_angle < 90.0) {
            return bad("max scan angle must lie in (0, 90) deg");
        }
        if !(self.frequency > 0.0) {
            return bad("frequency must be > 0");
        }
        let e = self.focal_arc.eccentricity();
        if !(0.0..1.0).contains(&e) {
            return bad("eccentricity must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.guard_gap) {
            return bad("guard gap must lie in [0, 1)");
        }
        if let Some(w) = self.beam_port_width {
            if !(w > 0.0) {
                return bad("beam port width must be > 0");
            }
        }
        if !(0.0..=1.0).contains(&self.wall_reflectivity) {
            return bad("wall reflectivity must lie in [0, 1]");
        }
        if !(self.base_line_length >= 0.0) {
            return bad("base line length must be >= 0");
        }
        self.substrate.validate()
    }

    /// Free-space wavelength at the design frequency.
    pub fn wavelength(&self) -> f64 {
        C0 / self.frequency
    }

    pub fn alpha_rad(&self) -> f64 {
        self.focal_angle.to_radians()
    }

    /// Normalized element ordinates `eta_n = N_n / F`, ascending.
    pub fn element_etas(&self) -> Vec<f64> {
        let m = (self.n_array_elements as f64 - 1.0) / 2.0;
        (0..self.n_array_elements)
            .map(|i| (i as f64 - m) * self.element_spacing / self.off_axis_focal_length)
            .collect()
    }

    /// Requested beam directions psi (degrees from broadside), one per beam
    /// port in port order; port 1 takes +psi_max.
    pub fn beam_angles(&self) -> Vec<f64> {
        let n = self.n_beam_ports;
        (0..n)
            .map(|k| self.max_scan_angle * (1.0 - 2.0 * k as f64 / (n as f64 - 1.0)))
            .collect()
    }

    /// Feed angle theta (degrees) on the focal arc for beam direction `psi`.
    pub fn feed_angle(&self, psi: f64) -> f64 {
        match self.feed_mapping {
            FeedMapping::Linear => -psi * self.focal_angle / self.max_scan_angle,
            FeedMapping::Sine => {
                let s = -psi.to_radians().sin() * self.alpha_rad().sin() / self.max_scan_angle.to_radians().sin();
                s.clamp(-1.0, 1.0).asin().to_degrees()
            }
        }
    }

    /// Feed angles of the beam ports in port order (ascending).
    pub fn feed_angles(&self) -> Vec<f64> {
        self.beam_angles().into_iter().map(|p| self.feed_angle(p)).collect()
    }

    /// Designed main-lobe direction of a beam port in the array-factor frame
    /// (degrees from the array axis, 90 = broadside); `port` is 1-based.
    pub fn designed_pattern_angle(&self, port: usize) -> Result<f64> {
        if port == 0 || port > self.n_beam_ports {
            return Err(Error::InvalidPort {
                port,
                n_ports: self.n_beam_ports,
            });
        }
        Ok(90.0 - self.beam_angles()[port - 1])
    }

    /// Element spacing in free-space wavelengths.
    pub fn spacing_wavelengths(&self) -> f64 {
        self.element_spacing / self.wavelength()
    }
}
