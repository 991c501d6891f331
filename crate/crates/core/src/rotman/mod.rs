//! Rotman lens synthesis and analysis.

pub mod arc;
pub mod contour;
pub mod coupling;
pub mod geometry;
pub mod optimize;
pub mod params;

pub use arc::{arc_shape, focal_arc_point, phase_error_length, FocalArcShape};
pub use contour::{solve_array_contour, ContourPoint};
pub use coupling::{array_excitation, array_weights, port_coupling, spillover_coupling};
pub use geometry::{beam_port_layout, LensPort, PortKind, RotmanLensGeometry, Sidewall};
pub use optimize::{optimize_focal_ratio, optimize_focal_ratio_with, FocalRatioOptimum, OptimizerOptions};
pub use params::{ErrorMetric, FeedMapping, FocalArc, RotmanDesignParams};

/// Phase error in meters of a synthesized lens (see [`RotmanLensGeometry::phase_error`]).
pub fn phase_error(geometry: &RotmanLensGeometry, feed_theta: f64, eta: f64) -> crate::Result<f64> {
    geometry.phase_error(feed_theta, eta)
}
