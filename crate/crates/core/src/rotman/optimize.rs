//! Focal-ratio tuning against the feed phase error.

use rayon::prelude::*;

use super::arc::{arc_shape, phase_error_normalized};
use super::params::{ErrorMetric, RotmanDesignParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub metric: ErrorMetric,
    /// Coarse grid step in g.
    pub step: f64,
    /// Number of 10x finer passes around the coarse optimum.
    pub refinements: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            metric: ErrorMetric::MaxAbs,
            step: 1e-3,
            refinements: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSample {
    pub g: f64,
    /// Phase-error objective in meters.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalRatioOptimum {
    pub g_star: f64,
    pub objective: f64,
    pub metric: ErrorMetric,
    /// Coarse-grid objective for every feasible g, ascending.
    pub profile: Vec<GSample>,
    /// Worst |error| (meters) per beam port at `g_star`.
    pub per_feed: Vec<f64>,
}

/// Phase-error objective (meters) over the beam-port feeds and the element
/// ordinates of `params` at focal ratio `g`.
pub fn focal_ratio_objective(params: &RotmanDesignParams, g: f64, metric: ErrorMetric) -> Result<f64> {
    let errors = error_grid(params, g)?;
    let all = errors.iter().flatten();
    Ok(match metric {
        ErrorMetric::MaxAbs => all.map(|e| e.abs()).fold(0.0, f64::max),
        ErrorMetric::Rms => {
            let n = errors.iter().map(Vec::len).sum::<usize>() as f64;
            (all.map(|e| e * e).sum::<f64>() / n).sqrt()
        }
    })
}

fn error_grid(params: &RotmanDesignParams, g: f64) -> Result<Vec<Vec<f64>>> {
    let alpha = params.alpha_rad();
    let e = params.focal_arc.eccentricity();
    arc_shape(g, alpha, e)?;
    let etas = params.element_etas();
    params
        .feed_angles()
        .iter()
        .map(|t| {
            etas.iter()
                .map(
                    |&eta| Ok(phase_error_normalized(g, alpha, e, t.to_radians(), eta)? * params.off_axis_focal_length),
                )
                .collect()
        })
        .collect()
}

pub fn optimize_focal_ratio(params: &RotmanDesignParams, g_range: (f64, f64)) -> Result<FocalRatioOptimum> {
    optimize_focal_ratio_with(params, g_range, OptimizerOptions::default())
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut g: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    if hi - g[n] > 1e-12 {
        g.push(hi);
    }
    g
}

fn scan(params: &RotmanDesignParams, gs: &[f64], metric: ErrorMetric) -> Vec<GSample> {
    // Evaluated in parallel, collected in grid order.
    gs.par_iter()
        .map(|&g| {
            focal_ratio_objective(params, g, metric)
                .ok()
                .map(|objective| GSample { g, objective })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Lowest objective, lowest g on ties.
fn best(samples: &[GSample]) -> Option<GSample> {
    samples.iter().copied().fold(None, |acc, s| match acc {
        Some(b) if b.objective <= s.objective => Some(b),
        _ => Some(s),
    })
}

/// Grid search over `g_range` followed by finer local grids.
///
/// Focal ratios where the contour or focal arc cannot be built are skipped.
/// The result depends only on the grid, never on evaluation order.
pub fn optimize_focal_ratio_with(
    params: &RotmanDesignParams,
    g_range: (f64, f64),
    options: OptimizerOptions,
) -> Result<FocalRatioOptimum> {
    let (lo, hi) = g_range;
    if !(lo > 1.0 && hi <= 2.0) || !lo.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "g range [{lo}, {hi}] must lie in (1, 2]"
        )));
    }
    if lo > hi {
        return Err(Error::EmptyRange(format!("g range [{lo}, {hi}] is empty")));
    }
    if !(options.step > 0.0) {
        return Err(Error::InvalidParameter("optimizer step must be > 0".into()));
    }
    let profile = scan(params, &grid(lo, hi, options.step), options.metric);
    let mut opt = best(&profile).ok_or_else(|| Error::EmptyRange(format!("no feasible lens for g in [{lo}, {hi}]")))?;
    let mut step = options.step;
    for _ in 0..options.refinements {
        let a = (opt.g - step).max(lo);
        let b = (opt.g + step).min(hi);
        step /= 10.0;
        let local = scan(params, &grid(a, b, step), options.metric);
        if let Some(s) = best(&local) {
            if s.objective < opt.objective || (s.objective == opt.objective && s.g < opt.g) {
                opt = s;
            }
        }
    }
    let per_feed = error_grid(params, opt.g)?
        .iter()
        .map(|row| row.iter().map(|e| e.abs()).fold(0.0, f64::max))
        .collect();
    Ok(FocalRatioOptimum {
        g_star: opt.g,
        objective: opt.objective,
        metric: options.metric,
        profile,
        per_feed,
    })
}
