//! Linear-array factor, relative phases and beam metrics.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::angle::wrap_deg;
use crate::error::{Error, Result};

/// Floor applied to nulls when exporting patterns.
pub const DEFAULT_FLOOR_DB: f64 = -60.0;

/// Ties for the main lobe are resolved within this many dB.
const PEAK_TIE_DB: f64 = 1e-9;

/// How element amplitudes in dB become linear weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeConvention {
    /// `10^(dB/20)`, the physical field ratio.
    #[default]
    Field,
    /// `10^(dB/10)`, as used by the original measurement-processing script.
    AppendixA,
}

impl AmplitudeConvention {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "field" => Ok(Self::Field),
            "appendixa" | "appendix-a" | "power" => Ok(Self::AppendixA),
            other => Err(Error::Config(format!("unknown amplitude convention {other:?}"))),
        }
    }

    pub fn linear(self, amplitude_db: f64) -> f64 {
        match self {
            Self::Field => 10f64.powf(amplitude_db / 20.0),
            Self::AppendixA => 10f64.powf(amplitude_db / 10.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub amplitude_db: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationVector {
    pub elements: Vec<Element>,
    /// Element spacing in wavelengths.
    pub element_spacing: f64,
    /// Reference direction in degrees (90 = broadside, 0 = endfire).
    pub steer_reference: f64,
}

impl ExcitationVector {
    pub fn new(elements: Vec<Element>, element_spacing: f64, steer_reference: f64) -> Result<Self> {
        let v = Self {
            elements,
            element_spacing,
            steer_reference,
        };
        v.validate()?;
        Ok(v)
    }

    /// Builds an excitation from complex element weights (field amplitudes).
    pub fn from_complex(weights: &[Complex64], element_spacing: f64) -> Result<Self> {
        let elements = weights
            .iter()
            .map(|w| Element {
                amplitude_db: 20.0 * w.norm().log10(),
                phase_deg: w.arg().to_degrees(),
            })
            .collect();
        Self::new(elements, element_spacing, 90.0)
    }

    /// Equal 0 dB amplitudes with a constant progressive phase.
    pub fn uniform(n: usize, progressive_phase_deg: f64, element_spacing: f64) -> Result<Self> {
        let elements = (0..n)
            .map(|i| Element {
                amplitude_db: 0.0,
                phase_deg: i as f64 * progressive_phase_deg,
            })
            .collect();
        Self::new(elements, element_spacing, 90.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements.len() < 2 {
            return Err(Error::TooFewElements(self.elements.len()));
        }
        if !(self.element_spacing > 0.0) || !self.element_spacing.is_finite() {
            return Err(Error::InvalidParameter("element spacing must be > 0".into()));
        }
        if !self.steer_reference.is_finite() {
            return Err(Error::InvalidParameter("steer reference must be finite".into()));
        }
        for (i, e) in self.elements.iter().enumerate() {
            if e.amplitude_db.is_nan() || e.amplitude_db == f64::INFINITY || !e.phase_deg.is_finite() {
                return Err(Error::InvalidParameter(format!("element {} is not finite", i + 1)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weights(&self, convention: AmplitudeConvention) -> Vec<Complex64> {
        self.elements
            .iter()
            .map(|e| Complex64::from_polar(convention.linear(e.amplitude_db), e.phase_deg * PI / 180.0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamMetrics {
    pub main_lobe_angle: f64,
    /// Main-lobe peak minus the highest sidelobe; `+inf` when there is none.
    pub sidelobe_level_db: f64,
    pub beamwidth_3db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub angles: Vec<f64>,
    /// True values; nulls may be `-inf`.
    pub af_db: Vec<f64>,
    /// `None` for an isotropic pattern.
    pub metrics: Option<BeamMetrics>,
}

impl PatternResult {
    pub fn main_lobe_angle(&self) -> Option<f64> {
        self.metrics.map(|m| m.main_lobe_angle)
    }

    pub fn sidelobe_level_db(&self) -> Option<f64> {
        self.metrics.map(|m| m.sidelobe_level_db)
    }

    pub fn beamwidth_3db(&self) -> Option<f64> {
        self.metrics.map(|m| m.beamwidth_3db)
    }

    pub fn floored(&self, floor_db: f64) -> Vec<f64> {
        self.af_db.iter().map(|&v| v.max(floor_db)).collect()
    }

    /// `(angle_rad, radius)` pairs with the radius shifted so the floor sits at 0.
    pub fn polar(&self, floor_db: f64) -> Vec<(f64, f64)> {
        self.angles
            .iter()
            .zip(self.floored(floor_db))
            .map(|(&a, v)| (a * PI / 180.0, v - floor_db))
            .collect()
    }
}

/// Integer-degree grid 1..=360.
pub fn default_grid() -> Vec<f64> {
    (1..=360).map(f64::from).collect()
}

/// Uniform grid from `start` to `stop` inclusive.
pub fn angle_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(Error::InvalidParameter(
            "angle grid needs step > 0 and stop >= start".into(),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

pub fn array_factor(excitation: &ExcitationVector, convention: AmplitudeConvention) -> Result<PatternResult> {
    array_factor_on(excitation, convention, &default_grid())
}

/// `AF(t) = 20 log10 |sum_n a_n exp(j[(n-1) 2 pi d (cos t - cos t0) + phase_n])|`.
///
/// Element phases add directly; they are not multiplied by the index.
pub fn array_factor_on(
    excitation: &ExcitationVector,
    convention: AmplitudeConvention,
    angles: &[f64],
) -> Result<PatternResult> {
    excitation.validate()?;
    if angles.is_empty() {
        return Err(Error::InvalidParameter("empty angle grid".into()));
    }
    let weights = excitation.weights(convention);
    let kd = 2.0 * PI * excitation.element_spacing;
    let c0 = (excitation.steer_reference * PI / 180.0).cos();
    let af_db: Vec<f64> = angles
        .iter()
        .map(|&t| {
            let u = kd * ((t * PI / 180.0).cos() - c0);
            let sum: Complex64 = weights
                .iter()
                .enumerate()
                .map(|(n, w)| w * Complex64::from_polar(1.0, n as f64 * u))
                .sum();
            20.0 * sum.norm().log10()
        })
        .collect();
    let mut result = PatternResult {
        angles: angles.to_vec(),
        af_db,
        metrics: None,
    };
    result.metrics = match beam_metrics(&result) {
        Ok(m) => Some(m),
        Err(Error::MetricsUndefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(result)
}

/// Angle of `w[n] / w[n-1]` for each adjacent pair, in (-180, 180].
pub fn relative_phase_differences(excitation: &ExcitationVector) -> Result<Vec<f64>> {
    excitation.validate()?;
    let w = excitation.weights(AmplitudeConvention::AppendixA);
    w.windows(2)
        .enumerate()
        .map(|(i, p)| {
            if p[0].norm() == 0.0 {
                return Err(Error::UndefinedRatio(i + 1));
            }
            Ok(wrap_deg((p[1] / p[0]).arg() * 180.0 / PI))
        })
        .collect()
}

/// Progressive phase that steers the beam to `beam_angle` (degrees from the array axis).
pub fn steering_phase(beam_angle: f64, element_spacing: f64) -> f64 {
    -360.0 * element_spacing * beam_angle.to_radians().cos()
}

struct Grid<'a> {
    v: &'a [f64],
    circular: bool,
}

impl Grid<'_> {
    fn prev(&self, i: usize) -> Option<usize> {
        match (i, self.circular) {
            (0, true) => Some(self.v.len() - 1),
            (0, false) => None,
            _ => Some(i - 1),
        }
    }

    fn next(&self, i: usize) -> Option<usize> {
        let n = self.v.len();
        match (i + 1 == n, self.circular) {
            (true, true) => Some(0),
            (true, false) => None,
            _ => Some(i + 1),
        }
    }

    /// Walks downhill from `start` until the next sample rises.
    fn walk_down(&self, start: usize, step: impl Fn(usize) -> Option<usize>) -> usize {
        let mut j = start;
        for _ in 0..self.v.len() {
            match step(j) {
                Some(k) if self.v[k] <= self.v[j] && k != start => j = k,
                _ => break,
            }
        }
        j
    }
}

fn covers_full_circle(angles: &[f64]) -> bool {
    if angles.len() < 3 {
        return false;
    }
    let step = angles[1] - angles[0];
    let extent = angles[angles.len() - 1] - angles[0] + step;
    (extent - 360.0).abs() < 1e-6 * 360.0
}

/// Main lobe, sidelobe level and 3 dB beamwidth of a sampled pattern.
///
/// The main lobe is the global maximum (lowest angle on ties). Its span runs
/// between the nearest local minima on either side; sidelobes are the local
/// maxima outside it, skipping the mirror images (360 - angle) of the
/// main-lobe span on a full-circle grid. The beamwidth uses linearly
/// interpolated -3 dB crossings.
pub fn beam_metrics(pattern: &PatternResult) -> Result<BeamMetrics> {
    let (angles, v) = (&pattern.angles, &pattern.af_db);
    let n = v.len();
    if n < 3 || angles.len() != n {
        return Err(Error::MetricsUndefined("pattern needs at least 3 samples".into()));
    }
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::MetricsUndefined("pattern contains NaN".into()));
    }
    let peak = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let low = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if !peak.is_finite() || peak - low < 1e-9 {
        return Err(Error::MetricsUndefined("isotropic or empty pattern".into()));
    }
    let main = v.iter().position(|&x| x >= peak - PEAK_TIE_DB).expect("peak exists");
    let g = Grid {
        v,
        circular: covers_full_circle(angles),
    };

    let left = g.walk_down(main, |i| g.prev(i));
    let right = g.walk_down(main, |i| g.next(i));
    let mut in_span = vec![false; n];
    let mut j = left;
    loop {
        in_span[j] = true;
        if j == right {
            break;
        }
        j = g.next(j).expect("span is contiguous");
    }

    let step = (angles[n - 1] - angles[0]) / (n - 1) as f64;
    let grid_index = |angle: f64| -> Option<usize> {
        let k = ((angle - angles[0]) / step).round();
        let k = if g.circular { k.rem_euclid(n as f64) } else { k };
        (k >= 0.0 && (k as usize) < n).then_some(k as usize)
    };
    let mut best_side = f64::NEG_INFINITY;
    for i in 0..n {
        if in_span[i] {
            continue;
        }
        let is_max = match (g.prev(i), g.next(i)) {
            (Some(p), Some(q)) => v[i] > v[p] && v[i] >= v[q],
            (None, Some(q)) => v[i] >= v[q],
            (Some(p), None) => v[i] > v[p],
            (None, None) => false,
        };
        if !is_max {
            continue;
        }
        if g.circular {
            if let Some(m) = grid_index(360.0 - angles[i]) {
                if in_span[m] {
                    continue;
                }
            }
        }
        best_side = best_side.max(v[i]);
    }
    let sidelobe_level_db = if best_side == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        peak - best_side
    };

    let threshold = v[main] - 3.0;
    let crossing = |forward: bool| -> f64 {
        let mut j = main;
        let mut travelled = 0.0;
        for _ in 0..n {
            let k = if forward { g.next(j) } else { g.prev(j) };
            let Some(k) = k else { return travelled };
            if v[k] < threshold {
                let t = (v[j] - threshold) / (v[j] - v[k]);
                return travelled + t * step;
            }
            travelled += step;
            j = k;
        }
        travelled
    };
    let beamwidth_3db = (crossing(false) + crossing(true)).min(if g.circular { 360.0 } else { f64::INFINITY });

    Ok(BeamMetrics {
        main_lobe_angle: angles[main],
        sidelobe_level_db,
        beamwidth_3db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_element_broadside() {
        let e = ExcitationVector::uniform(2, 0.0, 0.5).unwrap();
        let p = array_factor(&e, AmplitudeConvention::Field).unwrap();
        assert_abs_diff_eq!(p.af_db[89], 20.0 * 2f64.log10(), epsilon = 1e-12);
        // cos(1 deg) is not exactly 1; the true null is at 0 and 180 deg.
        let null = array_factor_on(&e, AmplitudeConvention::Field, &[0.0, 90.0, 180.0]).unwrap();
        assert!(null.af_db[0] < -250.0);
        assert!(null.af_db[2] < -250.0);
        assert_eq!(p.main_lobe_angle(), Some(90.0));
        // symmetric about broadside
        for k in 1..89 {
            assert_abs_diff_eq!(p.af_db[89 - k], p.af_db[89 + k], epsilon = 1e-9);
        }
    }

    #[test]
    fn progressive_phase_steers_the_beam() {
        let e = ExcitationVector::uniform(4, -45.0, 0.5).unwrap();
        let grid = angle_grid(0.0, 180.0, 0.01).unwrap();
        let p = array_factor_on(&e, AmplitudeConvention::Field, &grid).unwrap();
        assert_abs_diff_eq!(p.main_lobe_angle().unwrap(), 75.52, epsilon = 0.01);
    }

    #[test]
    fn uniform_eight_element_sidelobes() {
        let e = ExcitationVector::uniform(8, 0.0, 0.5).unwrap();
        let grid = angle_grid(0.0, 180.0, 0.01).unwrap();
        let p = array_factor_on(&e, AmplitudeConvention::Field, &grid).unwrap();
        assert_abs_diff_eq!(p.sidelobe_level_db().unwrap(), 12.8, epsilon = 0.1);
        let full = array_factor(&e, AmplitudeConvention::Field).unwrap();
        assert_eq!(full.main_lobe_angle(), Some(90.0));
        assert!(full.sidelobe_level_db().unwrap() > 12.0);
    }

    #[test]
    fn conventions_differ_by_the_exponent() {
        let e = ExcitationVector::new(
            vec![
                Element {
                    amplitude_db: -3.0,
                    phase_deg: 0.0,
                },
                Element {
                    amplitude_db: -6.0,
                    phase_deg: 0.0,
                },
            ],
            0.5,
            90.0,
        )
        .unwrap();
        let f = array_factor(&e, AmplitudeConvention::Field).unwrap();
        let a = array_factor(&e, AmplitudeConvention::AppendixA).unwrap();
        let lin_f = 10f64.powf(-3.0 / 20.0) + 10f64.powf(-6.0 / 20.0);
        let lin_a = 10f64.powf(-3.0 / 10.0) + 10f64.powf(-6.0 / 10.0);
        assert_abs_diff_eq!(f.af_db[89], 20.0 * lin_f.log10(), epsilon = 1e-12);
        assert_abs_diff_eq!(a.af_db[89], 20.0 * lin_a.log10(), epsilon = 1e-12);
    }

    #[test]
    fn relative_phases() {
        let e = ExcitationVector::uniform(5, -45.0, 0.5).unwrap();
        for d in relative_phase_differences(&e).unwrap() {
            assert_abs_diff_eq!(d, -45.0, epsilon = 1e-12);
        }
        let e = ExcitationVector::uniform(3, 0.0, 0.5).unwrap();
        assert_eq!(relative_phase_differences(&e).unwrap(), vec![0.0, 0.0]);
        let e = ExcitationVector::new(
            vec![
                Element {
                    amplitude_db: -16.92,
                    phase_deg: -178.73,
                },
                Element {
                    amplitude_db: -12.51,
                    phase_deg: 134.96,
                },
            ],
            0.82,
            90.0,
        )
        .unwrap();
        assert_abs_diff_eq!(relative_phase_differences(&e).unwrap()[0], -46.31, epsilon = 1e-9);
        let zero = ExcitationVector::new(
            vec![
                Element {
                    amplitude_db: f64::NEG_INFINITY,
                    phase_deg: 0.0,
                },
                Element {
                    amplitude_db: 0.0,
                    phase_deg: 0.0,
                },
            ],
            0.5,
            90.0,
        )
        .unwrap();
        assert!(matches!(
            relative_phase_differences(&zero),
            Err(Error::UndefinedRatio(1))
        ));
    }

    #[test]
    fn too_few_elements_and_bad_spacing() {
        let one = vec![Element {
            amplitude_db: 0.0,
            phase_deg: 0.0,
        }];
        assert!(matches!(
            ExcitationVector::new(one, 0.5, 90.0),
            Err(Error::TooFewElements(1))
        ));
        assert!(ExcitationVector::uniform(2, 0.0, 0.0).is_err());
    }

    #[test]
    fn isotropic_pattern_has_no_metrics() {
        let e = ExcitationVector::new(
            vec![
                Element {
                    amplitude_db: 0.0,
                    phase_deg: 0.0,
                },
                Element {
                    amplitude_db: f64::NEG_INFINITY,
                    phase_deg: 0.0,
                },
            ],
            0.5,
            90.0,
        )
        .unwrap();
        let p = array_factor(&e, AmplitudeConvention::Field).unwrap();
        assert!(p.metrics.is_none());
        assert!(matches!(beam_metrics(&p), Err(Error::MetricsUndefined(_))));
    }

    #[test]
    fn lobe_free_pattern_reports_infinite_sll() {
        let angles = angle_grid(0.0, 180.0, 1.0).unwrap();
        let af_db = angles.iter().map(|a: &f64| -((a - 90.0) / 30.0).powi(2)).collect();
        let p = PatternResult {
            angles,
            af_db,
            metrics: None,
        };
        let m = beam_metrics(&p).unwrap();
        assert_eq!(m.main_lobe_angle, 90.0);
        assert_eq!(m.sidelobe_level_db, f64::INFINITY);
        // -3 dB at |a - 90| = 30 sqrt(3)
        assert_abs_diff_eq!(m.beamwidth_3db, 60.0 * 3f64.sqrt(), epsilon = 0.1);
    }

    #[test]
    fn steering_phase_inverts_beam_direction() {
        assert_abs_diff_eq!(steering_phase(90.0, 0.5), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(steering_phase(0.0, 0.5), -180.0, epsilon = 1e-12);
        assert_abs_diff_eq!(steering_phase(75.52, 0.5), -45.0, epsilon = 0.01);
        let b = steering_phase(63.0, 0.7);
        assert_abs_diff_eq!(crate::butler::beam_direction(b, 0.7).unwrap(), 63.0, epsilon = 1e-12);
    }

    #[test]
    fn polar_export_is_shifted_by_the_floor() {
        let e = ExcitationVector::uniform(2, 0.0, 0.5).unwrap();
        let p = array_factor_on(&e, AmplitudeConvention::Field, &[0.0, 90.0]).unwrap();
        let pol = p.polar(DEFAULT_FLOOR_DB);
        assert_eq!(pol[0].1, 0.0);
        assert_abs_diff_eq!(pol[1].1, 60.0 + 20.0 * 2f64.log10(), epsilon = 1e-12);
        assert_abs_diff_eq!(pol[1].0, PI / 2.0, epsilon = 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_excitation() -> impl Strategy<Value = ExcitationVector> {
            (
                prop::collection::vec((-20.0f64..0.0, -180.0f64..180.0), 2..10),
                0.2f64..1.0,
            )
                .prop_map(|(els, d)| {
                    let elements = els
                        .into_iter()
                        .map(|(a, p)| Element {
                            amplitude_db: a,
                            phase_deg: p,
                        })
                        .collect();
                    ExcitationVector::new(elements, d, 90.0).unwrap()
                })
        }

        proptest! {
            #[test]
            fn global_phase_is_invisible(e in any_excitation(), offset in -180.0f64..180.0) {
                let mut shifted = e.clone();
                for el in &mut shifted.elements {
                    el.phase_deg += offset;
                }
                let a = array_factor(&e, AmplitudeConvention::Field).unwrap();
                let b = array_factor(&shifted, AmplitudeConvention::Field).unwrap();
                for (x, y) in a.af_db.iter().zip(&b.af_db) {
                    prop_assert!((x - y).abs() < 1e-6 || (x.max(*y) < -100.0));
                }
            }

            #[test]
            fn amplitude_scaling_shifts_uniformly(e in any_excitation(), db in -10.0f64..10.0) {
                let mut scaled = e.clone();
                for el in &mut scaled.elements {
                    el.amplitude_db += db;
                }
                let a = array_factor(&e, AmplitudeConvention::Field).unwrap();
                let b = array_factor(&scaled, AmplitudeConvention::Field).unwrap();
                for (x, y) in a.af_db.iter().zip(&b.af_db) {
                    prop_assert!((y - x - db).abs() < 1e-6 || x.max(*y) < -100.0);
                }
                if let (Some(ma), Some(mb)) = (a.metrics, b.metrics) {
                    prop_assert_eq!(ma.main_lobe_angle, mb.main_lobe_angle);
                    prop_assert!((ma.beamwidth_3db - mb.beamwidth_3db).abs() < 1e-6);
                    prop_assert!(ma.sidelobe_level_db == mb.sidelobe_level_db
                        || (ma.sidelobe_level_db - mb.sidelobe_level_db).abs() < 1e-6);
                }
            }

            #[test]
            fn steered_uniform_array_peaks_on_target(target in 30.0f64..150.0, d in 0.3f64..0.5, n in 4usize..12) {
                let beta = steering_phase(target, d);
                let e = ExcitationVector::uniform(n, beta, d).unwrap();
                let grid = angle_grid(0.0, 180.0, 0.5).unwrap();
                let p = array_factor_on(&e, AmplitudeConvention::Field, &grid).unwrap();
                prop_assert!((p.main_lobe_angle().unwrap() - target).abs() <= 0.5);
            }

            #[test]
            fn conjugation_mirrors_about_broadside(e in any_excitation()) {
                let mut conj = e.clone();
                for el in &mut conj.elements {
                    el.phase_deg = -el.phase_deg;
                }
                let grid = angle_grid(0.0, 180.0, 1.0).unwrap();
                let a = array_factor_on(&e, AmplitudeConvention::Field, &grid).unwrap();
                let b = array_factor_on(&conj, AmplitudeConvention::Field, &grid).unwrap();
                let n = grid.len();
                for i in 0..n {
                    let (x, y) = (a.af_db[i], b.af_db[n - 1 - i]);
                    prop_assert!((x - y).abs() < 1e-6 || x.max(y) < -100.0);
                }
            }
        }
    }
}
