//! Butler matrix synthesis from ideal hybrids, crossovers and phase shifters.

use num_complex::Complex64;

use crate::angle::wrap_deg;
use crate::error::{Error, Result};
use crate::network::components::{
    crossover_delay_deg, ideal_crossover_smatrix, ideal_hybrid_smatrix, ideal_phase_shifter,
};
use crate::network::{Netlist, SParameterMatrix};
use crate::substrate::{self, Substrate};

/// Component inventory of an order-N Butler matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentCounts {
    pub hybrids: usize,
    pub phase_shifters: usize,
}

/// Progressive phase produced at the array ports for one beam port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPhaseLaw {
    /// Beam port, 1-based.
    pub port: usize,
    pub progressive_phase: f64,
}

/// Microstrip dimensions of the lines used by a Butler layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ButlerRealization {
    pub width_50: f64,
    pub width_35: f64,
    pub guided_wavelength_50: f64,
    pub guided_wavelength_35: f64,
    /// Quarter-wave branch lengths of the hybrid.
    pub quarter_wave_50: f64,
    pub quarter_wave_35: f64,
    /// Length of the 45 deg shifter line.
    pub shifter_45: f64,
}

#[derive(Debug, Clone)]
pub struct ButlerDesign {
    pub order: usize,
    pub frequency: f64,
    pub substrate: Substrate,
    pub inventory: ComponentCounts,
    /// 2N-port: beam ports 0..N, array ports N..2N (labels 1..N and N+1..2N).
    pub assembled: SParameterMatrix,
}

fn log2_exact(order: usize) -> Result<u32> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok(order.trailing_zeros())
}

pub fn component_counts(order: usize) -> Result<ComponentCounts> {
    let n = log2_exact(order)? as usize;
    Ok(ComponentCounts {
        hybrids: order / 2 * n,
        phase_shifters: order / 2 * (n - 1),
    })
}

/// Progressive phase `±(2n-1)/N * 180` for beam port `port` (1-based).
///
/// Ports `p <= N/2` take `n = p` with sign `(-1)^p`; the upper half mirrors
/// the lower half with opposite sign. For N = 4 this is the sign pattern of
/// [`assemble_butler`] (checked in tests).
pub fn ideal_beam_phase(order: usize, port: usize) -> Result<BeamPhaseLaw> {
    log2_exact(order)?;
    if port == 0 || port > order {
        return Err(Error::InvalidPort { port, n_ports: order });
    }
    let (n, sign) = if port <= order / 2 {
        (port, if port.is_multiple_of(2) { 1.0 } else { -1.0 })
    } else {
        let m = order + 1 - port;
        (m, if m.is_multiple_of(2) { -1.0 } else { 1.0 })
    };
    Ok(BeamPhaseLaw {
        port,
        progressive_phase: sign * (2 * n - 1) as f64 * 180.0 / order as f64,
    })
}

/// Assembles the 4x4 Butler matrix from ideal components.
///
/// Topology, top to bottom: hybrids H1 (inputs 1, 2) and H2 (inputs 3, 4);
/// the inner lines cross in crossover XA while the outer lines run through
/// 45 deg shifters; hybrids H3 and H4; the inner outputs cross in XB while the
/// outer ones run through matching delay lines to outputs 5 and 8. Straight
/// paths carry the crossover's own delay on top of their nominal shift, so
/// crossing and straight branches stay aligned.
pub fn assemble_butler(order: usize, frequency: f64) -> Result<ButlerDesign> {
    if order != 4 {
        return Err(Error::UnsupportedOrder(order));
    }
    if !(frequency > 0.0) {
        return Err(Error::InvalidParameter("frequency must be > 0".into()));
    }
    let h = ideal_hybrid_smatrix(frequency);
    let x = ideal_crossover_smatrix(frequency);
    let cross = crossover_delay_deg(frequency);
    let p45 = ideal_phase_shifter(cross + 45.0, frequency);
    let p0 = ideal_phase_shifter(cross, frequency);

    let mut nl = Netlist::new();
    for (name, m) in [
        ("h1", &h),
        ("h2", &h),
        ("h3", &h),
        ("h4", &h),
        ("xa", &x),
        ("xb", &x),
        ("p1", &p45),
        ("p2", &p45),
        ("d1", &p0),
        ("d2", &p0),
    ] {
        nl.add(name, m)?;
    }
    // Hybrid ports: 0 and 3 in, 1 (through side) and 2 out.
    nl.connect(("h1", 1), ("p1", 0))?;
    nl.connect(("h1", 2), ("xa", 0))?;
    nl.connect(("h2", 1), ("xa", 3))?;
    nl.connect(("h2", 2), ("p2", 0))?;
    nl.connect(("p1", 1), ("h3", 0))?;
    nl.connect(("xa", 1), ("h3", 3))?;
    nl.connect(("xa", 2), ("h4", 0))?;
    nl.connect(("p2", 1), ("h4", 3))?;
    nl.connect(("h3", 1), ("d1", 0))?;
    nl.connect(("h3", 2), ("xb", 0))?;
    nl.connect(("h4", 1), ("xb", 3))?;
    nl.connect(("h4", 2), ("d2", 0))?;
    let assembled = nl.finish(&[
        ("h1", 0),
        ("h1", 3),
        ("h2", 0),
        ("h2", 3),
        ("d1", 1),
        ("xb", 1),
        ("xb", 2),
        ("d2", 1),
    ])?;
    Ok(ButlerDesign {
        order,
        frequency,
        substrate: Substrate::fr4_0_8(),
        inventory: component_counts(order)?,
        assembled,
    })
}

impl ButlerDesign {
    pub fn with_substrate(mut self, substrate: Substrate) -> Self {
        self.substrate = substrate;
        self
    }

    /// Transmission from beam port `beam_port` to array port `k` (both 1-based,
    /// `k` counted among the array ports).
    pub fn output(&self, beam_port: usize, k: usize) -> Result<Complex64> {
        self.check_beam_port(beam_port)?;
        if k == 0 || k > self.order {
            return Err(Error::InvalidPort {
                port: k,
                n_ports: self.order,
            });
        }
        Ok(self.assembled.get(self.order + k - 1, beam_port - 1))
    }

    /// Complex outputs at the N array ports for a unit wave into `beam_port`.
    pub fn outputs(&self, beam_port: usize) -> Result<Vec<Complex64>> {
        (1..=self.order).map(|k| self.output(beam_port, k)).collect()
    }

    fn check_beam_port(&self, beam_port: usize) -> Result<()> {
        if beam_port == 0 || beam_port > self.order {
            return Err(Error::InvalidPort {
                port: beam_port,
                n_ports: self.order,
            });
        }
        Ok(())
    }

    pub fn realization(&self) -> Result<ButlerRealization> {
        let sub = &self.substrate;
        let width_50 = substrate::width_for_impedance(sub, 50.0)?;
        let width_35 = substrate::width_for_impedance(sub, 50.0 / std::f64::consts::SQRT_2)?;
        let guided_wavelength_50 = substrate::guided_wavelength(sub, width_50, self.frequency)?;
        let guided_wavelength_35 = substrate::guided_wavelength(sub, width_35, self.frequency)?;
        Ok(ButlerRealization {
            width_50,
            width_35,
            guided_wavelength_50,
            guided_wavelength_35,
            quarter_wave_50: guided_wavelength_50 / 4.0,
            quarter_wave_35: guided_wavelength_35 / 4.0,
            shifter_45: substrate::length_for_phase(45.0, guided_wavelength_50)?,
        })
    }
}

/// Adjacent phase differences `arg(S[k+1, p]) - arg(S[k, p])` over the array
/// ports, wrapped to (-180, 180].
pub fn relative_output_phases(design: &ButlerDesign, beam_port: usize) -> Result<Vec<f64>> {
    let out = design.outputs(beam_port)?;
    Ok(out
        .windows(2)
        .map(|w| wrap_deg((w[1] / w[0]).arg().to_degrees()))
        .collect())
}

/// Beam angle (degrees from the array axis) for progressive phase `beta_deg`
/// at spacing `element_spacing` wavelengths: `cos(phi) = -beta / (360 d)`.
pub fn beam_direction(progressive_phase: f64, element_spacing: f64) -> Result<f64> {
    if !(element_spacing > 0.0) {
        return Err(Error::InvalidParameter("element spacing must be > 0".into()));
    }
    let c = -progressive_phase / (360.0 * element_spacing);
    if c.abs() > 1.0 + 1e-12 {
        return Err(Error::NoRealBeam {
            phase_deg: progressive_phase,
            spacing: element_spacing,
        });
    }
    Ok(c.clamp(-1.0, 1.0).acos().to_degrees())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const F: f64 = 3.15e9;

    #[test]
    fn inventory() {
        assert_eq!(
            component_counts(2).unwrap(),
            ComponentCounts {
                hybrids: 1,
                phase_shifters: 0
            }
        );
        assert_eq!(
            component_counts(4).unwrap(),
            ComponentCounts {
                hybrids: 4,
                phase_shifters: 2
            }
        );
        assert_eq!(
            component_counts(8).unwrap(),
            ComponentCounts {
                hybrids: 12,
                phase_shifters: 8
            }
        );
        assert_eq!(
            component_counts(16).unwrap(),
            ComponentCounts {
                hybrids: 32,
                phase_shifters: 24
            }
        );
        for n in [0, 1, 3, 6, 12] {
            assert!(matches!(component_counts(n), Err(Error::UnsupportedOrder(_))));
        }
    }

    #[test]
    fn hybrid_count_recursion() {
        // An order-2N matrix is two order-N matrices plus a final column of N hybrids.
        for n in [2, 4, 8] {
            let small = component_counts(n).unwrap().hybrids;
            assert_eq!(component_counts(2 * n).unwrap().hybrids, 2 * small + n);
        }
    }

    #[test]
    fn phase_law_values() {
        let p: Vec<f64> = (1..=4)
            .map(|k| ideal_beam_phase(4, k).unwrap().progressive_phase)
            .collect();
        assert_eq!(p, vec![-45.0, 135.0, -135.0, 45.0]);
        let mut p8: Vec<f64> = (1..=8)
            .map(|k| ideal_beam_phase(8, k).unwrap().progressive_phase)
            .collect();
        p8.sort_by(f64::total_cmp);
        assert_eq!(p8, vec![-157.5, -112.5, -67.5, -22.5, 22.5, 67.5, 112.5, 157.5]);
        assert!(ideal_beam_phase(4, 0).is_err());
        assert!(ideal_beam_phase(4, 5).is_err());
    }

    #[test]
    fn assembled_outputs_are_uniform() {
        let d = assemble_butler(4, F).unwrap();
        assert_eq!(d.assembled.n_ports(), 8);
        assert!(d.assembled.unitarity_error() < 1e-9);
        assert!(d.assembled.reciprocity_error() < 1e-12);
        for p in 1..=4 {
            for v in d.outputs(p).unwrap() {
                assert_abs_diff_eq!(v.norm(), 0.5, epsilon = 1e-12);
            }
            // No power reflects or leaks to the other beam ports.
            for q in 0..4 {
                assert!(d.assembled.get(q, p - 1).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn assembled_phase_law_matches_closed_form() {
        let d = assemble_butler(4, F).unwrap();
        for p in 1..=4 {
            let want = ideal_beam_phase(4, p).unwrap().progressive_phase;
            for got in relative_output_phases(&d, p).unwrap() {
                assert_abs_diff_eq!(got, want, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn only_order_four_is_assembled() {
        assert!(matches!(assemble_butler(8, F), Err(Error::UnsupportedOrder(8))));
        assert!(assemble_butler(4, 0.0).is_err());
    }

    #[test]
    fn fr4_realization() {
        let r = assemble_butler(4, F).unwrap().realization().unwrap();
        assert!(r.width_35 > r.width_50);
        assert!((r.guided_wavelength_50 - 50.89e-3).abs() < 0.03 * 50.89e-3);
        assert_abs_diff_eq!(r.shifter_45, r.guided_wavelength_50 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn beam_directions() {
        assert_abs_diff_eq!(beam_direction(0.0, 0.5).unwrap(), 90.0, epsilon = 1e-12);
        let a = beam_direction(-45.0, 0.5).unwrap();
        assert_abs_diff_eq!(a, 0.25f64.acos().to_degrees(), epsilon = 1e-12);
        assert_abs_diff_eq!(a, 75.522_487_814, epsilon = 1e-6);
        assert_abs_diff_eq!(a + beam_direction(45.0, 0.5).unwrap(), 180.0, epsilon = 1e-12);
        assert!(matches!(beam_direction(200.0, 0.5), Err(Error::NoRealBeam { .. })));
    }
}
