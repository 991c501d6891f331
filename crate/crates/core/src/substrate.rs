//! Microstrip substrates and transmission lines.
//!
//! Effective permittivity and characteristic impedance use the
//! Hammerstad-Jensen closed-form analysis equations for a zero-thickness
//! strip. The copper thickness carried by [`Substrate`] is stored for
//! reporting only and does not enter the formulas. Dispersion is neglected:
//! `effective_permittivity` is the static value and is used at every
//! frequency.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;

/// Wave impedance of free space (ohms).
pub const ETA0: f64 = 376.730_313_668;

const MIN_IMPEDANCE: f64 = 10.0;
const MAX_IMPEDANCE: f64 = 200.0;
const IMPEDANCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Substrate {
    pub relative_permittivity: f64,
    /// Dielectric height (m).
    pub height: f64,
    /// Copper thickness (m). Not used by the first-order line model.
    pub copper_thickness: f64,
    pub loss_tangent: f64,
}

impl Substrate {
    pub fn new(relative_permittivity: f64, height: f64, copper_thickness: f64, loss_tangent: f64) -> Result<Self> {
        let s = Self {
            relative_permittivity,
            height,
            copper_thickness,
            loss_tangent,
        };
        s.validate()?;
        Ok(s)
    }

    /// FR4, 0.8 mm (the Butler matrix board).
    pub fn fr4_0_8() -> Self {
        Self {
            relative_permittivity: 4.7,
            height: 0.8e-3,
            copper_thickness: 0.035e-3,
            loss_tangent: 0.01,
        }
    }

    /// Taconic TLC-30, 1.3 mm (the 8x8 lens board).
    ///
    /// No copper thickness is published for this board; 1 oz (35 um) is used.
    pub fn tlc30_1_3() -> Self {
        Self {
            relative_permittivity: 3.0,
            height: 1.3e-3,
            copper_thickness: 0.035e-3,
            loss_tangent: 0.003,
        }
    }

    /// Looks up a named preset (`"FR4-0.8"` or `"TLC30-1.3"`, case-insensitive).
    pub fn preset(name: &str) -> Result<Self> {
        match name.trim().to_ascii_uppercase().as_str() {
            "FR4-0.8" => Ok(Self::fr4_0_8()),
            "TLC30-1.3" => Ok(Self::tlc30_1_3()),
            other => Err(Error::Config(format!("unknown substrate preset '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_permittivity >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relative permittivity must be >= 1, got {}",
                self.relative_permittivity
            )));
        }
        if !(self.height > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "substrate height must be > 0, got {}",
                self.height
            )));
        }
        if !(self.loss_tangent >= 0.0) || !(self.copper_thickness >= 0.0) {
            return Err(Error::InvalidParameter(
                "loss tangent and copper thickness must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// A microstrip line of given width and physical length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrostripLine {
    pub substrate: Substrate,
    pub width: f64,
    pub physical_length: f64,
}

impl MicrostripLine {
    pub fn new(substrate: Substrate, width: f64, physical_length: f64) -> Result<Self> {
        check_width(&substrate, width)?;
        if !(physical_length >= 0.0) {
            return Err(Error::InvalidParameter("line length must be >= 0".into()));
        }
        Ok(Self {
            substrate,
            width,
            physical_length,
        })
    }

    pub fn effective_permittivity(&self) -> f64 {
        hj_effective_permittivity(self.substrate.relative_permittivity, self.width / self.substrate.height)
    }

    pub fn characteristic_impedance(&self) -> f64 {
        hj_impedance(self.substrate.relative_permittivity, self.width / self.substrate.height)
    }

    /// Electrical length in degrees at `frequency`.
    pub fn electrical_length_deg(&self, frequency: f64) -> Result<f64> {
        let lambda = guided_wavelength(&self.substrate, self.width, frequency)?;
        electrical_length_deg(self.physical_length, lambda)
    }
}

fn check_width(substrate: &Substrate, width: f64) -> Result<()> {
    substrate.validate()?;
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidParameter(format!("line width must be > 0, got {width}")));
    }
    Ok(())
}

fn hj_effective_permittivity(er: f64, u: f64) -> f64 {
    if er == 1.0 {
        return 1.0;
    }
    let a = 1.0
        + ((u.powi(4) + (u / 52.0).powi(2)) / (u.powi(4) + 0.432)).ln() / 49.0
        + (1.0 + (u / 18.1).powi(3)).ln() / 18.7;
    let b = 0.564 * ((er - 0.9) / (er + 3.0)).powf(0.053);
    (er + 1.0) / 2.0 + (er - 1.0) / 2.0 * (1.0 + 10.0 / u).powf(-a * b)
}

fn hj_impedance(er: f64, u: f64) -> f64 {
    let f = 6.0 + (2.0 * PI - 6.0) * (-(30.666 / u).powf(0.7528)).exp();
    let z_air = ETA0 / (2.0 * PI) * (f / u + (1.0 + 4.0 / (u * u)).sqrt()).ln();
    z_air / hj_effective_permittivity(er, u).sqrt()
}

pub fn effective_permittivity(substrate: &Substrate, width: f64) -> Result<f64> {
    check_width(substrate, width)?;
    Ok(hj_effective_permittivity(
        substrate.relative_permittivity,
        width / substrate.height,
    ))
}

pub fn characteristic_impedance(substrate: &Substrate, width: f64) -> Result<f64> {
    check_width(substrate, width)?;
    Ok(hj_impedance(substrate.relative_permittivity, width / substrate.height))
}

/// Strip width giving `target_z0`, by bisection on the (monotone) impedance.
pub fn width_for_impedance(substrate: &Substrate, target_z0: f64) -> Result<f64> {
    substrate.validate()?;
    if !(MIN_IMPEDANCE..=MAX_IMPEDANCE).contains(&target_z0) {
        return Err(Error::Unsolvable(format!(
            "target impedance {target_z0} ohm outside {MIN_IMPEDANCE}-{MAX_IMPEDANCE} ohm"
        )));
    }
    let er = substrate.relative_permittivity;
    // u spans 1e-4..1e3; bisect in log(u) since Z0 ~ ln(u).
    let (mut lo, mut hi) = (1e-4_f64.ln(), 1e3_f64.ln());
    if !(hj_impedance(er, lo.exp()) >= target_z0 && hj_impedance(er, hi.exp()) <= target_z0) {
        return Err(Error::Unsolvable(format!(
            "target impedance {target_z0} ohm not reachable on this substrate"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let z = hj_impedance(er, mid.exp());
        if (z - target_z0).abs() < IMPEDANCE_TOL * 1e-3 {
            lo = mid;
            hi = mid;
            break;
        }
        if z > target_z0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = (0.5 * (lo + hi)).exp();
    debug_assert!((hj_impedance(er, u) - target_z0).abs() < IMPEDANCE_TOL);
    Ok(u * substrate.height)
}

/// Guided wavelength `c / (f sqrt(eps_eff))` on a line of the given width.
pub fn guided_wavelength(substrate: &Substrate, width: f64, frequency: f64) -> Result<f64> {
    if !(frequency > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency must be > 0, got {frequency}"
        )));
    }
    let eeff = effective_permittivity(substrate, width)?;
    Ok(wavelength_in_medium(eeff, frequency))
}

pub fn wavelength_in_medium(permittivity: f64, frequency: f64) -> f64 {
    C0 / (frequency * permittivity.sqrt())
}

/// `360 l / lambda`, not wrapped.
pub fn electrical_length_deg(physical_length: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    Ok(360.0 * physical_length / wavelength)
}

/// Physical length giving `target_deg` of phase at `wavelength`.
pub fn length_for_phase(target_deg: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    if !(target_deg > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target phase must be > 0, got {target_deg}"
        )));
    }
    Ok(wavelength * target_deg / 360.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn air_dielectric_is_exactly_one() {
        let air = Substrate::new(1.0, 1e-3, 0.0, 0.0).unwrap();
        for w in [1e-5, 1e-3, 0.1] {
            assert_eq!(effective_permittivity(&air, w).unwrap(), 1.0);
        }
    }

    #[test]
    fn free_space_wavelength_at_3ghz() {
        let air = Substrate::new(1.0, 1e-3, 0.0, 0.0).unwrap();
        let lambda = guided_wavelength(&air, 1e-3, 3e9).unwrap();
        assert_relative_eq!(lambda * 1e3, 99.930_819_333, epsilon = 1e-6);
    }

    #[test]
    fn fr4_fifty_ohm_width_and_permittivity() {
        let fr4 = Substrate::fr4_0_8();
        let w = width_for_impedance(&fr4, 50.0).unwrap();
        assert!(w > 1.4e-3 && w < 1.5e-3, "width {w}");
        assert!((characteristic_impedance(&fr4, w).unwrap() - 50.0).abs() < 0.1);
        let eeff = effective_permittivity(&fr4, w).unwrap();
        assert!((eeff - 3.5023).abs() / 3.5023 < 0.03, "eeff {eeff}");
        let z = characteristic_impedance(&fr4, 1.46e-3).unwrap();
        assert!((z - 50.0).abs() < 2.5, "z {z}");
    }

    #[test]
    fn wider_lines_have_lower_impedance() {
        let s = Substrate::tlc30_1_3();
        let w = 3.2e-3;
        assert!(characteristic_impedance(&s, 2.0 * w).unwrap() < characteristic_impedance(&s, w).unwrap());
        let w35 = width_for_impedance(&Substrate::fr4_0_8(), 50.0 / 2f64.sqrt()).unwrap();
        let w50 = width_for_impedance(&Substrate::fr4_0_8(), 50.0).unwrap();
        assert!(w35 > w50);
    }

    #[test]
    fn tlc30_reference_line() {
        // Independent evaluation of the same closed form (u = 3.2/1.3):
        // eps_eff = 2.42100, Z0 = 50.687 ohm.
        let s = Substrate::tlc30_1_3();
        let eeff = effective_permittivity(&s, 3.2e-3).unwrap();
        assert_relative_eq!(eeff, 2.420_995_13, epsilon = 1e-6);
        let z = characteristic_impedance(&s, 3.2e-3).unwrap();
        assert_relative_eq!(z, 50.687_447, epsilon = 1e-4);
    }

    #[test]
    fn out_of_range_targets_are_rejected() {
        let s = Substrate::fr4_0_8();
        assert!(matches!(width_for_impedance(&s, 5.0), Err(Error::Unsolvable(_))));
        assert!(matches!(width_for_impedance(&s, 250.0), Err(Error::Unsolvable(_))));
        assert!(characteristic_impedance(&s, 0.0).is_err());
        assert!(effective_permittivity(&s, -1.0).is_err());
        assert!(guided_wavelength(&s, 1e-3, 0.0).is_err());
        assert!(Substrate::new(4.0, 0.0, 0.0, 0.0).is_err());
        assert!(Substrate::new(0.5, 1e-3, 0.0, 0.0).is_err());
    }

    #[test]
    fn phase_length_conversions() {
        let lambda = 50.89e-3;
        assert_eq!(electrical_length_deg(lambda / 4.0, lambda).unwrap(), 90.0);
        assert_eq!(electrical_length_deg(0.0, lambda).unwrap(), 0.0);
        assert!((electrical_length_deg(6.361e-3, lambda).unwrap() - 45.0).abs() < 0.01);
        assert_relative_eq!(length_for_phase(45.0, lambda).unwrap(), 6.36125e-3, epsilon = 1e-12);
        assert_eq!(length_for_phase(360.0, lambda).unwrap(), lambda);
        assert_eq!(length_for_phase(90.0, lambda).unwrap(), lambda / 4.0);
        assert!(length_for_phase(0.0, lambda).is_err());
    }

    #[test]
    fn presets_by_name() {
        assert_eq!(Substrate::preset("FR4-0.8").unwrap(), Substrate::fr4_0_8());
        assert_eq!(Substrate::preset("tlc30-1.3").unwrap(), Substrate::tlc30_1_3());
        assert!(Substrate::preset("RO4003").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn width_impedance_round_trip(z in 20.0f64..120.0) {
                let s = Substrate::fr4_0_8();
                let w = width_for_impedance(&s, z).unwrap();
                prop_assert!((characteristic_impedance(&s, w).unwrap() - z).abs() < 0.1);
            }

            #[test]
            fn permittivity_bounded(er in 1.01f64..12.0, u in 0.05f64..20.0) {
                let s = Substrate::new(er, 1e-3, 0.0, 0.0).unwrap();
                let e = effective_permittivity(&s, u * 1e-3).unwrap();
                prop_assert!(e > 1.0 && e <= er);
            }

            #[test]
            fn wavelength_scales_inversely(f in 1e8f64..1e11) {
                let s = Substrate::fr4_0_8();
                let l1 = guided_wavelength(&s, 1.5e-3, f).unwrap();
                let l2 = guided_wavelength(&s, 1.5e-3, 2.0 * f).unwrap();
                prop_assert!((l1 / l2 - 2.0).abs() < 1e-12);
            }

            #[test]
            fn phase_length_inverse(theta in 0.1f64..2000.0, lambda in 1e-3f64..1.0) {
                let l = length_for_phase(theta, lambda).unwrap();
                prop_assert!((electrical_length_deg(l, lambda).unwrap() - theta).abs() < 1e-9 * theta.max(1.0));
            }
        }
    }
}
