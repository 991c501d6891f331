use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::sparams::SParameterMatrix;
use crate::error::{Error, Result};

const SINGULAR_TOL: f64 = 1e-14;

/// Chain (transmission) matrix of a two-port: `[V1; I1] = [[A, B], [C, D]] [V2; -I2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdMatrix {
    pub frequency: f64,
    pub a: Complex64,
    /// Ohms.
    pub b: Complex64,
    /// Siemens.
    pub c: Complex64,
    pub d: Complex64,
}

impl AbcdMatrix {
    pub fn new(frequency: f64, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { frequency, a, b, c, d }
    }

    pub fn identity(frequency: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(frequency, one, zero, zero, one)
    }

    /// Shunt element of admittance `y`.
    pub fn shunt_admittance(frequency: f64, y: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(frequency, one, Complex64::new(0.0, 0.0), y, one)
    }

    /// Lossless line of impedance `z0` and electrical length `theta_deg`.
    pub fn line(frequency: f64, z0: f64, theta_deg: f64) -> Self {
        let (sin, cos) = crate::angle::sin_cos_deg(theta_deg);
        Self::new(
            frequency,
            Complex64::new(cos, 0.0),
            Complex64::new(0.0, z0 * sin),
            Complex64::new(0.0, sin / z0),
            Complex64::new(cos, 0.0),
        )
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Matrix product `first * second` (signal passes `first`, then `second`).
pub fn cascade_abcd(first: &AbcdMatrix, second: &AbcdMatrix) -> Result<AbcdMatrix> {
    if (first.frequency - second.frequency).abs() > 1e-9 * first.frequency.abs().max(1.0) {
        return Err(Error::IncompatibleNetwork(format!(
            "cascade frequency mismatch: {} Hz vs {} Hz",
            first.frequency, second.frequency
        )));
    }
    let (m, n) = (first, second);
    Ok(AbcdMatrix::new(
        m.frequency,
        m.a * n.a + m.b * n.c,
        m.a * n.b + m.b * n.d,
        m.c * n.a + m.d * n.c,
        m.c * n.b + m.d * n.d,
    ))
}

/// Two-port S-parameters referenced to the real impedance `z_ref`.
pub fn abcd_to_s(m: &AbcdMatrix, z_ref: f64) -> Result<SParameterMatrix> {
    if !(z_ref > 0.0) {
        return Err(Error::InvalidParameter("reference impedance must be > 0".into()));
    }
    let bn = m.b / z_ref;
    let cn = m.c * z_ref;
    let den = m.a + bn + cn + m.d;
    if den.norm() < SINGULAR_TOL {
        return Err(Error::DegenerateNetwork("A + B/Z + CZ + D = 0".into()));
    }
    let det = m.determinant();
    let mut s = SParameterMatrix::zeros(2, m.frequency, z_ref);
    s.set(0, 0, (m.a + bn - cn - m.d) / den);
    s.set(0, 1, 2.0 * det / den);
    s.set(1, 0, Complex64::new(2.0, 0.0) / den);
    s.set(1, 1, (-m.a + bn - cn + m.d) / den);
    Ok(s)
}

pub fn s_to_abcd(s: &SParameterMatrix) -> Result<AbcdMatrix> {
    if s.n_ports() != 2 {
        return Err(Error::InvalidParameter(format!(
            "ABCD needs a 2-port, got {} ports",
            s.n_ports()
        )));
    }
    let (s11, s12, s21, s22) = (s.get(0, 0), s.get(0, 1), s.get(1, 0), s.get(1, 1));
    if s21.norm() < SINGULAR_TOL {
        return Err(Error::DegenerateNetwork("S21 = 0 has no chain matrix".into()));
    }
    let z = s.z_ref();
    let one = Complex64::new(1.0, 0.0);
    let two_s21 = 2.0 * s21;
    Ok(AbcdMatrix::new(
        s.frequency(),
        ((one + s11) * (one - s22) + s12 * s21) / two_s21,
        z * ((one + s11) * (one + s22) - s12 * s21) / two_s21,
        ((one - s11) * (one - s22) - s12 * s21) / (two_s21 * z),
        ((one - s11) * (one + s22) + s12 * s21) / two_s21,
    ))
}

/// Even/odd-mode decomposition of the ideal branch-line coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenOddResult {
    pub gamma_even: Complex64,
    pub t_even: Complex64,
    pub gamma_odd: Complex64,
    pub t_odd: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub b3: Complex64,
    pub b4: Complex64,
}

/// Normalized even-mode chain matrix: open lambda/8 stub, lambda/4 line of
/// impedance 1/sqrt(2), open lambda/8 stub.
pub fn blc_even_mode_abcd() -> AbcdMatrix {
    half_circuit_abcd(Complex64::new(0.0, 1.0))
}

/// Normalized odd-mode chain matrix (the stubs are shorted, `Y = -j`).
pub fn blc_odd_mode_abcd() -> AbcdMatrix {
    half_circuit_abcd(Complex64::new(0.0, -1.0))
}

fn half_circuit_abcd(stub_admittance: Complex64) -> AbcdMatrix {
    // Normalized frequency; the stub reactances already fix the operating point.
    let stub = AbcdMatrix::shunt_admittance(1.0, stub_admittance);
    let line = AbcdMatrix::line(1.0, FRAC_1_SQRT_2, 90.0);
    let m = cascade_abcd(&stub, &line).expect("same frequency");
    cascade_abcd(&m, &stub).expect("same frequency")
}

/// `a + b sqrt(2)` with complex dyadic coefficients. Every entry of the
/// ideal half circuits lives in this ring, so cascading them is exact.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Surd {
    a: Complex64,
    b: Complex64,
}

impl Surd {
    const fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }

    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }

    fn mul(self, o: Self) -> Self {
        Self::new(self.a * o.a + 2.0 * self.b * o.b, self.a * o.b + self.b * o.a)
    }

    fn value(self) -> Complex64 {
        self.a + self.b * std::f64::consts::SQRT_2
    }
}

type SurdMatrix = [[Surd; 2]; 2];

fn surd_matmul(x: &SurdMatrix, y: &SurdMatrix) -> SurdMatrix {
    let e = |i: usize, j: usize| x[i][0].mul(y[0][j]).add(x[i][1].mul(y[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// `(S11, S21)` of a normalized half circuit, with the stub admittance `y`.
fn half_circuit_s(y: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let one = Surd::new(Complex64::new(1.0, 0.0), zero);
    let nil = Surd::new(zero, zero);
    let stub = [[one, nil], [Surd::new(y, zero), one]];
    // Quarter-wave line of impedance 1/sqrt(2): B = j sqrt(2)/2, C = j sqrt(2).
    let line = [
        [nil, Surd::new(zero, Complex64::new(0.0, 0.5))],
        [Surd::new(zero, Complex64::new(0.0, 1.0)), nil],
    ];
    let m = surd_matmul(&surd_matmul(&stub, &line), &stub);
    let [[a, b], [c, d]] = m;
    let den = a.add(b).add(c).add(d).value();
    let num = a.add(b).sub(c).sub(d);
    let gamma = if num == nil { zero } else { num.value() / den };
    (gamma, Complex64::new(2.0, 0.0) / den)
}

/// Even-odd analysis of the ideal quadrature hybrid at its centre frequency.
///
/// A unit wave into port 1 splits into even and odd excitations of
/// amplitude 1/2; the emerging waves are half sums and differences of the
/// two half-circuit responses. The half circuits are cascaded in exact
/// `a + b sqrt(2)` arithmetic, so the matched and isolated ports come out
/// as exact zeros.
pub fn blc_even_odd() -> EvenOddResult {
    let (gamma_even, t_even) = half_circuit_s(Complex64::new(0.0, 1.0));
    let (gamma_odd, t_odd) = half_circuit_s(Complex64::new(0.0, -1.0));
    EvenOddResult {
        gamma_even,
        t_even,
        gamma_odd,
        t_odd,
        b1: 0.5 * gamma_even + 0.5 * gamma_odd,
        b2: 0.5 * t_even + 0.5 * t_odd,
        b3: 0.5 * t_even - 0.5 * t_odd,
        b4: 0.5 * gamma_even - 0.5 * gamma_odd,
    }
}
