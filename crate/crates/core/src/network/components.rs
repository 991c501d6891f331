//! Ideal lossless component models.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::sparams::{connect_networks, SParameterMatrix, DEFAULT_Z_REF};

/// Ideal 3 dB quadrature hybrid (branch-line coupler).
///
/// `S = -1/sqrt(2) [[0, j, 1, 0], [j, 0, 0, 1], [1, 0, 0, j], [0, 1, j, 0]]`.
/// Ports 0 and 3 share one side, ports 1 and 2 the other; port 0 splits
/// into 1 (-90 deg) and 2 (-180 deg) with 3 isolated.
pub fn ideal_hybrid_smatrix(frequency: f64) -> SParameterMatrix {
    let k = -FRAC_1_SQRT_2;
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(k, 0.0);
    let j = Complex64::new(0.0, k);
    SParameterMatrix::from_rows(
        &[
            vec![o, j, one, o],
            vec![j, o, o, one],
            vec![one, o, o, j],
            vec![o, one, j, o],
        ],
        frequency,
        DEFAULT_Z_REF,
    )
    .expect("static shape")
}

/// Ideal 0 dB crossover built from two back-to-back hybrids.
///
/// Port layout matches the hybrid: 0 and 3 on one side, 1 and 2 on the
/// other, with 0 -> 2 and 3 -> 1 the crossing paths.
pub fn ideal_crossover_smatrix(frequency: f64) -> SParameterMatrix {
    let h = ideal_hybrid_smatrix(frequency);
    // First hybrid's outputs (1, 2) drive the second hybrid's inputs (0, 3).
    let joined = connect_networks(&h, 1, &h, 0).expect("matched ports");
    // joined ports: h1[0, 2, 3], h2[1, 2, 3]
    let x = joined.connect_internal(1, 5).expect("matched ports");
    // x ports: h1.0, h1.3, h2.1, h2.2
    x.permuted(&[0, 2, 3, 1]).expect("valid permutation")
}

/// Matched 2-port with `S21 = S12 = exp(-j phase)`.
pub fn ideal_phase_shifter(phase_deg: f64, frequency: f64) -> SParameterMatrix {
    let t = Complex64::from_polar(1.0, -phase_deg.to_radians());
    let mut s = SParameterMatrix::zeros(2, frequency, DEFAULT_Z_REF);
    s.set(0, 1, t);
    s.set(1, 0, t);
    s
}

/// Transmission delay (degrees, in [0, 360)) of the ideal crossover's crossing path.
pub fn crossover_delay_deg(frequency: f64) -> f64 {
    let s = ideal_crossover_smatrix(frequency);
    (-s.get(2, 0).arg().to_degrees()).rem_euclid(360.0)
}
