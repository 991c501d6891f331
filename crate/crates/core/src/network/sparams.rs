use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default real reference impedance (ohms).
pub const DEFAULT_Z_REF: f64 = 50.0;

const SINGULAR_TOL: f64 = 1e-14;

/// N-port scattering matrix at a single frequency.
///
/// Ports are zero-based in the API. Entries are stored row-major, so
/// `get(i, j)` is the wave leaving port `i` per unit wave incident on `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SParameterMatrix {
    n_ports: usize,
    frequency: f64,
    z_ref: f64,
    entries: Vec<Complex64>,
}

impl SParameterMatrix {
    pub fn zeros(n_ports: usize, frequency: f64, z_ref: f64) -> Self {
        Self {
            n_ports,
            frequency,
            z_ref,
            entries: vec![Complex64::new(0.0, 0.0); n_ports * n_ports],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>], frequency: f64, z_ref: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("S-matrix needs at least one port".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("S-matrix must be square".into()));
        }
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("S-matrix entries must be finite".into()));
        }
        if !(z_ref > 0.0) {
            return Err(Error::InvalidParameter("reference impedance must be > 0".into()));
        }
        Ok(Self {
            n_ports: n,
            frequency,
            z_ref,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// Through connection (a matched, lossless, zero-length 2-port).
    pub fn thru(frequency: f64, z_ref: f64) -> Self {
        let mut s = Self::zeros(2, frequency, z_ref);
        s.set(0, 1, Complex64::new(1.0, 0.0));
        s.set(1, 0, Complex64::new(1.0, 0.0));
        s
    }

    pub fn n_ports(&self) -> usize {
        self.n_ports
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n_ports + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n_ports + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.n_ports).map(|r| r.to_vec()).collect()
    }

    fn check_port(&self, port: usize) -> Result<()> {
        if port >= self.n_ports {
            return Err(Error::InvalidPort {
                port,
                n_ports: self.n_ports,
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if (self.frequency - other.frequency).abs() > 1e-9 * self.frequency.abs().max(1.0) {
            return Err(Error::IncompatibleNetwork(format!(
                "frequency mismatch: {} Hz vs {} Hz",
                self.frequency, other.frequency
            )));
        }
        if (self.z_ref - other.z_ref).abs() > 1e-12 * self.z_ref {
            return Err(Error::IncompatibleNetwork(format!(
                "reference impedance mismatch: {} vs {} ohm",
                self.z_ref, other.z_ref
            )));
        }
        Ok(())
    }

    /// Largest entry of `|S S^H - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.n_ports;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += self.get(i, j) * self.get(k, j).conj();
                }
                if i == k {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Largest entry of `|S - S^T|`.
    pub fn reciprocity_error(&self) -> f64 {
        let n = self.n_ports;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n_ports, other.n_ports);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reorders ports so that new port `k` is old port `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_ports;
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidParameter(format!(
                "permutation has {} entries for {n} ports",
                order.len()
            )));
        }
        for &p in order {
            self.check_port(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("port {p} repeated in permutation")));
            }
        }
        let mut out = Self::zeros(n, self.frequency, self.z_ref);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Block-diagonal union: `self`'s ports first, then `other`'s.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (na, nb) = (self.n_ports, other.n_ports);
        let mut out = Self::zeros(na + nb, self.frequency, self.z_ref);
        for i in 0..na {
            for j in 0..na {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                out.set(na + i, na + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Joins two ports of the same network, eliminating their wave variables.
    ///
    /// The result has `n - 2` ports in the original order with `k` and `l`
    /// removed.
    pub fn connect_internal(&self, k: usize, l: usize) -> Result<Self> {
        self.check_port(k)?;
        self.check_port(l)?;
        if k == l {
            return Err(Error::SelfConnection(k));
        }
        let s = |i, j| self.get(i, j);
        let one = Complex64::new(1.0, 0.0);
        let den = (one - s(k, l)) * (one - s(l, k)) - s(k, k) * s(l, l);
        if den.norm() < SINGULAR_TOL {
            return Err(Error::DegenerateNetwork(format!(
                "joining ports {k} and {l} closes a lossless resonant loop"
            )));
        }
        let keep: Vec<usize> = (0..self.n_ports).filter(|&p| p != k && p != l).collect();
        let mut out = Self::zeros(keep.len(), self.frequency, self.z_ref);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                let num = s(k, j) * s(i, l) * (one - s(l, k))
                    + s(l, j) * s(i, k) * (one - s(k, l))
                    + s(k, j) * s(l, l) * s(i, k)
                    + s(l, j) * s(k, k) * s(i, l);
                out.set(a, b, s(i, j) + num / den);
            }
        }
        Ok(out)
    }

    /// Terminates `port` in a load of reflection coefficient `reflection`.
    pub fn terminate_port(&self, port: usize, reflection: Complex64) -> Result<Self> {
        self.check_port(port)?;
        if reflection.norm() > 1.0 + 1e-12 {
            return Err(Error::ActiveLoad(reflection.norm()));
        }
        let den = Complex64::new(1.0, 0.0) - reflection * self.get(port, port);
        if den.norm() < SINGULAR_TOL {
            return Err(Error::DegenerateNetwork(format!(
                "termination of port {port} resonates with the port reflection"
            )));
        }
        let keep: Vec<usize> = (0..self.n_ports).filter(|&p| p != port).collect();
        let mut out = Self::zeros(keep.len(), self.frequency, self.z_ref);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                let v = self.get(i, j) + self.get(i, port) * reflection * self.get(port, j) / den;
                out.set(a, b, v);
            }
        }
        Ok(out)
    }
}

/// Connects port `port_a` of `a` to port `port_b` of `b`.
///
/// The result has `n_a + n_b - 2` ports: the remaining ports of `a` in
/// order, followed by the remaining ports of `b`. Use
/// [`SParameterMatrix::connect_internal`] to close a loop within one network.
pub fn connect_networks(
    a: &SParameterMatrix,
    port_a: usize,
    b: &SParameterMatrix,
    port_b: usize,
) -> Result<SParameterMatrix> {
    a.check_port(port_a)?;
    b.check_port(port_b)?;
    a.disjoint_union(b)?.connect_internal(port_a, a.n_ports() + port_b)
}

pub fn terminate_port(net: &SParameterMatrix, port: usize, reflection: Complex64) -> Result<SParameterMatrix> {
    net.terminate_port(port, reflection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::components::{ideal_crossover_smatrix, ideal_hybrid_smatrix, ideal_phase_shifter};

    const F: f64 = 3.15e9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn splicing_a_thru_recovers_the_hybrid() {
        let h = ideal_hybrid_smatrix(F);
        let t = SParameterMatrix::thru(F, DEFAULT_Z_REF);
        // Hybrid port 1 (index 1) to thru input; thru output lands last.
        let joined = connect_networks(&h, 1, &t, 0).unwrap();
        let restored = joined.permuted(&[0, 3, 1, 2]).unwrap();
        assert!(restored.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn two_hybrids_back_to_back_form_the_crossover() {
        let h = ideal_hybrid_smatrix(F);
        // Outputs (1, 2) of the first hybrid feed inputs (0, 3) of the second.
        let step = connect_networks(&h, 1, &h, 0).unwrap();
        // step ports: h1[0,2,3], h2[1,2,3] -> h1.2 is index 1, h2.3 is index 5
        let x = step.connect_internal(1, 5).unwrap();
        // remaining: h1.0, h1.3, h2.1, h2.2; reorder to the hybrid's port layout.
        let x = x.permuted(&[0, 2, 3, 1]).unwrap();
        let j = c(0.0, 1.0);
        let z = c(0.0, 0.0);
        let expected = SParameterMatrix::from_rows(
            &[vec![z, z, j, z], vec![z, z, z, j], vec![j, z, z, z], vec![z, j, z, z]],
            F,
            DEFAULT_Z_REF,
        )
        .unwrap();
        assert!(x.max_abs_diff(&expected) < 1e-12);
        assert!(x.max_abs_diff(&ideal_crossover_smatrix(F)) < 1e-12);
    }

    #[test]
    fn joining_lossless_networks_stays_unitary() {
        let h = ideal_hybrid_smatrix(F);
        let p = ideal_phase_shifter(37.0, F);
        let n = connect_networks(&h, 2, &p, 0).unwrap();
        assert!(n.unitarity_error() < 1e-12);
        let n2 = connect_networks(&n, 1, &h, 3).unwrap();
        assert!(n2.unitarity_error() < 1e-12);
    }

    #[test]
    fn mismatched_networks_are_rejected() {
        let h = ideal_hybrid_smatrix(F);
        let other = ideal_hybrid_smatrix(2.0 * F);
        assert!(matches!(
            connect_networks(&h, 0, &other, 0),
            Err(Error::IncompatibleNetwork(_))
        ));
        let mut z = SParameterMatrix::thru(F, 75.0);
        z.set(0, 0, c(0.0, 0.0));
        assert!(matches!(
            connect_networks(&h, 0, &z, 0),
            Err(Error::IncompatibleNetwork(_))
        ));
        assert!(matches!(h.connect_internal(2, 2), Err(Error::SelfConnection(2))));
        assert!(matches!(connect_networks(&h, 4, &h, 0), Err(Error::InvalidPort { .. })));
    }

    #[test]
    fn resonant_loop_is_degenerate() {
        let t = SParameterMatrix::thru(F, DEFAULT_Z_REF);
        assert!(matches!(t.connect_internal(0, 1), Err(Error::DegenerateNetwork(_))));
    }

    #[test]
    fn matched_termination_of_isolated_port() {
        let h = ideal_hybrid_smatrix(F);
        let t = h.terminate_port(3, c(0.0, 0.0)).unwrap();
        assert_eq!(t.n_ports(), 3);
        assert_eq!(t.get(1, 0), h.get(1, 0));
        assert_eq!(t.get(2, 0), h.get(2, 0));
    }

    #[test]
    fn open_end_reflects_fully() {
        let t = SParameterMatrix::thru(F, DEFAULT_Z_REF);
        let open = t.terminate_port(1, c(1.0, 0.0)).unwrap();
        assert!((open.get(0, 0).norm() - 1.0).abs() < 1e-15);
        assert!(matches!(t.terminate_port(1, c(1.5, 0.0)), Err(Error::ActiveLoad(_))));
    }

    #[test]
    fn termination_order_does_not_matter() {
        // A lossy, mismatched, non-reciprocal 4-port exercises every term.
        let rows: Vec<Vec<Complex64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        c(
                            0.05 * (i as f64 + 1.0) - 0.02 * j as f64,
                            0.03 * (j as f64 - i as f64) + 0.01,
                        )
                    })
                    .collect()
            })
            .collect();
        let s = SParameterMatrix::from_rows(&rows, F, 50.0).unwrap();
        let g1 = c(0.3, -0.2);
        let g3 = c(-0.1, 0.4);
        // Terminating port 1 first shifts port 3 to index 2.
        let a = s.terminate_port(1, g1).unwrap().terminate_port(2, g3).unwrap();
        let b = s.terminate_port(3, g3).unwrap().terminate_port(1, g1).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn from_rows_validates_shape() {
        assert!(SParameterMatrix::from_rows(&[], F, 50.0).is_err());
        assert!(SParameterMatrix::from_rows(&[vec![c(0.0, 0.0); 2]], F, 50.0).is_err());
        assert!(SParameterMatrix::from_rows(&[vec![c(f64::NAN, 0.0)]], F, 50.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn relabeling_commutes_with_connection(phase in 0.0f64..360.0, port in 0usize..4) {
                // Connecting a shifter to hybrid port `port` and to the same port of a
                // relabeled hybrid must give the same network after relabeling back.
                let h = ideal_hybrid_smatrix(F);
                let ps = ideal_phase_shifter(phase, F);
                let order = [2usize, 0, 3, 1];
                let hp = h.permuted(&order).unwrap();
                let pos = order.iter().position(|&p| p == port).unwrap();
                let direct = connect_networks(&h, port, &ps, 0).unwrap();
                let relabeled = connect_networks(&hp, pos, &ps, 0).unwrap();
                // Map relabeled's remaining ports back to direct's ordering.
                let rem_direct: Vec<usize> = (0..4).filter(|&p| p != port).collect();
                let rem_relab: Vec<usize> = order.iter().copied().filter(|&p| p != port).collect();
                let mut back: Vec<usize> = rem_direct
                    .iter()
                    .map(|p| rem_relab.iter().position(|q| q == p).unwrap())
                    .collect();
                back.push(3);
                let restored = relabeled.permuted(&back).unwrap();
                prop_assert!(restored.max_abs_diff(&direct) < 1e-12);
            }
        }
    }
}
