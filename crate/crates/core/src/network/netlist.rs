//! Label-based assembly of component networks.

use super::sparams::SParameterMatrix;
use crate::error::{Error, Result};

/// Incrementally joins named components into one network.
///
/// Ports are addressed as `(component, port)` pairs; the bookkeeping of
/// indices that shift after every connection stays in here.
#[derive(Debug, Clone)]
pub struct Netlist {
    net: Option<SParameterMatrix>,
    labels: Vec<(String, usize)>,
}

impl Default for Netlist {
    fn default() -> Self {
        Self::new()
    }
}

impl Netlist {
    pub fn new() -> Self {
        Self {
            net: None,
            labels: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, component: &SParameterMatrix) -> Result<()> {
        if self.labels.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidParameter(format!("component {name} added twice")));
        }
        self.net = Some(match self.net.take() {
            None => component.clone(),
            Some(net) => net.disjoint_union(component)?,
        });
        self.labels
            .extend((0..component.n_ports()).map(|p| (name.to_string(), p)));
        Ok(())
    }

    fn index_of(&self, name: &str, port: usize) -> Result<usize> {
        self.labels
            .iter()
            .position(|(n, p)| n == name && *p == port)
            .ok_or_else(|| Error::InvalidParameter(format!("no free port {name}.{port}")))
    }

    pub fn connect(&mut self, a: (&str, usize), b: (&str, usize)) -> Result<()> {
        let k = self.index_of(a.0, a.1)?;
        let l = self.index_of(b.0, b.1)?;
        let net = self.net.as_ref().expect("labels imply a network");
        let joined = net.connect_internal(k, l)?;
        self.net = Some(joined);
        let (hi, lo) = (k.max(l), k.min(l));
        self.labels.remove(hi);
        self.labels.remove(lo);
        Ok(())
    }

    /// Remaining free ports as `(component, port)` pairs, in network order.
    pub fn free_ports(&self) -> &[(String, usize)] {
        &self.labels
    }

    /// The assembled network with its ports reordered to `external`.
    pub fn finish(self, external: &[(&str, usize)]) -> Result<SParameterMatrix> {
        let net = self
            .net
            .clone()
            .ok_or_else(|| Error::InvalidParameter("empty netlist".into()))?;
        if external.len() != self.labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} external ports listed, {} left free",
                external.len(),
                self.labels.len()
            )));
        }
        let order = external
            .iter()
            .map(|&(n, p)| self.index_of(n, p))
            .collect::<Result<Vec<_>>>()?;
        net.permuted(&order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::components::{ideal_crossover_smatrix, ideal_hybrid_smatrix, ideal_phase_shifter};

    const F: f64 = 3.15e9;

    #[test]
    fn rebuilds_the_crossover() {
        let h = ideal_hybrid_smatrix(F);
        let mut nl = Netlist::new();
        nl.add("a", &h).unwrap();
        nl.add("b", &h).unwrap();
        nl.connect(("a", 1), ("b", 0)).unwrap();
        nl.connect(("a", 2), ("b", 3)).unwrap();
        let x = nl.finish(&[("a", 0), ("b", 1), ("b", 2), ("a", 3)]).unwrap();
        assert!(x.max_abs_diff(&ideal_crossover_smatrix(F)) < 1e-15);
    }

    #[test]
    fn label_errors() {
        let mut nl = Netlist::new();
        nl.add("p", &ideal_phase_shifter(10.0, F)).unwrap();
        assert!(nl.add("p", &ideal_phase_shifter(10.0, F)).is_err());
        assert!(nl.connect(("p", 0), ("q", 0)).is_err());
        assert!(nl.clone().finish(&[("p", 0)]).is_err());
        nl.add("q", &ideal_phase_shifter(20.0, F)).unwrap();
        nl.connect(("p", 1), ("q", 0)).unwrap();
        assert!(nl.connect(("p", 1), ("q", 1)).is_err());
        let s = nl.finish(&[("p", 0), ("q", 1)]).unwrap();
        assert!(s.max_abs_diff(&ideal_phase_shifter(30.0, F)) < 1e-15);
    }
}
