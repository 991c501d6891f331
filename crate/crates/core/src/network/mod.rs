//! Scattering- and chain-matrix network algebra.

pub mod abcd;
pub mod components;
pub mod netlist;
pub mod sparams;

pub use abcd::{abcd_to_s, blc_even_odd, cascade_abcd, s_to_abcd, AbcdMatrix, EvenOddResult};
pub use components::{ideal_crossover_smatrix, ideal_hybrid_smatrix, ideal_phase_shifter};
pub use netlist::Netlist;
pub use sparams::{connect_networks, terminate_port, SParameterMatrix, DEFAULT_Z_REF};
