//! Measured per-port tables: frequency, amplitude (dB), phase (deg).
//!
//! One row per array port, in port order. Blank lines and lines starting
//! with `%`, `#` or `!` are ignored. Frequencies are in MHz unless another
//! unit is given, and must agree across rows.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::touchstone::FrequencyUnit;
use crate::pattern::{Element, ExcitationVector};

/// Rows must share a frequency to within this many MHz.
pub const FREQUENCY_TOL_MHZ: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredRow {
    /// Frequency as written, in the table's unit.
    pub frequency: f64,
    pub magnitude_db: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredPortTable {
    pub rows: Vec<MeasuredRow>,
    pub unit: FrequencyUnit,
}

impl MeasuredPortTable {
    pub fn frequency_hz(&self) -> f64 {
        self.rows[0].frequency * self.unit.scale()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Element excitations, amplitudes untouched (the convention is applied later).
    pub fn to_excitation(&self, element_spacing: f64, steer_reference: f64) -> Result<ExcitationVector> {
        let elements = self
            .rows
            .iter()
            .map(|r| Element {
                amplitude_db: r.magnitude_db,
                phase_deg: r.phase_deg,
            })
            .collect();
        ExcitationVector::new(elements, element_spacing, steer_reference)
    }

    /// Canonical text: zero-padded frequency with 7 decimals, then
    /// amplitude and phase with 2 decimals in right-aligned columns.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{:013.7}{:>10.2}{:>8.2}\n",
                r.frequency, r.magnitude_db, r.phase_deg
            ));
        }
        out
    }
}

pub fn parse_measured_table(text: &str) -> Result<MeasuredPortTable> {
    parse_measured_table_in(text, FrequencyUnit::MHz)
}

pub fn parse_measured_table_in(text: &str, unit: FrequencyUnit) -> Result<MeasuredPortTable> {
    let tol = FREQUENCY_TOL_MHZ * 1e6 / unit.scale();
    let mut rows: Vec<MeasuredRow> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(['%', '#', '!']) {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let mut vals = [0.0; 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(line_no, format!("not a number: {f:?}")))?;
        }
        let [frequency, magnitude_db, phase_deg] = vals;
        if frequency <= 0.0 {
            return Err(Error::parse(line_no, "frequency must be positive"));
        }
        if !(phase_deg > -180.0 && phase_deg <= 180.0) {
            return Err(Error::parse(line_no, format!("phase {phase_deg} outside (-180, 180]")));
        }
        if let Some(first) = rows.first() {
            if (frequency - first.frequency).abs() > tol {
                return Err(Error::parse(
                    line_no,
                    format!("frequency {frequency} differs from {}", first.frequency),
                ));
            }
        }
        rows.push(MeasuredRow {
            frequency,
            magnitude_db,
            phase_deg,
        });
    }
    match rows.len() {
        0 => Err(Error::parse(last_line.max(1), "no data rows")),
        1 => Err(Error::TooFewElements(1)),
        _ => Ok(MeasuredPortTable { rows, unit }),
    }
}

pub fn read_measured_table(path: &Path, unit: FrequencyUnit) -> Result<MeasuredPortTable> {
    parse_measured_table_in(&std::fs::read_to_string(path)?, unit)
}
