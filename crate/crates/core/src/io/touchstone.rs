//! Touchstone (version 1) n-port S-parameter files.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{SParameterMatrix, DEFAULT_Z_REF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    #[default]
    GHz,
}

impl FrequencyUnit {
    pub fn scale(self) -> f64 {
        match self {
            Self::Hz => 1.0,
            Self::KHz => 1e3,
            Self::MHz => 1e6,
            Self::GHz => 1e9,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Hz => "Hz",
            Self::KHz => "kHz",
            Self::MHz => "MHz",
            Self::GHz => "GHz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hz" => Some(Self::Hz),
            "khz" => Some(Self::KHz),
            "mhz" => Some(Self::MHz),
            "ghz" => Some(Self::GHz),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataFormat {
    /// dB magnitude and angle in degrees.
    Db,
    /// Linear magnitude and angle in degrees.
    #[default]
    Ma,
    /// Real and imaginary parts.
    Ri,
}

impl DataFormat {
    pub fn label(self) -> &'static str {
        match self {
            Self::Db => "DB",
            Self::Ma => "MA",
            Self::Ri => "RI",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "db" => Some(Self::Db),
            "ma" => Some(Self::Ma),
            "ri" => Some(Self::Ri),
            _ => None,
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            Self::Ri => (z.re, z.im),
            Self::Ma => (z.norm(), z.arg().to_degrees()),
            // Exact zeros have no dB value; -400 dB stands in for them.
            Self::Db => (20.0 * z.norm().max(1e-20).log10(), z.arg().to_degrees()),
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            Self::Ri => Complex64::new(a, b),
            Self::Ma => Complex64::from_polar(a, b.to_radians()),
            Self::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TouchstoneOptions {
    pub unit: FrequencyUnit,
    pub format: DataFormat,
}

/// Port count from a `.sNp` file name.
pub fn ports_from_extension(path: &Path) -> Result<usize> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    ext.strip_prefix('s')
        .and_then(|r| r.strip_suffix('p'))
        .and_then(|n| n.parse().ok())
        .filter(|&n: &usize| n >= 1)
        .ok_or_else(|| Error::Config(format!("{} is not a .sNp file name", path.display())))
}

/// Writes the points of a sweep (all with equal port count and reference).
pub fn write_touchstone(points: &[SParameterMatrix], options: TouchstoneOptions) -> Result<String> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidParameter("nothing to export".into()))?;
    let n = first.n_ports();
    let mut out = String::new();
    writeln!(out, "! {n}-port S-parameters").unwrap();
    writeln!(
        out,
        "# {} S {} R {}",
        options.unit.label(),
        options.format.label(),
        first.z_ref()
    )
    .unwrap();
    for s in points {
        if s.n_ports() != n || s.z_ref() != first.z_ref() {
            return Err(Error::IncompatibleNetwork(
                "sweep points must share port count and reference impedance".into(),
            ));
        }
        let f = s.frequency() / options.unit.scale();
        let pairs: Vec<(f64, f64)> = if n == 2 {
            // Two-port data is written in column order: S11 S21 S12 S22.
            [(0, 0), (1, 0), (0, 1), (1, 1)]
                .iter()
                .map(|&(i, j)| options.format.encode(s.get(i, j)))
                .collect()
        } else {
            (0..n * n).map(|k| options.format.encode(s.get(k / n, k % n))).collect()
        };
        let per_line = if n <= 2 { n * n } else { 4.min(n) };
        let rows: Vec<&[(f64, f64)]> = if n <= 2 {
            vec![&pairs[..]]
        } else {
            pairs.chunks(n).collect()
        };
        let mut lead = format!("{f:e}");
        for row in rows {
            for chunk in row.chunks(per_line) {
                let body: Vec<String> = chunk.iter().map(|(a, b)| format!("{a:e} {b:e}")).collect();
                writeln!(out, "{lead} {}", body.join(" ")).unwrap();
                lead = " ".repeat(lead.len());
            }
        }
    }
    Ok(out)
}

struct Token {
    value: f64,
    line: usize,
}

/// Parses Touchstone text holding `n_ports`-port data.
pub fn parse_touchstone(text: &str, n_ports: usize) -> Result<Vec<SParameterMatrix>> {
    if n_ports == 0 {
        return Err(Error::InvalidParameter("port count must be >= 1".into()));
    }
    let mut unit = FrequencyUnit::GHz;
    let mut format = DataFormat::Ma;
    let mut z_ref = DEFAULT_Z_REF;
    let mut seen_option = false;
    let mut tokens = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            if seen_option {
                return Err(Error::parse(line_no, "second option line"));
            }
            seen_option = true;
            let words: Vec<&str> = opts.split_whitespace().collect();
            let mut k = 0;
            while k < words.len() {
                let w = words[k];
                if let Some(u) = FrequencyUnit::parse(w) {
                    unit = u;
                } else if let Some(f) = DataFormat::parse(w) {
                    format = f;
                } else if w.eq_ignore_ascii_case("s") {
                } else if w.eq_ignore_ascii_case("r") {
                    k += 1;
                    z_ref = words
                        .get(k)
                        .and_then(|v| v.parse::<f64>().ok())
                        .filter(|z| *z > 0.0)
                        .ok_or_else(|| Error::parse(line_no, "R needs a positive reference impedance"))?;
                } else {
                    return Err(Error::parse(line_no, format!("unsupported option {w:?}")));
                }
                k += 1;
            }
            continue;
        }
        for word in line.split_whitespace() {
            let value = word
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("not a number: {word:?}")))?;
            tokens.push(Token { value, line: line_no });
        }
    }
    let block = 1 + 2 * n_ports * n_ports;
    if tokens.is_empty() {
        return Err(Error::parse(text.lines().count().max(1), "no data"));
    }
    if tokens.len() % block != 0 {
        let line = tokens[tokens.len() - tokens.len() % block].line;
        return Err(Error::parse(
            line,
            format!("data ends mid-record ({} values per {n_ports}-port point)", block),
        ));
    }
    let mut points = Vec::with_capacity(tokens.len() / block);
    let mut last_f = f64::NEG_INFINITY;
    for rec in tokens.chunks(block) {
        let f = rec[0].value * unit.scale();
        if !(f > last_f) {
            return Err(Error::parse(rec[0].line, "frequencies must increase"));
        }
        last_f = f;
        let mut s = SParameterMatrix::zeros(n_ports, f, z_ref);
        for k in 0..n_ports * n_ports {
            let z = format.decode(rec[1 + 2 * k].value, rec[2 + 2 * k].value);
            let (i, j) = if n_ports == 2 {
                (k % 2, k / 2)
            } else {
                (k / n_ports, k % n_ports)
            };
            s.set(i, j, z);
        }
        points.push(s);
    }
    Ok(points)
}

pub fn export_touchstone(net: &SParameterMatrix, path: &Path) -> Result<()> {
    export_touchstone_with(std::slice::from_ref(net), path, TouchstoneOptions::default())
}

pub fn export_touchstone_with(points: &[SParameterMatrix], path: &Path, options: TouchstoneOptions) -> Result<()> {
    let text = write_touchstone(points, options)?;
    if let Ok(n) = ports_from_extension(path) {
        if n != points[0].n_ports() {
            return Err(Error::Config(format!(
                "{} names a {n}-port file for {}-port data",
                path.display(),
                points[0].n_ports()
            )));
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads every frequency point of a `.sNp` file.
pub fn import_touchstone_sweep(path: &Path) -> Result<Vec<SParameterMatrix>> {
    let n = ports_from_extension(path)?;
    let text = std::fs::read_to_string(path)?;
    parse_touchstone(&text, n)
}

/// Reads a single-frequency `.sNp` file.
pub fn import_touchstone(path: &Path) -> Result<SParameterMatrix> {
    let mut points = import_touchstone_sweep(path)?;
    if points.len() != 1 {
        return Err(Error::parse(
            1,
            format!("expected one frequency point, found {}", points.len()),
        ));
    }
    Ok(points.remove(0))
}
