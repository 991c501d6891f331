//! Run configuration: `key = value` lines grouped under `[section]` headers.
//!
//! `#` and `;` start comments. Keys before the first header belong to the
//! top-level section. Unknown keys are rejected so typos surface early.
//!
//! ```text
//! mode = rotman
//! output_dir = out
//! formats = csv, svg, report
//!
//! [rotman]
//! preset = 8x8
//! focal_ratio = optimize
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::touchstone::{DataFormat, FrequencyUnit, TouchstoneOptions};
use crate::pattern::{AmplitudeConvention, DEFAULT_FLOOR_DB};
use crate::rotman::{ErrorMetric, FeedMapping, FocalArc, RotmanDesignParams};
use crate::substrate::Substrate;

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but untyped configuration.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        sections.insert(String::new(), BTreeMap::new());
        let mut current = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(|s| s.trim().to_ascii_lowercase())
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::Config(format!("line {line_no}: malformed section header")))?;
                if sections.contains_key(&name) && !name.is_empty() {
                    return Err(Error::Config(format!("line {line_no}: section [{name}] repeated")));
                }
                sections.entry(name.clone()).or_default();
                current = name;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected key = value")))?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::Config(format!("line {line_no}: missing key")));
            }
            let section = sections.get_mut(&current).expect("inserted above");
            if section.contains_key(&key) {
                return Err(Error::Config(format!("line {line_no}: key {key:?} repeated")));
            }
            section.insert(
                key,
                Entry {
                    value: value.trim().to_string(),
                    line: line_no,
                },
            );
        }
        Ok(Self { sections })
    }

    fn section(&self, name: &str) -> Section<'_> {
        Section {
            name: name.to_string(),
            entries: self.sections.get(name),
            taken: Vec::new(),
        }
    }

    fn check_sections(&self) -> Result<()> {
        for name in self.sections.keys() {
            if !["", "butler", "rotman", "pattern", "sweep"].contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown section [{name}]")));
            }
        }
        Ok(())
    }
}

struct Section<'a> {
    name: String,
    entries: Option<&'a BTreeMap<String, Entry>>,
    taken: Vec<String>,
}

impl Section<'_> {
    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        let e = self.entries?.get(key)?;
        self.taken.push(key.to_string());
        Some((e.value.clone(), e.line))
    }

    fn err(&self, line: usize, key: &str, msg: impl std::fmt::Display) -> Error {
        let at = if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        };
        Error::Config(format!("line {line}: {at}: {msg}"))
    }

    fn map<T>(&mut self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => f(&v).map(Some).map_err(|m| self.err(line, key, m)),
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v)
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.map(key, |v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("{v:?} is not a number"))
        })
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.map(key, |v| {
            v.parse::<usize>()
                .map_err(|_| format!("{v:?} is not a non-negative integer"))
        })
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.map(key, |v| match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(format!("{v:?} is not a boolean")),
        })
    }

    fn list_f64(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.map(key, |v| {
            v.split([',', ' '])
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| format!("{s:?} is not a number")))
                .collect()
        })
    }

    fn finish(self) -> Result<()> {
        if let Some(entries) = self.entries {
            for (k, e) in entries {
                if !self.taken.contains(k) {
                    return Err(self.err(e.line, k, "unknown key"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Butler,
    Rotman,
    Pattern,
    Sweep,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "butler" => Ok(Self::Butler),
            "rotman" => Ok(Self::Rotman),
            "pattern" => Ok(Self::Pattern),
            "sweep" => Ok(Self::Sweep),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Which files a run emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
    pub touchstone: bool,
    pub report: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            csv: true,
            svg: true,
            touchstone: true,
            report: true,
        }
    }
}

impl Formats {
    pub fn parse(list: &str) -> Result<Self> {
        let mut f = Self {
            csv: false,
            svg: false,
            touchstone: false,
            report: false,
        };
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.to_ascii_lowercase().as_str() {
                "csv" => f.csv = true,
                "svg" => f.svg = true,
                "touchstone" | "snp" => f.touchstone = true,
                "report" | "txt" => f.report = true,
                "all" => f = Self::default(),
                other => return Err(Error::Config(format!("unknown output format {other:?}"))),
            }
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub formats: Formats,
    pub touchstone: TouchstoneOptions,
    /// Floor (dB) applied to exported patterns.
    pub floor_db: f64,
    pub convention: AmplitudeConvention,
    /// Pattern grid as (start, stop, step) degrees.
    pub grid: (f64, f64, f64),
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: Formats::default(),
            touchstone: TouchstoneOptions::default(),
            floor_db: DEFAULT_FLOOR_DB,
            convention: AmplitudeConvention::Field,
            grid: (1.0, 360.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButlerJob {
    pub order: usize,
    pub frequency: f64,
    pub substrate: Substrate,
    /// Array element spacing in wavelengths, for the beam patterns.
    pub spacing_wavelengths: f64,
}

impl Default for ButlerJob {
    fn default() -> Self {
        Self {
            order: 4,
            frequency: 3.15e9,
            substrate: Substrate::fr4_0_8(),
            spacing_wavelengths: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FocalRatioChoice {
    Fixed,
    Optimize { range: (f64, f64), metric: ErrorMetric },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotmanJob {
    pub params: RotmanDesignParams,
    pub focal_ratio: FocalRatioChoice,
}

impl Default for RotmanJob {
    fn default() -> Self {
        Self {
            params: RotmanDesignParams::four_by_four(),
            focal_ratio: FocalRatioChoice::Fixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternJob {
    pub input: PathBuf,
    pub frequency_unit: FrequencyUnit,
    pub spacing_wavelengths: f64,
    pub steer_reference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    FocalRatio,
    FrequencyGhz,
    ScanAngleDeg,
}

impl SweepParameter {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "focal_ratio" | "g" => Ok(Self::FocalRatio),
            "frequency_ghz" => Ok(Self::FrequencyGhz),
            "max_scan_deg" => Ok(Self::ScanAngleDeg),
            other => Err(Error::Config(format!("unknown sweep parameter {other:?}"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::FocalRatio => "focal_ratio",
            Self::FrequencyGhz => "frequency_ghz",
            Self::ScanAngleDeg => "max_scan_deg",
        }
    }

    pub fn apply(self, base: &RotmanDesignParams, value: f64) -> RotmanDesignParams {
        let mut p = base.clone();
        match self {
            Self::FocalRatio => p.focal_ratio = value,
            Self::FrequencyGhz => p.frequency = value * 1e9,
            Self::ScanAngleDeg => p.max_scan_angle = value,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepJob {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub output: OutputOptions,
    pub butler: ButlerJob,
    pub rotman: RotmanJob,
    pub pattern: Option<PatternJob>,
    pub sweep: Option<SweepJob>,
}

impl RunConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_text(&text, base)
    }

    pub fn from_text(text: &str, base_dir: &Path) -> Result<Self> {
        let file = ConfigFile::parse(text)?;
        file.check_sections()?;
        let resolve = |p: String| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }
        };

        let mut top = file.section("");
        let mode = Mode::parse(
            &top.string("mode")
                .ok_or_else(|| Error::Config("missing key \"mode\"".into()))?,
        )?;
        let mut output = OutputOptions::default();
        if let Some(dir) = top.string("output_dir") {
            output.dir = resolve(dir);
        }
        if let Some(f) = top.string("formats") {
            output.formats = Formats::parse(&f)?;
        }
        if let Some(u) = top.string("touchstone_unit") {
            output.touchstone.unit =
                FrequencyUnit::parse(&u).ok_or_else(|| Error::Config(format!("unknown frequency unit {u:?}")))?;
        }
        if let Some(f) = top.string("touchstone_format") {
            output.touchstone.format =
                DataFormat::parse(&f).ok_or_else(|| Error::Config(format!("unknown Touchstone format {f:?}")))?;
        }
        if let Some(c) = top.string("convention") {
            output.convention = AmplitudeConvention::parse(&c)?;
        }
        if let Some(v) = top.f64("floor_db")? {
            output.floor_db = v;
        }
        if let Some(v) = top.list_f64("grid_deg")? {
            match v[..] {
                [a, b, c] => output.grid = (a, b, c),
                _ => return Err(Error::Config("grid_deg needs start, stop, step".into())),
            }
        }
        top.finish()?;

        let butler = Self::butler_section(&file)?;
        let rotman = Self::rotman_section(&file)?;

        let pattern = if file.sections.contains_key("pattern") {
            let mut s = file.section("pattern");
            let input = s
                .string("input")
                .ok_or_else(|| Error::Config("[pattern] needs input".into()))?;
            let job = PatternJob {
                input: resolve(input),
                frequency_unit: match s.string("frequency_unit") {
                    Some(u) => FrequencyUnit::parse(&u)
                        .ok_or_else(|| Error::Config(format!("unknown frequency unit {u:?}")))?,
                    None => FrequencyUnit::MHz,
                },
                spacing_wavelengths: s
                    .f64("spacing_wavelengths")?
                    .ok_or_else(|| Error::Config("[pattern] needs spacing_wavelengths".into()))?,
                steer_reference: s.f64("theta_zero_deg")?.unwrap_or(90.0),
            };
            s.finish()?;
            Some(job)
        } else {
            None
        };

        let sweep = if file.sections.contains_key("sweep") {
            let mut s = file.section("sweep");
            let parameter = SweepParameter::parse(
                &s.string("parameter")
                    .ok_or_else(|| Error::Config("[sweep] needs parameter".into()))?,
            )?;
            let values = match (s.list_f64("values")?, s.list_f64("range")?) {
                (Some(v), None) => v,
                (None, Some(r)) => match r[..] {
                    [start, stop, step] => crate::pattern::angle_grid(start, stop, step)
                        .map_err(|_| Error::Config("[sweep] range needs stop >= start and step > 0".into()))?,
                    _ => return Err(Error::Config("[sweep] range needs start, stop, step".into())),
                },
                _ => return Err(Error::Config("[sweep] needs exactly one of values or range".into())),
            };
            if values.is_empty() {
                return Err(Error::Config("[sweep] has no values".into()));
            }
            s.finish()?;
            Some(SweepJob { parameter, values })
        } else {
            None
        };

        match mode {
            Mode::Pattern if pattern.is_none() => {
                return Err(Error::Config("mode pattern needs a [pattern] section".into()))
            }
            Mode::Sweep if sweep.is_none() => return Err(Error::Config("mode sweep needs a [sweep] section".into())),
            _ => {}
        }
        Ok(Self {
            mode,
            output,
            butler,
            rotman,
            pattern,
            sweep,
        })
    }

    fn butler_section(file: &ConfigFile) -> Result<ButlerJob> {
        let mut s = file.section("butler");
        let mut job = ButlerJob::default();
        if let Some(v) = s.usize("order")? {
            job.order = v;
        }
        if let Some(v) = s.f64("frequency_ghz")? {
            job.frequency = v * 1e9;
        }
        if let Some(v) = s.string("substrate") {
            job.substrate = Substrate::preset(&v)?;
        }
        if let Some(v) = s.f64("spacing_wavelengths")? {
            job.spacing_wavelengths = v;
        }
        s.finish()?;
        Ok(job)
    }

    fn rotman_section(file: &ConfigFile) -> Result<RotmanJob> {
        let mut s = file.section("rotman");
        let mut p = match s.string("preset") {
            Some(name) => RotmanDesignParams::preset(&name)?,
            None => RotmanDesignParams::four_by_four(),
        };
        let mm = 1e-3;
        if let Some(v) = s.f64("focal_length_mm")? {
            p.off_axis_focal_length = v * mm;
        }
        let mut choice = FocalRatioChoice::Fixed;
        if let Some(v) = s.string("focal_ratio") {
            if v.eq_ignore_ascii_case("optimize") {
                choice = FocalRatioChoice::Optimize {
                    range: (1.01, 2.0),
                    metric: ErrorMetric::MaxAbs,
                };
            } else {
                p.focal_ratio = v.parse().map_err(|_| {
                    Error::Config(format!(
                        "rotman.focal_ratio: {v:?} is neither a number nor \"optimize\""
                    ))
                })?;
            }
        }
        let g_min = s.f64("g_min")?;
        let g_max = s.f64("g_max")?;
        let metric = s.map("metric", |v| match v.to_ascii_lowercase().as_str() {
            "max" | "maxabs" => Ok(ErrorMetric::MaxAbs),
            "rms" => Ok(ErrorMetric::Rms),
            _ => Err(format!("{v:?} is not max or rms")),
        })?;
        if let FocalRatioChoice::Optimize { range, metric: m } = &mut choice {
            *range = (g_min.unwrap_or(range.0), g_max.unwrap_or(range.1));
            *m = metric.unwrap_or(*m);
        } else if g_min.is_some() || g_max.is_some() || metric.is_some() {
            return Err(Error::Config(
                "g_min, g_max and metric need focal_ratio = optimize".into(),
            ));
        }
        if let Some(v) = s.f64("focal_angle_deg")? {
            p.focal_angle = v;
        }
        if let Some(v) = s.usize("elements")? {
            p.n_array_elements = v;
        }
        if let Some(v) = s.f64("element_spacing_mm")? {
            p.element_spacing = v * mm;
        }
        if let Some(v) = s.usize("beam_ports")? {
            p.n_beam_ports = v;
        }
        if let Some(v) = s.f64("max_scan_deg")? {
            p.max_scan_angle = v;
        }
        if let Some(v) = s.f64("frequency_ghz")? {
            p.frequency = v * 1e9;
        }
        if let Some(v) = s.string("substrate") {
            p.substrate = Substrate::preset(&v)?;
        }
        let e = s.f64("eccentricity")?;
        match s.string("focal_arc").map(|v| v.to_ascii_lowercase()) {
            Some(ref v) if v == "circular" => p.focal_arc = FocalArc::Circular,
            Some(ref v) if v == "elliptical" => {
                p.focal_arc = FocalArc::Elliptical {
                    eccentricity: e.unwrap_or(p.focal_arc.eccentricity()),
                }
            }
            Some(v) => {
                return Err(Error::Config(format!(
                    "rotman.focal_arc: {v:?} is not circular or elliptical"
                )))
            }
            None => {
                if let Some(e) = e {
                    p.focal_arc = FocalArc::Elliptical { eccentricity: e };
                }
            }
        }
        if let Some(v) = s.map("feed_mapping", |v| match v.to_ascii_lowercase().as_str() {
            "linear" => Ok(FeedMapping::Linear),
            "sine" => Ok(FeedMapping::Sine),
            _ => Err(format!("{v:?} is not linear or sine")),
        })? {
            p.feed_mapping = v;
        }
        if let Some(v) = s.bool("port_pointing")? {
            p.port_pointing = v;
        }
        if let Some(v) = s.f64("guard_gap")? {
            p.guard_gap = v;
        }
        if let Some(v) = s.f64("beam_port_width_mm")? {
            p.beam_port_width = Some(v * mm);
        }
        if let Some(v) = s.f64("wall_reflectivity")? {
            p.wall_reflectivity = v;
        }
        if let Some(v) = s.f64("base_line_length_mm")? {
            p.base_line_length = v * mm;
        }
        s.finish()?;
        Ok(RotmanJob {
            params: p,
            focal_ratio: choice,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<RunConfig> {
        RunConfig::from_text(text, Path::new("/base"))
    }

    #[test]
    fn full_rotman_config() {
        let c = cfg("mode = rotman # lens\noutput_dir = res\nformats = csv, svg\n\n[rotman]\npreset = 8x8\nfocal_ratio = optimize\ng_min = 1.1\nmetric = rms\n")
            .unwrap();
        assert_eq!(c.mode, Mode::Rotman);
        assert_eq!(c.output.dir, PathBuf::from("/base/res"));
        assert!(c.output.formats.csv && c.output.formats.svg && !c.output.formats.report);
        assert_eq!(c.rotman.params.n_array_elements, 8);
        assert_eq!(
            c.rotman.focal_ratio,
            FocalRatioChoice::Optimize {
                range: (1.1, 2.0),
                metric: ErrorMetric::Rms
            }
        );
    }

    #[test]
    fn pattern_and_sweep_sections() {
        let c = cfg("mode = pattern\n[pattern]\ninput = data.txt\nspacing_wavelengths = 0.82\n").unwrap();
        let p = c.pattern.unwrap();
        assert_eq!(p.input, PathBuf::from("/base/data.txt"));
        assert_eq!(p.steer_reference, 90.0);
        let c = cfg("mode = sweep\n[sweep]\nparameter = focal_ratio\nrange = 1.2, 1.3, 0.05\n").unwrap();
        assert_eq!(c.sweep.unwrap().values.len(), 3);
    }

    #[test]
    fn errors_name_the_line() {
        let msg = |t: &str| match cfg(t) {
            Err(Error::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(msg("mode = butler\n[butler]\norder = four\n").starts_with("line 3"));
        assert!(msg("mode = butler\nbogus = 1\n").contains("unknown key"));
        assert!(msg("mode = butler\nno equals sign\n").starts_with("line 2"));
        assert!(msg("mode = butler\nmode = rotman\n").contains("repeated"));
        assert!(msg("mode = dance\n").contains("unknown mode"));
        assert!(msg("mode = pattern\n").contains("[pattern]"));
        assert!(msg("mode = rotman\n[rotman]\ng_min = 1.2\n").contains("optimize"));
        assert!(msg("mode = rotman\n[extra]\n").contains("unknown section"));
    }

    #[test]
    fn defaults() {
        let c = cfg("mode = butler\n").unwrap();
        assert_eq!(c.butler, ButlerJob::default());
        assert_eq!(c.output.grid, (1.0, 360.0, 1.0));
        assert_eq!(c.output.convention, AmplitudeConvention::Field);
    }
}
