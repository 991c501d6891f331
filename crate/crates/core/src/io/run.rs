//! Executes a [`RunConfig`] and writes its artifacts.
//!
//! All file contents are built in memory first and written in a fixed
//! order, so repeated runs produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::butler::{self, ButlerDesign};
use crate::error::{Error, Result};
use crate::io::config::{ButlerJob, FocalRatioChoice, Mode, OutputOptions, PatternJob, RotmanJob, RunConfig, SweepJob};
use crate::io::format::{csv_row, num};
use crate::io::measured::read_measured_table;
use crate::io::svg::lens_svg;
use crate::io::touchstone::write_touchstone;
use crate::pattern::{self, ExcitationVector, PatternResult};
use crate::rotman::{
    self, optimize_focal_ratio_with, FocalRatioOptimum, OptimizerOptions, PortKind, RotmanLensGeometry,
};

/// One emitted file, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
}

pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let artifacts = build(config)?;
    write_artifacts(&config.output.dir, &artifacts)
}

/// Builds every artifact of `config` without touching the file system.
pub fn build(config: &RunConfig) -> Result<Vec<Artifact>> {
    let out = &config.output;
    match config.mode {
        Mode::Butler => butler_artifacts(&config.butler, out),
        Mode::Rotman => rotman_artifacts(&config.rotman, out),
        Mode::Pattern => pattern_artifacts(config.pattern.as_ref().expect("checked at load"), out),
        Mode::Sweep => sweep_artifacts(&config.rotman, config.sweep.as_ref().expect("checked at load"), out),
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<RunSummary> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.contents)?;
        files.push(path);
    }
    Ok(RunSummary { files })
}

fn artifact(name: impl Into<String>, contents: String) -> Artifact {
    Artifact {
        name: name.into(),
        contents,
    }
}

fn grid(out: &OutputOptions) -> Result<Vec<f64>> {
    let (a, b, c) = out.grid;
    pattern::angle_grid(a, b, c).map_err(|_| Error::Config("pattern grid needs stop >= start and step > 0".into()))
}

fn patterns_csv(angles: &[f64], patterns: &[PatternResult], floor_db: f64) -> String {
    let mut s =
        csv_row(std::iter::once("angle_deg".to_string()).chain((1..=patterns.len()).map(|k| format!("beam_{k}_db"))));
    let floored: Vec<Vec<f64>> = patterns.iter().map(|p| p.floored(floor_db)).collect();
    for (i, &a) in angles.iter().enumerate() {
        s.push_str(&csv_row(
            std::iter::once(num(a)).chain(floored.iter().map(|p| num(p[i]))),
        ));
    }
    s
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn butler_artifacts(job: &ButlerJob, out: &OutputOptions) -> Result<Vec<Artifact>> {
    let design = butler::assemble_butler(job.order, job.frequency)?.with_substrate(job.substrate);
    let angles = grid(out)?;
    let n = design.order;
    let patterns = (1..=n)
        .map(|p| {
            let e = ExcitationVector::from_complex(&design.outputs(p)?, job.spacing_wavelengths)?;
            pattern::array_factor_on(&e, out.convention, &angles)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut arts = Vec::new();
    if out.formats.csv {
        let mut s = csv_row([
            "beam_port",
            "array_port",
            "magnitude_db",
            "phase_deg",
            "relative_phase_deg",
        ]);
        for p in 1..=n {
            let rel = butler::relative_output_phases(&design, p)?;
            for (k, z) in design.outputs(p)?.iter().enumerate() {
                let r = if k == 0 { String::new() } else { num(rel[k - 1]) };
                s.push_str(&csv_row([
                    p.to_string(),
                    (n + k + 1).to_string(),
                    num(20.0 * z.norm().log10()),
                    num(z.arg().to_degrees()),
                    r,
                ]));
            }
        }
        arts.push(artifact("butler_phases.csv", s));
        arts.push(artifact(
            "butler_patterns.csv",
            patterns_csv(&angles, &patterns, out.floor_db),
        ));
    }
    if out.formats.touchstone {
        arts.push(artifact(
            format!("butler.s{}p", 2 * n),
            write_touchstone(std::slice::from_ref(&design.assembled), out.touchstone)?,
        ));
    }
    if out.formats.report {
        arts.push(artifact("butler_report.txt", butler_report(&design, job, &patterns)?));
    }
    Ok(arts)
}

fn butler_report(design: &ButlerDesign, job: &ButlerJob, patterns: &[PatternResult]) -> Result<String> {
    let n = design.order;
    let r = design.realization()?;
    let mut s = String::new();
    writeln!(s, "Butler matrix {n}x{n} at {} GHz", num(design.frequency / 1e9)).unwrap();
    writeln!(s, "hybrids: {}", design.inventory.hybrids).unwrap();
    writeln!(s, "phase shifters: {}", design.inventory.phase_shifters).unwrap();
    writeln!(s, "unitarity error: {}", num(design.assembled.unitarity_error())).unwrap();
    writeln!(
        s,
        "\nmicrostrip (eps_r {}, h {} mm)",
        num(job.substrate.relative_permittivity),
        num(job.substrate.height * 1e3)
    )
    .unwrap();
    writeln!(
        s,
        "  50 ohm width: {} mm, quarter wave {} mm",
        num(r.width_50 * 1e3),
        num(r.quarter_wave_50 * 1e3)
    )
    .unwrap();
    writeln!(
        s,
        "  35.4 ohm width: {} mm, quarter wave {} mm",
        num(r.width_35 * 1e3),
        num(r.quarter_wave_35 * 1e3)
    )
    .unwrap();
    writeln!(s, "  45 deg shifter: {} mm", num(r.shifter_45 * 1e3)).unwrap();
    writeln!(s, "\nbeam  progressive_deg  direction_deg  main_lobe_deg  sll_db").unwrap();
    for (p, pat) in (1..=n).zip(patterns) {
        let law = butler::ideal_beam_phase(n, p)?;
        let dir = match butler::beam_direction(law.progressive_phase, job.spacing_wavelengths) {
            Ok(d) => num(d),
            Err(Error::NoRealBeam { .. }) => "none".into(),
            Err(e) => return Err(e),
        };
        writeln!(
            s,
            "{p:>4}  {:>15}  {dir:>13}  {:>13}  {:>6}",
            num(law.progressive_phase),
            opt_num(pat.main_lobe_angle()),
            opt_num(pat.sidelobe_level_db())
        )
        .unwrap();
    }
    Ok(s)
}

/// Synthesizes the lens, tuning g first when asked.
pub fn design_rotman(job: &RotmanJob) -> Result<(RotmanLensGeometry, Option<FocalRatioOptimum>)> {
    let (params, opt) = match job.focal_ratio {
        FocalRatioChoice::Fixed => (job.params.clone(), None),
        FocalRatioChoice::Optimize { range, metric } => {
            let o = optimize_focal_ratio_with(
                &job.params,
                range,
                OptimizerOptions {
                    metric,
                    ..Default::default()
                },
            )?;
            (job.params.with_focal_ratio(o.g_star), Some(o))
        }
    };
    Ok((RotmanLensGeometry::synthesize(&params)?, opt))
}

fn rotman_patterns(geometry: &RotmanLensGeometry, out: &OutputOptions, angles: &[f64]) -> Result<Vec<PatternResult>> {
    let p = &geometry.params;
    (1..=p.n_beam_ports)
        .map(|k| {
            let e = rotman::array_excitation(geometry, k, p.frequency)?;
            pattern::array_factor_on(&e, out.convention, angles)
        })
        .collect()
}

pub fn rotman_artifacts(job: &RotmanJob, out: &OutputOptions) -> Result<Vec<Artifact>> {
    let (geometry, opt) = design_rotman(job)?;
    let p = &geometry.params;
    let angles = grid(out)?;
    let patterns = rotman_patterns(&geometry, out, &angles)?;
    let errors = geometry.phase_error_table()?;
    let mut arts = Vec::new();
    if out.formats.csv {
        let mut s = csv_row([
            "element",
            "eta",
            "x_m",
            "y_m",
            "w",
            "line_length_m",
            "printed_line_length_m",
        ]);
        for (i, c) in geometry.array_contour.iter().enumerate() {
            s.push_str(&csv_row([
                (i + 1).to_string(),
                num(c.eta),
                num(c.x * p.off_axis_focal_length),
                num(c.y * p.off_axis_focal_length),
                num(c.w),
                num(geometry.line_lengths[i]),
                num(geometry.physical_line_lengths[i]),
            ]));
        }
        arts.push(artifact("rotman_contour.csv", s));

        let mut s = csv_row([
            "kind",
            "index",
            "x_m",
            "y_m",
            "aperture_m",
            "pointing_x",
            "pointing_y",
            "feed_angle_deg",
        ]);
        for port in geometry
            .beam_ports
            .iter()
            .chain(&geometry.array_ports)
            .chain(&geometry.dummy_ports)
        {
            let kind = match port.kind {
                PortKind::Beam => "beam",
                PortKind::Array => "array",
                PortKind::Dummy => "dummy",
            };
            s.push_str(&csv_row([
                kind.to_string(),
                port.index.to_string(),
                num(port.position[0]),
                num(port.position[1]),
                num(port.aperture_width),
                num(port.pointing[0]),
                num(port.pointing[1]),
                opt_num(port.feed_angle),
            ]));
        }
        arts.push(artifact("rotman_ports.csv", s));

        let mut s = csv_row(["beam_port", "element", "phase_error_m", "phase_error_deg"]);
        let to_deg = 360.0 / p.wavelength();
        for (b, row) in errors.iter().enumerate() {
            for (e, &v) in row.iter().enumerate() {
                s.push_str(&csv_row([
                    (b + 1).to_string(),
                    (e + 1).to_string(),
                    num(v),
                    num(v * to_deg),
                ]));
            }
        }
        arts.push(artifact("rotman_phase_error.csv", s));

        let mut s = csv_row([
            "beam_port",
            "scan_deg",
            "designed_deg",
            "main_lobe_deg",
            "sidelobe_db",
            "beamwidth_deg",
        ]);
        for (k, (psi, pat)) in p.beam_angles().iter().zip(&patterns).enumerate() {
            s.push_str(&csv_row([
                (k + 1).to_string(),
                num(*psi),
                num(p.designed_pattern_angle(k + 1)?),
                opt_num(pat.main_lobe_angle()),
                opt_num(pat.sidelobe_level_db()),
                opt_num(pat.beamwidth_3db()),
            ]));
        }
        arts.push(artifact("rotman_beams.csv", s));
        arts.push(artifact(
            "rotman_patterns.csv",
            patterns_csv(&angles, &patterns, out.floor_db),
        ));

        if let Some(o) = &opt {
            let mut s = csv_row(["focal_ratio", "objective_m"]);
            for sample in &o.profile {
                s.push_str(&csv_row([num(sample.g), num(sample.objective)]));
            }
            arts.push(artifact("rotman_optimizer.csv", s));
        }
    }
    if out.formats.svg {
        arts.push(artifact("rotman.svg", lens_svg(&geometry)?));
    }
    if out.formats.report {
        arts.push(artifact(
            "rotman_report.txt",
            rotman_report(&geometry, opt.as_ref(), &errors, &patterns)?,
        ));
    }
    Ok(arts)
}

fn max_rms(errors: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = errors.iter().flatten().copied().collect();
    let max = all.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = (all.iter().map(|v| v * v).sum::<f64>() / all.len() as f64).sqrt();
    (max, rms)
}

fn rotman_report(
    geometry: &RotmanLensGeometry,
    opt: Option<&FocalRatioOptimum>,
    errors: &[Vec<f64>],
    patterns: &[PatternResult],
) -> Result<String> {
    let p = &geometry.params;
    let mut s = String::new();
    writeln!(
        s,
        "Rotman lens {} beams x {} elements at {} GHz",
        p.n_beam_ports,
        p.n_array_elements,
        num(p.frequency / 1e9)
    )
    .unwrap();
    writeln!(
        s,
        "F = {} mm, g = {}, alpha = {} deg, psi_max = {} deg",
        num(p.off_axis_focal_length * 1e3),
        num(p.focal_ratio),
        num(p.focal_angle),
        num(p.max_scan_angle)
    )
    .unwrap();
    writeln!(
        s,
        "element spacing {} mm ({} wavelengths)",
        num(p.element_spacing * 1e3),
        num(p.spacing_wavelengths())
    )
    .unwrap();
    let arc = match p.focal_arc {
        rotman::FocalArc::Circular => "circular".to_string(),
        rotman::FocalArc::Elliptical { eccentricity } => format!("elliptical, e = {}", num(eccentricity)),
    };
    writeln!(s, "focal arc: {arc}").unwrap();
    writeln!(s, "printed scale: {}", num(geometry.physical_scale())).unwrap();
    if let Some(o) = opt {
        let metric = match o.metric {
            rotman::ErrorMetric::MaxAbs => "max",
            rotman::ErrorMetric::Rms => "rms",
        };
        writeln!(
            s,
            "optimized g* = {} ({metric} objective {} m)",
            num(o.g_star),
            num(o.objective)
        )
        .unwrap();
    }
    let (max, rms) = max_rms(errors);
    writeln!(s, "phase error: max {} m, rms {} m", num(max), num(rms)).unwrap();
    writeln!(s, "\nbeam  feed_deg  designed_deg  main_lobe_deg  sll_db").unwrap();
    for (k, (port, pat)) in geometry.beam_ports.iter().zip(patterns).enumerate() {
        writeln!(
            s,
            "{:>4}  {:>8}  {:>12}  {:>13}  {:>6}",
            k + 1,
            opt_num(port.feed_angle),
            num(p.designed_pattern_angle(k + 1)?),
            opt_num(pat.main_lobe_angle()),
            opt_num(pat.sidelobe_level_db())
        )
        .unwrap();
    }
    Ok(s)
}

pub fn pattern_artifacts(job: &PatternJob, out: &OutputOptions) -> Result<Vec<Artifact>> {
    let table = read_measured_table(&job.input, job.frequency_unit)?;
    let exc = table.to_excitation(job.spacing_wavelengths, job.steer_reference)?;
    let angles = grid(out)?;
    let pat = pattern::array_factor_on(&exc, out.convention, &angles)?;
    let rel = pattern::relative_phase_differences(&exc)?;
    let mut arts = Vec::new();
    if out.formats.csv {
        let mut s = csv_row(["angle_deg", "af_db"]);
        for (a, v) in pat.angles.iter().zip(pat.floored(out.floor_db)) {
            s.push_str(&csv_row([num(*a), num(v)]));
        }
        arts.push(artifact("pattern.csv", s));
        let mut s = csv_row(["angle_rad", "radius_db"]);
        for (a, r) in pat.polar(out.floor_db) {
            s.push_str(&csv_row([num(a), num(r)]));
        }
        arts.push(artifact("pattern_polar.csv", s));
        let mut s = csv_row(["pair", "phase_difference_deg"]);
        for (i, d) in rel.iter().enumerate() {
            s.push_str(&csv_row([format!("{}-{}", i + 2, i + 1), num(*d)]));
        }
        arts.push(artifact("relative_phase.csv", s));
    }
    if out.formats.report {
        let mut s = String::new();
        writeln!(
            s,
            "{} elements at {} MHz, spacing {} wavelengths",
            exc.len(),
            num(table.frequency_hz() / 1e6),
            num(exc.element_spacing)
        )
        .unwrap();
        writeln!(s, "main lobe: {} deg", opt_num(pat.main_lobe_angle())).unwrap();
        writeln!(s, "sidelobe level: {} dB", opt_num(pat.sidelobe_level_db())).unwrap();
        writeln!(s, "3 dB beamwidth: {} deg", opt_num(pat.beamwidth_3db())).unwrap();
        arts.push(artifact("pattern_report.txt", s));
    }
    Ok(arts)
}

/// One sweep point; `None` fields mark a design that could not be built.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub status: std::result::Result<(f64, f64, Vec<Option<f64>>), String>,
}

pub fn sweep_points(job: &RotmanJob, sweep: &SweepJob, out: &OutputOptions) -> Result<Vec<SweepPoint>> {
    let angles = grid(out)?;
    // Ordered collect keeps the output independent of scheduling.
    Ok(sweep
        .values
        .par_iter()
        .map(|&value| {
            let point = || -> Result<_> {
                let params = sweep.parameter.apply(&job.params, value);
                let geometry = RotmanLensGeometry::synthesize(&params)?;
                let (max, rms) = max_rms(&geometry.phase_error_table()?);
                let lobes = rotman_patterns(&geometry, out, &angles)?
                    .iter()
                    .map(|p| p.main_lobe_angle())
                    .collect();
                Ok((max, rms, lobes))
            };
            SweepPoint {
                value,
                status: point().map_err(|e| e.category().as_str().to_string() + ": " + &e.to_string()),
            }
        })
        .collect())
}

pub fn sweep_artifacts(job: &RotmanJob, sweep: &SweepJob, out: &OutputOptions) -> Result<Vec<Artifact>> {
    let points = sweep_points(job, sweep, out)?;
    let n = job.params.n_beam_ports;
    let mut s = csv_row(
        [
            sweep.parameter.label().to_string(),
            "status".into(),
            "max_phase_error_m".into(),
            "rms_phase_error_m".into(),
        ]
        .into_iter()
        .chain((1..=n).map(|k| format!("main_lobe_{k}_deg"))),
    );
    for pt in &points {
        let row: Vec<String> = match &pt.status {
            Ok((max, rms, lobes)) => [num(pt.value), "ok".into(), num(*max), num(*rms)]
                .into_iter()
                .chain(lobes.iter().map(|l| opt_num(*l)))
                .collect(),
            Err(msg) => [num(pt.value), format!("\"{}\"", msg.replace('"', "'"))]
                .into_iter()
                .chain(std::iter::repeat_n(String::new(), 2 + n))
                .collect(),
        };
        s.push_str(&csv_row(row));
    }
    Ok(vec![artifact("sweep.csv", s)])
}
