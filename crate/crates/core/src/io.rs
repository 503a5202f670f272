//! Artifact formats and the run driver.
//!
//! One run directory holds:
//!
//! - `snap_{plus,minus}_NNNN.r2df` — field snapshots (32-byte header:
//!   magic `R2DF`, version u32, nx u32, ny u32, box f64, t f64, all
//!   little-endian, then nx·ny row-major f64 samples);
//! - `diagnostics.csv` — one [`DiagnosticsRecord`] row per output time;
//! - `contour_{plus,minus}_NNNN.csv` (`alpha,x,y`) plus
//!   `contour_series.csv` and, for the merger pair, `perturbation.csv`;
//! - `trajectory.csv` (`t,x,y`) for point-vortex runs;
//! - `f_final.pgm` — linear heatmap of F at the final time;
//! - `manifest.json` — written exactly once, echoing the configuration
//!   and recording resolution, wall time, conservation drifts, detected
//!   events, and the hypothesis-check results.
//!
//! All numeric outputs are deterministic: re-running an identical
//! configuration reproduces them bit-for-bit (the manifest's wall-time
//! entry is the one intentionally non-reproducible field).

use crate::contour::{
    analytic_background, contours_overlap, ContourMode, ContourPairState, ContourSim,
    PatchContour, C64,
};
use crate::diagnostics::{support_components, DiagnosticsRecord};
use crate::grid::{ScalarField, ScalarPair, TorusGrid};
use crate::point_vortex::{pv_integrate, PointVortexState};
use crate::scenario::{InitialData, Scenario};
use crate::solver::Solver;
use crate::{Error, Result};

use serde_json::json;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Snapshot format version.
pub const SNAPSHOT_VERSION: u32 = 1;

/// Exact column set of `diagnostics.csv`.
pub const DIAGNOSTICS_HEADER: &str =
    "t,l1_plus,l2_plus,linf_plus,l1_minus,l2_minus,linf_minus,E1,E2,overlap,components_F,symmetry_defect";

// ---------------------------------------------------------------------
// field snapshots
// ---------------------------------------------------------------------

/// Write one scalar field with its sample time.
pub fn write_field_snapshot(path: &Path, field: &ScalarField, t: f64) -> Result<()> {
    let n = field.grid.n as u32;
    let mut bytes = Vec::with_capacity(32 + field.values.len() * 8);
    bytes.extend_from_slice(b"R2DF");
    bytes.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    bytes.extend_from_slice(&n.to_le_bytes());
    bytes.extend_from_slice(&n.to_le_bytes());
    bytes.extend_from_slice(&field.grid.box_size.to_le_bytes());
    bytes.extend_from_slice(&t.to_le_bytes());
    for v in &field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Read a snapshot back, returning the field and its sample time.
pub fn read_field_snapshot(path: &Path) -> Result<(ScalarField, f64)> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 32 || &bytes[0..4] != b"R2DF" {
        return Err(Error::Config(format!(
            "{}: not a field snapshot (missing R2DF magic)",
            path.display()
        )));
    }
    let word = |lo: usize| u32::from_le_bytes(bytes[lo..lo + 4].try_into().unwrap());
    let real = |lo: usize| f64::from_le_bytes(bytes[lo..lo + 8].try_into().unwrap());
    let version = word(4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Config(format!(
            "{}: unsupported snapshot version {version}",
            path.display()
        )));
    }
    let nx = word(8) as usize;
    let ny = word(12) as usize;
    if nx != ny {
        return Err(Error::Config(format!(
            "{}: snapshot must be square, got {nx}×{ny}",
            path.display()
        )));
    }
    let expected = 32 + nx * ny * 8;
    if bytes.len() != expected {
        return Err(Error::Config(format!(
            "{}: snapshot holds {} bytes, expected {expected}",
            path.display(),
            bytes.len()
        )));
    }
    let grid = TorusGrid::new(nx, real(16))?;
    let t = real(24);
    let mut field = ScalarField::zeros(grid);
    for (k, slot) in field.values.iter_mut().enumerate() {
        *slot = real(32 + 8 * k);
    }
    Ok((field, t))
}

// ---------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------

/// Streams `diagnostics.csv` rows.
pub struct DiagnosticsWriter {
    out: BufWriter<File>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{DIAGNOSTICS_HEADER}")?;
        Ok(Self { out })
    }

    pub fn write(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.l1_plus,
            r.l2_plus,
            r.linf_plus,
            r.l1_minus,
            r.l2_minus,
            r.linf_minus,
            r.e1,
            r.e2,
            r.overlap,
            r.components_f,
            r.symmetry_defect
        )?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Write one closed contour as `alpha,x,y` rows (α_j = 2πj/M).
pub fn write_contour_csv(path: &Path, contour: &PatchContour) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "alpha,x,y")?;
    let m = contour.len();
    for (j, z) in contour.nodes.iter().enumerate() {
        let alpha = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        writeln!(out, "{},{},{}", alpha, z.re, z.im)?;
    }
    out.flush()?;
    Ok(())
}

/// Read contour nodes back from an `alpha,x,y` file.
pub fn read_contour_csv(path: &Path) -> Result<Vec<C64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("alpha,x,y") => {}
        other => {
            return Err(Error::Config(format!(
                "{}: expected header alpha,x,y, got {other:?}",
                path.display()
            )))
        }
    }
    let mut nodes = Vec::new();
    for (k, line) in lines.enumerate() {
        let mut cols = line.split(',');
        let mut take = || -> Result<f64> {
            cols.next()
                .and_then(|c| c.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::Config(format!("{}: bad row {} ({line:?})", path.display(), k + 2))
                })
        };
        let _alpha = take()?;
        let x = take()?;
        let y = take()?;
        nodes.push(C64::new(x, y));
    }
    Ok(nodes)
}

// ---------------------------------------------------------------------
// PGM heatmaps
// ---------------------------------------------------------------------

/// 8-bit linear P5 heatmap: [−max|f|, +max|f|] → [0, 255], row 0 at the
/// top of the box (descending x₂). An identically zero field renders
/// mid-gray.
pub fn write_pgm(path: &Path, field: &ScalarField) -> Result<()> {
    let n = field.grid.n;
    let m = field.max_abs();
    let mut bytes = format!("P5\n{n} {n}\n255\n").into_bytes();
    bytes.reserve(n * n);
    for row in 0..n {
        let j = n - 1 - row;
        for i in 0..n {
            let px = if m == 0.0 {
                128u8
            } else {
                let unit = (field.at(i, j) + m) / (2.0 * m);
                (unit * 255.0).round().clamp(0.0, 255.0) as u8
            };
            bytes.push(px);
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Rasterize contour outlines into a P5 image: plus curve white, minus
/// curve black, background mid-gray. The frame is fixed by `bounds`
/// (xmin, xmax, ymin, ymax).
pub fn write_contour_pgm(
    path: &Path,
    plus: &[C64],
    minus: &[C64],
    bounds: (f64, f64, f64, f64),
    size: usize,
) -> Result<()> {
    let (x0, x1, y0, y1) = bounds;
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::Config(format!(
            "degenerate contour frame [{x0}, {x1}]×[{y0}, {y1}]"
        )));
    }
    let mut img = vec![128u8; size * size];
    let mut draw = |nodes: &[C64], shade: u8| {
        let to_px = |z: C64| -> (f64, f64) {
            let c = (z.re - x0) / (x1 - x0) * (size - 1) as f64;
            let r = (y1 - z.im) / (y1 - y0) * (size - 1) as f64;
            (c, r)
        };
        for k in 0..nodes.len() {
            let (ca, ra) = to_px(nodes[k]);
            let (cb, rb) = to_px(nodes[(k + 1) % nodes.len()]);
            let steps = ((cb - ca).abs().max((rb - ra).abs()).ceil() as usize).max(1);
            for s in 0..=steps {
                let f = s as f64 / steps as f64;
                let c = (ca + f * (cb - ca)).round();
                let r = (ra + f * (rb - ra)).round();
                if (0.0..size as f64).contains(&c) && (0.0..size as f64).contains(&r) {
                    img[r as usize * size + c as usize] = shade;
                }
            }
        }
    };
    draw(plus, 255);
    draw(minus, 0);
    let mut bytes = format!("P5\n{size} {size}\n255\n").into_bytes();
    bytes.extend_from_slice(&img);
    std::fs::write(path, bytes)?;
    Ok(())
}

// ---------------------------------------------------------------------
// run driver
// ---------------------------------------------------------------------

/// One sampled row of `contour_series.csv`.
#[derive(Debug, Clone, Copy)]
pub struct ContourSample {
    pub t: f64,
    pub area_plus: f64,
    pub area_minus: f64,
    pub perimeter_plus: f64,
    pub perimeter_minus: f64,
    /// 0 while the patches are disjoint.
    pub overlap_area: f64,
}

/// Everything the driver measured, kept in memory so tests and the
/// acceptance harness can reuse a finished run without re-reading files.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub scenario_name: String,
    pub out_dir: PathBuf,
    pub steps: u64,
    pub completed: bool,
    /// Field runs: one record per output time.
    pub records: Vec<DiagnosticsRecord>,
    /// Component count of F at the coarse threshold 0.1·‖F‖∞ per sample.
    pub components_tenth: Vec<(f64, usize)>,
    /// (t, from, to) transitions of the coarse component count.
    pub component_changes: Vec<(f64, usize, usize)>,
    /// First sample time with overlap above 10⁻³ of its Cauchy–Schwarz bound.
    pub first_overlap: Option<f64>,
    /// Contour runs: per-sample geometry.
    pub contour_series: Vec<ContourSample>,
    /// Merger pair only: (t, sup|ζ|, sup|ζ′|) against the analytic background.
    pub perturbation: Vec<(f64, f64, f64)>,
    /// Final contour state for post-run geometry checks.
    pub final_contours: Option<ContourPairState>,
    /// Detected merger time (point vortex: merger-ball entry; contours:
    /// first overlapping sample).
    pub merger_detected: Option<f64>,
    /// Closed-form prediction where one exists.
    pub predicted_merger: Option<f64>,
}

impl RunSummary {
    /// Relative drift of a conserved quantity across the sampled records:
    /// max_t |q(t) − q(0)| / |q(0)|.
    pub fn drift(&self, quantity: impl Fn(&DiagnosticsRecord) -> f64) -> f64 {
        let q0 = match self.records.first() {
            Some(r) => quantity(r),
            None => return 0.0,
        };
        let scale = if q0 == 0.0 { 1.0 } else { q0.abs() };
        self.records
            .iter()
            .map(|r| (quantity(r) - q0).abs() / scale)
            .fold(0.0, f64::max)
    }

    fn drifts_json(&self) -> serde_json::Value {
        if self.records.is_empty() {
            return serde_json::Value::Null;
        }
        json!({
            "l1_plus": self.drift(|r| r.l1_plus),
            "l2_plus": self.drift(|r| r.l2_plus),
            "linf_plus": self.drift(|r| r.linf_plus),
            "l1_minus": self.drift(|r| r.l1_minus),
            "l2_minus": self.drift(|r| r.l2_minus),
            "linf_minus": self.drift(|r| r.linf_minus),
        })
    }
}

/// Run a scenario, writing all artifacts into `out_dir`.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    run_scenario_with_echo(sc, out_dir, None)
}

/// [`run_scenario`] with the source configuration echoed into the manifest.
pub fn run_scenario_with_echo(
    sc: &Scenario,
    out_dir: &Path,
    config_echo: Option<&serde_json::Value>,
) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let mut summary = RunSummary {
        scenario_name: sc.name.clone(),
        out_dir: out_dir.to_path_buf(),
        ..RunSummary::default()
    };
    let outcome = match &sc.init {
        InitialData::Fields(sigma) => run_fields(sc, sigma, out_dir, &mut summary),
        InitialData::Contours { state, mode } => {
            run_contours(sc, state, *mode, out_dir, &mut summary)
        }
        InitialData::PointVortex {
            x0,
            y0,
            predicted_merger,
        } => run_vortex(sc, *x0, *y0, *predicted_merger, out_dir, &mut summary),
    };
    summary.completed = outcome.is_ok();
    let wall = started.elapsed().as_secs_f64();
    write_manifest(sc, &summary, wall, outcome.as_ref().err(), config_echo, out_dir)?;
    outcome?;
    Ok(summary)
}

fn effective_dt_max(sc: &Scenario) -> f64 {
    if sc.settings.dt_max > 0.0 {
        sc.settings.dt_max
    } else {
        f64::INFINITY
    }
}

fn run_fields(sc: &Scenario, sigma: &ScalarPair, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let mut solver = Solver::new(sigma.clone(), sc.variant, sc.nu_plus, sc.nu_minus)?;
    let dt_max = effective_dt_max(sc);
    let mut diag = DiagnosticsWriter::create(&out_dir.join("diagnostics.csv"))?;
    let mut overlap_floor = f64::INFINITY;
    let mut index = 0usize;
    loop {
        let state = solver.state();
        let rec = DiagnosticsRecord::measure(state);
        if !rec.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite diagnostics at t = {:.6}; last good snapshots are index {index}",
                rec.t
            )));
        }
        diag.write(&rec)?;

        // coarse component count (merger topology) and overlap event
        let f = state.f_field();
        let sup_f = f.max_abs();
        let comps = if sup_f > 0.0 {
            support_components(&f, 0.1 * sup_f).0
        } else {
            0
        };
        if let Some(&(_, last)) = summary.components_tenth.last() {
            if last != comps {
                summary.component_changes.push((rec.t, last, comps));
            }
        }
        summary.components_tenth.push((rec.t, comps));
        if index == 0 {
            overlap_floor = 1e-3 * rec.l2_plus * rec.l2_minus;
        }
        if summary.first_overlap.is_none() && rec.overlap > overlap_floor {
            summary.first_overlap = Some(rec.t);
            summary.merger_detected = Some(rec.t);
        }

        write_field_snapshot(
            &out_dir.join(format!("snap_plus_{index:04}.r2df")),
            &state.plus,
            state.time,
        )?;
        write_field_snapshot(
            &out_dir.join(format!("snap_minus_{index:04}.r2df")),
            &state.minus,
            state.time,
        )?;
        summary.records.push(rec);

        if state.time >= sc.settings.t_end - 1e-12 {
            break;
        }
        let target = ((index + 1) as f64 * sc.settings.output_every).min(sc.settings.t_end);
        solver.advance_to(target, dt_max)?;
        index += 1;
    }
    write_pgm(&out_dir.join("f_final.pgm"), &solver.state().f_field())?;
    summary.steps = solver.step_count();
    diag.finish()
}

fn run_contours(
    sc: &Scenario,
    state0: &ContourPairState,
    mode: ContourMode,
    out_dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    let mut sim = ContourSim::new(state0.clone(), mode);
    let dt_max = effective_dt_max(sc);
    // ζ is measured against the analytic merger background, which only
    // models the screened pair
    let track_perturbation = mode == ContourMode::ScreenedLeft;

    let mut series = BufWriter::new(File::create(out_dir.join("contour_series.csv"))?);
    writeln!(
        series,
        "t,area_plus,area_minus,perimeter_plus,perimeter_minus,overlap_area"
    )?;
    let mut pert_out = if track_perturbation {
        let mut w = BufWriter::new(File::create(out_dir.join("perturbation.csv"))?);
        writeln!(w, "t,zeta_sup,zeta_deriv_sup")?;
        Some(w)
    } else {
        None
    };

    let mut index = 0usize;
    loop {
        let st = &sim.state;
        write_contour_csv(&out_dir.join(format!("contour_plus_{index:04}.csv")), &st.plus)?;
        write_contour_csv(
            &out_dir.join(format!("contour_minus_{index:04}.csv")),
            &st.minus,
        )?;

        let overlap = contours_overlap(&st.plus, &st.minus)?;
        let sample = ContourSample {
            t: st.time,
            area_plus: st.plus.area(),
            area_minus: st.minus.area(),
            perimeter_plus: st.plus.perimeter(),
            perimeter_minus: st.minus.perimeter(),
            overlap_area: overlap.area(),
        };
        writeln!(
            series,
            "{},{},{},{},{},{}",
            sample.t,
            sample.area_plus,
            sample.area_minus,
            sample.perimeter_plus,
            sample.perimeter_minus,
            sample.overlap_area
        )?;
        if overlap.is_overlap() && summary.merger_detected.is_none() {
            summary.merger_detected = Some(st.time);
            summary.first_overlap = Some(st.time);
        }
        summary.contour_series.push(sample);

        if let Some(w) = pert_out.as_mut() {
            let bg = analytic_background(st.time, st.r_scale, st.d_offset, st.plus.len())?;
            let (zeta, dzeta) = crate::contour::perturbation_norm(st, &bg)?;
            writeln!(w, "{},{},{}", st.time, zeta, dzeta)?;
            summary.perturbation.push((st.time, zeta, dzeta));
        }

        if st.time >= sc.settings.t_end - 1e-12 {
            break;
        }
        let target = ((index + 1) as f64 * sc.settings.output_every).min(sc.settings.t_end);
        sim.advance_to(target, dt_max)?;
        index += 1;
    }
    series.flush()?;
    if let Some(mut w) = pert_out {
        w.flush()?;
    }
    summary.steps = sim.steps();
    summary.final_contours = Some(sim.state.clone());
    Ok(())
}

fn run_vortex(
    sc: &Scenario,
    x0: f64,
    y0: f64,
    predicted: f64,
    out_dir: &Path,
    summary: &mut RunSummary,
) -> Result<()> {
    let dt = if sc.settings.dt_max > 0.0 {
        sc.settings.dt_max
    } else {
        predicted / 20_000.0
    };
    let traj = pv_integrate(PointVortexState::new(x0, y0), dt, sc.settings.t_end)?;
    let mut out = BufWriter::new(File::create(out_dir.join("trajectory.csv"))?);
    writeln!(out, "t,x,y")?;
    let mut next_out = 0.0;
    for (k, &(t, x, y)) in traj.samples.iter().enumerate() {
        if t >= next_out - 1e-12 || k + 1 == traj.samples.len() {
            writeln!(out, "{t},{x},{y}")?;
            while next_out <= t + 1e-12 {
                next_out += sc.settings.output_every;
            }
        }
    }
    out.flush()?;
    summary.steps = traj.samples.len() as u64 - 1;
    summary.merger_detected = traj.merger_time;
    summary.predicted_merger = Some(predicted);
    Ok(())
}

fn write_manifest(
    sc: &Scenario,
    summary: &RunSummary,
    wall_seconds: f64,
    error: Option<&Error>,
    config_echo: Option<&serde_json::Value>,
    out_dir: &Path,
) -> Result<()> {
    let resolution = match &sc.init {
        InitialData::Fields(sigma) => json!({
            "n": sigma.grid().n,
            "box": sigma.grid().box_size,
        }),
        InitialData::Contours { state, .. } => json!({
            "nodes": state.plus.len(),
        }),
        InitialData::PointVortex { .. } => json!({}),
    };
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": sc.name,
        "variant": sc.variant.to_string(),
        "nu": [sc.nu_plus, sc.nu_minus],
        "resolution": resolution,
        "schedule": {
            "dt": sc.settings.dt_max,
            "t_end": sc.settings.t_end,
            "output_every": sc.settings.output_every,
        },
        "checks": sc.checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "steps": summary.steps,
        "wall_seconds": wall_seconds,
        "completed": summary.completed,
        "error": error.map(|e| e.to_string()),
        "drifts": summary.drifts_json(),
        "events": {
            "first_overlap": summary.first_overlap,
            "component_changes": summary.component_changes.iter()
                .map(|&(t, a, b)| json!([t, a, b])).collect::<Vec<_>>(),
            "merger_detected": summary.merger_detected,
            "predicted_merger": summary.predicted_merger,
        },
        "config": config_echo,
    });
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
    std::fs::write(out_dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

// ---------------------------------------------------------------------
// report regeneration
// ---------------------------------------------------------------------

fn indexed_files(dir: &Path, prefix: &str, suffix: &str) -> Result<Vec<(usize, PathBuf)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(rest) = name.strip_prefix(prefix).and_then(|r| r.strip_suffix(suffix)) {
            if let Ok(k) = rest.parse::<usize>() {
                out.push((k, entry.path()));
            }
        }
    }
    out.sort_by_key(|&(k, _)| k);
    Ok(out)
}

/// Regenerate derived artifacts (PGM heatmaps, contour overlays, and a
/// column summary) from the snapshots of a finished run — no
/// re-simulation.
pub fn regenerate_report(dir: &Path) -> Result<()> {
    if !dir.join("manifest.json").exists() {
        return Err(Error::Config(format!(
            "{}: no manifest.json — not a run directory",
            dir.display()
        )));
    }

    // field heatmaps: F = (σ₊+σ₋)/2 per snapshot index
    let plus_snaps = indexed_files(dir, "snap_plus_", ".r2df")?;
    for (k, plus_path) in &plus_snaps {
        let minus_path = dir.join(format!("snap_minus_{k:04}.r2df"));
        if !minus_path.exists() {
            continue;
        }
        let (plus, _) = read_field_snapshot(plus_path)?;
        let (minus, _) = read_field_snapshot(&minus_path)?;
        if plus.grid.n != minus.grid.n {
            return Err(Error::Config(format!(
                "snapshot pair {k} mixes resolutions {} and {}",
                plus.grid.n, minus.grid.n
            )));
        }
        let mut f = ScalarField::zeros(plus.grid);
        for (slot, (a, b)) in f
            .values
            .iter_mut()
            .zip(plus.values.iter().zip(minus.values.iter()))
        {
            *slot = 0.5 * (a + b);
        }
        write_pgm(&dir.join(format!("f_{k:04}.pgm")), &f)?;
    }

    // contour overlays on a frame shared across the whole run
    let plus_curves = indexed_files(dir, "contour_plus_", ".csv")?;
    if !plus_curves.is_empty() {
        let mut frames = Vec::new();
        let mut bounds = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (k, plus_path) in &plus_curves {
            let minus_path = dir.join(format!("contour_minus_{k:04}.csv"));
            if !minus_path.exists() {
                continue;
            }
            let plus = read_contour_csv(plus_path)?;
            let minus = read_contour_csv(&minus_path)?;
            for z in plus.iter().chain(minus.iter()) {
                bounds.0 = bounds.0.min(z.re);
                bounds.1 = bounds.1.max(z.re);
                bounds.2 = bounds.2.min(z.im);
                bounds.3 = bounds.3.max(z.im);
            }
            frames.push((*k, plus, minus));
        }
        let pad_x = 0.05 * (bounds.1 - bounds.0).max(1e-12);
        let pad_y = 0.05 * (bounds.3 - bounds.2).max(1e-12);
        let frame = (
            bounds.0 - pad_x,
            bounds.1 + pad_x,
            bounds.2 - pad_y,
            bounds.3 + pad_y,
        );
        for (k, plus, minus) in &frames {
            write_contour_pgm(
                &dir.join(format!("contours_{k:04}.pgm")),
                plus,
                minus,
                frame,
                512,
            )?;
        }
    }

    // column summary of the diagnostics series
    let diag_path = dir.join("diagnostics.csv");
    if diag_path.exists() {
        let text = std::fs::read_to_string(&diag_path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("diagnostics.csv is empty".into()))?;
        if header != DIAGNOSTICS_HEADER {
            return Err(Error::Config(format!(
                "diagnostics.csv header mismatch: {header:?}"
            )));
        }
        let columns: Vec<&str> = header.split(',').collect();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (k, line) in lines.enumerate() {
            let vals: Option<Vec<f64>> = line.split(',').map(|c| c.parse::<f64>().ok()).collect();
            match vals {
                Some(v) if v.len() == columns.len() => rows.push(v),
                _ => {
                    return Err(Error::Config(format!(
                        "diagnostics.csv row {} is malformed",
                        k + 2
                    )))
                }
            }
        }
        if !rows.is_empty() {
            let mut out = BufWriter::new(File::create(dir.join("summary.csv"))?);
            writeln!(out, "column,initial,final,min,max,rel_drift")?;
            for (c, name) in columns.iter().enumerate().skip(1) {
                let series: Vec<f64> = rows.iter().map(|r| r[c]).collect();
                let initial = series[0];
                let fin = *series.last().unwrap();
                let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let scale = if initial == 0.0 { 1.0 } else { initial.abs() };
                let drift = series
                    .iter()
                    .map(|v| (v - initial).abs() / scale)
                    .fold(0.0, f64::max);
                writeln!(out, "{name},{initial},{fin},{min},{max},{drift}")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
