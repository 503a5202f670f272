//! Configuration schema, artifact formats, and the run driver: exact key
//! paths in error messages, bit-exact snapshot round trips, the frozen
//! diagnostics CSV schema, PGM rendering, and byte-for-byte determinism
//! of repeated runs.

use reconnect2d_core::contour::{PatchContour, C64};
use reconnect2d_core::io::{
    read_contour_csv, read_field_snapshot, write_contour_csv, write_field_snapshot, write_pgm,
    DiagnosticsWriter, DIAGNOSTICS_HEADER,
};
use reconnect2d_core::diagnostics::DiagnosticsRecord;
use reconnect2d_core::scenario::{left_patch_merger, kirchhoff_ellipse};
use reconnect2d_core::{
    regenerate_report, run_scenario, Config, Error, ModelVariant, RunSettings, ScalarField,
    TorusGrid,
};

use std::f64::consts::PI;
use std::path::PathBuf;

/// Fresh per-test scratch directory under the system temp dir.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reconnect2d_{}_{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn config_err(text: &str) -> String {
    match Config::parse(text) {
        Err(Error::Config(msg)) => msg,
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn config_errors_name_exact_key_paths() {
    let cases: &[(&str, &str)] = &[
        (r#"{}"#, "init section is required"),
        (r#"{"init": {}}"#, "init.preset is required"),
        (
            r#"{"init": {"preset": "smooth_merger"}, "model": {"handedness": "up"}}"#,
            "model.handedness",
        ),
        (
            r#"{"init": {"preset": "smooth_merger"}, "model": {"nu_plus": -1}}"#,
            "model.nu_plus must be >= 0",
        ),
        (
            r#"{"init": {"preset": "smooth_merger"}, "bogus": {}}"#,
            "unknown key bogus",
        ),
        (
            r#"{"init": {"preset": "smooth_merger"}, "grid": {"n": 3.5}}"#,
            "grid.n must be a non-negative integer",
        ),
        (
            r#"{"init": {"preset": "smooth_merger", "r": 1.0}}"#,
            "init.r",
        ),
        (
            r#"{"init": {"preset": "warp_core"}}"#,
            "init.preset",
        ),
        (
            r#"{"init": {"preset": "patch_merger"}, "grid": {"n": 64}, "contour": {"nodes": 64}}"#,
            "mutually exclusive",
        ),
        (
            r#"{"init": {"preset": "patch_merger"}, "grid": {"n": 64}}"#,
            "remove the grid section",
        ),
        (
            r#"{"init": {"preset": "smooth_merger"}, "contour": {"nodes": 64}}"#,
            "remove the contour section",
        ),
        (
            r#"{"init": {"preset": "smooth_merger", "scale": "big"}}"#,
            "init.scale must be a number",
        ),
    ];
    for (text, needle) in cases {
        let msg = config_err(text);
        assert!(
            msg.contains(needle),
            "config {text} should mention {needle:?}, got {msg:?}"
        );
    }
    // the unknown-preset message lists every valid preset
    let msg = config_err(r#"{"init": {"preset": "warp_core"}}"#);
    for preset in [
        "smooth_merger",
        "smooth_merger_scaled",
        "patch_merger",
        "kirchhoff",
        "point_vortex",
    ] {
        assert!(msg.contains(preset), "{msg:?} missing {preset}");
    }
}

#[test]
fn minimal_config_gets_documented_defaults() {
    let cfg = Config::parse(r#"{"init": {"preset": "smooth_merger"}}"#).unwrap();
    assert_eq!(cfg.grid_n, 256);
    assert_eq!(cfg.grid_box, 12.8);
    assert_eq!(cfg.out_dir, PathBuf::from("out"));
    let sc = cfg.to_scenario().unwrap();
    assert_eq!(sc.variant, ModelVariant::RIGHT_SCREENED);
    assert_eq!(sc.settings.dt_max, 0.0);
    assert_eq!(sc.settings.t_end, 10.0);
    assert_eq!(sc.settings.output_every, 0.5);

    // preset-specific natural schedules
    let patch = Config::parse(r#"{"init": {"preset": "patch_merger"}}"#)
        .unwrap()
        .to_scenario()
        .unwrap();
    assert!((patch.settings.t_end - 9.0 * PI / 4.0).abs() < 1e-14);
    let pv = Config::parse(r#"{"init": {"preset": "point_vortex"}}"#)
        .unwrap()
        .to_scenario()
        .unwrap();
    assert!((pv.settings.t_end - 1.25 * 4.0 * PI).abs() < 1e-12);

    // explicit t_end reshapes the default cadence
    let cfg = Config::parse(
        r#"{"init": {"preset": "smooth_merger"}, "time": {"t_end": 2.0}}"#,
    )
    .unwrap();
    let sc = cfg.to_scenario().unwrap();
    assert_eq!(sc.settings.t_end, 2.0);
    assert_eq!(sc.settings.output_every, 0.1);
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let dir = scratch("snapshot");
    let grid = TorusGrid::new(16, 3.2).unwrap();
    let field = ScalarField::from_fn(grid, |x, y| (1.7 * x).sin() * (0.9 * y).cos() + x * y / 7.0);
    let path = dir.join("f.r2df");
    write_field_snapshot(&path, &field, 2.5).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 2080);

    let (back, t) = read_field_snapshot(&path).unwrap();
    assert_eq!(t, 2.5);
    assert_eq!(back.grid.n, 16);
    assert_eq!(back.grid.box_size.to_bits(), 3.2f64.to_bits());
    for (a, b) in field.values.iter().zip(back.values.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    // corrupt header / truncated payload / wrong version all name the file
    let garbage = dir.join("garbage.r2df");
    std::fs::write(&garbage, b"notasnapshot").unwrap();
    let msg = match read_field_snapshot(&garbage) {
        Err(Error::Config(m)) => m,
        other => panic!("expected config error, got {other:?}"),
    };
    assert!(msg.contains("R2DF magic"), "{msg}");

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 8);
    let short = dir.join("short.r2df");
    std::fs::write(&short, &bytes).unwrap();
    let msg = match read_field_snapshot(&short) {
        Err(Error::Config(m)) => m,
        other => panic!("expected config error, got {other:?}"),
    };
    assert!(msg.contains("2072 bytes, expected 2080"), "{msg}");

    let mut bytes = std::fs::read(&path).unwrap();
    bytes[4] = 99;
    let vers = dir.join("vers.r2df");
    std::fs::write(&vers, &bytes).unwrap();
    let msg = match read_field_snapshot(&vers) {
        Err(Error::Config(m)) => m,
        other => panic!("expected config error, got {other:?}"),
    };
    assert!(msg.contains("unsupported snapshot version 99"), "{msg}");
}

#[test]
fn contour_csv_round_trip_preserves_nodes_exactly() {
    let dir = scratch("contourcsv");
    let c = PatchContour::circle(C64::new(0.125, -0.0625), 0.05, 64, 1.0).unwrap();
    let path = dir.join("c.csv");
    write_contour_csv(&path, &c).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("alpha,x,y\n"));
    assert_eq!(text.lines().count(), 65);

    let back = read_contour_csv(&path).unwrap();
    assert_eq!(back.len(), 64);
    for (a, b) in c.nodes.iter().zip(back.iter()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    std::fs::write(&path, "x,y\n1,2\n").unwrap();
    assert!(matches!(read_contour_csv(&path), Err(Error::Config(_))));
}

#[test]
fn diagnostics_schema_is_frozen() {
    assert_eq!(
        DIAGNOSTICS_HEADER,
        "t,l1_plus,l2_plus,linf_plus,l1_minus,l2_minus,linf_minus,E1,E2,overlap,components_F,symmetry_defect"
    );
    let dir = scratch("diag");
    let path = dir.join("diagnostics.csv");
    let mut w = DiagnosticsWriter::create(&path).unwrap();
    w.write(&DiagnosticsRecord {
        t: 0.5,
        l1_plus: 1.0,
        l2_plus: 2.0,
        linf_plus: 3.0,
        l1_minus: 4.0,
        l2_minus: 5.0,
        linf_minus: 6.0,
        e1: -0.25,
        e2: -0.125,
        overlap: 0.0,
        components_f: 4,
        symmetry_defect: 0.0,
    })
    .unwrap();
    w.finish().unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(DIAGNOSTICS_HEADER));
    assert_eq!(
        lines.next(),
        Some("0.5,1,2,3,4,5,6,-0.25,-0.125,0,4,0")
    );
}

#[test]
fn pgm_maps_extremes_and_renders_zero_as_gray() {
    let dir = scratch("pgm");
    let grid = TorusGrid::new(16, 4.0).unwrap();
    // lone positive peak at node (i=1, j=15); top image row is j = 15
    let mut field = ScalarField::zeros(grid);
    field.values[1 * 16 + 15] = 2.0;
    let path = dir.join("f.pgm");
    write_pgm(&path, &field).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let header = b"P5\n16 16\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    let pixels = &bytes[header.len()..];
    assert_eq!(pixels.len(), 256);
    assert_eq!(pixels[1], 255, "peak must land in the top row, column i=1");
    // all other nodes sit at the midpoint of [-max, max]
    assert_eq!(pixels.iter().filter(|&&p| p == 128).count(), 255);

    let zero = ScalarField::zeros(grid);
    write_pgm(&path, &zero).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes[header.len()..].iter().all(|&p| p == 128));
}

/// Two runs of the same smooth scenario must produce byte-identical
/// artifacts (manifests may differ only in wall time).
#[test]
fn smooth_run_is_deterministic_and_reportable() {
    let text = r#"{
        "init": {"preset": "smooth_merger"},
        "grid": {"n": 128, "box": 6.4},
        "time": {"t_end": 0.4, "output_every": 0.2},
        "out": {"dir": "unused"}
    }"#;
    let sc = Config::parse(text).unwrap().to_scenario().unwrap();
    let dir_a = scratch("det_a");
    let dir_b = scratch("det_b");
    let sum_a = run_scenario(&sc, &dir_a).unwrap();
    let sum_b = run_scenario(&sc, &dir_b).unwrap();

    assert!(sum_a.completed && sum_b.completed);
    assert_eq!(sum_a.records.len(), 3); // t = 0, 0.2, 0.4
    assert_eq!(sum_a.steps, sum_b.steps);
    assert_eq!(sum_a.components_tenth[0].1, 4, "four separated bumps");

    for name in [
        "diagnostics.csv",
        "snap_plus_0000.r2df",
        "snap_minus_0000.r2df",
        "snap_plus_0002.r2df",
        "snap_minus_0002.r2df",
        "f_final.pgm",
    ] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // manifests agree after dropping the wall clock
    let mut man_a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir_a.join("manifest.json")).unwrap())
            .unwrap();
    let mut man_b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir_b.join("manifest.json")).unwrap())
            .unwrap();
    man_a["wall_seconds"] = serde_json::Value::Null;
    man_b["wall_seconds"] = serde_json::Value::Null;
    assert_eq!(man_a, man_b);
    assert_eq!(man_a["completed"], serde_json::Value::Bool(true));
    assert_eq!(man_a["checks"].as_array().unwrap().len(), 8);
    assert_eq!(man_a["resolution"]["n"], serde_json::json!(128));

    // conservation drifts recorded and small on this short ideal run
    let drift = man_a["drifts"]["l2_plus"].as_f64().unwrap();
    assert!(drift >= 0.0 && drift < 1e-4, "unexpected L2 drift {drift}");

    // report regeneration: per-snapshot F heatmaps + column summary
    regenerate_report(&dir_a).unwrap();
    for k in 0..3 {
        assert!(dir_a.join(format!("f_{k:04}.pgm")).exists());
    }
    let summary = std::fs::read_to_string(dir_a.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("column,initial,final,min,max,rel_drift"));
    assert_eq!(lines.count(), 11, "one summary row per diagnostics column");
}

#[test]
fn t_end_zero_records_the_initial_sample_only() {
    let text = r#"{
        "init": {"preset": "smooth_merger"},
        "grid": {"n": 128, "box": 6.4},
        "time": {"t_end": 0.0}
    }"#;
    let sc = Config::parse(text).unwrap().to_scenario().unwrap();
    let dir = scratch("tzero");
    let summary = run_scenario(&sc, &dir).unwrap();
    assert_eq!(summary.records.len(), 1);
    assert_eq!(summary.steps, 0);
    assert!(dir.join("snap_plus_0000.r2df").exists());
    assert!(!dir.join("snap_plus_0001.r2df").exists());
    assert!(dir.join("f_final.pgm").exists());
}

#[test]
fn point_vortex_run_attaches_prediction_and_trajectory() {
    let cfg = Config::parse(r#"{"init": {"preset": "point_vortex"}}"#).unwrap();
    let sc = cfg.to_scenario().unwrap();
    let dir = scratch("pv");
    let summary = run_scenario(&sc, &dir).unwrap();
    let predicted = summary.predicted_merger.unwrap();
    assert!((predicted - 4.0 * PI).abs() < 1e-12);
    let detected = summary.merger_detected.expect("merger inside the horizon");
    assert!((detected - predicted).abs() / predicted < 0.01);

    let text = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y"));
    assert!(lines.count() > 50, "output cadence should keep ~100 rows");

    let man: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(man["resolution"], serde_json::json!({}));
    assert!(man["events"]["merger_detected"].as_f64().is_some());
}

#[test]
fn contour_runs_write_series_overlays_and_perturbation() {
    let dir = scratch("patch");
    let settings = RunSettings {
        dt_max: 0.0,
        t_end: 0.3,
        output_every: 0.15,
    };
    let sc = left_patch_merger(0.05, 0.025, 64, settings).unwrap();
    let summary = run_scenario(&sc, &dir).unwrap();
    assert_eq!(summary.contour_series.len(), 3);
    assert!(summary.perturbation.len() == 3, "merger pair tracks ζ");
    assert!(dir.join("contour_plus_0002.csv").exists());

    let series = std::fs::read_to_string(dir.join("contour_series.csv")).unwrap();
    assert!(series.starts_with(
        "t,area_plus,area_minus,perimeter_plus,perimeter_minus,overlap_area\n"
    ));
    let pert = std::fs::read_to_string(dir.join("perturbation.csv")).unwrap();
    assert!(pert.starts_with("t,zeta_sup,zeta_deriv_sup\n"));
    assert_eq!(pert.lines().count(), 4);

    regenerate_report(&dir).unwrap();
    assert!(dir.join("contours_0000.pgm").exists());
    assert!(dir.join("contours_0002.pgm").exists());

    // the rigid-ellipse preset is unscreened: no background to compare to
    let dir2 = scratch("kirchhoff");
    let settings = RunSettings {
        dt_max: 0.0,
        t_end: 0.2,
        output_every: 0.1,
    };
    let sc = kirchhoff_ellipse(1.0, 128, settings).unwrap();
    let summary = run_scenario(&sc, &dir2).unwrap();
    assert!(summary.perturbation.is_empty());
    assert!(!dir2.join("perturbation.csv").exists());
    assert!(dir2.join("contour_series.csv").exists());
}

#[test]
fn report_refuses_directories_without_a_manifest() {
    let dir = scratch("notarun");
    let msg = match regenerate_report(&dir) {
        Err(Error::Config(m)) => m,
        other => panic!("expected config error, got {other:?}"),
    };
    assert!(msg.contains("not a run directory"), "{msg}");
}
