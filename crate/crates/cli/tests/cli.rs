//! End-to-end checks of the installed binary: artifact layout, exit
//! codes, and run-to-run determinism.

use safeland_core::imaging::pnm::write_pgm;
use safeland_core::imaging::Frame;
use safeland_core::sim::{CameraConfig, DroneConfig, ObstacleConfig, Scenario};
use std::path::Path;
use std::process::{Command, Output};

fn safeland(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_safeland"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn flat_scenario() -> Scenario {
    Scenario {
        schema_version: 1,
        name: "flat".into(),
        seed: 7,
        duration_s: 30.0,
        world: Default::default(),
        obstacles: Vec::new(),
        movers: Vec::new(),
        drone: DroneConfig {
            start_m: [0.0, 0.0],
            altitude_m: 10.0,
            cruise_speed_mps: 2.0,
            descent_speed_mps: 1.0,
        },
        camera: CameraConfig {
            focal_px: 200.0,
            width_px: 160,
            height_px: 120,
            fps: 4.0,
        },
        tuning: Default::default(),
    }
}

fn write_scenario(path: &Path, scenario: &Scenario) {
    std::fs::write(path, serde_json::to_string_pretty(scenario).unwrap()).unwrap();
}

#[test]
fn simulate_flat_scenario_lands_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("flat.json");
    write_scenario(&scenario_path, &flat_scenario());
    let out_dir = dir.path().join("run");

    let out = safeland(&[
        "simulate",
        "--scenario",
        scenario_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--trace",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["final_phase"], "Landed");
    let td = report["touchdown_m"].as_array().unwrap();
    assert!(td[0].as_f64().unwrap().abs() < 0.1);
    assert!(td[1].as_f64().unwrap().abs() < 0.1);

    assert!(out_dir.join("frames/000000.pgm").exists());
    // Depth frames only exist for descent ticks, so the earliest ones
    // are later than frame 0.
    assert!(std::fs::read_dir(out_dir.join("depth")).unwrap().count() > 0);
    for name in ["tracks.csv", "decisions.csv", "descent.csv"] {
        let text = std::fs::read_to_string(out_dir.join("traces").join(name)).unwrap();
        assert!(text.lines().count() >= 1, "{name} has a header");
    }
    let decisions = std::fs::read_to_string(out_dir.join("traces/decisions.csv")).unwrap();
    assert!(decisions.starts_with("frame_index,phase,target_plz_id,t_d,min_margin,verdict\n"));
    assert!(decisions.contains(",Scan,"));
}

#[test]
fn simulate_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("flat.json");
    write_scenario(&scenario_path, &flat_scenario());

    let mut artifacts = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = safeland(&[
            "simulate",
            "--scenario",
            scenario_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--trace",
        ]);
        assert_eq!(code(&out), 0);
        let mut bytes = Vec::new();
        for rel in [
            "report.json",
            "traces/tracks.csv",
            "traces/decisions.csv",
            "traces/descent.csv",
            "frames/000000.pgm",
        ] {
            bytes.push(std::fs::read(out_dir.join(rel)).unwrap());
        }
        artifacts.push(bytes);
    }
    assert_eq!(artifacts[0], artifacts[1]);
}

#[test]
fn simulate_rejects_bad_scenarios_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");

    std::fs::write(&path, "{\"schema_version\": 1, \"nam\": \"x\"}").unwrap();
    let out = safeland(&[
        "simulate",
        "--scenario",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 12);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("nam"), "error names the offending field: {msg}");

    let out = safeland(&[
        "simulate",
        "--scenario",
        dir.path().join("missing.json").to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 12);
}

#[test]
fn simulate_reports_no_zone_with_distinct_code() {
    // Boxes pitched so every pocket stays under the 3 m^2 floor.
    let mut scenario = flat_scenario();
    scenario.name = "clutter".into();
    scenario.duration_s = 5.0;
    let mut x = -7.0;
    while x < 7.0 {
        let mut y = -5.0;
        while y < 5.0 {
            scenario.obstacles.push(ObstacleConfig {
                footprint_m: vec![[x, y], [x + 0.6, y], [x + 0.6, y + 0.6], [x, y + 0.6]],
                height_m: 1.0,
                intensity: 40,
            });
            y += 1.4;
        }
        x += 1.4;
    }

    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("clutter.json");
    write_scenario(&scenario_path, &scenario);
    let out = safeland(&[
        "simulate",
        "--scenario",
        scenario_path.to_str().unwrap(),
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 10, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn detect_blank_image_reports_full_frame_zone() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("blank.pgm");
    write_pgm(&image, &Frame::filled(160, 120, 1, 255)).unwrap();

    let out_dir = dir.path().join("det");
    let out = safeland(&[
        "detect",
        "--image",
        image.to_str().unwrap(),
        "--altitude-m",
        "10",
        "--focal-px",
        "200",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let csv = std::fs::read_to_string(out_dir.join("plz.csv")).unwrap();
    let first = csv.lines().nth(1).expect("at least one candidate");
    let cols: Vec<&str> = first.split(',').collect();
    assert_eq!(
        cols[0..1],
        ["0"],
        "single-image runs use frame id 0: {first}"
    );
    // Largest circle in an edge-free 160x120 view spans the short side.
    let diameter_px: f64 = cols[3].parse().unwrap();
    assert!((diameter_px - 120.0).abs() <= 2.0, "got {diameter_px}");
    assert_eq!(cols[6], "1", "full-frame zone is admitted");
    assert!(out_dir.join("overlay.ppm").exists());
}

#[test]
fn detect_distinguishes_no_zone_from_failure() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("blank.pgm");
    write_pgm(&image, &Frame::filled(160, 120, 1, 255)).unwrap();

    // Low altitude: the whole view is far below the 3 m^2 floor.
    let out = safeland(&[
        "detect",
        "--image",
        image.to_str().unwrap(),
        "--altitude-m",
        "0.5",
        "--focal-px",
        "2000",
        "--out",
        dir.path().join("det").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 10);

    let out = safeland(&[
        "detect",
        "--image",
        dir.path().join("missing.pgm").to_str().unwrap(),
        "--altitude-m",
        "10",
        "--focal-px",
        "200",
        "--out",
        dir.path().join("det2").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 12);
}

#[test]
fn report_aggregates_means_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    // Two synthetic runs with zone errors 1% and 3%: pooled mean 2%.
    for (name, err) in [("a", 1.0), ("b", 3.0)] {
        let run = dir.path().join(name);
        std::fs::create_dir_all(&run).unwrap();
        let report = serde_json::json!({
            "schema_version": 1,
            "scenario": name,
            "final_phase": "Landed",
            "abort_reason": null,
            "touchdown_m": [0.0, 0.0],
            "elapsed_s": 1.0,
            "zones": [{
                "plz_id": 0,
                "admitted": true,
                "estimated_distance_m": 1.0,
                "truth_distance_m": 1.0,
                "distance_error_pct": err,
                "estimated_area_m2": 1.0,
                "truth_area_m2": 1.0,
                "area_error_pct": err,
            }],
            "movers": [],
            "decisions": {
                "frames_total": 1, "scan_frames": 1, "approach_frames": 0,
                "hold_frames": 0, "descend_frames": 0, "wait_frames": 0,
                "min_margin_s": null, "hold_intervals": [],
            },
        });
        std::fs::write(
            run.join("report.json"),
            serde_json::to_string_pretty(&report).unwrap(),
        )
        .unwrap();
    }

    let out = safeland(&[
        "report",
        dir.path().join("a").to_str().unwrap(),
        dir.path().join("b").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mean_line = stdout.lines().last().unwrap();
    assert!(mean_line.starts_with("mean"), "{stdout}");
    assert!(mean_line.contains("2.0000"), "{stdout}");

    // A missing run is listed and skipped, not fatal.
    let out = safeland(&[
        "report",
        dir.path().join("a").to_str().unwrap(),
        dir.path().join("missing").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipping"));
}
