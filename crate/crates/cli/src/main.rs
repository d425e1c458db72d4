//! safeland: run landing scenarios end to end, detect landing zones in
//! single images, and aggregate run reports.
//!
//! Exit codes are a stable contract:
//!   0  success (scenario landed, or detect found an admitted zone)
//!   10 pipeline completed but found no admitted landing zone
//!   11 mission aborted (timeout before touchdown)
//!   12 configuration error (bad flags, unreadable or invalid inputs)
//!   13 artifact write failure

mod artifacts;
mod report;

use clap::{Args, Parser, Subcommand};
use safeland_core::imaging::pnm::{read_pgm, read_ppm};
use safeland_core::imaging::{canny_edges, CannyParams};
use safeland_core::mission::{run_mission_with, AbortReason, MissionEvent};
use safeland_core::plz::{detect_zone_candidates, CameraModel};
use safeland_core::sim::Scenario;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

pub const EXIT_NO_PLZ: u8 = 10;
pub const EXIT_ABORTED: u8 = 11;
pub const EXIT_CONFIG: u8 = 12;
pub const EXIT_IO: u8 = 13;

/// Error carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: EXIT_CONFIG,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError {
            message: format!("{}: {err}", path.display()),
            code: EXIT_IO,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "safeland",
    version,
    about = "Safe-landing pipeline: scenario simulator, zone detector, report aggregator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario end to end; write frames, traces, and report.json
    Simulate(SimulateArgs),
    /// Detect landing zones in one PGM/PPM image; write CSV and overlay
    Detect(DetectArgs),
    /// Aggregate report.json files from finished runs into mean errors
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario file (JSON, schema_version 1)
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (frames/, depth/, traces/, report.json)
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the clearance margin threshold in seconds [scenario default: 20]
    #[arg(long)]
    margin_s: Option<f64>,
    /// Override the minimum admitted zone area in square meters [scenario default: 3]
    #[arg(long)]
    min_area_m2: Option<f64>,
    /// Override the camera frame rate in frames per second
    #[arg(long)]
    fps: Option<f64>,
    /// Also write per-tick CSV traces under traces/
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct DetectArgs {
    /// Input image, binary PGM (P5) or PPM (P6)
    #[arg(long)]
    image: PathBuf,
    /// Camera altitude above flat ground in meters
    #[arg(long)]
    altitude_m: f64,
    /// Focal length in pixels
    #[arg(long)]
    focal_px: f64,
    /// Output directory (plz.csv, overlay.ppm)
    #[arg(long)]
    out: PathBuf,
    /// Minimum admitted zone area in square meters
    #[arg(long, default_value_t = 3.0)]
    min_area_m2: f64,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directories, each holding a report.json
    #[arg(required = true)]
    runs: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Detect(args) => cmd_detect(&args),
        Command::Report(args) => cmd_report(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("safeland: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn make_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn load_scenario(args: &SimulateArgs) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| CliError::config(format!("{}: {e}", args.scenario.display())))?;
    let mut scenario: Scenario = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", args.scenario.display())))?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(margin) = args.margin_s {
        scenario.tuning.decision.margin_s = margin;
    }
    if let Some(min_area) = args.min_area_m2 {
        scenario.tuning.min_zone_area_m2 = min_area;
    }
    if let Some(fps) = args.fps {
        scenario.camera.fps = fps;
    }
    scenario
        .validate()
        .map_err(|e| CliError::config(format!("{}: {e}", args.scenario.display())))?;
    Ok(scenario)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8, CliError> {
    let scenario = load_scenario(args)?;
    let frames_dir = args.out.join("frames");
    let depth_dir = args.out.join("depth");
    make_dir(&frames_dir)?;
    make_dir(&depth_dir)?;

    let mut dump_err: Option<CliError> = None;
    let outcome = run_mission_with(&scenario, |event| {
        if dump_err.is_some() {
            return;
        }
        let result = match event {
            MissionEvent::Frame { frame_index, frame } => {
                artifacts::dump_frame(&frames_dir, frame_index, frame)
            }
            MissionEvent::Depth { frame_index, depth } => {
                artifacts::dump_depth(&depth_dir, frame_index, depth)
            }
        };
        if let Err(e) = result {
            dump_err = Some(e);
        }
    })
    .map_err(|e| CliError::config(format!("{}: {e}", args.scenario.display())))?;
    if let Some(e) = dump_err {
        return Err(e);
    }

    if args.trace {
        let traces = args.out.join("traces");
        make_dir(&traces)?;
        artifacts::write_track_csv(&traces.join("tracks.csv"), &outcome.track_rows)?;
        artifacts::write_decision_csv(&traces.join("decisions.csv"), &outcome.frames)?;
        artifacts::write_descent_csv(&traces.join("descent.csv"), &outcome.descent)?;
    }

    let run_report = report::build_report(&scenario, &outcome);
    let report_path = args.out.join("report.json");
    let mut json = serde_json::to_string_pretty(&run_report)
        .map_err(|e| CliError::io(&report_path, e))?;
    json.push('\n');
    std::fs::write(&report_path, json).map_err(|e| CliError::io(&report_path, e))?;

    match run_report.touchdown_m {
        Some([x, y]) => println!(
            "{}: landed at ({x:.3}, {y:.3}) after {:.2} s",
            run_report.scenario, run_report.elapsed_s
        ),
        None => println!(
            "{}: {}{} after {:.2} s",
            run_report.scenario,
            run_report.final_phase,
            run_report
                .abort_reason
                .as_deref()
                .map(|r| format!(" ({r})"))
                .unwrap_or_default(),
            run_report.elapsed_s
        ),
    }

    Ok(match outcome.abort_reason {
        None => 0,
        Some(AbortReason::NoZoneFound) => EXIT_NO_PLZ,
        Some(AbortReason::Timeout) => EXIT_ABORTED,
    })
}

fn read_image(path: &Path) -> Result<safeland_core::imaging::Frame, CliError> {
    let magic = std::fs::read(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let loaded = match magic.get(..2) {
        Some(b"P5") => read_pgm(path),
        Some(b"P6") => read_ppm(path),
        _ => {
            return Err(CliError::config(format!(
                "{}: not a binary PGM (P5) or PPM (P6) image",
                path.display()
            )))
        }
    };
    loaded.map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn cmd_detect(args: &DetectArgs) -> Result<u8, CliError> {
    let image = read_image(&args.image)?;
    let cam = CameraModel::new(
        args.focal_px,
        args.altitude_m,
        image.width(),
        image.height(),
    )
    .map_err(|e| CliError::config(e.to_string()))?;
    let edges = canny_edges(&image, &CannyParams::default())
        .map_err(|e| CliError::config(e.to_string()))?;
    let zones = detect_zone_candidates(&edges, &cam, args.min_area_m2)
        .map_err(|e| CliError::config(e.to_string()))?;

    make_dir(&args.out)?;
    artifacts::write_plz_csv(&args.out.join("plz.csv"), 0, &zones)?;
    artifacts::write_overlay(&args.out.join("overlay.ppm"), &image, &zones)?;

    let admitted = zones.iter().filter(|z| z.admitted).count();
    println!("{} candidates, {admitted} admitted", zones.len());
    Ok(if admitted > 0 { 0 } else { EXIT_NO_PLZ })
}

fn cmd_report(args: &ReportArgs) -> Result<u8, CliError> {
    let mut reports = Vec::new();
    let mut names = Vec::new();
    for dir in &args.runs {
        let path = dir.join("report.json");
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("safeland: skipping {}: {e}", dir.display());
                continue;
            }
        };
        match serde_json::from_str::<report::RunReport>(&text) {
            Ok(r) => {
                names.push(dir.display().to_string());
                reports.push(r);
            }
            Err(e) => eprintln!("safeland: skipping {}: {e}", dir.display()),
        }
    }
    if reports.is_empty() {
        return Err(CliError::config("no readable run reports"));
    }

    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    let mut table = String::new();
    writeln!(
        table,
        "{:<32} {:>6} {:>12} {:>12} {:>6} {:>12}",
        "run", "zones", "dist_err_%", "area_err_%", "tracks", "vel_err_%"
    )
    .expect("string write");
    for (name, r) in names.iter().zip(&reports) {
        let one = report::aggregate(std::slice::from_ref(r));
        writeln!(
            table,
            "{:<32} {:>6} {:>12} {:>12} {:>6} {:>12}",
            name,
            one.zone_rows,
            fmt_opt(one.mean_distance_error_pct),
            fmt_opt(one.mean_area_error_pct),
            one.mover_rows,
            fmt_opt(one.mean_speed_error_pct),
        )
        .expect("string write");
    }
    let all = report::aggregate(&reports);
    writeln!(
        table,
        "{:<32} {:>6} {:>12} {:>12} {:>6} {:>12}",
        "mean",
        all.zone_rows,
        fmt_opt(all.mean_distance_error_pct),
        fmt_opt(all.mean_area_error_pct),
        all.mover_rows,
        fmt_opt(all.mean_speed_error_pct),
    )
    .expect("string write");
    print!("{table}");
    Ok(0)
}
