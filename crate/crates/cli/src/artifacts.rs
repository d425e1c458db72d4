//! Run artifacts: numbered frame dumps, per-tick CSV traces, and
//! annotated overlay images.
//!
//! All writers produce byte-stable output for identical inputs: fixed
//! column orders, fixed float formatting, no timestamps.

use safeland_core::descent::DepthFrame;
use safeland_core::imaging::pnm::{write_pgm, write_pgm16, write_ppm};
use safeland_core::imaging::Frame;
use safeland_core::mission::{DescentRecord, FrameRecord, TrackRecord};
use safeland_core::plz::LandingZone;
use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// Camera frame as `frames/NNNNNN.pgm`.
pub fn dump_frame(dir: &Path, frame_index: u64, frame: &Frame) -> Result<(), CliError> {
    let path = dir.join(format!("{frame_index:06}.pgm"));
    write_pgm(&path, frame).map_err(|e| CliError::io(&path, e))
}

/// Depth frame as `depth/NNNNNN.pgm`, 16-bit millimeters. Invalid depths
/// (no return) write as 0; anything beyond 65.535 m clamps to 65535.
pub fn dump_depth(dir: &Path, frame_index: u64, depth: &DepthFrame) -> Result<(), CliError> {
    let path = dir.join(format!("{frame_index:06}.pgm"));
    let mm: Vec<u16> = depth
        .data()
        .iter()
        .map(|&d| {
            if DepthFrame::is_valid(d) {
                (d * 1000.0).round().min(65535.0) as u16
            } else {
                0
            }
        })
        .collect();
    write_pgm16(&path, depth.width(), depth.height(), &mm).map_err(|e| CliError::io(&path, e))
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(&path, e))
}

/// One row per (track, considered zone) per sensing frame. `velocity_mps`
/// is empty until the velocity window fills; `t_x_s` is empty for static
/// or unknown reach.
pub fn write_track_csv(path: &Path, rows: &[TrackRecord]) -> Result<(), CliError> {
    let mut out =
        String::from("frame_index,track_id,centroid_row,centroid_col,velocity_mps,plz_id,distance_m,t_x_s\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{},{},{},{}",
            r.frame_index,
            r.track_id,
            r.centroid_row,
            r.centroid_col,
            opt(r.speed_mps),
            r.plz_id,
            opt(r.distance_m),
            opt(r.t_x_s),
        )
        .expect("string write");
    }
    write_text(path, &out)
}

/// Per-frame decision trace. `min_margin` is empty while clearance is not
/// being evaluated or when no moving object bounds it.
pub fn write_decision_csv(path: &Path, rows: &[FrameRecord]) -> Result<(), CliError> {
    let mut out = String::from("frame_index,phase,target_plz_id,t_d,min_margin,verdict\n");
    for r in rows {
        writeln!(
            out,
            "{},{:?},{},{},{},{}",
            r.frame_index,
            r.phase,
            r.target_plz.map(|i| i.to_string()).unwrap_or_default(),
            opt(r.t_d_s),
            opt(r.margin_s),
            r.verdict.map(|v| format!("{v:?}")).unwrap_or_default(),
        )
        .expect("string write");
    }
    write_text(path, &out)
}

fn maneuver_label(m: safeland_core::descent::Maneuver) -> String {
    use safeland_core::descent::Maneuver::*;
    match m {
        DescendStraight => "straight".into(),
        DescendToward { quadrant } => format!("toward_q{quadrant}"),
        Relocate { quadrant } => format!("relocate_q{quadrant}"),
        Touchdown => "touchdown".into(),
        HoldReselect => "hold_reselect".into(),
    }
}

/// Per-tick descent trace mirroring the controller inputs.
pub fn write_descent_csv(path: &Path, rows: &[DescentRecord]) -> Result<(), CliError> {
    let mut out = String::from(
        "tick,frame_index,altitude_m,x_m,y_m,q0_m,q1_m,q2_m,q3_m,chosen_quadrant,tof_range_m,consistency,maneuver\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{},{},{},{},{},{:.6},{:?},{}",
            r.tick,
            r.frame_index,
            r.altitude_m,
            r.x_m,
            r.y_m,
            opt(r.quadrant_avg_m[0]),
            opt(r.quadrant_avg_m[1]),
            opt(r.quadrant_avg_m[2]),
            opt(r.quadrant_avg_m[3]),
            r.chosen_quadrant.map(|q| q.to_string()).unwrap_or_default(),
            r.tof_range_m,
            r.consistency,
            maneuver_label(r.maneuver),
        )
        .expect("string write");
    }
    write_text(path, &out)
}

/// Zone candidate list: one row per candidate, admitted flag 0/1.
pub fn write_plz_csv(path: &Path, frame_id: u64, zones: &[LandingZone]) -> Result<(), CliError> {
    let mut out =
        String::from("frame_id,center_row,center_col,diameter_px,diameter_m,area_m2,admitted\n");
    for z in zones {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            frame_id,
            z.center_px.y,
            z.center_px.x,
            z.diameter_px,
            z.diameter_m,
            z.area_m2,
            u8::from(z.admitted),
        )
        .expect("string write");
    }
    write_text(path, &out)
}

/// Candidate circles on top of the source frame: admitted zones solid,
/// rejected ones dashed, both in the same fixed color, with a small
/// cross at each center.
pub fn draw_zone_overlay(base: &Frame, zones: &[LandingZone]) -> Frame {
    const ZONE_RGB: (u8, u8, u8) = (255, 210, 0);
    let mut img = to_rgb(base);
    for z in zones {
        let (row, col) = (z.center_px.y, z.center_px.x);
        draw_circle(&mut img, row, col, z.radius_px(), ZONE_RGB, !z.admitted);
        draw_cross(&mut img, row, col, 3, ZONE_RGB);
    }
    img
}

fn to_rgb(base: &Frame) -> Frame {
    if base.channels() == 3 {
        return base.clone();
    }
    let mut data = Vec::with_capacity(base.width() * base.height() * 3);
    for &g in base.data() {
        data.extend_from_slice(&[g, g, g]);
    }
    Frame::new(base.width(), base.height(), 3, data).expect("gray expands to rgb")
}

fn put(img: &mut Frame, row: i64, col: i64, rgb: (u8, u8, u8)) {
    if row < 0 || col < 0 || row as usize >= img.height() || col as usize >= img.width() {
        return;
    }
    let (r, c) = (row as usize, col as usize);
    img.set_sample(r, c, 0, rgb.0);
    img.set_sample(r, c, 1, rgb.1);
    img.set_sample(r, c, 2, rgb.2);
}

fn draw_circle(img: &mut Frame, row: f64, col: f64, radius: f64, rgb: (u8, u8, u8), dashed: bool) {
    // Step count keeps adjacent samples under a pixel apart.
    let steps = ((radius * std::f64::consts::TAU).ceil() as usize).max(16);
    for i in 0..steps {
        if dashed && (i / 6) % 2 == 1 {
            continue;
        }
        let theta = i as f64 / steps as f64 * std::f64::consts::TAU;
        let r = row + radius * theta.sin();
        let c = col + radius * theta.cos();
        put(img, r.round() as i64, c.round() as i64, rgb);
    }
}

fn draw_cross(img: &mut Frame, row: f64, col: f64, arm: i64, rgb: (u8, u8, u8)) {
    let (r0, c0) = (row.round() as i64, col.round() as i64);
    for d in -arm..=arm {
        put(img, r0 + d, c0, rgb);
        put(img, r0, c0 + d, rgb);
    }
}

/// Overlay written next to the CSV as `overlay.ppm`.
pub fn write_overlay(path: &Path, base: &Frame, zones: &[LandingZone]) -> Result<(), CliError> {
    let img = draw_zone_overlay(base, zones);
    write_ppm(path, &img).map_err(|e| CliError::io(path, e))
}
