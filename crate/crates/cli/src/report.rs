//! Versioned run report: per-zone and per-mover accuracy vs ground
//! truth, plus a decision trace summary.
//!
//! Reports from the same schema version serialize byte-stably for
//! identical runs: field order is fixed and no timestamps or host
//! details are recorded.

use safeland_core::decision::{ClearanceStatus, LandingPhase};
use safeland_core::mission::MissionOutcome;
use safeland_core::sim::{Scenario, World};
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: String,
    pub final_phase: String,
    pub abort_reason: Option<String>,
    pub touchdown_m: Option<[f64; 2]>,
    pub elapsed_s: f64,
    pub zones: Vec<ZoneRow>,
    pub movers: Vec<MoverRow>,
    pub decisions: DecisionSummary,
}

/// One scan candidate vs ground truth. `truth_distance_m` is the true
/// largest obstacle-free diameter centered exactly where the zone was
/// reported; percentage errors are |est - truth| / truth * 100.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZoneRow {
    pub plz_id: usize,
    pub admitted: bool,
    pub estimated_distance_m: f64,
    pub truth_distance_m: f64,
    pub distance_error_pct: f64,
    pub estimated_area_m2: f64,
    pub truth_area_m2: f64,
    pub area_error_pct: f64,
}

/// Configured mover vs the speed estimated by its paired track.
/// Pairing is by order of first appearance; a mover whose track never
/// produced a converged speed reports no estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoverRow {
    pub mover_index: usize,
    pub truth_speed_mps: f64,
    pub estimated_speed_mps: Option<f64>,
    pub speed_error_pct: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionSummary {
    pub frames_total: u64,
    pub scan_frames: u64,
    pub approach_frames: u64,
    pub hold_frames: u64,
    pub descend_frames: u64,
    /// Frames whose clearance verdict was Wait.
    pub wait_frames: u64,
    pub min_margin_s: Option<f64>,
    /// Contiguous [first, last] frame index ranges spent in Hold.
    pub hold_intervals: Vec<[u64; 2]>,
}

fn pct_error(est: f64, truth: f64) -> f64 {
    (est - truth).abs() / truth * 100.0
}

/// Builds the report for a finished run. The world is reconstructed at
/// its initial state to measure ground truth: zones are judged against
/// the static obstacle layout from the scan viewpoint, movers against
/// their configured speeds.
pub fn build_report(scenario: &Scenario, outcome: &MissionOutcome) -> RunReport {
    let world = World::new(scenario.clone()).expect("scenario validated before the run");
    let truth = world.ground_truth();

    let zones = outcome
        .scan_zones
        .iter()
        .enumerate()
        .map(|(plz_id, z)| {
            let center_w = world.px_to_world(z.center_px.x, z.center_px.y);
            let truth_distance = 2.0 * world.clearance_at(center_w);
            let truth_area = safeland_core::plz::zone_area(truth_distance);
            ZoneRow {
                plz_id,
                admitted: z.admitted,
                estimated_distance_m: z.diameter_m,
                truth_distance_m: truth_distance,
                distance_error_pct: pct_error(z.diameter_m, truth_distance),
                estimated_area_m2: z.area_m2,
                truth_area_m2: truth_area,
                area_error_pct: pct_error(z.area_m2, truth_area),
            }
        })
        .collect();

    // Last converged speed per track, in order of first appearance.
    let mut track_order: Vec<u64> = Vec::new();
    let mut last_speed: Vec<Option<f64>> = Vec::new();
    for row in &outcome.track_rows {
        let slot = match track_order.iter().position(|&id| id == row.track_id) {
            Some(i) => i,
            None => {
                track_order.push(row.track_id);
                last_speed.push(None);
                track_order.len() - 1
            }
        };
        if row.speed_mps.is_some() {
            last_speed[slot] = row.speed_mps;
        }
    }
    let movers = truth
        .mover_speeds_mps
        .iter()
        .enumerate()
        .map(|(mover_index, &truth_speed)| {
            let estimated = last_speed.get(mover_index).copied().flatten();
            MoverRow {
                mover_index,
                truth_speed_mps: truth_speed,
                estimated_speed_mps: estimated,
                speed_error_pct: estimated.map(|e| pct_error(e, truth_speed)),
            }
        })
        .collect();

    let mut decisions = DecisionSummary {
        frames_total: outcome.frames.len() as u64,
        scan_frames: 0,
        approach_frames: 0,
        hold_frames: 0,
        descend_frames: 0,
        wait_frames: 0,
        min_margin_s: None,
        hold_intervals: Vec::new(),
    };
    for f in &outcome.frames {
        match f.phase {
            LandingPhase::Scan => decisions.scan_frames += 1,
            LandingPhase::Approach => decisions.approach_frames += 1,
            LandingPhase::Hold => decisions.hold_frames += 1,
            LandingPhase::Descend => decisions.descend_frames += 1,
            _ => {}
        }
        if f.verdict == Some(ClearanceStatus::Wait) {
            decisions.wait_frames += 1;
        }
        if let Some(m) = f.margin_s {
            decisions.min_margin_s = Some(match decisions.min_margin_s {
                Some(cur) => cur.min(m),
                None => m,
            });
        }
        if f.phase == LandingPhase::Hold {
            match decisions.hold_intervals.last_mut() {
                Some(iv) if iv[1] + 1 == f.frame_index => iv[1] = f.frame_index,
                _ => decisions.hold_intervals.push([f.frame_index, f.frame_index]),
            }
        }
    }

    RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario: outcome.scenario_name.clone(),
        final_phase: format!("{:?}", outcome.final_phase),
        abort_reason: outcome.abort_reason.map(|r| format!("{r:?}")),
        touchdown_m: outcome.touchdown_m,
        elapsed_s: outcome.elapsed_s,
        zones,
        movers,
        decisions,
    }
}

/// Pooled means over every row of every report. `None` when no rows of
/// that kind exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub runs: usize,
    pub zone_rows: usize,
    pub mean_distance_error_pct: Option<f64>,
    pub mean_area_error_pct: Option<f64>,
    pub mover_rows: usize,
    pub mean_speed_error_pct: Option<f64>,
}

pub fn aggregate(reports: &[RunReport]) -> Aggregate {
    let mut dist = Vec::new();
    let mut area = Vec::new();
    let mut speed = Vec::new();
    for r in reports {
        for z in &r.zones {
            dist.push(z.distance_error_pct);
            area.push(z.area_error_pct);
        }
        for m in &r.movers {
            if let Some(e) = m.speed_error_pct {
                speed.push(e);
            }
        }
    }
    let mean = |v: &[f64]| {
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    Aggregate {
        runs: reports.len(),
        zone_rows: dist.len(),
        mean_distance_error_pct: mean(&dist),
        mean_area_error_pct: mean(&area),
        mover_rows: speed.len(),
        mean_speed_error_pct: mean(&speed),
    }
}
