//! End-to-end mission loop: scan for zones, approach the best one, hold
//! while moving traffic clears, descend on depth and ToF, touch down.
//!
//! Sensing policy: the tracker only ingests frames captured while the
//! drone hovers (Scan and Hold). It is reset on arrival above the target
//! and again when descent begins, so ego-motion never masquerades as
//! object motion. After each reset a short warmup forces Wait until the
//! tracker has seen enough frames to trust its verdicts.

use crate::decision::{
    clearance_decision, drone_eta, select_plz, step_phase, ClearanceStatus, ClearanceVerdict,
    DecisionError, LandingPhase, PhaseContext,
};
use crate::descent::{
    analyze_quadrants, descend_step, expected_nadir_depth, tof_consistency, Consistency,
    DepthFrame, DescentError, Maneuver,
};
use crate::geometry::Point2;
use crate::imaging::{canny_edges, Frame, ImagingError};
use crate::plz::{detect_landing_zones, detect_zone_candidates, LandingZone, PlzError};
use crate::sim::{Scenario, SimError, World};
use crate::tracking::{time_to_reach, Reach, Tracker, TrackingError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MissionError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Plz(#[from] PlzError),
    #[error(transparent)]
    Tracking(#[from] TrackingError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Descent(#[from] DescentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbortReason {
    /// Scanning never produced an admitted zone.
    NoZoneFound,
    /// The scenario clock ran out before touchdown.
    Timeout,
}

/// One row of the per-frame decision trace. Pose and phase are sampled
/// when the frame is captured, before the tick's motion; `phase_after`
/// shows the transition the tick produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_index: u64,
    pub time_s: f64,
    pub phase: LandingPhase,
    pub phase_after: LandingPhase,
    pub x_m: f64,
    pub y_m: f64,
    pub altitude_m: f64,
    pub target_plz: Option<usize>,
    pub t_d_s: Option<f64>,
    /// Minimum clearance margin; `None` while not evaluating or when no
    /// moving object bounds it.
    pub margin_s: Option<f64>,
    pub verdict: Option<ClearanceStatus>,
    pub blocking_object: Option<u64>,
    /// True while the post-reset warmup forced this verdict to Wait.
    pub warmup: bool,
    pub tracks: usize,
    pub maneuver: Option<Maneuver>,
    pub tof_range_m: Option<f64>,
    pub tof_saturated: bool,
}

/// One row per descent tick, mirroring the depth-driven control inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentRecord {
    pub tick: u64,
    pub frame_index: u64,
    pub altitude_m: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub quadrant_avg_m: [Option<f64>; 4],
    pub chosen_quadrant: Option<usize>,
    pub tof_range_m: f64,
    pub tof_saturated: bool,
    pub consistency: Consistency,
    pub maneuver: Maneuver,
}

/// One observation row per (track, considered zone) at a sensing tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord {
    pub frame_index: u64,
    pub track_id: u64,
    pub centroid_row: f64,
    pub centroid_col: f64,
    pub speed_mps: Option<f64>,
    pub plz_id: usize,
    pub distance_m: Option<f64>,
    pub t_x_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionOutcome {
    pub scenario_name: String,
    pub final_phase: LandingPhase,
    pub abort_reason: Option<AbortReason>,
    /// Ground position at touchdown.
    pub touchdown_m: Option<[f64; 2]>,
    pub elapsed_s: f64,
    /// All zone candidates from the scan that chose the target.
    pub scan_zones: Vec<LandingZone>,
    /// Index of the chosen zone within the admitted subset.
    pub target_plz: Option<usize>,
    pub frames: Vec<FrameRecord>,
    pub descent: Vec<DescentRecord>,
    pub track_rows: Vec<TrackRecord>,
}

struct TargetLock {
    plz_id: usize,
    /// World point the approach steers to; follows the drone during
    /// descent so relocations shift the landing column.
    world_center: Point2,
    /// Zone geometry used for clearance, re-detected after arrival.
    zone: LandingZone,
}

fn reach_fields(reach: &Reach) -> (u64, Option<f64>, Option<f64>) {
    match reach {
        Reach::Unknown { object_id, .. } => (*object_id, None, None),
        Reach::Static {
            object_id,
            distance_m,
            ..
        } => (*object_id, Some(*distance_m), None),
        Reach::Moving(est) => (est.object_id, Some(est.distance_m), Some(est.t_x_seconds)),
    }
}

/// Runs the full pipeline over a scenario until touchdown, abort, or the
/// scenario clock expires.
/// Sensor data surfaced to [`run_mission_with`] observers as it is
/// captured. Depth events only occur during descent, after the frame
/// event of the same index.
#[derive(Debug)]
pub enum MissionEvent<'a> {
    Frame { frame_index: u64, frame: &'a Frame },
    Depth { frame_index: u64, depth: &'a DepthFrame },
}

pub fn run_mission(scenario: &Scenario) -> Result<MissionOutcome, MissionError> {
    run_mission_with(scenario, |_| {})
}

/// As [`run_mission`], invoking `on_event` for every captured sensor frame.
pub fn run_mission_with(
    scenario: &Scenario,
    mut on_event: impl FnMut(MissionEvent),
) -> Result<MissionOutcome, MissionError> {
    let mut world = World::new(scenario.clone())?;
    let tuning = scenario.tuning.clone();
    let fps = scenario.camera.fps;
    let dt = 1.0 / fps;
    let total_frames = (scenario.duration_s * fps).ceil() as u64;

    let mut tracker = Tracker::new(tuning.tracker, fps)?;
    let mut target: Option<TargetLock> = None;
    let mut warmup = 0u32;
    let mut scan_misses = 0u32;
    let mut need_redetect = false;

    let mut outcome = MissionOutcome {
        scenario_name: scenario.name.clone(),
        final_phase: LandingPhase::Scan,
        abort_reason: None,
        touchdown_m: None,
        elapsed_s: 0.0,
        scan_zones: Vec::new(),
        target_plz: None,
        frames: Vec::new(),
        descent: Vec::new(),
        track_rows: Vec::new(),
    };
    let mut descent_tick = 0u64;

    for frame_index in 0..total_frames {
        let phase = world.drone.phase;
        let time_s = world.time_s();
        let frame = world.render_frame();
        on_event(MissionEvent::Frame {
            frame_index,
            frame: &frame,
        });
        let cam = world.camera();

        let mut record = FrameRecord {
            frame_index,
            time_s,
            phase,
            phase_after: phase,
            x_m: world.drone.x_m,
            y_m: world.drone.y_m,
            altitude_m: world.drone.altitude_m,
            target_plz: target.as_ref().map(|t| t.plz_id),
            t_d_s: None,
            margin_s: None,
            verdict: None,
            blocking_object: None,
            warmup: false,
            tracks: 0,
            maneuver: None,
            tof_range_m: None,
            tof_saturated: false,
        };

        match phase {
            LandingPhase::Scan => {
                tracker.advance(frame_index, &frame, &cam)?;
                record.tracks = tracker.tracks().len();
                let edges = canny_edges(&frame, &tuning.canny)?;
                let candidates = detect_zone_candidates(&edges, &cam, tuning.min_zone_area_m2)?;
                let zones: Vec<LandingZone> =
                    candidates.iter().filter(|z| z.admitted).cloned().collect();
                if zones.is_empty() {
                    scan_misses += 1;
                    if scan_misses >= tuning.scan_frames {
                        world.drone.phase = LandingPhase::Abort;
                        record.phase_after = LandingPhase::Abort;
                        outcome.abort_reason = Some(AbortReason::NoZoneFound);
                        outcome.frames.push(record);
                        break;
                    }
                } else {
                    let mut verdicts = Vec::with_capacity(zones.len());
                    for (zid, zone) in zones.iter().enumerate() {
                        let reaches: Vec<Reach> = tracker
                            .tracks()
                            .iter()
                            .map(|t| {
                                time_to_reach(t, zid, zone, &cam, tuning.tracker.static_floor_mps)
                            })
                            .collect();
                        for reach in &reaches {
                            let (id, dist, tx) = reach_fields(reach);
                            let track = tracker.tracks().iter().find(|t| t.id == id);
                            if let Some(track) = track {
                                outcome.track_rows.push(TrackRecord {
                                    frame_index,
                                    track_id: id,
                                    centroid_row: track.last_centroid().y,
                                    centroid_col: track.last_centroid().x,
                                    speed_mps: track.velocity.as_ref().map(|v| v.speed_mps),
                                    plz_id: zid,
                                    distance_m: dist,
                                    t_x_s: tx,
                                });
                            }
                        }
                        let t_d = drone_eta(&world.drone, zone, &cam);
                        verdicts.push(clearance_decision(
                            zid,
                            zone,
                            &reaches,
                            t_d,
                            &tuning.decision,
                        ));
                    }
                    if let Some(sel) = select_plz(&verdicts, &zones, &world.drone, &cam) {
                        let zone = zones[sel].clone();
                        let world_center =
                            world.px_to_world(zone.center_px.x, zone.center_px.y);
                        let v = verdicts[sel];
                        record.target_plz = Some(sel);
                        record.t_d_s = Some(drone_eta(&world.drone, &zone, &cam));
                        record.margin_s = v.margin_seconds.is_finite().then_some(v.margin_seconds);
                        record.verdict = Some(v.status);
                        let ctx = PhaseContext {
                            above_target: false,
                            altitude_m: world.drone.altitude_m,
                            touchdown_alt_m: tuning.descent.touchdown_alt_m,
                        };
                        let (next, _) = step_phase(&world.drone, &v, &ctx, &tuning.decision)?;
                        world.drone.phase = next;
                        record.phase_after = next;
                        target = Some(TargetLock {
                            plz_id: sel,
                            world_center,
                            zone,
                        });
                        outcome.scan_zones = candidates;
                        outcome.target_plz = Some(sel);
                    }
                }
            }
            LandingPhase::Approach => {
                let lock = target.as_mut().expect("approach requires a target");
                let here = Point2::new(world.drone.x_m, world.drone.y_m);
                let offset = lock.world_center.sub(here);
                let dist = offset.norm();
                let step_len = world.drone.cruise_speed_mps * dt;
                if dist <= step_len {
                    world.drone.x_m = lock.world_center.x;
                    world.drone.y_m = lock.world_center.y;
                } else {
                    let dir = offset.scale(1.0 / dist);
                    world.drone.x_m += dir.x * step_len;
                    world.drone.y_m += dir.y * step_len;
                }
                let new_dist = lock
                    .world_center
                    .distance(Point2::new(world.drone.x_m, world.drone.y_m));
                let above = new_dist <= tuning.arrival_tol_m;
                // No fresh sensing while translating: hold a Wait verdict.
                let v = ClearanceVerdict {
                    plz_id: lock.plz_id,
                    status: ClearanceStatus::Wait,
                    margin_seconds: 0.0,
                    blocking_object: None,
                };
                let ctx = PhaseContext {
                    above_target: above,
                    altitude_m: world.drone.altitude_m,
                    touchdown_alt_m: tuning.descent.touchdown_alt_m,
                };
                let (next, _) = step_phase(&world.drone, &v, &ctx, &tuning.decision)?;
                world.drone.phase = next;
                record.phase_after = next;
                if next == LandingPhase::Hold {
                    tracker.reset();
                    warmup = tuning.warmup_frames;
                    need_redetect = true;
                }
            }
            LandingPhase::Hold => {
                tracker.advance(frame_index, &frame, &cam)?;
                record.tracks = tracker.tracks().len();
                let lock = target.as_mut().expect("hold requires a target");
                if need_redetect {
                    // First stationary frame above the target: re-anchor
                    // the zone's pixel center to this viewpoint and refresh
                    // its size from a matching detection. The approach
                    // point itself stays world-locked; re-centering on a
                    // border-limited detection would drag the drone after
                    // its own view edge indefinitely.
                    let edges = canny_edges(&frame, &tuning.canny)?;
                    let zones = detect_landing_zones(&edges, &cam, tuning.min_zone_area_m2)?;
                    let (expect_col, expect_row) = world.world_to_px(lock.world_center);
                    let expected = Point2::new(expect_col, expect_row);
                    lock.zone.center_px = expected;
                    if let Some(best) = zones.iter().min_by(|a, b| {
                        a.center_px
                            .distance(expected)
                            .total_cmp(&b.center_px.distance(expected))
                    }) {
                        if best.center_px.distance(expected) <= best.radius_px() / 2.0 {
                            lock.zone.diameter_px = best.diameter_px;
                            lock.zone.diameter_m = best.diameter_m;
                            lock.zone.area_m2 = best.area_m2;
                        }
                    }
                    need_redetect = false;
                }
                let t_d = drone_eta(&world.drone, &lock.zone, &cam);
                let reaches: Vec<Reach> = tracker
                    .tracks()
                    .iter()
                    .map(|t| {
                        time_to_reach(
                            t,
                            lock.plz_id,
                            &lock.zone,
                            &cam,
                            tuning.tracker.static_floor_mps,
                        )
                    })
                    .collect();
                for reach in &reaches {
                    let (id, dist, tx) = reach_fields(reach);
                    if let Some(track) = tracker.tracks().iter().find(|t| t.id == id) {
                        outcome.track_rows.push(TrackRecord {
                            frame_index,
                            track_id: id,
                            centroid_row: track.last_centroid().y,
                            centroid_col: track.last_centroid().x,
                            speed_mps: track.velocity.as_ref().map(|v| v.speed_mps),
                            plz_id: lock.plz_id,
                            distance_m: dist,
                            t_x_s: tx,
                        });
                    }
                }
                let mut v =
                    clearance_decision(lock.plz_id, &lock.zone, &reaches, t_d, &tuning.decision);
                if warmup > 0 {
                    warmup -= 1;
                    record.warmup = true;
                    v.status = ClearanceStatus::Wait;
                }
                record.t_d_s = Some(t_d);
                record.margin_s = v.margin_seconds.is_finite().then_some(v.margin_seconds);
                record.verdict = Some(v.status);
                record.blocking_object = v.blocking_object;
                let here = Point2::new(world.drone.x_m, world.drone.y_m);
                let ctx = PhaseContext {
                    above_target: lock.world_center.distance(here) <= tuning.arrival_tol_m,
                    altitude_m: world.drone.altitude_m,
                    touchdown_alt_m: tuning.descent.touchdown_alt_m,
                };
                let (next, _) = step_phase(&world.drone, &v, &ctx, &tuning.decision)?;
                world.drone.phase = next;
                record.phase_after = next;
                if next == LandingPhase::Descend {
                    // Vertical motion starts: centroid shifts from scale
                    // change would read as object motion, so stop sensing.
                    tracker.reset();
                }
            }
            LandingPhase::Descend => {
                let lock = target.as_mut().expect("descend requires a target");
                let depth = world.render_depth();
                on_event(MissionEvent::Depth {
                    frame_index,
                    depth: &depth,
                });
                let tof = world.tof_reading();
                record.tof_range_m = Some(tof.range_m);
                record.tof_saturated = tof.saturated;
                let quad = analyze_quadrants(&depth).ok();
                let expected =
                    expected_nadir_depth(world.drone.altitude_m, &cam, tuning.descent.central_window_px);
                let consistency = tof_consistency(&tof, expected, tuning.descent.tof_rel_tol);

                // The tracker is quiet during descent, so clearance stays
                // Cleared and depth plus ToF govern the vertical motion.
                let v = clearance_decision(lock.plz_id, &lock.zone, &[], 0.0, &tuning.decision);
                record.verdict = Some(v.status);
                let ctx = PhaseContext {
                    above_target: true,
                    altitude_m: world.drone.altitude_m,
                    touchdown_alt_m: tuning.descent.touchdown_alt_m,
                };
                let (next, _) = step_phase(&world.drone, &v, &ctx, &tuning.decision)?;
                if next == LandingPhase::Landed {
                    world.drone.phase = LandingPhase::Landed;
                    world.drone.altitude_m = 0.0;
                    record.phase_after = LandingPhase::Landed;
                    record.maneuver = Some(Maneuver::Touchdown);
                    outcome.touchdown_m = Some([world.drone.x_m, world.drone.y_m]);
                    outcome.frames.push(record);
                    break;
                }
                let (new_drone, maneuver) =
                    descend_step(&world.drone, &depth, &tof, &tuning.descent, dt)?;
                world.drone = new_drone;
                record.maneuver = Some(maneuver);
                record.phase_after = world.drone.phase;
                outcome.descent.push(DescentRecord {
                    tick: descent_tick,
                    frame_index,
                    altitude_m: world.drone.altitude_m,
                    x_m: world.drone.x_m,
                    y_m: world.drone.y_m,
                    quadrant_avg_m: quad.as_ref().map(|q| q.averages).unwrap_or([None; 4]),
                    chosen_quadrant: quad.as_ref().map(|q| q.chosen),
                    tof_range_m: tof.range_m,
                    tof_saturated: tof.saturated,
                    consistency,
                    maneuver,
                });
                descent_tick += 1;
                // The landing column follows the drone through lateral
                // relocations and nudges.
                lock.world_center = Point2::new(world.drone.x_m, world.drone.y_m);
                if world.drone.phase == LandingPhase::Hold {
                    // Quadrants went blind; reselect after a fresh warmup.
                    warmup = tuning.warmup_frames;
                    need_redetect = true;
                    tracker.reset();
                }
                if world.drone.phase == LandingPhase::Landed {
                    outcome.touchdown_m = Some([world.drone.x_m, world.drone.y_m]);
                    outcome.frames.push(record);
                    break;
                }
            }
            LandingPhase::Landed | LandingPhase::Abort => {
                outcome.frames.push(record);
                break;
            }
        }

        outcome.frames.push(record);
        world.step(dt);
    }

    if !world.drone.phase.is_terminal() {
        world.drone.phase = LandingPhase::Abort;
        outcome.abort_reason = Some(AbortReason::Timeout);
    }
    outcome.final_phase = world.drone.phase;
    outcome.elapsed_s = outcome
        .frames
        .last()
        .map(|r| r.time_s + dt)
        .unwrap_or(0.0);
    Ok(outcome)
}
