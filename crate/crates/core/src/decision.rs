//! Stage I landing decision: drone ETA, the 20-second clearance rule, zone
//! selection, and the mission phase machine.
//!
//! A zone is cleared when every tracked moving object's time to reach it
//! differs from the drone's own ETA by more than the margin, no static
//! object occupies it, and no object's motion is still unknown.

use crate::plz::{px_to_meters, CameraModel, LandingZone};
use crate::tracking::Reach;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("decision parameter {name} is out of range: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("illegal phase transition {from:?} -> {to:?}")]
    IllegalTransition { from: LandingPhase, to: LandingPhase },
}

/// Mission phase. Legal moves: Scan->Approach, Approach->{Hold, Descend},
/// Hold->{Approach, Descend}, Descend->{Hold, Landed}; Abort from anywhere;
/// staying in place is always legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LandingPhase {
    Scan,
    Approach,
    Hold,
    Descend,
    Landed,
    Abort,
}

impl LandingPhase {
    pub fn is_terminal(self) -> bool {
        matches!(self, LandingPhase::Landed | LandingPhase::Abort)
    }

    /// Whether moving from `self` to `next` respects the phase graph.
    pub fn allows(self, next: LandingPhase) -> bool {
        use LandingPhase::*;
        if next == self {
            return true;
        }
        if next == Abort {
            return true;
        }
        matches!(
            (self, next),
            (Scan, Approach)
                | (Approach, Hold)
                | (Approach, Descend)
                | (Hold, Approach)
                | (Hold, Descend)
                | (Descend, Hold)
                | (Descend, Landed)
        )
    }
}

/// Kinematic drone pose plus its commanded speed envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    pub x_m: f64,
    pub y_m: f64,
    pub altitude_m: f64,
    pub cruise_speed_mps: f64,
    pub descent_speed_mps: f64,
    pub phase: LandingPhase,
}

impl DroneState {
    pub fn validate(&self) -> Result<(), DecisionError> {
        if !(self.altitude_m >= 0.0) {
            return Err(DecisionError::InvalidParam {
                name: "altitude_m",
                value: self.altitude_m,
            });
        }
        if !(self.cruise_speed_mps > 0.0) {
            return Err(DecisionError::InvalidParam {
                name: "cruise_speed_mps",
                value: self.cruise_speed_mps,
            });
        }
        if !(self.descent_speed_mps > 0.0) {
            return Err(DecisionError::InvalidParam {
                name: "descent_speed_mps",
                value: self.descent_speed_mps,
            });
        }
        Ok(())
    }
}

/// Clearance and phase tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecisionParams {
    /// Clearance margin in seconds.
    pub margin_s: f64,
    /// When true, require T_x - T_d > margin (objects arriving sooner than
    /// the drone always block). Default is the absolute form |T_x - T_d|,
    /// which lets an early object pass through before the drone arrives.
    pub signed_margin: bool,
    /// Hold-phase speed as a fraction of cruise.
    pub slow_factor: f64,
    /// A Descend reverting to Hold is only allowed above this altitude;
    /// below it the descent obstacle check governs.
    pub hold_floor_alt_m: f64,
}

impl Default for DecisionParams {
    fn default() -> Self {
        DecisionParams {
            margin_s: 20.0,
            signed_margin: false,
            slow_factor: 0.25,
            hold_floor_alt_m: 3.0,
        }
    }
}

impl DecisionParams {
    pub fn validate(&self) -> Result<(), DecisionError> {
        if !(self.margin_s > 0.0) {
            return Err(DecisionError::InvalidParam {
                name: "margin_s",
                value: self.margin_s,
            });
        }
        if !(self.slow_factor > 0.0 && self.slow_factor <= 1.0) {
            return Err(DecisionError::InvalidParam {
                name: "slow_factor",
                value: self.slow_factor,
            });
        }
        if !(self.hold_floor_alt_m >= 0.0) {
            return Err(DecisionError::InvalidParam {
                name: "hold_floor_alt_m",
                value: self.hold_floor_alt_m,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClearanceStatus {
    Cleared,
    Wait,
}

/// Verdict for one zone against the whole track population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClearanceVerdict {
    pub plz_id: usize,
    pub status: ClearanceStatus,
    /// Minimum over moving objects of the margin; +infinity when no moving
    /// object is in play.
    pub margin_seconds: f64,
    /// Track id forcing a Wait: the minimal-margin mover, or a static or
    /// unknown-motion object.
    pub blocking_object: Option<u64>,
}

/// Drone ETA to the zone: horizontal ground distance at cruise speed plus
/// the vertical descent time. The zone center pixel is projected to ground
/// offsets from the point under the drone.
pub fn drone_eta(drone: &DroneState, plz: &LandingZone, cam: &CameraModel) -> f64 {
    let (pp_row, pp_col) = cam.principal_point();
    let dx_m = px_to_meters(plz.center_px.x - pp_col, cam);
    let dy_m = px_to_meters(plz.center_px.y - pp_row, cam);
    let horizontal_m = (dx_m * dx_m + dy_m * dy_m).sqrt();
    horizontal_m / drone.cruise_speed_mps + drone.altitude_m / drone.descent_speed_mps
}

/// Applies the margin rule to one zone.
///
/// Moving objects contribute `|T_x - T_d|` (or the signed form under
/// [`DecisionParams::signed_margin`]); static objects block only when their
/// centroid lies inside the zone circle; unknown-motion objects always
/// block, conservatively.
pub fn clearance_decision(
    plz_id: usize,
    zone: &LandingZone,
    reaches: &[Reach],
    t_d: f64,
    params: &DecisionParams,
) -> ClearanceVerdict {
    let zone_radius_m = zone.diameter_m / 2.0;
    let mut min_margin = f64::INFINITY;
    let mut min_margin_object: Option<u64> = None;
    let mut hard_block: Option<u64> = None;

    for reach in reaches {
        match *reach {
            Reach::Unknown { object_id, plz_id: pid } => {
                debug_assert_eq!(pid, plz_id);
                hard_block.get_or_insert(object_id);
            }
            Reach::Static {
                object_id,
                plz_id: pid,
                distance_m,
            } => {
                debug_assert_eq!(pid, plz_id);
                if distance_m <= zone_radius_m {
                    hard_block.get_or_insert(object_id);
                }
            }
            Reach::Moving(est) => {
                debug_assert_eq!(est.plz_id, plz_id);
                let margin = if params.signed_margin {
                    est.t_x_seconds - t_d
                } else {
                    (est.t_x_seconds - t_d).abs()
                };
                if margin < min_margin {
                    min_margin = margin;
                    min_margin_object = Some(est.object_id);
                }
            }
        }
    }

    let moving_ok = min_margin > params.margin_s;
    if moving_ok && hard_block.is_none() {
        ClearanceVerdict {
            plz_id,
            status: ClearanceStatus::Cleared,
            margin_seconds: min_margin,
            blocking_object: None,
        }
    } else {
        ClearanceVerdict {
            plz_id,
            status: ClearanceStatus::Wait,
            margin_seconds: min_margin,
            blocking_object: if moving_ok { hard_block } else { min_margin_object.or(hard_block) },
        }
    }
}

/// Picks the landing target: among cleared zones, the smallest drone ETA;
/// ties break toward larger area, then lower zone id. Returns the zone id.
pub fn select_plz(
    verdicts: &[ClearanceVerdict],
    zones: &[LandingZone],
    drone: &DroneState,
    cam: &CameraModel,
) -> Option<usize> {
    assert_eq!(verdicts.len(), zones.len(), "one verdict per zone");
    verdicts
        .iter()
        .zip(zones)
        .enumerate()
        .filter(|(_, (v, _))| v.status == ClearanceStatus::Cleared)
        .map(|(id, (_, z))| (drone_eta(drone, z, cam), z.area_m2, id))
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(b.1.total_cmp(&a.1))
                .then(a.2.cmp(&b.2))
        })
        .map(|(_, _, id)| id)
}

/// Caller-side situation for a phase step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseContext {
    /// Drone horizontally over the target (within the runner's arrival
    /// tolerance).
    pub above_target: bool,
    pub altitude_m: f64,
    /// Altitude at or below which a Descend completes as Landed.
    pub touchdown_alt_m: f64,
}

/// One state-machine step for the selected target. Returns the next phase
/// and the commanded translation/descent speed in m/s.
pub fn step_phase(
    drone: &DroneState,
    verdict: &ClearanceVerdict,
    ctx: &PhaseContext,
    params: &DecisionParams,
) -> Result<(LandingPhase, f64), DecisionError> {
    use ClearanceStatus::*;
    use LandingPhase::*;
    let (next, speed) = match drone.phase {
        Scan => (Approach, drone.cruise_speed_mps),
        Approach => {
            if !ctx.above_target {
                (Approach, drone.cruise_speed_mps)
            } else {
                match verdict.status {
                    Cleared => (Descend, drone.descent_speed_mps),
                    Wait => (Hold, params.slow_factor * drone.cruise_speed_mps),
                }
            }
        }
        Hold => {
            if !ctx.above_target {
                // Target moved or was re-selected: close the gap again.
                (Approach, drone.cruise_speed_mps)
            } else {
                match verdict.status {
                    Cleared => (Descend, drone.descent_speed_mps),
                    Wait => (Hold, params.slow_factor * drone.cruise_speed_mps),
                }
            }
        }
        Descend => {
            if ctx.altitude_m <= ctx.touchdown_alt_m {
                (Landed, 0.0)
            } else if verdict.status == Wait && ctx.altitude_m > params.hold_floor_alt_m {
                (Hold, params.slow_factor * drone.cruise_speed_mps)
            } else {
                (Descend, drone.descent_speed_mps)
            }
        }
        Landed => (Landed, 0.0),
        Abort => (Abort, 0.0),
    };
    if !drone.phase.allows(next) {
        return Err(DecisionError::IllegalTransition {
            from: drone.phase,
            to: next,
        });
    }
    Ok((next, speed))
}
