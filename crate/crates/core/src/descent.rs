//! Stage II guided descent: quadrant occupancy from the depth frame,
//! triangulated flat-ground depth expectation, and the ToF cross-check for
//! obstacles directly below.
//!
//! Each tick the depth frame is split into four quadrants; the deepest
//! average marks the emptiest direction. The nadir ToF range is compared
//! against the analytic flat-ground expectation: a shortfall means
//! something sits under the drone and triggers a sideways relocation.

use crate::decision::{DroneState, LandingPhase};
use crate::plz::CameraModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// ToF sensor ceiling.
pub const MAX_TOF_RANGE_M: f64 = 60.0;

#[derive(Debug, Error)]
pub enum DescentError {
    #[error("frame dimension {0}x{1} too small to split into quadrants")]
    DegenerateFrame(usize, usize),
    #[error("depth data length {got} does not match {width}x{height}")]
    DataLength { width: usize, height: usize, got: usize },
    #[error("no quadrant has a valid depth average")]
    NoSafeQuadrant,
    #[error("descent parameter {name} is out of range: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("descend_step requires phase Descend, got {0:?}")]
    WrongPhase(LandingPhase),
}

/// Row-major metric depth per pixel; NaN marks an invalid measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    width: usize,
    height: usize,
    depth_m: Vec<f64>,
    pub cam: CameraModel,
}

impl DepthFrame {
    pub fn new(cam: CameraModel, depth_m: Vec<f64>) -> Result<Self, DescentError> {
        let (w, h) = (cam.width_px, cam.height_px);
        if depth_m.len() != w * h {
            return Err(DescentError::DataLength {
                width: w,
                height: h,
                got: depth_m.len(),
            });
        }
        Ok(DepthFrame {
            width: w,
            height: h,
            depth_m,
            cam,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.depth_m[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, depth: f64) {
        self.depth_m[row * self.width + col] = depth;
    }

    pub fn data(&self) -> &[f64] {
        &self.depth_m
    }

    /// A depth is usable when finite and positive.
    pub fn is_valid(depth: f64) -> bool {
        depth.is_finite() && depth > 0.0
    }
}

/// Half-open pixel ranges of one quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadrantBounds {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl QuadrantBounds {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.rows.0 && row < self.rows.1 && col >= self.cols.0 && col < self.cols.1
    }

    pub fn pixel_count(&self) -> usize {
        (self.rows.1 - self.rows.0) * (self.cols.1 - self.cols.0)
    }

    /// Quadrant center in pixel coordinates.
    pub fn center_px(&self) -> (f64, f64) {
        (
            (self.rows.0 + self.rows.1) as f64 / 2.0 - 0.5,
            (self.cols.0 + self.cols.1) as f64 / 2.0 - 0.5,
        )
    }
}

/// Splits a frame into quadrants ordered top-left, top-right, bottom-left,
/// bottom-right. Odd dimensions give the extra pixel to the right/bottom.
pub fn split_quadrants(width: usize, height: usize) -> Result<[QuadrantBounds; 4], DescentError> {
    if width < 2 || height < 2 {
        return Err(DescentError::DegenerateFrame(width, height));
    }
    let mid_col = width / 2;
    let mid_row = height / 2;
    Ok([
        QuadrantBounds { rows: (0, mid_row), cols: (0, mid_col) },
        QuadrantBounds { rows: (0, mid_row), cols: (mid_col, width) },
        QuadrantBounds { rows: (mid_row, height), cols: (0, mid_col) },
        QuadrantBounds { rows: (mid_row, height), cols: (mid_col, width) },
    ])
}

/// Flat-ground depth expectation for a pixel: with radial offset `r` from
/// the principal point and focal length `f`, the view angle is
/// `theta = atan(r/f)` and the expected depth is `H / cos(theta)`, computed
/// as `H * sqrt(f^2 + r^2) / f`. Always at least `H`.
pub fn pixel_depth_expected(pixel: (f64, f64), altitude_m: f64, cam: &CameraModel) -> f64 {
    debug_assert!(altitude_m > 0.0);
    let (pp_row, pp_col) = cam.principal_point();
    let dr = pixel.0 - pp_row;
    let dc = pixel.1 - pp_col;
    let r_sq = dr * dr + dc * dc;
    let f = cam.focal_px;
    altitude_m * (f * f + r_sq).sqrt() / f
}

/// Mean flat-ground expectation over a centered `window x window` pixel
/// block, the reference the nadir ToF range is checked against.
pub fn expected_nadir_depth(altitude_m: f64, cam: &CameraModel, window: usize) -> f64 {
    debug_assert!(window >= 1);
    let (pp_row, pp_col) = cam.principal_point();
    let half = window as f64 / 2.0;
    let r0 = ((pp_row - half).round().max(0.0)) as usize;
    let c0 = ((pp_col - half).round().max(0.0)) as usize;
    let r1 = (r0 + window).min(cam.height_px);
    let c1 = (c0 + window).min(cam.width_px);
    let mut sum = 0.0;
    let mut n = 0usize;
    for row in r0..r1 {
        for col in c0..c1 {
            sum += pixel_depth_expected((row as f64, col as f64), altitude_m, cam);
            n += 1;
        }
    }
    sum / n as f64
}

/// Mean over the valid pixels of one quadrant; `None` when every pixel is
/// invalid.
pub fn avg_quadrant_depth(frame: &DepthFrame, bounds: &QuadrantBounds) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for row in bounds.rows.0..bounds.rows.1 {
        for col in bounds.cols.0..bounds.cols.1 {
            let d = frame.at(row, col);
            if DepthFrame::is_valid(d) {
                sum += d;
                n += 1;
            }
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Deepest-average quadrant; ties break toward the lowest index.
pub fn choose_quadrant(averages: &[Option<f64>; 4]) -> Result<usize, DescentError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, avg) in averages.iter().enumerate() {
        if let Some(a) = *avg {
            let better = match best {
                None => true,
                Some((_, b)) => a > b,
            };
            if better {
                best = Some((i, a));
            }
        }
    }
    best.map(|(i, _)| i).ok_or(DescentError::NoSafeQuadrant)
}

/// Per-tick occupancy summary of the depth frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantReport {
    /// Quadrant order: top-left, top-right, bottom-left, bottom-right.
    pub averages: [Option<f64>; 4],
    pub valid_fraction: [f64; 4],
    pub chosen: usize,
}

/// Builds the full quadrant report for one depth frame.
pub fn analyze_quadrants(frame: &DepthFrame) -> Result<QuadrantReport, DescentError> {
    let bounds = split_quadrants(frame.width(), frame.height())?;
    let mut averages = [None; 4];
    let mut valid_fraction = [0.0; 4];
    for (i, b) in bounds.iter().enumerate() {
        averages[i] = avg_quadrant_depth(frame, b);
        let valid = (b.rows.0..b.rows.1)
            .flat_map(|r| (b.cols.0..b.cols.1).map(move |c| (r, c)))
            .filter(|&(r, c)| DepthFrame::is_valid(frame.at(r, c)))
            .count();
        valid_fraction[i] = valid as f64 / b.pixel_count() as f64;
    }
    let chosen = choose_quadrant(&averages)?;
    Ok(QuadrantReport {
        averages,
        valid_fraction,
        chosen,
    })
}

/// Nadir range measurement, saturating at [`MAX_TOF_RANGE_M`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TofReading {
    pub range_m: f64,
    pub saturated: bool,
}

impl TofReading {
    /// Clamps a true range into the sensor envelope.
    pub fn measure(true_range_m: f64) -> Self {
        if true_range_m > MAX_TOF_RANGE_M {
            TofReading {
                range_m: MAX_TOF_RANGE_M,
                saturated: true,
            }
        } else {
            TofReading {
                range_m: true_range_m,
                saturated: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consistency {
    Consistent,
    ObstacleBelow,
}

/// Compares the ToF range against the expected nadir depth. A saturated
/// reading carries no obstacle information and counts as consistent; the
/// saturation flag stays visible on the reading for trace output.
pub fn tof_consistency(tof: &TofReading, expected_nadir_m: f64, rel_tol: f64) -> Consistency {
    assert!(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must be in (0, 1)");
    if tof.saturated {
        return Consistency::Consistent;
    }
    if (tof.range_m - expected_nadir_m).abs() <= rel_tol * expected_nadir_m {
        Consistency::Consistent
    } else {
        Consistency::ObstacleBelow
    }
}

/// Descent tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescentParams {
    /// Relative ToF mismatch tolerance.
    pub tof_rel_tol: f64,
    /// Altitude at or below which the run ends as Landed.
    pub touchdown_alt_m: f64,
    /// Side length of the central block averaged for the nadir expectation.
    pub central_window_px: usize,
    /// When the four quadrant averages all sit within this relative band,
    /// descend straight instead of drifting toward a meaningless argmax.
    pub uniform_rel_tol: f64,
    /// Horizontal speed of the nudge toward the chosen quadrant.
    pub lateral_speed_mps: f64,
}

impl Default for DescentParams {
    fn default() -> Self {
        DescentParams {
            tof_rel_tol: 0.05,
            touchdown_alt_m: 0.3,
            central_window_px: 5,
            uniform_rel_tol: 0.02,
            lateral_speed_mps: 0.5,
        }
    }
}

impl DescentParams {
    pub fn validate(&self) -> Result<(), DescentError> {
        if !(self.tof_rel_tol > 0.0 && self.tof_rel_tol < 1.0) {
            return Err(DescentError::InvalidParam {
                name: "tof_rel_tol",
                value: self.tof_rel_tol,
            });
        }
        if !(self.touchdown_alt_m > 0.0) {
            return Err(DescentError::InvalidParam {
                name: "touchdown_alt_m",
                value: self.touchdown_alt_m,
            });
        }
        if self.central_window_px < 1 {
            return Err(DescentError::InvalidParam {
                name: "central_window_px",
                value: self.central_window_px as f64,
            });
        }
        if !(self.uniform_rel_tol >= 0.0) {
            return Err(DescentError::InvalidParam {
                name: "uniform_rel_tol",
                value: self.uniform_rel_tol,
            });
        }
        if !(self.lateral_speed_mps >= 0.0) {
            return Err(DescentError::InvalidParam {
                name: "lateral_speed_mps",
                value: self.lateral_speed_mps,
            });
        }
        Ok(())
    }
}

/// What one descent tick did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Maneuver {
    /// Uniform ground below: straight down.
    DescendStraight,
    /// Descending while nudging toward the emptiest quadrant.
    DescendToward { quadrant: usize },
    /// Obstacle under the nadir ray: sideways jump, no altitude change.
    Relocate { quadrant: usize },
    /// Altitude reached the touchdown threshold.
    Touchdown,
    /// No usable quadrant; hand control back for re-selection.
    HoldReselect,
}

/// Advances one control tick of the descent. Returns the updated drone
/// state and the maneuver taken. Altitude never increases here.
pub fn descend_step(
    drone: &DroneState,
    depth: &DepthFrame,
    tof: &TofReading,
    params: &DescentParams,
    dt: f64,
) -> Result<(DroneState, Maneuver), DescentError> {
    assert!(dt > 0.0, "dt must be positive");
    if drone.phase != LandingPhase::Descend {
        return Err(DescentError::WrongPhase(drone.phase));
    }
    let mut next = *drone;

    let report = match analyze_quadrants(depth) {
        Ok(r) => r,
        Err(DescentError::NoSafeQuadrant) => {
            next.phase = LandingPhase::Hold;
            return Ok((next, Maneuver::HoldReselect));
        }
        Err(e) => return Err(e),
    };

    let expected = expected_nadir_depth(drone.altitude_m, &depth.cam, params.central_window_px);
    let meters_per_px = drone.altitude_m / depth.cam.focal_px;
    let (pp_row, pp_col) = depth.cam.principal_point();
    let (qc_row, qc_col) = split_quadrants(depth.width(), depth.height())?[report.chosen].center_px();
    let toward = {
        let dx = (qc_col - pp_col) * meters_per_px;
        let dy = (qc_row - pp_row) * meters_per_px;
        let norm = (dx * dx + dy * dy).sqrt();
        if norm > 0.0 { (dx / norm, dy / norm) } else { (0.0, 0.0) }
    };

    if tof_consistency(tof, expected, params.tof_rel_tol) == Consistency::ObstacleBelow {
        // Quadrant world half-width: half of (half the frame width on the
        // ground).
        let quadrant_width_m = (depth.width() as f64 / 2.0) * meters_per_px;
        let jump = quadrant_width_m / 2.0;
        next.x_m += toward.0 * jump;
        next.y_m += toward.1 * jump;
        return Ok((next, Maneuver::Relocate { quadrant: report.chosen }));
    }

    let valid: Vec<f64> = report.averages.iter().copied().flatten().collect();
    let uniform = if valid.len() == 4 {
        let max = valid.iter().cloned().fold(f64::MIN, f64::max);
        let min = valid.iter().cloned().fold(f64::MAX, f64::min);
        max - min <= params.uniform_rel_tol * max
    } else {
        false
    };

    let maneuver = if uniform {
        Maneuver::DescendStraight
    } else {
        let step = params.lateral_speed_mps * dt;
        next.x_m += toward.0 * step;
        next.y_m += toward.1 * step;
        Maneuver::DescendToward { quadrant: report.chosen }
    };

    next.altitude_m = (drone.altitude_m - drone.descent_speed_mps * dt).max(0.0);
    if next.altitude_m <= params.touchdown_alt_m {
        next.altitude_m = 0.0;
        next.phase = LandingPhase::Landed;
        return Ok((next, Maneuver::Touchdown));
    }
    Ok((next, maneuver))
}
