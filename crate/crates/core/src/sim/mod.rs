//! Deterministic synthetic world: textured ground, static obstacles with
//! heights, constant-velocity movers, a nadir pinhole camera producing
//! intensity and depth frames, and a saturating ToF ray sensor.
//!
//! Everything is a pure function of the scenario (including its seed) and
//! elapsed time, so identical runs are bit-identical. Mover positions come
//! from the closed form `start + velocity * time`; nothing is integrated.

use crate::decision::{DroneState, LandingPhase};
use crate::descent::{DepthFrame, TofReading};
use crate::geometry::{self, Point2};
use crate::imaging::Frame;
use crate::plz::CameraModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("scenario field {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    SchemaVersion(u32),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> SimError {
    SimError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Ground plane and texture configuration. The world is a square of side
/// `extent_m` centered on the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorldConfig {
    pub extent_m: f64,
    /// Base ground gray level.
    pub ground_intensity: u8,
    /// Per-pixel texture excursion. Kept small so smoothed gradients stay
    /// under the edge detector's low threshold (worst case is about
    /// 11.4 x amplitude).
    pub texture_amplitude: u8,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            extent_m: 200.0,
            ground_intensity: 128,
            texture_amplitude: 3,
        }
    }
}

/// A prism obstacle: polygon footprint on the ground, flat top at
/// `height_m`, drawn in the intensity image at `intensity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    /// Footprint vertices in world meters, in order (no self-crossing).
    pub footprint_m: Vec<[f64; 2]>,
    pub height_m: f64,
    /// Fill intensity; its contrast against the ground is what the edge
    /// detector sees at the border.
    pub intensity: u8,
}

/// A moving cylinder rendered as a two-tone disk patterned by concentric
/// rings crossed with radial spokes. The pattern rides with the object, so
/// frame differencing marks a connected web across the whole footprint,
/// and because the pattern is centrally symmetric the change-mask centroid
/// lands on the midpoint of the two disk centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoverConfig {
    pub start_m: [f64; 2],
    pub velocity_mps: [f64; 2],
    pub radius_m: f64,
    #[serde(default = "default_mover_height")]
    pub height_m: f64,
    #[serde(default = "default_ring_width")]
    pub ring_width_m: f64,
    /// Angular sectors in the pattern; multiple of 4 keeps the pattern
    /// centrally symmetric, 0 disables spokes.
    #[serde(default = "default_spokes")]
    pub spokes: u32,
    #[serde(default = "default_tone_a")]
    pub tone_a: u8,
    #[serde(default = "default_tone_b")]
    pub tone_b: u8,
}

fn default_mover_height() -> f64 {
    1.7
}
fn default_ring_width() -> f64 {
    0.3
}
fn default_spokes() -> u32 {
    8
}
fn default_tone_a() -> u8 {
    60
}
fn default_tone_b() -> u8 {
    220
}

impl MoverConfig {
    pub fn speed_mps(&self) -> f64 {
        (self.velocity_mps[0] * self.velocity_mps[0] + self.velocity_mps[1] * self.velocity_mps[1])
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroneConfig {
    pub start_m: [f64; 2],
    pub altitude_m: f64,
    #[serde(default = "default_cruise")]
    pub cruise_speed_mps: f64,
    #[serde(default = "default_descent")]
    pub descent_speed_mps: f64,
}

fn default_cruise() -> f64 {
    2.0
}
fn default_descent() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub focal_px: f64,
    pub width_px: usize,
    pub height_px: usize,
    pub fps: f64,
}

/// Pipeline tuning carried by the scenario so runs are self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tuning {
    pub canny: crate::imaging::CannyParams,
    pub tracker: crate::tracking::TrackerParams,
    pub decision: crate::decision::DecisionParams,
    pub descent: crate::descent::DescentParams,
    /// Minimum admitted zone area.
    pub min_zone_area_m2: f64,
    /// Contour clustering radius for obstacle polygon grouping.
    pub cluster_radius_px: f64,
    /// Horizontal distance treated as "above the target".
    pub arrival_tol_m: f64,
    /// Frames after an arrival reset during which verdicts are forced to
    /// Wait while the tracker re-learns the scene.
    pub warmup_frames: u32,
    /// Scan frames allowed before an empty zone list aborts the mission.
    pub scan_frames: u32,
    /// Standard deviation of optional additive depth noise (0 disables).
    pub depth_noise_std_m: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            canny: Default::default(),
            tracker: Default::default(),
            decision: Default::default(),
            descent: Default::default(),
            min_zone_area_m2: 3.0,
            cluster_radius_px: 30.0,
            arrival_tol_m: 0.05,
            warmup_frames: 3,
            scan_frames: 5,
            depth_noise_std_m: 0.0,
        }
    }
}

/// Complete scenario description, the unit of reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub duration_s: f64,
    #[serde(default)]
    pub world: WorldConfig,
    #[serde(default)]
    pub obstacles: Vec<ObstacleConfig>,
    #[serde(default)]
    pub movers: Vec<MoverConfig>,
    pub drone: DroneConfig,
    pub camera: CameraConfig,
    #[serde(default)]
    pub tuning: Tuning,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SimError::SchemaVersion(self.schema_version));
        }
        if !(self.duration_s > 0.0) {
            return Err(invalid("duration_s", "must be positive"));
        }
        if !(self.world.extent_m > 0.0) {
            return Err(invalid("world.extent_m", "must be positive"));
        }
        if !(self.camera.fps > 0.0) {
            return Err(invalid("camera.fps", "must be positive"));
        }
        if !(self.camera.focal_px > 0.0) {
            return Err(invalid("camera.focal_px", "must be positive"));
        }
        if self.camera.width_px < 2 || self.camera.height_px < 2 {
            return Err(invalid("camera", "frame must be at least 2x2"));
        }
        if !(self.drone.altitude_m > 0.0) {
            return Err(invalid("drone.altitude_m", "must be positive"));
        }
        if !(self.drone.cruise_speed_mps > 0.0) {
            return Err(invalid("drone.cruise_speed_mps", "must be positive"));
        }
        if !(self.drone.descent_speed_mps > 0.0) {
            return Err(invalid("drone.descent_speed_mps", "must be positive"));
        }
        let half = self.world.extent_m / 2.0;
        for (i, o) in self.obstacles.iter().enumerate() {
            if o.footprint_m.len() < 3 {
                return Err(invalid(
                    "obstacles.footprint_m",
                    format!("obstacle {i} needs at least 3 vertices"),
                ));
            }
            if !(o.height_m >= 0.0) {
                return Err(invalid(
                    "obstacles.height_m",
                    format!("obstacle {i} height must be non-negative"),
                ));
            }
        }
        for (i, m) in self.movers.iter().enumerate() {
            if !(m.radius_m > 0.0) {
                return Err(invalid(
                    "movers.radius_m",
                    format!("mover {i} radius must be positive"),
                ));
            }
            if !(m.height_m >= 0.0) {
                return Err(invalid(
                    "movers.height_m",
                    format!("mover {i} height must be non-negative"),
                ));
            }
            if !(m.ring_width_m > 0.0) {
                return Err(invalid(
                    "movers.ring_width_m",
                    format!("mover {i} ring width must be positive"),
                ));
            }
            if m.spokes % 4 != 0 {
                return Err(invalid(
                    "movers.spokes",
                    format!("mover {i} spoke count must be a multiple of 4"),
                ));
            }
            // Linear motion: checking both endpoints bounds the whole path.
            for t in [0.0, self.duration_s] {
                let x = m.start_m[0] + m.velocity_mps[0] * t;
                let y = m.start_m[1] + m.velocity_mps[1] * t;
                if x.abs() + m.radius_m > half || y.abs() + m.radius_m > half {
                    return Err(invalid(
                        "movers",
                        format!("mover {i} leaves the world extent during the run"),
                    ));
                }
            }
        }
        self.tuning.canny.validate().map_err(|e| invalid("tuning.canny", e.to_string()))?;
        self.tuning
            .tracker
            .validate()
            .map_err(|e| invalid("tuning.tracker", e.to_string()))?;
        self.tuning
            .decision
            .validate()
            .map_err(|e| invalid("tuning.decision", e.to_string()))?;
        self.tuning
            .descent
            .validate()
            .map_err(|e| invalid("tuning.descent", e.to_string()))?;
        if !(self.tuning.min_zone_area_m2 > 0.0) {
            return Err(invalid("tuning.min_zone_area_m2", "must be positive"));
        }
        if !(self.tuning.cluster_radius_px > 0.0) {
            return Err(invalid("tuning.cluster_radius_px", "must be positive"));
        }
        if !(self.tuning.arrival_tol_m > 0.0) {
            return Err(invalid("tuning.arrival_tol_m", "must be positive"));
        }
        if !(self.tuning.depth_noise_std_m >= 0.0) {
            return Err(invalid("tuning.depth_noise_std_m", "must be non-negative"));
        }
        Ok(())
    }

    pub fn initial_drone(&self) -> DroneState {
        DroneState {
            x_m: self.drone.start_m[0],
            y_m: self.drone.start_m[1],
            altitude_m: self.drone.altitude_m,
            cruise_speed_mps: self.drone.cruise_speed_mps,
            descent_speed_mps: self.drone.descent_speed_mps,
            phase: LandingPhase::Scan,
        }
    }
}

/// SplitMix64 step, the basis of all seeded noise here.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn hash2(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(seed ^ splitmix64(a ^ splitmix64(b)))
}

/// Texture offset in [-amplitude, amplitude], anchored to screen pixels so
/// drone motion never changes the background.
fn texture_offset(seed: u64, row: usize, col: usize, amplitude: u8) -> i32 {
    if amplitude == 0 {
        return 0;
    }
    let h = hash2(seed, row as u64, col as u64);
    let span = 2 * amplitude as i32 + 1;
    (h % span as u64) as i32 - amplitude as i32
}

/// Standard normal deviate from two hash-derived uniforms (Box-Muller).
fn gauss(seed: u64, a: u64, b: u64) -> f64 {
    let u1 = (hash2(seed, a, b) >> 11) as f64 / (1u64 << 53) as f64;
    let u2 = (hash2(seed ^ 0xA5A5_A5A5, a, b) >> 11) as f64 / (1u64 << 53) as f64;
    let u1 = u1.max(1e-300);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Live world: scenario plus elapsed time plus the drone pose.
#[derive(Debug, Clone)]
pub struct World {
    pub scenario: Scenario,
    time_s: f64,
    pub drone: DroneState,
    obstacle_hulls: Vec<Vec<Point2>>,
}

impl World {
    pub fn new(scenario: Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        let drone = scenario.initial_drone();
        let obstacle_hulls = scenario
            .obstacles
            .iter()
            .map(|o| o.footprint_m.iter().map(|p| Point2::new(p[0], p[1])).collect())
            .collect();
        Ok(World {
            scenario,
            time_s: 0.0,
            drone,
            obstacle_hulls,
        })
    }

    pub fn time_s(&self) -> f64 {
        self.time_s
    }

    /// Advances time; mover positions follow from the closed form, so two
    /// half steps equal one full step exactly.
    pub fn step(&mut self, dt: f64) {
        assert!(dt > 0.0, "dt must be positive");
        self.time_s += dt;
    }

    /// Mover center at the current time: `start + velocity * t`.
    pub fn mover_pos(&self, idx: usize) -> Point2 {
        let m = &self.scenario.movers[idx];
        Point2::new(
            m.start_m[0] + m.velocity_mps[0] * self.time_s,
            m.start_m[1] + m.velocity_mps[1] * self.time_s,
        )
    }

    pub fn mover_positions(&self) -> Vec<Point2> {
        (0..self.scenario.movers.len()).map(|i| self.mover_pos(i)).collect()
    }

    /// Camera model at the drone's current altitude.
    pub fn camera(&self) -> CameraModel {
        CameraModel::new(
            self.scenario.camera.focal_px,
            self.drone.altitude_m,
            self.scenario.camera.width_px,
            self.scenario.camera.height_px,
        )
        .expect("validated scenario yields a valid camera")
    }

    /// Ground point seen by a pixel center (ground-plane projection).
    pub fn px_to_world(&self, col: f64, row: f64) -> Point2 {
        let cam = self.camera();
        let (pp_row, pp_col) = cam.principal_point();
        let s = cam.meters_per_px();
        Point2::new(
            self.drone.x_m + (col - pp_col) * s,
            self.drone.y_m + (row - pp_row) * s,
        )
    }

    /// Pixel (col, row) where a ground point lands.
    pub fn world_to_px(&self, p: Point2) -> (f64, f64) {
        let cam = self.camera();
        let (pp_row, pp_col) = cam.principal_point();
        let s = cam.meters_per_px();
        (
            pp_col + (p.x - self.drone.x_m) / s,
            pp_row + (p.y - self.drone.y_m) / s,
        )
    }

    /// Renders the grayscale intensity frame: screen-anchored ground
    /// texture, filled obstacle footprints, then ringed mover disks on top.
    pub fn render_frame(&self) -> Frame {
        let cam = self.camera();
        let (w, h) = (cam.width_px, cam.height_px);
        let (pp_row, pp_col) = cam.principal_point();
        let s = cam.meters_per_px();
        let seed = self.scenario.seed;
        let base = self.scenario.world.ground_intensity;
        let amp = self.scenario.world.texture_amplitude;

        let col_x: Vec<f64> = (0..w)
            .map(|c| self.drone.x_m + (c as f64 - pp_col) * s)
            .collect();
        let row_y: Vec<f64> = (0..h)
            .map(|r| self.drone.y_m + (r as f64 - pp_row) * s)
            .collect();

        let obstacle_bbox: Vec<(f64, f64, f64, f64)> = self
            .obstacle_hulls
            .iter()
            .map(|poly| {
                let (mut x0, mut y0, mut x1, mut y1) =
                    (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in poly {
                    x0 = x0.min(p.x);
                    y0 = y0.min(p.y);
                    x1 = x1.max(p.x);
                    y1 = y1.max(p.y);
                }
                (x0, y0, x1, y1)
            })
            .collect();
        let movers = self.mover_positions();

        let mut data = vec![0u8; w * h];
        for row in 0..h {
            for col in 0..w {
                data[row * w + col] =
                    (base as i32 + texture_offset(seed, row, col, amp)).clamp(0, 255) as u8;
            }
        }
        let mut frame = Frame::new(w, h, 1, data).expect("dimensions consistent");
        for (oi, poly) in self.obstacle_hulls.iter().enumerate() {
            let bbox = obstacle_bbox[oi];
            let intensity = self.scenario.obstacles[oi].intensity;
            let c0 = col_x.partition_point(|&x| x < bbox.0);
            let c1 = col_x.partition_point(|&x| x <= bbox.2);
            let r0 = row_y.partition_point(|&y| y < bbox.1);
            let r1 = row_y.partition_point(|&y| y <= bbox.3);
            for row in r0..r1 {
                for col in c0..c1 {
                    if geometry::polygon_contains(poly, Point2::new(col_x[col], row_y[row])) {
                        frame.set_gray(row, col, intensity);
                    }
                }
            }
        }
        for (mi, center) in movers.iter().enumerate() {
            let m = &self.scenario.movers[mi];
            let r = m.radius_m;
            let c0 = col_x.partition_point(|&x| x < center.x - r);
            let c1 = col_x.partition_point(|&x| x <= center.x + r);
            let r0 = row_y.partition_point(|&y| y < center.y - r);
            let r1 = row_y.partition_point(|&y| y <= center.y + r);
            for row in r0..r1 {
                for col in c0..c1 {
                    let p = Point2::new(col_x[col], row_y[row]);
                    let d = p.distance(*center);
                    if d <= r {
                        let ring = (d / m.ring_width_m) as u64;
                        let sector = if m.spokes == 0 {
                            0
                        } else {
                            let angle = (p.y - center.y).atan2(p.x - center.x)
                                + std::f64::consts::PI;
                            let span = 2.0 * std::f64::consts::PI / m.spokes as f64;
                            ((angle / span) as u64).min(m.spokes as u64 - 1)
                        };
                        let tone = if (ring + sector) % 2 == 0 { m.tone_a } else { m.tone_b };
                        frame.set_gray(row, col, tone);
                    }
                }
            }
        }
        frame
    }

    /// Renders the metric depth frame. Obstacles and movers behave as flat
    /// cutouts at their top height h: a pixel reads (H - h)/cos(theta)
    /// when its (H - h)-plane projection falls inside the footprint, else
    /// the flat-ground H/cos(theta). Optional seeded Gaussian noise.
    pub fn render_depth(&self) -> DepthFrame {
        let cam = self.camera();
        let (w, h) = (cam.width_px, cam.height_px);
        let (pp_row, pp_col) = cam.principal_point();
        let f = cam.focal_px;
        let alt = self.drone.altitude_m;
        let movers = self.mover_positions();
        let noise_std = self.scenario.tuning.depth_noise_std_m;
        let tick = (self.time_s * 1e6).round() as u64;

        let mut depth = Vec::with_capacity(w * h);
        for row in 0..h {
            for col in 0..w {
                let dr = row as f64 - pp_row;
                let dc = col as f64 - pp_col;
                let slant = (f * f + dr * dr + dc * dc).sqrt() / f;
                let mut d = alt * slant;
                for (oi, poly) in self.obstacle_hulls.iter().enumerate() {
                    let top = alt - self.scenario.obstacles[oi].height_m;
                    if top <= 0.0 {
                        // Obstacle top at or above the drone: treat as an
                        // invalid (blocked) pixel if its ground projection
                        // hits the footprint.
                        let g = Point2::new(
                            self.drone.x_m + dc * alt / f,
                            self.drone.y_m + dr * alt / f,
                        );
                        if geometry::polygon_contains(poly, g) {
                            d = f64::NAN;
                        }
                        continue;
                    }
                    let p = Point2::new(
                        self.drone.x_m + dc * top / f,
                        self.drone.y_m + dr * top / f,
                    );
                    if geometry::polygon_contains(poly, p) {
                        d = d.min(top * slant);
                    }
                }
                for (mi, center) in movers.iter().enumerate() {
                    let m = &self.scenario.movers[mi];
                    let top = alt - m.height_m;
                    if top <= 0.0 {
                        continue;
                    }
                    let p = Point2::new(
                        self.drone.x_m + dc * top / f,
                        self.drone.y_m + dr * top / f,
                    );
                    if p.distance(*center) <= m.radius_m {
                        d = d.min(top * slant);
                    }
                }
                if noise_std > 0.0 && d.is_finite() {
                    d += noise_std * gauss(self.scenario.seed ^ 0xDEAD_BEEF, tick, (row * w + col) as u64);
                }
                depth.push(d);
            }
        }
        DepthFrame::new(cam, depth).expect("dimensions consistent")
    }

    /// Height of the tallest surface under the drone's nadir ray.
    fn surface_height_at_nadir(&self) -> f64 {
        let nadir = Point2::new(self.drone.x_m, self.drone.y_m);
        let mut height: f64 = 0.0;
        for (oi, poly) in self.obstacle_hulls.iter().enumerate() {
            if geometry::polygon_contains(poly, nadir) {
                height = height.max(self.scenario.obstacles[oi].height_m);
            }
        }
        for (mi, center) in self.mover_positions().iter().enumerate() {
            if center.distance(nadir) <= self.scenario.movers[mi].radius_m {
                height = height.max(self.scenario.movers[mi].height_m);
            }
        }
        height
    }

    /// Straight-down range to the first surface, saturating at the sensor
    /// ceiling.
    pub fn tof_reading(&self) -> TofReading {
        TofReading::measure(self.drone.altitude_m - self.surface_height_at_nadir())
    }
}

/// Exact scene facts for scoring estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Minimum boundary gap for every obstacle footprint pair (i < j).
    pub gap_distances_m: Vec<(usize, usize, f64)>,
    /// Largest empty circle in the current view, clipped by the virtual
    /// border one pixel outside the frame (mirroring the detector).
    pub lec_diameter_m: f64,
    pub lec_area_m2: f64,
    pub lec_center_w: Point2,
    pub mover_speeds_mps: Vec<f64>,
}

impl World {
    /// Clearance (distance to the nearest obstacle boundary or virtual
    /// frame border, zero inside an obstacle) of a world point in the
    /// current view.
    pub fn clearance_at(&self, p: Point2) -> f64 {
        let cam = self.camera();
        let s = cam.meters_per_px();
        let half_w = (cam.width_px as f64 + 1.0) / 2.0 * s;
        let half_h = (cam.height_px as f64 + 1.0) / 2.0 * s;
        let border = (half_w - (p.x - self.drone.x_m).abs())
            .min(half_h - (p.y - self.drone.y_m).abs());
        let mut best = border;
        for poly in &self.obstacle_hulls {
            best = best.min(geometry::polygon_clearance(poly, p));
        }
        best
    }

    /// Largest empty circle in view by coarse grid search plus local
    /// refinement. The clearance field is 1-Lipschitz, so the coarse pass
    /// brackets the optimum and the fine pass pins it down.
    pub fn largest_empty_circle(&self) -> (Point2, f64) {
        let cam = self.camera();
        let s = cam.meters_per_px();
        let coarse_px = 2.0;
        let mut best = (Point2::new(self.drone.x_m, self.drone.y_m), f64::NEG_INFINITY);
        let (w, h) = (cam.width_px as f64, cam.height_px as f64);
        let mut row = 0.0;
        while row < h {
            let mut col = 0.0;
            while col < w {
                let p = self.px_to_world(col, row);
                let c = self.clearance_at(p);
                if c > best.1 {
                    best = (p, c);
                }
                col += coarse_px;
            }
            row += coarse_px;
        }
        // Refine on a fine grid around the coarse winner.
        let window = (coarse_px * 2.0 + 1.0) * s;
        let step = 0.2 * s;
        let center = best.0;
        let mut y = center.y - window;
        while y <= center.y + window {
            let mut x = center.x - window;
            while x <= center.x + window {
                let p = Point2::new(x, y);
                let c = self.clearance_at(p);
                if c > best.1 {
                    best = (p, c);
                }
                x += step;
            }
            y += step;
        }
        best
    }

    /// Local empty-circle optimum near a given point: hill refinement in a
    /// small window, for scoring an individual detected zone against the
    /// truth ridge it sits on.
    pub fn local_empty_circle(&self, near: Point2, window_m: f64) -> (Point2, f64) {
        let cam = self.camera();
        let s = cam.meters_per_px();
        let step = 0.2 * s;
        let mut best = (near, self.clearance_at(near));
        let mut y = near.y - window_m;
        while y <= near.y + window_m {
            let mut x = near.x - window_m;
            while x <= near.x + window_m {
                let p = Point2::new(x, y);
                let c = self.clearance_at(p);
                if c > best.1 {
                    best = (p, c);
                }
                x += step;
            }
            y += step;
        }
        best
    }

    pub fn ground_truth(&self) -> GroundTruth {
        let mut gaps = Vec::new();
        for i in 0..self.obstacle_hulls.len() {
            for j in (i + 1)..self.obstacle_hulls.len() {
                let (_, _, d) =
                    geometry::polygon_boundary_gap(&self.obstacle_hulls[i], &self.obstacle_hulls[j]);
                gaps.push((i, j, d));
            }
        }
        let (center, radius) = self.largest_empty_circle();
        let diameter = 2.0 * radius.max(0.0);
        GroundTruth {
            gap_distances_m: gaps,
            lec_diameter_m: diameter,
            lec_area_m2: std::f64::consts::PI * diameter * diameter / 4.0,
            lec_center_w: center,
            mover_speeds_mps: self.scenario.movers.iter().map(|m| m.speed_mps()).collect(),
        }
    }

    /// True time for mover `idx` to reach the world point, by closed-form
    /// kinematics; `None` for a stationary mover.
    pub fn true_time_to_reach(&self, idx: usize, target: Point2) -> Option<f64> {
        let speed = self.scenario.movers[idx].speed_mps();
        if speed <= 0.0 {
            return None;
        }
        Some(self.mover_pos(idx).distance(target) / speed)
    }

    /// True drone ETA to a world point under the cruise-then-descend model.
    pub fn true_drone_eta(&self, target: Point2) -> f64 {
        let horizontal = Point2::new(self.drone.x_m, self.drone.y_m).distance(target);
        horizontal / self.drone.cruise_speed_mps
            + self.drone.altitude_m / self.drone.descent_speed_mps
    }
}
