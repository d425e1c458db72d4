//! Moving-object detection and velocity estimation.
//!
//! Consecutive frames are differenced per pixel, changed pixels are grouped
//! into blobs, blobs are associated to persistent tracks, and each track's
//! metric velocity is the least-squares slope of its recent centroids scaled
//! by the capture rate and the ground resolution. A track's time to reach a
//! landing zone is its straight-line ground distance over its speed.

use crate::geometry::Point2;
use crate::imaging::Frame;
use crate::plz::{px_to_meters, CameraModel, LandingZone};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackingError {
    #[error("frame sizes differ: {0}x{1} vs {2}x{3}")]
    SizeMismatch(usize, usize, usize, usize),
    #[error("frame channel counts differ: {0} vs {1}")]
    ChannelMismatch(usize, usize),
    #[error("diff threshold must be in 1..=254, got {0}")]
    InvalidThreshold(u8),
    #[error("tracker parameter {name} is out of range: {value}")]
    InvalidParam { name: &'static str, value: f64 },
}

/// Binary changed/unchanged raster for one frame pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeMask {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl ChangeMask {
    pub fn empty(width: usize, height: usize) -> Self {
        ChangeMask {
            width,
            height,
            bits: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn is_changed(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col] != 0
    }

    #[inline]
    pub fn set_changed(&mut self, row: usize, col: usize, on: bool) {
        self.bits[row * self.width + col] = u8::from(on);
    }

    pub fn changed_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    /// Changed pixels as `(row, col)` in row-major order.
    pub fn changed_pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for row in 0..self.height {
            for col in 0..self.width {
                if self.is_changed(row, col) {
                    out.push((row, col));
                }
            }
        }
        out
    }
}

/// Marks pixels whose largest per-channel absolute difference exceeds the
/// threshold (strictly). Symmetric in its frame arguments.
pub fn frame_diff(prev: &Frame, curr: &Frame, threshold: u8) -> Result<ChangeMask, TrackingError> {
    if prev.width() != curr.width() || prev.height() != curr.height() {
        return Err(TrackingError::SizeMismatch(
            prev.width(),
            prev.height(),
            curr.width(),
            curr.height(),
        ));
    }
    if prev.channels() != curr.channels() {
        return Err(TrackingError::ChannelMismatch(prev.channels(), curr.channels()));
    }
    if threshold == 0 || threshold == u8::MAX {
        return Err(TrackingError::InvalidThreshold(threshold));
    }
    let (w, h, ch) = (curr.width(), curr.height(), curr.channels());
    let mut mask = ChangeMask::empty(w, h);
    let (pa, pb) = (prev.data(), curr.data());
    for idx in 0..w * h {
        let mut max_diff = 0u8;
        for c in 0..ch {
            let d = pa[idx * ch + c].abs_diff(pb[idx * ch + c]);
            max_diff = max_diff.max(d);
        }
        if max_diff > threshold {
            mask.bits[idx] = 1;
        }
    }
    Ok(mask)
}

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub min_row: usize,
    pub min_col: usize,
    pub max_row: usize,
    pub max_col: usize,
}

impl BBox {
    fn of_pixel(row: usize, col: usize) -> Self {
        BBox {
            min_row: row,
            min_col: col,
            max_row: row,
            max_col: col,
        }
    }

    fn include(&mut self, row: usize, col: usize) {
        self.min_row = self.min_row.min(row);
        self.min_col = self.min_col.min(col);
        self.max_row = self.max_row.max(row);
        self.max_col = self.max_col.max(col);
    }
}

/// One changed-pixel blob in a single frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Mean pixel position of the blob (`x = col`, `y = row`).
    pub centroid_px: Point2,
    pub bbox: BBox,
    pub area_px: usize,
}

/// Groups changed pixels into 8-connected blobs and keeps those with at
/// least `min_blob_px` pixels. Blobs are emitted in scan order of their
/// first pixel.
pub fn segment_objects(mask: &ChangeMask, min_blob_px: usize) -> Vec<Detection> {
    assert!(min_blob_px >= 1, "min_blob_px must be at least 1");
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut detections = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if !mask.is_changed(row, col) || seen[row * w + col] {
                continue;
            }
            let mut stack = vec![(row, col)];
            seen[row * w + col] = true;
            let mut bbox = BBox::of_pixel(row, col);
            let mut sum_row = 0.0f64;
            let mut sum_col = 0.0f64;
            let mut area = 0usize;
            while let Some((r, c)) = stack.pop() {
                area += 1;
                sum_row += r as f64;
                sum_col += c as f64;
                bbox.include(r, c);
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let nr = r as i64 + dr;
                        let nc = c as i64 + dc;
                        if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if mask.is_changed(nr, nc) && !seen[nr * w + nc] {
                            seen[nr * w + nc] = true;
                            stack.push((nr, nc));
                        }
                    }
                }
            }
            if area >= min_blob_px {
                detections.push(Detection {
                    centroid_px: Point2::new(sum_col / area as f64, sum_row / area as f64),
                    bbox,
                    area_px: area,
                });
            }
        }
    }
    detections
}

/// Centroid observation at a specific frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentroidSample {
    pub frame_index: u64,
    /// `x = col`, `y = row`.
    pub centroid_px: Point2,
}

/// Image-plane velocity in ground units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityEstimate {
    pub speed_mps: f64,
    /// Unit direction in the image plane (`x = col`, `y = row`); zero when
    /// the speed is zero.
    pub dir: Point2,
}

/// A persistent moving object.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedObject {
    pub id: u64,
    /// Strictly increasing in `frame_index`.
    pub centroid_history: Vec<CentroidSample>,
    pub bbox: BBox,
    /// Latest velocity estimate; `None` until enough history accumulates.
    pub velocity: Option<VelocityEstimate>,
    /// Consecutive frames without a matched detection.
    pub misses: usize,
}

impl TrackedObject {
    pub fn last_centroid(&self) -> Point2 {
        self.centroid_history
            .last()
            .expect("tracks always hold at least one sample")
            .centroid_px
    }

    /// Motion class under the given static-speed floor.
    pub fn motion(&self, static_floor_mps: f64) -> Motion {
        match self.velocity {
            None => Motion::Unknown,
            Some(v) if v.speed_mps < static_floor_mps => Motion::Static { speed_mps: v.speed_mps },
            Some(v) => Motion::Moving(v),
        }
    }
}

/// How a track is treated by clearance timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motion {
    /// Not enough history to estimate a velocity.
    Unknown,
    /// Speed below the static floor: the object occupies its position.
    Static { speed_mps: f64 },
    Moving(VelocityEstimate),
}

/// Least-squares centroid slope over the trailing `window` samples, scaled
/// to meters/second. `None` until the track has two samples.
pub fn estimate_velocity(
    track: &TrackedObject,
    fps: f64,
    cam: &CameraModel,
    window: usize,
) -> Option<VelocityEstimate> {
    assert!(fps > 0.0, "fps must be positive");
    let n = track.centroid_history.len();
    if n < 2 || window < 2 {
        return None;
    }
    let samples = &track.centroid_history[n.saturating_sub(window)..];

    // Slope of col(t) and row(t) against frame index, in px/frame.
    let m = samples.len() as f64;
    let mean_t = samples.iter().map(|s| s.frame_index as f64).sum::<f64>() / m;
    let mean_x = samples.iter().map(|s| s.centroid_px.x).sum::<f64>() / m;
    let mean_y = samples.iter().map(|s| s.centroid_px.y).sum::<f64>() / m;
    let mut stt = 0.0;
    let mut stx = 0.0;
    let mut sty = 0.0;
    for s in samples {
        let dt = s.frame_index as f64 - mean_t;
        stt += dt * dt;
        stx += dt * (s.centroid_px.x - mean_x);
        sty += dt * (s.centroid_px.y - mean_y);
    }
    if stt == 0.0 {
        return None;
    }
    let px_per_frame = Point2::new(stx / stt, sty / stt);
    let mps = px_per_frame.scale(fps * cam.meters_per_px());
    let speed = mps.norm();
    let dir = if speed > 0.0 {
        mps.scale(1.0 / speed)
    } else {
        Point2::new(0.0, 0.0)
    };
    Some(VelocityEstimate {
        speed_mps: speed,
        dir,
    })
}

/// Time for a track to reach a landing zone center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reach {
    /// Velocity unavailable; treat conservatively.
    Unknown { object_id: u64, plz_id: usize },
    /// Object is effectively stationary; it never "passes through".
    Static {
        object_id: u64,
        plz_id: usize,
        distance_m: f64,
    },
    Moving(ReachEstimate),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachEstimate {
    pub object_id: u64,
    pub plz_id: usize,
    pub distance_m: f64,
    pub t_x_seconds: f64,
}

/// Straight-line ground distance from the track centroid to the zone
/// center, over the track speed. Objects below the static floor come back
/// as [`Reach::Static`] rather than a division by (near) zero.
pub fn time_to_reach(
    track: &TrackedObject,
    plz_id: usize,
    plz: &LandingZone,
    cam: &CameraModel,
    static_floor_mps: f64,
) -> Reach {
    let d_px = track.last_centroid().distance(plz.center_px);
    let distance_m = px_to_meters(d_px, cam);
    match track.motion(static_floor_mps) {
        Motion::Unknown => Reach::Unknown {
            object_id: track.id,
            plz_id,
        },
        Motion::Static { .. } => Reach::Static {
            object_id: track.id,
            plz_id,
            distance_m,
        },
        Motion::Moving(v) => Reach::Moving(ReachEstimate {
            object_id: track.id,
            plz_id,
            distance_m,
            t_x_seconds: distance_m / v.speed_mps,
        }),
    }
}

/// Tracker tuning. Defaults are sized for rendered frames with strong
/// object contrast and meter-scale motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerParams {
    /// Per-channel intensity change needed to mark a pixel.
    pub diff_threshold: u8,
    /// Minimum blob size in pixels.
    pub min_blob_px: usize,
    /// Association gate between a track and a detection.
    pub gate_px: f64,
    /// Consecutive unmatched frames before a track is retired.
    pub max_misses: usize,
    /// Trailing centroid samples used for the velocity slope.
    pub velocity_window: usize,
    /// Speeds below this are treated as stationary.
    pub static_floor_mps: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams {
            diff_threshold: 25,
            min_blob_px: 50,
            gate_px: 40.0,
            max_misses: 5,
            velocity_window: 10,
            static_floor_mps: 0.05,
        }
    }
}

impl TrackerParams {
    pub fn validate(&self) -> Result<(), TrackingError> {
        if self.diff_threshold == 0 || self.diff_threshold == u8::MAX {
            return Err(TrackingError::InvalidThreshold(self.diff_threshold));
        }
        if self.min_blob_px < 1 {
            return Err(TrackingError::InvalidParam {
                name: "min_blob_px",
                value: self.min_blob_px as f64,
            });
        }
        if !(self.gate_px > 0.0) {
            return Err(TrackingError::InvalidParam {
                name: "gate_px",
                value: self.gate_px,
            });
        }
        if self.max_misses < 1 {
            return Err(TrackingError::InvalidParam {
                name: "max_misses",
                value: self.max_misses as f64,
            });
        }
        if self.velocity_window < 2 {
            return Err(TrackingError::InvalidParam {
                name: "velocity_window",
                value: self.velocity_window as f64,
            });
        }
        if !(self.static_floor_mps >= 0.0) {
            return Err(TrackingError::InvalidParam {
                name: "static_floor_mps",
                value: self.static_floor_mps,
            });
        }
        Ok(())
    }
}

/// Single-owner track store advanced one frame at a time.
#[derive(Debug, Clone)]
pub struct Tracker {
    params: TrackerParams,
    fps: f64,
    next_id: u64,
    tracks: Vec<TrackedObject>,
    prev: Option<Frame>,
}

impl Tracker {
    pub fn new(params: TrackerParams, fps: f64) -> Result<Self, TrackingError> {
        params.validate()?;
        if !(fps > 0.0) {
            return Err(TrackingError::InvalidParam {
                name: "fps",
                value: fps,
            });
        }
        Ok(Tracker {
            params,
            fps,
            next_id: 0,
            tracks: Vec::new(),
            prev: None,
        })
    }

    pub fn params(&self) -> &TrackerParams {
        &self.params
    }

    pub fn tracks(&self) -> &[TrackedObject] {
        &self.tracks
    }

    /// Drops all tracks and the reference frame; ids keep counting up so
    /// tracks from different episodes stay distinguishable.
    pub fn reset(&mut self) {
        self.tracks.clear();
        self.prev = None;
    }

    /// Ingests the frame captured at `frame_index`, updating tracks and
    /// their velocity estimates. The first frame after a reset only primes
    /// the differencer.
    pub fn advance(
        &mut self,
        frame_index: u64,
        frame: &Frame,
        cam: &CameraModel,
    ) -> Result<&[TrackedObject], TrackingError> {
        if let Some(prev) = &self.prev {
            let mask = frame_diff(prev, frame, self.params.diff_threshold)?;
            let detections = segment_objects(&mask, self.params.min_blob_px);
            self.associate(&detections, frame_index);
            for track in &mut self.tracks {
                if let Some(v) =
                    estimate_velocity(track, self.fps, cam, self.params.velocity_window)
                {
                    track.velocity = Some(v);
                }
            }
        }
        self.prev = Some(frame.clone());
        Ok(&self.tracks)
    }

    /// Greedy nearest-centroid matching within the gate; deterministic via
    /// (distance, track id, detection order) tie-breaking.
    fn associate(&mut self, detections: &[Detection], frame_index: u64) {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, track) in self.tracks.iter().enumerate() {
            for (di, det) in detections.iter().enumerate() {
                let d = track.last_centroid().distance(det.centroid_px);
                if d <= self.params.gate_px {
                    pairs.push((d, ti, di));
                }
            }
        }
        pairs.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(self.tracks[a.1].id.cmp(&self.tracks[b.1].id))
                .then(a.2.cmp(&b.2))
        });

        let mut track_used = vec![false; self.tracks.len()];
        let mut det_used = vec![false; detections.len()];
        for &(_, ti, di) in &pairs {
            if track_used[ti] || det_used[di] {
                continue;
            }
            track_used[ti] = true;
            det_used[di] = true;
            let track = &mut self.tracks[ti];
            debug_assert!(
                track
                    .centroid_history
                    .last()
                    .is_none_or(|s| s.frame_index < frame_index),
                "history must advance in frame index"
            );
            track.centroid_history.push(CentroidSample {
                frame_index,
                centroid_px: detections[di].centroid_px,
            });
            track.bbox = detections[di].bbox;
            track.misses = 0;
        }

        for (ti, used) in track_used.iter().enumerate() {
            if !used {
                self.tracks[ti].misses += 1;
            }
        }
        let max_misses = self.params.max_misses;
        self.tracks.retain(|t| t.misses < max_misses);

        for (di, det) in detections.iter().enumerate() {
            if !det_used[di] {
                let id = self.next_id;
                self.next_id += 1;
                self.tracks.push(TrackedObject {
                    id,
                    centroid_history: vec![CentroidSample {
                        frame_index,
                        centroid_px: det.centroid_px,
                    }],
                    bbox: det.bbox,
                    velocity: None,
                    misses: 0,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray_frame(width: usize, height: usize, value: u8) -> Frame {
        Frame::filled(width, height, 1, value)
    }

    fn paint_rect(frame: &mut Frame, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, v: u8) {
        for r in rows {
            for c in cols.clone() {
                frame.set_gray(r, c, v);
            }
        }
    }

    fn test_camera() -> CameraModel {
        CameraModel::new(1000.0, 10.0, 640, 480).unwrap()
    }

    #[test]
    fn identical_frames_produce_empty_mask() {
        let a = gray_frame(32, 24, 90);
        let mask = frame_diff(&a, &a.clone(), 25).unwrap();
        assert_eq!(mask.changed_count(), 0);
    }

    #[test]
    fn subthreshold_difference_produces_empty_mask() {
        let a = gray_frame(32, 24, 90);
        let b = gray_frame(32, 24, 91);
        let mask = frame_diff(&a, &b, 25).unwrap();
        assert_eq!(mask.changed_count(), 0);
        // The threshold is strict: a difference equal to it stays unmarked.
        let c = gray_frame(32, 24, 115);
        assert_eq!(frame_diff(&a, &c, 25).unwrap().changed_count(), 0);
        let d = gray_frame(32, 24, 116);
        assert_eq!(frame_diff(&a, &d, 25).unwrap().changed_count(), 32 * 24);
    }

    #[test]
    fn moved_object_marks_exactly_the_symmetric_difference() {
        // 20x20 object at cols 30..50, then shifted 10 px right.
        let mut a = gray_frame(100, 80, 0);
        let mut b = gray_frame(100, 80, 0);
        paint_rect(&mut a, 20..40, 30..50, 200);
        paint_rect(&mut b, 20..40, 40..60, 200);
        let mask = frame_diff(&a, &b, 25).unwrap();
        // Vacated strip cols 30..40 plus occupied strip cols 50..60.
        let mut expected = Vec::new();
        for r in 20..40 {
            for c in (30..40).chain(50..60) {
                expected.push((r, c));
            }
        }
        assert_eq!(mask.changed_count(), 400);
        assert_eq!(mask.changed_pixels(), expected);
        assert!((200..=600).contains(&mask.changed_count()));
    }

    #[test]
    fn frame_diff_is_symmetric() {
        let mut a = gray_frame(40, 30, 10);
        let mut b = gray_frame(40, 30, 10);
        paint_rect(&mut a, 5..12, 8..20, 240);
        paint_rect(&mut b, 14..22, 3..9, 200);
        let ab = frame_diff(&a, &b, 25).unwrap();
        let ba = frame_diff(&b, &a, 25).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn raising_threshold_never_adds_changed_pixels() {
        let mut a = gray_frame(40, 30, 100);
        let mut b = gray_frame(40, 30, 100);
        paint_rect(&mut b, 0..30, 0..40, 120);
        paint_rect(&mut b, 10..20, 10..30, 180);
        let lo = frame_diff(&a, &b, 15).unwrap();
        let hi = frame_diff(&a, &b, 60).unwrap();
        for (l, h) in lo.bits.iter().zip(&hi.bits) {
            assert!(h <= l, "raising the threshold added a pixel");
        }
        // Guard against a vacuous comparison.
        paint_rect(&mut a, 0..1, 0..1, 100);
        assert!(lo.changed_count() > hi.changed_count());
        assert!(hi.changed_count() > 0);
    }

    #[test]
    fn mismatched_frames_are_rejected() {
        let a = gray_frame(32, 24, 0);
        let b = gray_frame(33, 24, 0);
        assert!(matches!(
            frame_diff(&a, &b, 25),
            Err(TrackingError::SizeMismatch(..))
        ));
        let c = Frame::filled(32, 24, 3, 0);
        assert!(matches!(
            frame_diff(&a, &c, 25),
            Err(TrackingError::ChannelMismatch(..))
        ));
        assert!(matches!(
            frame_diff(&a, &a.clone(), 0),
            Err(TrackingError::InvalidThreshold(0))
        ));
    }

    #[test]
    fn color_diff_uses_the_largest_channel_change() {
        let a = Frame::filled(8, 8, 3, 100);
        let mut b = a.clone();
        // Only the green channel moves, by more than the threshold.
        b.set_sample(3, 4, 1, 160);
        let mask = frame_diff(&a, &b, 25).unwrap();
        assert_eq!(mask.changed_pixels(), vec![(3, 4)]);
    }

    #[test]
    fn empty_mask_segments_to_nothing() {
        let mask = ChangeMask::empty(64, 48);
        assert!(segment_objects(&mask, 50).is_empty());
    }

    #[test]
    fn blob_centroid_and_area_are_exact() {
        // 10x10 blob with top-left (20, 30): centroid (24.5, 34.5).
        let mut mask = ChangeMask::empty(64, 48);
        for r in 20..30 {
            for c in 30..40 {
                mask.set_changed(r, c, true);
            }
        }
        let dets = segment_objects(&mask, 50);
        assert_eq!(dets.len(), 1);
        let d = &dets[0];
        assert_eq!(d.area_px, 100);
        assert!((d.centroid_px.x - 34.5).abs() < 1e-12);
        assert!((d.centroid_px.y - 24.5).abs() < 1e-12);
        assert_eq!(
            d.bbox,
            BBox {
                min_row: 20,
                min_col: 30,
                max_row: 29,
                max_col: 39
            }
        );
    }

    #[test]
    fn small_blobs_are_filtered_by_min_size() {
        let mut mask = ChangeMask::empty(64, 64);
        // 30-pixel blob.
        for r in 0..5 {
            for c in 0..6 {
                mask.set_changed(r, c, true);
            }
        }
        // 80-pixel blob, far away.
        for r in 40..50 {
            for c in 40..48 {
                mask.set_changed(r, c, true);
            }
        }
        let dets = segment_objects(&mask, 50);
        assert_eq!(dets.len(), 1);
        assert_eq!(dets[0].area_px, 80);
    }

    #[test]
    fn diagonal_pixels_join_one_blob() {
        let mut mask = ChangeMask::empty(16, 16);
        mask.set_changed(3, 3, true);
        mask.set_changed(4, 4, true);
        mask.set_changed(5, 5, true);
        let dets = segment_objects(&mask, 1);
        assert_eq!(dets.len(), 1);
        assert_eq!(dets[0].area_px, 3);
    }

    fn track_at(id: u64, frame_index: u64, x: f64, y: f64) -> TrackedObject {
        TrackedObject {
            id,
            centroid_history: vec![CentroidSample {
                frame_index,
                centroid_px: Point2::new(x, y),
            }],
            bbox: BBox::of_pixel(y as usize, x as usize),
            velocity: None,
            misses: 0,
        }
    }

    fn detection_at(x: f64, y: f64) -> Detection {
        Detection {
            centroid_px: Point2::new(x, y),
            bbox: BBox::of_pixel(y as usize, x as usize),
            area_px: 64,
        }
    }

    #[test]
    fn detection_within_gate_extends_the_track() {
        let mut tracker = Tracker::new(
            TrackerParams {
                gate_px: 20.0,
                ..TrackerParams::default()
            },
            30.0,
        )
        .unwrap();
        tracker.tracks.push(track_at(7, 0, 100.0, 100.0));
        tracker.associate(&[detection_at(104.0, 100.0)], 1);
        assert_eq!(tracker.tracks.len(), 1);
        let t = &tracker.tracks[0];
        assert_eq!(t.id, 7);
        assert_eq!(t.centroid_history.len(), 2);
        assert_eq!(t.centroid_history[1].frame_index, 1);
        assert!((t.last_centroid().x - 104.0).abs() < 1e-12);
    }

    #[test]
    fn detection_outside_gate_spawns_a_new_track() {
        let mut tracker = Tracker::new(
            TrackerParams {
                gate_px: 20.0,
                ..TrackerParams::default()
            },
            30.0,
        )
        .unwrap();
        tracker.tracks.push(track_at(0, 0, 100.0, 100.0));
        tracker.next_id = 1;
        tracker.associate(&[detection_at(200.0, 200.0)], 1);
        assert_eq!(tracker.tracks.len(), 2);
        assert_eq!(tracker.tracks[1].id, 1);
        assert_eq!(tracker.tracks[0].misses, 1);
    }

    #[test]
    fn crossing_assignment_matches_minimum_total_distance() {
        // Tracks closing on each other; detections between them.
        let t0 = (100.0, 100.0);
        let t1 = (140.0, 100.0);
        let d0 = (112.0, 100.0);
        let d1 = (130.0, 100.0);
        let mut tracker = Tracker::new(TrackerParams::default(), 30.0).unwrap();
        tracker.tracks.push(track_at(0, 0, t0.0, t0.1));
        tracker.tracks.push(track_at(1, 0, t1.0, t1.1));
        tracker.next_id = 2;
        tracker.associate(&[detection_at(d0.0, d0.1), detection_at(d1.0, d1.1)], 1);

        // Enumerate both possible assignments and find the cheaper one.
        let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
        let straight = dist(t0, d0) + dist(t1, d1);
        let swapped = dist(t0, d1) + dist(t1, d0);
        assert!(straight < swapped);
        assert_eq!(tracker.tracks.len(), 2);
        assert!((tracker.tracks[0].last_centroid().x - d0.0).abs() < 1e-12);
        assert!((tracker.tracks[1].last_centroid().x - d1.0).abs() < 1e-12);
    }

    #[test]
    fn unmatched_tracks_retire_after_the_miss_budget() {
        let mut tracker = Tracker::new(
            TrackerParams {
                max_misses: 2,
                ..TrackerParams::default()
            },
            30.0,
        )
        .unwrap();
        tracker.tracks.push(track_at(0, 0, 50.0, 50.0));
        tracker.associate(&[], 1);
        assert_eq!(tracker.tracks.len(), 1);
        tracker.associate(&[], 2);
        assert!(tracker.tracks.is_empty());
    }

    #[test]
    fn stationary_centroid_estimates_zero_velocity() {
        let mut track = track_at(0, 0, 80.0, 60.0);
        for f in 1..6 {
            track.centroid_history.push(CentroidSample {
                frame_index: f,
                centroid_px: Point2::new(80.0, 60.0),
            });
        }
        let v = estimate_velocity(&track, 30.0, &test_camera(), 10).unwrap();
        assert_eq!(v.speed_mps, 0.0);
        assert_eq!(v.dir, Point2::new(0.0, 0.0));
    }

    #[test]
    fn linear_motion_estimate_is_exact() {
        // 10 px/frame at 30 fps with 0.01 m/px ground resolution: 3 m/s.
        let cam = test_camera();
        assert!((cam.meters_per_px() - 0.01).abs() < 1e-15);
        let mut track = track_at(0, 0, 100.0, 200.0);
        for f in 1..8u64 {
            track.centroid_history.push(CentroidSample {
                frame_index: f,
                centroid_px: Point2::new(100.0 + 10.0 * f as f64, 200.0),
            });
        }
        let v = estimate_velocity(&track, 30.0, &cam, 10).unwrap();
        assert!((v.speed_mps - 3.0).abs() < 1e-9, "speed {}", v.speed_mps);
        assert!((v.dir.x - 1.0).abs() < 1e-12);
        assert!(v.dir.y.abs() < 1e-12);
    }

    #[test]
    fn velocity_needs_two_samples() {
        let track = track_at(0, 0, 10.0, 10.0);
        assert!(estimate_velocity(&track, 30.0, &test_camera(), 10).is_none());
    }

    #[test]
    fn window_limits_the_slope_to_recent_motion() {
        // Old samples move, the trailing window is stationary.
        let mut track = track_at(0, 0, 0.0, 0.0);
        for f in 1..10u64 {
            track.centroid_history.push(CentroidSample {
                frame_index: f,
                centroid_px: Point2::new(10.0 * f as f64, 0.0),
            });
        }
        for f in 10..20u64 {
            track.centroid_history.push(CentroidSample {
                frame_index: f,
                centroid_px: Point2::new(90.0, 0.0),
            });
        }
        let v = estimate_velocity(&track, 30.0, &test_camera(), 10).unwrap();
        assert!(v.speed_mps < 0.5, "stale motion leaked in: {}", v.speed_mps);
    }

    fn zone_at(x: f64, y: f64) -> LandingZone {
        LandingZone {
            center_px: Point2::new(x, y),
            diameter_px: 100.0,
            diameter_m: 1.0,
            area_m2: zone_area_m2(1.0),
            admitted: true,
            edge_pair: None,
        }
    }

    fn zone_area_m2(d: f64) -> f64 {
        std::f64::consts::PI * d * d / 4.0
    }

    #[test]
    fn reach_time_is_distance_over_speed() {
        // 1000 px at 0.01 m/px is 10 m; at 2 m/s that is 5 seconds.
        let cam = test_camera();
        let mut track = track_at(3, 0, 0.0, 0.0);
        track.velocity = Some(VelocityEstimate {
            speed_mps: 2.0,
            dir: Point2::new(1.0, 0.0),
        });
        let plz = zone_at(1000.0, 0.0);
        match time_to_reach(&track, 0, &plz, &cam, 0.05) {
            Reach::Moving(est) => {
                assert_eq!(est.object_id, 3);
                assert!((est.distance_m - 10.0).abs() < 1e-9);
                assert!((est.t_x_seconds - 5.0).abs() < 1e-9);
            }
            other => panic!("expected moving reach, got {other:?}"),
        }
    }

    #[test]
    fn subfloor_speed_flags_static_not_infinite() {
        let cam = test_camera();
        let mut track = track_at(0, 0, 0.0, 0.0);
        track.velocity = Some(VelocityEstimate {
            speed_mps: 0.01,
            dir: Point2::new(0.0, 1.0),
        });
        match time_to_reach(&track, 2, &zone_at(100.0, 0.0), &cam, 0.05) {
            Reach::Static { plz_id, distance_m, .. } => {
                assert_eq!(plz_id, 2);
                assert!(distance_m > 0.0);
            }
            other => panic!("expected static reach, got {other:?}"),
        }
    }

    #[test]
    fn missing_velocity_flags_unknown() {
        let cam = test_camera();
        let track = track_at(0, 0, 0.0, 0.0);
        assert!(matches!(
            time_to_reach(&track, 0, &zone_at(50.0, 50.0), &cam, 0.05),
            Reach::Unknown { .. }
        ));
    }

    #[test]
    fn doubling_speed_halves_reach_time() {
        let cam = test_camera();
        for (x, y, v) in [(300.0, 400.0, 1.25), (750.0, 20.0, 0.4), (10.0, 900.0, 3.0)] {
            let mut track = track_at(0, 0, 0.0, 0.0);
            track.velocity = Some(VelocityEstimate {
                speed_mps: v,
                dir: Point2::new(1.0, 0.0),
            });
            let plz = zone_at(x, y);
            let t1 = match time_to_reach(&track, 0, &plz, &cam, 0.05) {
                Reach::Moving(e) => e.t_x_seconds,
                other => panic!("unexpected {other:?}"),
            };
            track.velocity = Some(VelocityEstimate {
                speed_mps: 2.0 * v,
                dir: Point2::new(1.0, 0.0),
            });
            let t2 = match time_to_reach(&track, 0, &plz, &cam, 0.05) {
                Reach::Moving(e) => e.t_x_seconds,
                other => panic!("unexpected {other:?}"),
            };
            assert!((t1 - 2.0 * t2).abs() < 1e-9 * t1.abs().max(1.0));
        }
    }

    #[test]
    fn tracker_follows_a_textured_moving_square() {
        let cam = CameraModel::new(1000.0, 10.0, 160, 90).unwrap();
        let mut tracker = Tracker::new(TrackerParams::default(), 30.0).unwrap();
        // 20x20 two-tone square stepping 3 px right per frame. The texture
        // rides with the object, so the diff covers the whole footprint and
        // the mask stays one blob per frame.
        for f in 0..12u64 {
            let mut frame = gray_frame(160, 90, 40);
            let left = 10 + 3 * f as usize;
            for r in 30..50usize {
                for c in left..left + 20 {
                    let local = (r + c - left) % 4;
                    frame.set_gray(r, c, if local < 2 { 220 } else { 120 });
                }
            }
            tracker.advance(f, &frame, &cam).unwrap();
        }
        let moving: Vec<_> = tracker
            .tracks()
            .iter()
            .filter(|t| matches!(t.motion(0.05), Motion::Moving(_)))
            .collect();
        assert_eq!(moving.len(), 1, "tracks: {:?}", tracker.tracks().len());
        let t = moving[0];
        assert_eq!(t.id, 0, "primary track id changed");
        assert!(t.centroid_history.len() >= 10);
        let v = t.velocity.unwrap();
        // 3 px/frame * 30 fps * 0.01 m/px = 0.9 m/s.
        assert!((v.speed_mps - 0.9).abs() < 0.05, "speed {}", v.speed_mps);
        assert!(v.dir.x > 0.99);
    }

    #[test]
    fn params_validation_rejects_bad_values() {
        let ok = TrackerParams::default();
        assert!(ok.validate().is_ok());
        assert!(TrackerParams { diff_threshold: 0, ..ok }.validate().is_err());
        assert!(TrackerParams { gate_px: 0.0, ..ok }.validate().is_err());
        assert!(TrackerParams { velocity_window: 1, ..ok }.validate().is_err());
        assert!(TrackerParams { static_floor_mps: -0.1, ..ok }.validate().is_err());
        assert!(Tracker::new(ok, 0.0).is_err());
    }
}
