//! Potential landing zone (PLZ) detection on an edge map.
//!
//! Edge pixels and the frame border act as obstacles; an exact distance
//! transform places the largest obstacle-free circles, which are scaled to
//! ground meters through the nadir pinhole model and admitted against a
//! minimum-area threshold.

pub mod edt;

use crate::geometry::{self, Point2, UnionFind};
use crate::imaging::EdgeMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlzError {
    #[error("camera parameter {name} must be positive, got {value}")]
    InvalidCamera { name: &'static str, value: f64 },
    #[error("minimum zone area must be positive, got {0}")]
    InvalidMinArea(f64),
}

/// Nadir pinhole camera over flat ground.
///
/// A pixel offset `d_px` from the principal point spans
/// `d_px * altitude_m / focal_px` meters on the ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraModel {
    pub focal_px: f64,
    pub altitude_m: f64,
    pub width_px: usize,
    pub height_px: usize,
}

impl CameraModel {
    pub fn new(
        focal_px: f64,
        altitude_m: f64,
        width_px: usize,
        height_px: usize,
    ) -> Result<Self, PlzError> {
        if !(focal_px > 0.0) {
            return Err(PlzError::InvalidCamera {
                name: "focal_px",
                value: focal_px,
            });
        }
        if !(altitude_m > 0.0) {
            return Err(PlzError::InvalidCamera {
                name: "altitude_m",
                value: altitude_m,
            });
        }
        Ok(CameraModel {
            focal_px,
            altitude_m,
            width_px,
            height_px,
        })
    }

    /// Ground meters per pixel at the current altitude.
    pub fn meters_per_px(&self) -> f64 {
        self.altitude_m / self.focal_px
    }

    /// Principal point `(row, col)`; pixel centers are symmetric around it.
    pub fn principal_point(&self) -> (f64, f64) {
        (
            (self.height_px as f64 - 1.0) / 2.0,
            (self.width_px as f64 - 1.0) / 2.0,
        )
    }

    /// Same camera with a different altitude (used while descending).
    #[must_use]
    pub fn at_altitude(&self, altitude_m: f64) -> CameraModel {
        CameraModel {
            altitude_m,
            ..*self
        }
    }
}

/// Ground distance spanned by a pixel distance under the nadir model.
pub fn px_to_meters(d_px: f64, cam: &CameraModel) -> f64 {
    debug_assert!(cam.focal_px > 0.0);
    d_px * cam.altitude_m / cam.focal_px
}

/// Ground area of a circular zone of the given diameter: `pi * D^2 / 4`.
pub fn zone_area(diameter_m: f64) -> f64 {
    std::f64::consts::PI * diameter_m * diameter_m / 4.0
}

/// Alternate square-footprint convention `D * D`, kept for comparison with
/// the circular rule used everywhere else.
pub fn zone_area_square(diameter_m: f64) -> f64 {
    diameter_m * diameter_m
}

/// One 8-connected component of edge pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    /// Boundary-ordered walk of the component: consecutive entries are
    /// 8-adjacent, narrow spurs appear out-and-back. Interior pixels of
    /// components thicker than two pixels are appended after the walk.
    pub points: Vec<(usize, usize)>,
}

impl Contour {
    /// Distinct pixels of the component.
    pub fn pixel_set(&self) -> BTreeSet<(usize, usize)> {
        self.points.iter().copied().collect()
    }

    pub fn pixel_count(&self) -> usize {
        self.pixel_set().len()
    }
}

/// A cluster of contours treated as one obstacle, with its convex hull in
/// pixel coordinates (`x = col`, `y = row`).
#[derive(Debug, Clone, PartialEq)]
pub struct ObstaclePolygon {
    pub contour_indices: Vec<usize>,
    pub hull: Vec<Point2>,
}

/// Closest boundary approach between two obstacle polygons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMeasurement {
    pub point_a: Point2,
    pub point_b: Point2,
    pub distance_px: f64,
}

/// A candidate landing circle on the edge map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandingZone {
    /// Circle center in pixel coordinates (`x = col`, `y = row`).
    pub center_px: Point2,
    pub diameter_px: f64,
    pub diameter_m: f64,
    pub area_m2: f64,
    /// True when `area_m2` meets the minimum-area threshold.
    pub admitted: bool,
    /// Obstacle boundary points realizing the diameter, when identifiable:
    /// the nearest edge (or frame border) point and its opposite-side
    /// counterpart.
    pub edge_pair: Option<(Point2, Point2)>,
}

impl LandingZone {
    pub fn radius_px(&self) -> f64 {
        self.diameter_px / 2.0
    }
}

const NEIGHBORS8: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Clockwise Moore neighborhood starting east, in `(d_row, d_col)` with rows
/// growing downward.
const MOORE_CLOCKWISE: [(i64, i64); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];

/// Splits an edge map into 8-connected components and traces each into a
/// boundary-ordered contour. Components are emitted in scan order of their
/// first pixel, so output is deterministic.
pub fn extract_contours(edges: &EdgeMap) -> Vec<Contour> {
    let (w, h) = (edges.width(), edges.height());
    let mut component = vec![usize::MAX; w * h];
    let mut components: Vec<Vec<(usize, usize)>> = Vec::new();

    for row in 0..h {
        for col in 0..w {
            if !edges.is_edge(row, col) || component[row * w + col] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut pixels = Vec::new();
            let mut stack = vec![(row, col)];
            component[row * w + col] = id;
            while let Some((r, c)) = stack.pop() {
                pixels.push((r, c));
                for (dr, dc) in NEIGHBORS8 {
                    let nr = r as i64 + dr;
                    let nc = c as i64 + dc;
                    if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    if edges.is_edge(nr, nc) && component[nr * w + nc] == usize::MAX {
                        component[nr * w + nc] = id;
                        stack.push((nr, nc));
                    }
                }
            }
            components.push(pixels);
        }
    }

    components
        .into_iter()
        .map(|pixels| {
            let set: BTreeSet<(usize, usize)> = pixels.into_iter().collect();
            Contour {
                points: trace_component(&set),
            }
        })
        .collect()
}

/// Moore-neighbor boundary trace from the lexicographically smallest pixel,
/// with Jacob's stopping criterion. Pixels the boundary walk cannot reach
/// (interiors of thick clumps) are appended in scan order.
fn trace_component(pixels: &BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    let &start = pixels.iter().next().expect("component is nonempty");
    if pixels.len() == 1 {
        return vec![start];
    }

    let neighbor = |p: (usize, usize), dir: usize| -> Option<(usize, usize)> {
        let (dr, dc) = MOORE_CLOCKWISE[dir];
        let nr = p.0 as i64 + dr;
        let nc = p.1 as i64 + dc;
        if nr < 0 || nc < 0 {
            return None;
        }
        let q = (nr as usize, nc as usize);
        pixels.contains(&q).then_some(q)
    };

    // The start pixel is topmost-leftmost, so its west and northern
    // neighbors are empty; begin the sweep just past west.
    let mut walk = vec![start];
    let mut current = start;
    let mut sweep_from = 5usize; // index of NW in MOORE_CLOCKWISE
    let mut first_move: Option<(usize, (usize, usize))> = None;
    let cap = 4 * pixels.len() + 16;

    for _ in 0..cap {
        let mut found = None;
        for k in 0..8 {
            let dir = (sweep_from + k) % 8;
            if let Some(q) = neighbor(current, dir) {
                found = Some((dir, q));
                break;
            }
        }
        let Some((dir, next)) = found else { break };
        match first_move {
            None => first_move = Some((dir, next)),
            Some((fd, fq)) => {
                if current == start && dir == fd && next == fq {
                    break;
                }
            }
        }
        walk.push(next);
        current = next;
        // Resume the sweep from the direction just past the one pointing
        // back where we came from: two steps counter-clockwise of `dir`.
        sweep_from = (dir + 6) % 8;
    }
    if walk.len() > 1 && walk.first() == walk.last() {
        walk.pop();
    }

    let visited: BTreeSet<(usize, usize)> = walk.iter().copied().collect();
    for &p in pixels {
        if !visited.contains(&p) {
            walk.push(p);
        }
    }
    walk
}

/// Groups contours whose minimum point-to-point distance is below
/// `radius_px` (strict) into obstacle polygons, taking the transitive
/// closure. Each polygon carries the convex hull of its member pixels.
pub fn cluster_contours(contours: &[Contour], radius_px: f64) -> Vec<ObstaclePolygon> {
    assert!(radius_px > 0.0, "cluster radius must be positive");
    let mut uf = UnionFind::new(contours.len());

    // Spatial hash with cell size = radius: any pair closer than the radius
    // lands in the same or adjacent cells.
    let cell = radius_px;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<(usize, (usize, usize))>> =
        std::collections::HashMap::new();
    for (ci, contour) in contours.iter().enumerate() {
        for &p in &contour.pixel_set() {
            let key = ((p.0 as f64 / cell) as i64, (p.1 as f64 / cell) as i64);
            grid.entry(key).or_default().push((ci, p));
        }
    }
    let radius_sq = radius_px * radius_px;
    for (&(gr, gc), bucket) in &grid {
        for &(ci, (r, c)) in bucket {
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let Some(other) = grid.get(&(gr + dr, gc + dc)) else {
                        continue;
                    };
                    for &(cj, (orr, oc)) in other {
                        if cj == ci {
                            continue;
                        }
                        let d_sq = (r as f64 - orr as f64).powi(2)
                            + (c as f64 - oc as f64).powi(2);
                        if d_sq < radius_sq {
                            uf.union(ci, cj);
                        }
                    }
                }
            }
        }
    }

    let labels = uf.component_labels();
    let cluster_count = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cluster_count];
    for (ci, &label) in labels.iter().enumerate() {
        members[label].push(ci);
    }

    members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|contour_indices| {
            let mut pts = Vec::new();
            for &ci in &contour_indices {
                for &(r, c) in &contours[ci].pixel_set() {
                    pts.push(Point2::new(c as f64, r as f64));
                }
            }
            ObstaclePolygon {
                hull: geometry::convex_hull(&pts),
                contour_indices,
            }
        })
        .collect()
}

/// Minimum pixel distance between two obstacle polygon boundaries, with the
/// realizing point pair.
pub fn polygon_gap_px(a: &ObstaclePolygon, b: &ObstaclePolygon) -> GapMeasurement {
    let (point_a, point_b, distance_px) = geometry::polygon_boundary_gap(&a.hull, &b.hull);
    GapMeasurement {
        point_a,
        point_b,
        distance_px,
    }
}

/// Tuning for candidate extraction in [`detect_zone_candidates`].
#[derive(Debug, Clone, Copy)]
struct CandidateLimits {
    /// Smallest circle radius worth reporting at all (admitted or not).
    floor_radius_px: f64,
    max_candidates: usize,
}

/// All landing circle candidates on the edge map, largest area first,
/// including ones rejected by the minimum-area threshold (flagged via
/// `admitted`). See [`detect_landing_zones`] for the admitted-only view.
pub fn detect_zone_candidates(
    edges: &EdgeMap,
    cam: &CameraModel,
    min_area_m2: f64,
) -> Result<Vec<LandingZone>, PlzError> {
    if !(min_area_m2 > 0.0) {
        return Err(PlzError::InvalidMinArea(min_area_m2));
    }
    if !(cam.focal_px > 0.0) {
        return Err(PlzError::InvalidCamera {
            name: "focal_px",
            value: cam.focal_px,
        });
    }
    if !(cam.altitude_m > 0.0) {
        return Err(PlzError::InvalidCamera {
            name: "altitude_m",
            value: cam.altitude_m,
        });
    }
    let (w, h) = (edges.width(), edges.height());
    if w == 0 || h == 0 {
        return Ok(Vec::new());
    }

    // Distance transform over a padded grid whose outer ring stands in for
    // the frame border, so circles are clipped by the visible area.
    let (pw, ph) = (w + 2, h + 2);
    let mut obstacles = vec![false; pw * ph];
    for col in 0..pw {
        obstacles[col] = true;
        obstacles[(ph - 1) * pw + col] = true;
    }
    for row in 0..ph {
        obstacles[row * pw] = true;
        obstacles[row * pw + pw - 1] = true;
    }
    for row in 0..h {
        for col in 0..w {
            if edges.is_edge(row, col) {
                obstacles[(row + 1) * pw + col + 1] = true;
            }
        }
    }
    let dist_sq = edt::squared_edt(&obstacles, pw, ph);

    let min_diameter_m = (4.0 * min_area_m2 / std::f64::consts::PI).sqrt();
    let min_radius_px = min_diameter_m / px_to_meters(2.0, cam);
    let limits = CandidateLimits {
        floor_radius_px: (0.5 * min_radius_px).max(2.0),
        max_candidates: 24,
    };

    let (pp_row, pp_col) = cam.principal_point();
    let mut cells: Vec<(f64, f64, usize, usize)> = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let radius = dist_sq[(row + 1) * pw + col + 1].sqrt();
            if radius >= limits.floor_radius_px {
                let dr = row as f64 - pp_row;
                let dc = col as f64 - pp_col;
                cells.push((radius, dr * dr + dc * dc, row, col));
            }
        }
    }
    // Largest circle first; ties resolve toward the principal point, then
    // scan order, making the result deterministic.
    cells.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });

    let mut accepted: Vec<(Point2, f64)> = Vec::new();
    for &(radius, _, row, col) in &cells {
        if accepted.len() >= limits.max_candidates {
            break;
        }
        let center = Point2::new(col as f64, row as f64);
        if accepted
            .iter()
            .any(|&(c, r)| center.distance(c) < r)
        {
            continue;
        }
        accepted.push((center, radius));
    }

    let mut zones: Vec<LandingZone> = accepted
        .into_iter()
        .map(|(center, radius)| {
            let diameter_px = 2.0 * radius;
            let diameter_m = px_to_meters(diameter_px, cam);
            let area_m2 = zone_area(diameter_m);
            LandingZone {
                center_px: center,
                diameter_px,
                diameter_m,
                area_m2,
                admitted: area_m2 >= min_area_m2,
                edge_pair: diameter_edge_pair(edges, center, radius),
            }
        })
        .collect();
    zones.sort_by(|a, b| {
        b.area_m2
            .total_cmp(&a.area_m2)
            .then(a.center_px.y.total_cmp(&b.center_px.y))
            .then(a.center_px.x.total_cmp(&b.center_px.x))
    });
    Ok(zones)
}

/// Admitted landing zones (area at or above the threshold), largest first.
pub fn detect_landing_zones(
    edges: &EdgeMap,
    cam: &CameraModel,
    min_area_m2: f64,
) -> Result<Vec<LandingZone>, PlzError> {
    Ok(detect_zone_candidates(edges, cam, min_area_m2)?
        .into_iter()
        .filter(|z| z.admitted)
        .collect())
}

/// Finds the obstacle boundary points realizing a circle's diameter: the
/// nearest obstacle point (edge pixel or frame border projection) and the
/// nearest one on the opposite side of the center.
fn diameter_edge_pair(edges: &EdgeMap, center: Point2, radius: f64) -> Option<(Point2, Point2)> {
    let (w, h) = (edges.width() as f64, edges.height() as f64);
    // Border projections onto the virtual obstacle ring one pixel outside.
    let mut candidates: Vec<Point2> = vec![
        Point2::new(center.x, -1.0),
        Point2::new(center.x, h),
        Point2::new(-1.0, center.y),
        Point2::new(w, center.y),
    ];
    // Only edge pixels near the circle can realize the diameter.
    let reach = radius + 2.0;
    for (r, c) in edges.edge_pixels() {
        let p = Point2::new(c as f64, r as f64);
        if p.distance(center) <= reach {
            candidates.push(p);
        }
    }
    let nearest = candidates
        .iter()
        .copied()
        .min_by(|a, b| a.distance(center).total_cmp(&b.distance(center)))?;
    let dir = nearest.sub(center);
    let opposite = candidates
        .iter()
        .copied()
        .filter(|p| p.sub(center).dot(dir) < 0.0)
        .min_by(|a, b| a.distance(center).total_cmp(&b.distance(center)));
    let second = opposite.unwrap_or_else(|| center.sub(dir));
    Some((nearest, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::EdgeMap;

    fn edge_map_from(pixels: &[(usize, usize)], width: usize, height: usize) -> EdgeMap {
        let mut edges = EdgeMap::empty(width, height);
        for &(r, c) in pixels {
            edges.set_edge(r, c, true);
        }
        edges
    }

    fn test_camera() -> CameraModel {
        CameraModel::new(500.0, 10.0, 640, 480).unwrap()
    }

    #[test]
    fn camera_scale_and_validation() {
        let cam = test_camera();
        assert!((px_to_meters(100.0, &cam) - 2.0).abs() < 1e-12);
        assert!((cam.meters_per_px() - 0.02).abs() < 1e-12);
        assert!(CameraModel::new(0.0, 10.0, 64, 48).is_err());
        assert!(CameraModel::new(500.0, -1.0, 64, 48).is_err());
    }

    #[test]
    fn area_conventions() {
        assert!((zone_area(2.0) - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(zone_area_square(2.0), 4.0);
        // The circular rule is strictly smaller for any diameter.
        for d in [0.5, 1.0, 3.7] {
            assert!(zone_area(d) < zone_area_square(d));
        }
    }

    #[test]
    fn single_pixel_contour() {
        let edges = edge_map_from(&[(5, 7)], 16, 16);
        let contours = extract_contours(&edges);
        assert_eq!(contours.len(), 1);
        assert_eq!(contours[0].points, vec![(5, 7)]);
    }

    #[test]
    fn ring_traces_every_pixel_once_with_adjacency() {
        // 1-pixel-wide square ring, rows/cols 3..=8.
        let mut pixels = Vec::new();
        for i in 3..=8usize {
            pixels.push((3, i));
            pixels.push((8, i));
            pixels.push((i, 3));
            pixels.push((i, 8));
        }
        let edges = edge_map_from(&pixels, 16, 16);
        let contours = extract_contours(&edges);
        assert_eq!(contours.len(), 1);
        let contour = &contours[0];
        let expected: BTreeSet<_> = pixels.iter().copied().collect();
        assert_eq!(contour.pixel_set(), expected);
        assert_eq!(contour.points.len(), expected.len(), "ring walk revisits pixels");
        for pair in contour.points.windows(2) {
            let dr = (pair[0].0 as i64 - pair[1].0 as i64).abs();
            let dc = (pair[0].1 as i64 - pair[1].1 as i64).abs();
            assert!(dr <= 1 && dc <= 1 && (dr, dc) != (0, 0));
        }
    }

    #[test]
    fn two_rings_become_two_contours() {
        let mut pixels = Vec::new();
        for i in 2..=5usize {
            pixels.push((2, i));
            pixels.push((5, i));
            pixels.push((i, 2));
            pixels.push((i, 5));
        }
        let ring_a: Vec<_> = pixels.clone();
        let ring_b: Vec<_> = pixels.iter().map(|&(r, c)| (r + 10, c + 10)).collect();
        let edges = edge_map_from(&[ring_a.clone(), ring_b.clone()].concat(), 24, 24);
        let contours = extract_contours(&edges);
        assert_eq!(contours.len(), 2);
        assert_eq!(contours[0].pixel_count(), ring_a.iter().collect::<BTreeSet<_>>().len());
        assert_eq!(contours[1].pixel_count(), ring_b.iter().collect::<BTreeSet<_>>().len());
    }

    #[test]
    fn clustering_threshold_is_strict_at_the_radius() {
        // Two single-pixel contours 25 px apart cluster; 35 px apart do not.
        let near = edge_map_from(&[(10, 10), (10, 35)], 64, 64);
        let clusters = cluster_contours(&extract_contours(&near), 30.0);
        assert_eq!(clusters.len(), 1);

        let far = edge_map_from(&[(10, 10), (10, 45)], 64, 64);
        let clusters = cluster_contours(&extract_contours(&far), 30.0);
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn clustering_takes_transitive_closure() {
        // A-B and B-C within the radius, A-C beyond it: one cluster.
        let edges = edge_map_from(&[(10, 0), (10, 20), (10, 40)], 64, 64);
        let clusters = cluster_contours(&extract_contours(&edges), 30.0);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].contour_indices.len(), 3);
    }

    #[test]
    fn polygon_gap_between_wall_clusters() {
        // Two short vertical wall segments 40 px apart.
        let mut pixels = Vec::new();
        for r in 10..=20usize {
            pixels.push((r, 10));
            pixels.push((r, 50));
        }
        let edges = edge_map_from(&pixels, 64, 64);
        let contours = extract_contours(&edges);
        let polys = cluster_contours(&contours, 30.0);
        assert_eq!(polys.len(), 2);
        let gap = polygon_gap_px(&polys[0], &polys[1]);
        assert!((gap.distance_px - 40.0).abs() < 1e-9);
        let xs = [gap.point_a.x, gap.point_b.x];
        assert!(xs.contains(&10.0) && xs.contains(&50.0));
    }

    #[test]
    fn empty_edge_map_yields_frame_clipped_zone() {
        let edges = EdgeMap::empty(640, 480);
        let cam = test_camera();
        let zones = detect_landing_zones(&edges, &cam, 3.0).unwrap();
        assert!(!zones.is_empty());
        // Largest zone is the inscribed circle clipped by the short frame
        // side, centered on the principal point.
        let z = &zones[0];
        assert!((z.diameter_px - 480.0).abs() < 1e-9, "diameter {}", z.diameter_px);
        assert!((z.diameter_m - 9.6).abs() < 1e-9);
        assert!((z.center_px.x - 319.5).abs() <= 0.5);
        assert!((z.center_px.y - 239.5).abs() <= 0.5);
        assert!(z.admitted);
    }

    #[test]
    fn corridor_zone_diameter_follows_wall_gap() {
        // Vertical edge walls at columns 150 and 450: the corridor between
        // them is wider than either outer strip, so it hosts the best zone.
        let mut pixels = Vec::new();
        for r in 0..480usize {
            pixels.push((r, 150));
            pixels.push((r, 450));
        }
        let edges = edge_map_from(&pixels, 640, 480);
        let cam = test_camera();
        let zones = detect_landing_zones(&edges, &cam, 3.0).unwrap();
        assert!(!zones.is_empty());
        let z = &zones[0];
        assert!((z.diameter_px - 300.0).abs() < 1e-9);
        assert!((z.diameter_m - 6.0).abs() < 1e-9);
        assert!((z.area_m2 - zone_area(6.0)).abs() < 1e-12);
        assert!((z.center_px.x - 300.0).abs() < 1e-9);
        let (pa, pb) = z.edge_pair.expect("corridor zone has a realizing pair");
        let cols = [pa.x, pb.x];
        assert!(cols.contains(&150.0) && cols.contains(&450.0), "pair {cols:?}");
    }

    #[test]
    fn zones_below_minimum_area_are_rejected_but_reported() {
        // 60 px corridor at 0.02 m/px is 1.2 m wide: area ~1.13 m^2 < 3.
        let mut pixels = Vec::new();
        for r in 0..200usize {
            pixels.push((r, 40));
            pixels.push((r, 100));
        }
        let edges = edge_map_from(&pixels, 200, 200);
        let cam = CameraModel::new(500.0, 10.0, 200, 200).unwrap();
        let admitted = detect_landing_zones(&edges, &cam, 3.0).unwrap();
        let candidates = detect_zone_candidates(&edges, &cam, 3.0).unwrap();
        assert!(!admitted.is_empty(), "wide right strip should qualify");
        assert!(admitted.iter().all(|z| z.area_m2 >= 3.0));
        assert!(candidates.iter().any(|z| !z.admitted && z.diameter_px <= 60.5),
            "rejected corridor candidate missing: {candidates:?}");
    }

    #[test]
    fn no_zone_interior_contains_an_edge_pixel() {
        // Scatter obstacles, then rasterize-check every returned circle.
        let mut pixels = Vec::new();
        for i in 0..40usize {
            let r = (i * 97) % 480;
            let c = (i * 211) % 640;
            pixels.push((r, c));
        }
        let edges = edge_map_from(&pixels, 640, 480);
        let cam = test_camera();
        for z in detect_zone_candidates(&edges, &cam, 3.0).unwrap() {
            let r = z.radius_px();
            for &(er, ec) in &pixels {
                let d = Point2::new(ec as f64, er as f64).distance(z.center_px);
                assert!(
                    d >= r - 1e-9,
                    "edge pixel ({er},{ec}) inside zone at {:?} r {r}",
                    z.center_px
                );
            }
        }
    }

    #[test]
    fn candidates_are_sorted_by_area_and_deduplicated() {
        // Three corridors of widths 200, 140, 80 px.
        let mut pixels = Vec::new();
        for r in 0..480usize {
            for c in [0usize, 200, 340, 420] {
                if c > 0 {
                    pixels.push((r, c));
                }
            }
        }
        let edges = edge_map_from(&pixels, 640, 480);
        let cam = test_camera();
        let zones = detect_zone_candidates(&edges, &cam, 3.0).unwrap();
        for pair in zones.windows(2) {
            assert!(pair[0].area_m2 >= pair[1].area_m2);
        }
        for (i, a) in zones.iter().enumerate() {
            for b in zones.iter().skip(i + 1) {
                assert!(
                    a.center_px.distance(b.center_px) >= a.radius_px().min(b.radius_px()) - 1e-9,
                    "candidate centers nest: {a:?} vs {b:?}"
                );
            }
        }
    }
}
