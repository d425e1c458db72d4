//! Planar geometry helpers shared by zone detection and the simulator.
//!
//! All routines work on [`Point2`] in whichever frame the caller uses
//! (pixel space with `x = column`, `y = row`, or world space in meters).

use serde::{Deserialize, Serialize};

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[must_use]
    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    #[must_use]
    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    #[must_use]
    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Z component of the cross product `self x other`.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        self.sub(other).norm()
    }

    pub fn distance_squared(self, other: Point2) -> f64 {
        let d = self.sub(other);
        d.x * d.x + d.y * d.y
    }
}

/// Convex hull by Andrew's monotone chain, counter-clockwise in a frame where
/// `y` grows upward. Collinear points on the hull boundary are dropped.
/// Degenerate inputs (fewer than 3 distinct points) return the distinct
/// points sorted lexicographically.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return pts;
    }

    let turn = |o: Point2, a: Point2, b: Point2| a.sub(o).cross(b.sub(o));
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    // Chain ends repeat each other's starts; drop them before joining.
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // A fully collinear input collapses to its two extremes.
    if lower.len() < 2 {
        return vec![pts[0], pts[pts.len() - 1]];
    }
    lower
}

/// Closest point to `p` on the segment `a`-`b`.
pub fn closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b.sub(a);
    let len_sq = ab.dot(ab);
    if len_sq == 0.0 {
        return a;
    }
    let t = (p.sub(a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a.add(ab.scale(t))
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    p.distance(closest_point_on_segment(p, a, b))
}

/// Closest pair of points between segments `a1`-`a2` and `b1`-`b2`.
///
/// Returns `(point_on_a, point_on_b, distance)`. Crossing segments report a
/// shared point and zero distance.
pub fn segment_segment_closest(
    a1: Point2,
    a2: Point2,
    b1: Point2,
    b2: Point2,
) -> (Point2, Point2, f64) {
    if segments_intersect(a1, a2, b1, b2) {
        let p = segment_intersection_point(a1, a2, b1, b2);
        return (p, p, 0.0);
    }
    let candidates = [
        (closest_point_on_segment(a1, b1, b2), a1, true),
        (closest_point_on_segment(a2, b1, b2), a2, true),
        (closest_point_on_segment(b1, a1, a2), b1, false),
        (closest_point_on_segment(b2, a1, a2), b2, false),
    ];
    let mut best: Option<(Point2, Point2, f64)> = None;
    for (proj, orig, orig_on_a) in candidates {
        let d = proj.distance(orig);
        let pair = if orig_on_a { (orig, proj, d) } else { (proj, orig, d) };
        if best.map_or(true, |(_, _, bd)| d < bd) {
            best = Some(pair);
        }
    }
    best.unwrap()
}

fn segments_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = b2.sub(b1).cross(a1.sub(b1));
    let d2 = b2.sub(b1).cross(a2.sub(b1));
    let d3 = a2.sub(a1).cross(b1.sub(a1));
    let d4 = a2.sub(a1).cross(b2.sub(a1));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on_segment = |a: Point2, b: Point2, p: Point2| {
        p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    };
    (d1 == 0.0 && on_segment(b1, b2, a1))
        || (d2 == 0.0 && on_segment(b1, b2, a2))
        || (d3 == 0.0 && on_segment(a1, a2, b1))
        || (d4 == 0.0 && on_segment(a1, a2, b2))
}

fn segment_intersection_point(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> Point2 {
    let r = a2.sub(a1);
    let s = b2.sub(b1);
    let denom = r.cross(s);
    if denom != 0.0 {
        let t = b1.sub(a1).cross(s) / denom;
        return a1.add(r.scale(t.clamp(0.0, 1.0)));
    }
    // Collinear overlap: any shared endpoint qualifies.
    for p in [a1, a2] {
        if point_segment_distance(p, b1, b2) == 0.0 {
            return p;
        }
    }
    b1
}

/// Minimum distance between the boundaries of two polygons, with the
/// realizing pair of boundary points.
///
/// Polygons are vertex lists with an implicit closing edge. Overlapping or
/// touching boundaries report zero.
pub fn polygon_boundary_gap(a: &[Point2], b: &[Point2]) -> (Point2, Point2, f64) {
    assert!(!a.is_empty() && !b.is_empty(), "polygon must have vertices");
    let mut best: Option<(Point2, Point2, f64)> = None;
    for i in 0..a.len() {
        let a1 = a[i];
        let a2 = a[(i + 1) % a.len()];
        for j in 0..b.len() {
            let b1 = b[j];
            let b2 = b[(j + 1) % b.len()];
            let (pa, pb, d) = segment_segment_closest(a1, a2, b1, b2);
            if best.map_or(true, |(_, _, bd)| d < bd) {
                best = Some((pa, pb, d));
            }
        }
    }
    best.unwrap()
}

/// Even-odd containment test. Points exactly on the boundary may land on
/// either side; callers needing exact boundary handling should test the
/// boundary distance separately.
pub fn polygon_contains(poly: &[Point2], p: Point2) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let pi = poly[i];
        let pj = poly[j];
        if (pi.y > p.y) != (pj.y > p.y) {
            let x_cross = pi.x + (p.y - pi.y) / (pj.y - pi.y) * (pj.x - pi.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Minimum distance from `p` to the polygon boundary (zero only on the
/// boundary itself; interior points report their distance to the outline).
pub fn polygon_boundary_distance(poly: &[Point2], p: Point2) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let d = point_segment_distance(p, poly[i], poly[(i + 1) % n]);
        if d < best {
            best = d;
        }
    }
    best
}

/// Signed distance-like clearance from `p` to a solid polygonal obstacle:
/// zero inside or on the boundary, boundary distance outside.
pub fn polygon_clearance(poly: &[Point2], p: Point2) -> f64 {
    if polygon_contains(poly, p) {
        0.0
    } else {
        polygon_boundary_distance(poly, p)
    }
}

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets holding `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Canonical component labels: `labels[i]` equals `labels[j]` iff `i`
    /// and `j` share a set. Labels are dense and ordered by first occurrence.
    pub fn component_labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut label_of_root = vec![usize::MAX; n];
        let mut labels = vec![0; n];
        let mut next = 0;
        for i in 0..n {
            let r = self.find(i);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            labels[i] = label_of_root[r];
        }
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![
            p(0.0, 0.0),
            p(4.0, 0.0),
            p(4.0, 4.0),
            p(0.0, 4.0),
            p(2.0, 2.0),
            p(1.0, 3.0),
            p(2.0, 0.0), // collinear on the bottom edge
        ];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        for corner in [p(0.0, 0.0), p(4.0, 0.0), p(4.0, 4.0), p(0.0, 4.0)] {
            assert!(
                hull.iter().any(|h| h.distance(corner) < 1e-12),
                "missing corner {corner:?} in {hull:?}"
            );
        }
    }

    #[test]
    fn hull_degenerate_inputs() {
        assert_eq!(convex_hull(&[p(1.0, 1.0)]), vec![p(1.0, 1.0)]);
        let collinear = vec![p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), p(3.0, 3.0)];
        let hull = convex_hull(&collinear);
        assert_eq!(hull, vec![p(0.0, 0.0), p(3.0, 3.0)]);
    }

    #[test]
    fn segment_distance_parallel_and_crossing() {
        let (pa, pb, d) =
            segment_segment_closest(p(0.0, 0.0), p(10.0, 0.0), p(0.0, 3.0), p(10.0, 3.0));
        assert!((d - 3.0).abs() < 1e-12);
        assert!((pa.y - 0.0).abs() < 1e-12 && (pb.y - 3.0).abs() < 1e-12);

        let (_, _, d) =
            segment_segment_closest(p(0.0, 0.0), p(4.0, 4.0), p(0.0, 4.0), p(4.0, 0.0));
        assert_eq!(d, 0.0);
    }

    #[test]
    fn segment_distance_endpoint_case() {
        let (pa, pb, d) =
            segment_segment_closest(p(0.0, 0.0), p(1.0, 0.0), p(4.0, 4.0), p(7.0, 9.0));
        assert!((d - p(1.0, 0.0).distance(p(4.0, 4.0))).abs() < 1e-12);
        assert_eq!(pa, p(1.0, 0.0));
        assert_eq!(pb, p(4.0, 4.0));
    }

    #[test]
    fn polygon_gap_between_rectangles() {
        let a = vec![p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)];
        let b = vec![p(5.0, 0.0), p(8.0, 0.0), p(8.0, 2.0), p(5.0, 2.0)];
        let (pa, pb, d) = polygon_boundary_gap(&a, &b);
        assert!((d - 3.0).abs() < 1e-12);
        assert!((pa.x - 2.0).abs() < 1e-12);
        assert!((pb.x - 5.0).abs() < 1e-12);
    }

    #[test]
    fn containment_and_clearance() {
        let sq = vec![p(0.0, 0.0), p(4.0, 0.0), p(4.0, 4.0), p(0.0, 4.0)];
        assert!(polygon_contains(&sq, p(2.0, 2.0)));
        assert!(!polygon_contains(&sq, p(5.0, 2.0)));
        assert_eq!(polygon_clearance(&sq, p(2.0, 2.0)), 0.0);
        assert!((polygon_clearance(&sq, p(7.0, 2.0)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn union_find_components() {
        let mut uf = UnionFind::new(6);
        uf.union(0, 1);
        uf.union(1, 2);
        uf.union(4, 5);
        assert!(uf.same(0, 2));
        assert!(!uf.same(0, 3));
        let labels = uf.component_labels();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[0], labels[2]);
        assert_ne!(labels[0], labels[3]);
        assert_eq!(labels[4], labels[5]);
    }
}
