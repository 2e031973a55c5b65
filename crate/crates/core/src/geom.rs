//! Convex regions in the (R1, R2) rate plane.
//!
//! Polygons are stored counter-clockwise starting at the lexicographically
//! smallest vertex. Points and segments are valid polygons: sweeps at extreme
//! power splits produce them routinely.

use alloc::vec::Vec;
use libm::sqrt;

/// Vertex deduplication and collinearity tolerance, in bits.
pub const VERTEX_TOL: f64 = 1e-9;

/// Slope classification tolerance used by the facet audit.
pub const SLOPE_TOL: f64 = 1e-6;

/// The facet slopes a conferencing rate region may exhibit.
pub const HK_SLOPES: [f64; 5] = [0.0, -0.5, -1.0, -2.0, f64::INFINITY];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub const fn new(r1: f64, r2: f64) -> Self {
        RatePair { r1, r2 }
    }

    pub fn mirrored(self) -> Self {
        RatePair::new(self.r2, self.r1)
    }

    fn sub(self, o: RatePair) -> RatePair {
        RatePair::new(self.r1 - o.r1, self.r2 - o.r2)
    }

    fn norm(self) -> f64 {
        sqrt(self.r1 * self.r1 + self.r2 * self.r2)
    }

    fn dist(self, o: RatePair) -> f64 {
        self.sub(o).norm()
    }
}

impl From<(f64, f64)> for RatePair {
    fn from((r1, r2): (f64, f64)) -> Self {
        RatePair::new(r1, r2)
    }
}

/// z-component of `(a - o) × (b - o)`.
fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

fn segment_distance(p: RatePair, a: RatePair, b: RatePair) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.r1 * ab.r1 + ab.r2 * ab.r2;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let ap = p.sub(a);
    let t = ((ap.r1 * ab.r1 + ap.r2 * ab.r2) / len2).clamp(0.0, 1.0);
    p.dist(RatePair::new(a.r1 + t * ab.r1, a.r2 + t * ab.r2))
}

/// Convex polygon, CCW from the lexicographic minimum. May hold zero
/// (empty), one (point) or two (segment) vertices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon2D {
    vertices: Vec<RatePair>,
}

impl Polygon2D {
    /// Wraps vertices that are already a convex CCW cycle. Use
    /// [`convex_hull`] for arbitrary point sets.
    pub fn from_ccw_unchecked(vertices: Vec<RatePair>) -> Self {
        Polygon2D { vertices }
    }

    pub fn vertices(&self) -> &[RatePair] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Points and segments.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn mirrored(&self) -> Polygon2D {
        convex_hull(
            &self
                .vertices
                .iter()
                .map(|v| v.mirrored())
                .collect::<Vec<_>>(),
        )
    }

    pub fn edges(&self) -> impl Iterator<Item = (RatePair, RatePair)> + '_ {
        let n = self.vertices.len();
        (0..if n < 2 { 0 } else { n }).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let o = self.vertices[0];
        (1..n - 1)
            .map(|i| cross(o, self.vertices[i], self.vertices[i + 1]))
            .sum::<f64>()
            / 2.0
    }

    /// Euclidean distance from `p` to the polygon (zero inside).
    pub fn distance_to(&self, p: RatePair) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => p.dist(self.vertices[0]),
            2 => segment_distance(p, self.vertices[0], self.vertices[1]),
            _ => {
                if self.edges().all(|(a, b)| cross(a, b, p) >= 0.0) {
                    return 0.0;
                }
                self.edges()
                    .map(|(a, b)| segment_distance(p, a, b))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Outward half-planes `n·x ≤ c` of a non-degenerate polygon, one per
    /// edge, with unit normals.
    pub fn half_planes(&self) -> Vec<([f64; 2], f64)> {
        if self.is_degenerate() {
            return Vec::new();
        }
        self.edges()
            .map(|(a, b)| {
                let d = b.sub(a);
                let len = d.norm();
                let n = [d.r2 / len, -d.r1 / len];
                (n, n[0] * a.r1 + n[1] * a.r2)
            })
            .collect()
    }

    pub fn max_r1(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.r1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Support function `max w·x` over the polygon.
    pub fn support(&self, w: [f64; 2]) -> f64 {
        self.vertices
            .iter()
            .map(|v| w[0] * v.r1 + w[1] * v.r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Convex set obtained by convexifying a union of polygons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region2D {
    pub hull: Polygon2D,
}

impl Region2D {
    pub fn new(hull: Polygon2D) -> Self {
        Region2D { hull }
    }

    pub fn vertices(&self) -> &[RatePair] {
        self.hull.vertices()
    }

    pub fn mirrored(&self) -> Region2D {
        Region2D::new(self.hull.mirrored())
    }
}

impl From<Polygon2D> for Region2D {
    fn from(p: Polygon2D) -> Self {
        Region2D::new(p)
    }
}

/// Monotone-chain hull, CCW from the lexicographic minimum; collinear and
/// duplicate points (within [`VERTEX_TOL`]) are dropped.
pub fn convex_hull(points: &[RatePair]) -> Polygon2D {
    let mut pts: Vec<RatePair> = points
        .iter()
        .copied()
        .filter(|p| p.r1.is_finite() && p.r2.is_finite())
        // `+ 0.0` turns -0.0 into 0.0 so the sort is geometric.
        .map(|p| RatePair::new(p.r1 + 0.0, p.r2 + 0.0))
        .collect();
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    pts.dedup_by(|b, a| (a.r1 - b.r1).abs() <= VERTEX_TOL && (a.r2 - b.r2).abs() <= VERTEX_TOL);
    if pts.len() <= 1 {
        return Polygon2D { vertices: pts };
    }
    let turn_ok = |o: RatePair, a: RatePair, b: RatePair| cross(o, a, b) > 0.0;
    let mut hull: Vec<RatePair> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && !turn_ok(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && !turn_ok(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    // Drop vertices within VERTEX_TOL of the chord of their neighbours.
    let mut changed = true;
    while changed && hull.len() > 2 {
        changed = false;
        for i in 0..hull.len() {
            let n = hull.len();
            let (a, v, b) = (hull[(i + n - 1) % n], hull[i], hull[(i + 1) % n]);
            let base = b.sub(a).norm();
            let off = if base > 0.0 {
                cross(a, b, v).abs() / base
            } else {
                v.dist(a)
            };
            if off <= VERTEX_TOL {
                hull.remove(i);
                changed = true;
                break;
            }
        }
    }
    if hull.len() == 2 && hull[0].dist(hull[1]) <= VERTEX_TOL {
        hull.pop();
    }
    // Restart at the lexicographic minimum.
    if let Some(start) = (0..hull.len()).min_by(|&i, &j| {
        let (a, b) = (hull[i], hull[j]);
        a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2))
    }) {
        hull.rotate_left(start);
    }
    Polygon2D { vertices: hull }
}

/// Convex hull of every vertex of every polygon.
pub fn hull_union<'a>(polys: impl IntoIterator<Item = &'a Polygon2D>) -> Region2D {
    let pts: Vec<RatePair> = polys
        .into_iter()
        .flat_map(|p| p.vertices.iter().copied())
        .collect();
    Region2D::new(convex_hull(&pts))
}

/// Whether every vertex of `inner` lies within `tol` of `outer`.
pub fn contains(outer: &Region2D, inner: &Region2D, tol: f64) -> bool {
    inner
        .hull
        .vertices
        .iter()
        .all(|&v| outer.hull.distance_to(v) <= tol)
}

/// Largest distance from a vertex of `inner` to `outer`; zero when contained.
pub fn excess(outer: &Region2D, inner: &Region2D) -> f64 {
    inner
        .hull
        .vertices
        .iter()
        .map(|&v| outer.hull.distance_to(v))
        .fold(0.0, f64::max)
}

/// Slopes of the edges not lying on an axis; `f64::INFINITY` marks vertical
/// edges. Degenerate polygons have no facets.
pub fn facet_slopes(poly: &Polygon2D) -> Vec<f64> {
    if poly.is_degenerate() {
        return Vec::new();
    }
    poly.edges()
        .filter(|(a, b)| !on_axis(*a, *b))
        .map(|(a, b)| {
            let d = b.sub(a);
            if d.r1.abs() <= VERTEX_TOL * d.r2.abs() {
                f64::INFINITY
            } else {
                d.r2 / d.r1
            }
        })
        .collect()
}

fn on_axis(a: RatePair, b: RatePair) -> bool {
    (a.r1.abs() <= VERTEX_TOL && b.r1.abs() <= VERTEX_TOL)
        || (a.r2.abs() <= VERTEX_TOL && b.r2.abs() <= VERTEX_TOL)
}

/// Non-axis edges whose slope is not within `tol` of one of `allowed`.
pub fn slope_violations(poly: &Polygon2D, allowed: &[f64], tol: f64) -> Vec<(RatePair, RatePair)> {
    if poly.is_degenerate() {
        return Vec::new();
    }
    poly.edges()
        .filter(|(a, b)| !on_axis(*a, *b))
        .filter(|(a, b)| {
            let d = b.sub(*a);
            !allowed.iter().any(|&s| {
                if s.is_infinite() {
                    d.r1.abs() <= tol * d.r2.abs()
                } else {
                    (d.r2 - s * d.r1).abs() <= tol * d.r1.abs()
                }
            })
        })
        .collect()
}

/// `(max R1, max R2)` over the region.
pub fn axis_intercepts(region: &Region2D) -> (f64, f64) {
    if region.hull.is_empty() {
        return (0.0, 0.0);
    }
    (region.hull.max_r1(), region.hull.max_r2())
}

/// Symmetric Hausdorff distance between two convex polygons.
pub fn hausdorff(a: &Polygon2D, b: &Polygon2D) -> f64 {
    let one_way = |p: &Polygon2D, q: &Polygon2D| {
        p.vertices
            .iter()
            .map(|&v| q.distance_to(v))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r1: f64, r2: f64) -> RatePair {
        RatePair::new(r1, r2)
    }

    fn unit_square() -> Polygon2D {
        convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)])
    }

    #[test]
    fn hull_drops_interior_point() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.2, 0.2)]);
        assert_eq!(h.vertices(), &[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]);
    }

    #[test]
    fn hull_of_single_point() {
        assert_eq!(convex_hull(&[p(0.3, 0.4)]).vertices(), &[p(0.3, 0.4)]);
        assert_eq!(
            convex_hull(&[p(0.3, 0.4), p(0.3, 0.4)]).vertices(),
            &[p(0.3, 0.4)]
        );
    }

    #[test]
    fn hull_ignores_sign_of_zero() {
        let h = convex_hull(&[p(-0.0, -0.0), p(0.0, 1.5), p(-0.0, 1.5), p(0.0, 0.0)]);
        assert_eq!(h.vertices().len(), 2);
    }

    #[test]
    fn hull_of_collinear_points_is_a_segment() {
        let h = convex_hull(&[p(0.0, 0.0), p(0.5, 0.5), p(1.0, 1.0), p(0.25, 0.25)]);
        assert_eq!(h.vertices(), &[p(0.0, 0.0), p(1.0, 1.0)]);
        assert!(h.is_degenerate());
        assert!(facet_slopes(&h).is_empty());
    }

    #[test]
    fn hull_is_ccw_from_lexicographic_min() {
        let h = convex_hull(&[p(1.0, 1.0), p(0.0, 1.0), p(1.0, 0.0), p(0.0, 0.0)]);
        assert_eq!(h.vertices()[0], p(0.0, 0.0));
        assert!(h.area() > 0.0);
        assert!((h.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn union_examples() {
        let sq = unit_square();
        assert_eq!(hull_union([&sq, &sq]).hull, sq);
        let small = convex_hull(&[p(0.1, 0.1), p(0.5, 0.1), p(0.2, 0.6)]);
        assert_eq!(hull_union([&sq, &small]).hull, sq);

        let t1 = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 0.5)]);
        let t2 = convex_hull(&[p(0.0, 0.0), p(0.5, 0.0), p(0.0, 1.0)]);
        let u = hull_union([&t1, &t2]);
        assert_eq!(u.vertices(), &[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]);
    }

    #[test]
    fn containment() {
        let sq = Region2D::new(unit_square());
        let half = Region2D::new(convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]));
        assert!(contains(&sq, &half, 0.0));
        assert!(!contains(&half, &sq, 1e-6));
        assert!(contains(&sq, &sq, 0.0));
        let far = Region2D::new(convex_hull(&[
            p(2.0, 2.0),
            p(3.0, 2.0),
            p(3.0, 3.0),
            p(2.0, 3.0),
        ]));
        assert!(!contains(&sq, &far, 1e-6));
        assert!(!contains(&far, &sq, 1e-6));
    }

    #[test]
    fn slopes_of_pentagon_and_rectangle() {
        let pent = convex_hull(&[
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(1.0, 0.5),
            p(0.5, 1.0),
            p(0.0, 1.0),
        ]);
        let s = facet_slopes(&pent);
        assert_eq!(s.len(), 3);
        assert!(s.contains(&f64::INFINITY));
        assert!(s.iter().any(|x| (x + 1.0).abs() < 1e-12));
        assert!(s.iter().any(|x| x.abs() < 1e-12));
        assert!(slope_violations(&pent, &HK_SLOPES, SLOPE_TOL).is_empty());

        let rect = convex_hull(&[p(0.0, 0.0), p(2.0, 0.0), p(2.0, 1.0), p(0.0, 1.0)]);
        let s = facet_slopes(&rect);
        assert_eq!(s.len(), 2);
        assert!(s.contains(&f64::INFINITY) && s.contains(&0.0));

        let odd = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 3.0)]);
        assert_eq!(slope_violations(&odd, &HK_SLOPES, SLOPE_TOL).len(), 1);
    }

    #[test]
    fn intercepts() {
        assert_eq!(axis_intercepts(&Region2D::new(unit_square())), (1.0, 1.0));
        assert_eq!(
            axis_intercepts(&Region2D::new(convex_hull(&[p(0.0, 0.0)]))),
            (0.0, 0.0)
        );
    }

    #[test]
    fn hausdorff_examples() {
        let sq = unit_square();
        assert_eq!(hausdorff(&sq, &sq), 0.0);
        let shifted = convex_hull(&[p(0.1, 0.0), p(1.1, 0.0), p(1.1, 1.0), p(0.1, 1.0)]);
        assert!((hausdorff(&sq, &shifted) - 0.1).abs() < 1e-12);
        let tri = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]);
        let tri_plus = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.1, 0.1)]);
        assert_eq!(hausdorff(&tri, &tri_plus), 0.0);
    }

    #[test]
    fn distance_to_degenerate() {
        let seg = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0)]);
        assert!((seg.distance_to(p(0.5, 1.0)) - 1.0).abs() < 1e-15);
        let pt = convex_hull(&[p(0.0, 0.0)]);
        assert!((pt.distance_to(p(3.0, 4.0)) - 5.0).abs() < 1e-15);
        assert_eq!(Polygon2D::default().distance_to(p(0.0, 0.0)), f64::INFINITY);
    }
}
