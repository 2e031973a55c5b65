use icc_core::geom::{contains, convex_hull, hausdorff, hull_union, Polygon2D, RatePair, Region2D};
use proptest::prelude::*;

fn points() -> impl Strategy<Value = Vec<RatePair>> {
    prop::collection::vec(
        (0.0f64..3.0, 0.0f64..3.0).prop_map(|(a, b)| RatePair::new(a, b)),
        1..40,
    )
}

fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

proptest! {
    #[test]
    fn hull_contains_its_points(pts in points()) {
        let h = convex_hull(&pts);
        for p in &pts {
            prop_assert!(h.distance_to(*p) <= 1e-9);
        }
    }

    #[test]
    fn hull_is_convex_and_ccw(pts in points()) {
        let h = convex_hull(&pts);
        let v = h.vertices();
        if v.len() >= 3 {
            for i in 0..v.len() {
                let (a, b, c) = (v[i], v[(i + 1) % v.len()], v[(i + 2) % v.len()]);
                prop_assert!(cross(a, b, c) > 0.0);
            }
        }
        let min = v.iter().copied().fold(v[0], |m, p| if (p.r1, p.r2) < (m.r1, m.r2) { p } else { m });
        prop_assert_eq!(v[0], min);
    }

    #[test]
    fn hull_is_idempotent(pts in points()) {
        let h = convex_hull(&pts);
        prop_assert_eq!(convex_hull(h.vertices()), h);
    }

    #[test]
    fn union_contains_parts(a in points(), b in points()) {
        let (pa, pb) = (convex_hull(&a), convex_hull(&b));
        let u = hull_union([&pa, &pb]);
        prop_assert!(contains(&u, &Region2D::new(pa.clone()), 1e-9));
        prop_assert!(contains(&u, &Region2D::new(pb.clone()), 1e-9));
    }

    #[test]
    fn hausdorff_is_a_metric(a in points(), b in points()) {
        let (pa, pb): (Polygon2D, Polygon2D) = (convex_hull(&a), convex_hull(&b));
        prop_assert!(hausdorff(&pa, &pa) <= 1e-12);
        prop_assert!((hausdorff(&pa, &pb) - hausdorff(&pb, &pa)).abs() <= 1e-12);
    }
}
