use std::f64::consts::TAU;

use movable::geometry::{
    angle_distance, distance_point_segment, normalize_angle, CircleShape, ConvexPolygonShape, StripShape,
    Transform,
};
use movable::Point;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -1000.0..1000.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn transform() -> impl Strategy<Value = Transform> {
    (point(), -10.0..10.0f64).prop_map(|(t, a)| Transform::new(t, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn local_world_round_trip(t in transform(), p in point()) {
        let back = t.to_local(t.to_world(p));
        prop_assert!(back.distance(p) <= 1e-9, "{:?} -> {:?}", p, back);
        let back = t.to_world(t.to_local(p));
        prop_assert!(back.distance(p) <= 1e-9, "{:?} -> {:?}", p, back);
    }
}

proptest! {
    #[test]
    fn segment_distance_is_symmetric(a in point(), b in point(), p in point()) {
        prop_assert_eq!(
            distance_point_segment(a, b, p).to_bits(),
            distance_point_segment(b, a, p).to_bits()
        );
    }

    #[test]
    fn segment_distance_bounded_by_endpoints(a in point(), b in point(), p in point()) {
        let d = distance_point_segment(a, b, p);
        prop_assert!(d >= 0.0);
        prop_assert!(d <= p.distance(a).min(p.distance(b)) + 1e-9);
    }

    #[test]
    fn normalized_angle_in_range(a in -1e6..1e6f64) {
        let n = normalize_angle(a);
        prop_assert!((0.0..TAU).contains(&n));
        prop_assert!(angle_distance(n, a) < 1e-6);
    }

    #[test]
    fn circle_boundary_is_contained(c in point(), r in 0.1..500.0f64, t in 0.0..TAU) {
        let circle = CircleShape::new(c, r).unwrap();
        let on = Point::new(c.x + r * t.cos(), c.y + r * t.sin());
        prop_assert!(circle.contains(on));
        prop_assert!(circle.contains(c));
        let out = Point::new(c.x + (r + 1e-6) * t.cos(), c.y + (r + 1e-6) * t.sin());
        prop_assert!(!circle.contains(out));
    }

    #[test]
    fn strip_boundary_is_contained(a in point(), b in point(), r in 0.1..50.0f64, s in 0.0..1.0f64, t in 0.0..TAU) {
        prop_assume!(a.distance(b) > 1e-3);
        let strip = StripShape::new(a, b, r).unwrap();
        let axis = a + (b - a) * s;
        prop_assert!(strip.contains(axis));
        // the offset point's nearest axis point may not be `axis`, so only
        // the disc around each endpoint gives an exact boundary
        let cap = Point::new(a.x + r * t.cos(), a.y + r * t.sin());
        prop_assert!(strip.contains(cap));
    }

    #[test]
    fn rectangle_closure(w in 0.1..500.0f64, h in 0.1..500.0f64, s in 0.0..1.0f64) {
        let rect = ConvexPolygonShape::rectangle(w, h).unwrap();
        for p in [
            Point::new(w * s, 0.0),
            Point::new(w, h * s),
            Point::new(w * s, h),
            Point::new(0.0, h * s),
        ] {
            prop_assert!(rect.contains(p), "{:?}", p);
        }
        prop_assert!(!rect.contains(Point::new(w + 1e-6, h * s)));
        prop_assert!(!rect.contains(Point::new(w * s, -1e-6)));
    }
}
