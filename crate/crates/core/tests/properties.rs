//! Randomized properties of caps and Ulam floating bodies on polygons.

use nalgebra::DVector;
use proptest::prelude::*;
use ulamfloat_core::floating::{ulam_support, WeightedBody};
use ulamfloat_core::geometry::convex_hull_2d;
use ulamfloat_core::{BodyHandle, Direction, Point};

fn polygon() -> impl Strategy<Value = BodyHandle> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5..12).prop_filter_map("degenerate", |pts| {
        let pts: Vec<Point> = pts.into_iter().map(|(x, y)| DVector::from_vec(vec![x, y])).collect();
        BodyHandle::polytope(pts).ok().filter(|b| b.inradius() > 0.05)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cut_mass_matches_request(body in polygon(), angle in 0.0f64..6.3, frac in 0.01f64..0.99) {
        let wb = WeightedBody::uniform(body);
        let theta = Direction::from_angle(angle);
        let cut = wb.cap_cut(&theta, frac * wb.total).unwrap();
        prop_assert!((cut.mass - frac * wb.total).abs() <= 1e-11 * wb.total);
    }

    #[test]
    fn support_is_monotone_in_delta(body in polygon(), angle in 0.0f64..6.3, a in 0.01f64..0.45, b in 0.01f64..0.45) {
        let wb = WeightedBody::uniform(body);
        let theta = Direction::from_angle(angle);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let (h_lo, _) = ulam_support(&wb, &theta, lo * wb.total).unwrap();
        let (h_hi, _) = ulam_support(&wb, &theta, hi * wb.total).unwrap();
        prop_assert!(h_hi < h_lo);
    }

    #[test]
    fn translation_moves_the_boundary_point(body in polygon(), angle in 0.0f64..6.3, vx in -3.0f64..3.0, vy in -3.0f64..3.0) {
        let v = DVector::from_vec(vec![vx, vy]);
        let theta = Direction::from_angle(angle);
        let a = WeightedBody::uniform(body.clone());
        let b = WeightedBody::uniform(body.translated(&v).unwrap());
        let (_, x) = ulam_support(&a, &theta, 0.1 * a.total).unwrap();
        let (_, y) = ulam_support(&b, &theta, 0.1 * b.total).unwrap();
        prop_assert!((y - x - &v).norm() < 1e-10);
    }

    #[test]
    fn hull_contains_every_input(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..40)) {
        let pts: Vec<_> = pts.into_iter().map(|(x, y)| nalgebra::Vector2::new(x, y)).collect();
        let hull = convex_hull_2d(&pts);
        prop_assume!(hull.len() >= 3);
        for p in &pts {
            for i in 0..hull.len() {
                let a = hull[i];
                let e = hull[(i + 1) % hull.len()] - a;
                let q = p - a;
                prop_assert!(e.x * q.y - e.y * q.x >= -1e-12);
            }
        }
    }
}
