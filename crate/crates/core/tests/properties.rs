use proptest::prelude::*;

use crystalquant::energy_model::{c_n, h_alpha, Alpha};
use crystalquant::geometry::{ConvexPolygon, HalfPlane, Point2};
use crystalquant::laguerre::{laguerre_diagram, voronoi_diagram, WeightedSite};
use crystalquant::quantization::{merge_delta, Frame};

fn point() -> impl Strategy<Value = Point2> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y)| Point2::new(x, y))
}

fn sites(max: usize) -> impl Strategy<Value = Vec<WeightedSite>> {
    prop::collection::vec((point(), -0.02..0.02f64), 1..max)
        .prop_map(|v| v.into_iter().map(|(p, w)| WeightedSite::new(p, w)).collect())
}

fn polygon() -> impl Strategy<Value = ConvexPolygon> {
    (3usize..10, 0.1..3.0f64, point()).prop_map(|(n, a, c)| ConvexPolygon::regular(n, a, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn clip_halves_sum_to_whole(poly in polygon(), angle in 0.0..6.3f64, off in -0.5..0.5f64) {
        let nrm = Point2::new(angle.cos(), angle.sin());
        let g = poly.centroid().unwrap();
        let h = HalfPlane::new(nrm, nrm.dot(g) + off).unwrap();
        let k = HalfPlane::new(-nrm, -(nrm.dot(g) + off)).unwrap();
        let total = poly.clip(&h).area() + poly.clip(&k).area();
        prop_assert!((total - poly.area()).abs() <= 1e-12 * poly.area());
        prop_assert!(poly.clip(&h).area() <= poly.area() * (1.0 + 1e-14));
    }

    #[test]
    fn moment_bound_and_translation(poly in polygon(), p in point(), v in point()) {
        let n = poly.edge_count() as f64;
        prop_assert!(poly.second_moment_about(p) >= c_n(n).unwrap() * poly.area().powi(2) - 1e-12);
        let moved = poly.translate(v);
        prop_assert!((moved.central_second_moment() - poly.central_second_moment()).abs() <= 1e-12);
    }

    #[test]
    fn weight_shift_leaves_diagram_unchanged(s in sites(25), shift in -1.0..1.0f64) {
        let dom = ConvexPolygon::unit_square();
        let Ok(a) = laguerre_diagram(&dom, &s) else { return Ok(()) };
        let shifted: Vec<_> = s.iter().map(|w| WeightedSite::new(w.position, w.weight + shift)).collect();
        let b = laguerre_diagram(&dom, &shifted).unwrap();
        for (x, y) in a.areas().iter().zip(b.areas()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn translation_covariance(s in sites(25), v in point()) {
        let dom = ConvexPolygon::unit_square();
        let Ok(a) = laguerre_diagram(&dom, &s) else { return Ok(()) };
        let moved: Vec<_> = s.iter().map(|w| WeightedSite::new(w.position + v, w.weight)).collect();
        let b = laguerre_diagram(&dom.translate(v), &moved).unwrap();
        for (x, y) in a.areas().iter().zip(b.areas()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn cells_partition_the_domain(s in sites(60)) {
        let dom = ConvexPolygon::unit_square();
        let Ok(d) = laguerre_diagram(&dom, &s) else { return Ok(()) };
        let total: f64 = d.areas().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        for (i, j) in &d.adjacency {
            prop_assert!(i < j);
            prop_assert!(d.neighbors(*j).contains(i));
        }
    }

    #[test]
    fn voronoi_matches_nearest_site(pts in prop::collection::vec(point(), 2..30), probes in prop::collection::vec(point(), 400)) {
        let dom = ConvexPolygon::unit_square();
        let Ok(d) = voronoi_diagram(&dom, &pts) else { return Ok(()) };
        let mut agree = 0;
        for q in &probes {
            let nearest = (0..pts.len()).min_by(|&a, &b| q.dist(pts[a]).total_cmp(&q.dist(pts[b]))).unwrap();
            let second = (0..pts.len()).filter(|&k| k != nearest)
                .map(|k| q.dist(pts[k])).fold(f64::INFINITY, f64::min);
            // ties sit on shared edges; either owner is correct
            if d.cells[nearest].contains(*q) || second - q.dist(pts[nearest]) < 1e-9 {
                agree += 1;
            }
        }
        prop_assert!(agree as f64 >= 0.999 * probes.len() as f64);
    }

    #[test]
    fn merge_delta_is_symmetric(m1 in 0.01..3.0f64, m2 in 0.01..3.0f64, z1 in point(), z2 in point(), a in -2.0..0.99f64) {
        let f = Frame::rescaled(Alpha::new(a).unwrap()).unwrap();
        let x = merge_delta(m1, m2, z1, z2, &f).unwrap();
        let y = merge_delta(m2, m1, z2, z1, &f).unwrap();
        prop_assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
    }

    #[test]
    fn convexity_inequality_holds(m in 0.0..5.0f64, n in 3u32..40) {
        prop_assert!(h_alpha(Alpha::bar(), m, f64::from(n)).unwrap() >= -1e-14);
    }
}
