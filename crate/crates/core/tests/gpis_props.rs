use proptest::prelude::*;
use std::f64::consts::{PI, TAU};
use whisker_core::geom::{Grid2, Point2};
use whisker_core::gpis::{marching_squares, Contour, GpisHyper, GpisModel, INTERIOR_LABEL, SURFACE_LABEL};
use whisker_core::rng::Stream;

fn random_points(rng: &mut Stream, n: usize) -> (Vec<Point2>, Vec<f64>) {
    let pts = (0..n)
        .map(|_| Point2::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    let labels = (0..n)
        .map(|_| if rng.below(3) == 0 { INTERIOR_LABEL } else { SURFACE_LABEL })
        .collect();
    (pts, labels)
}

fn circle_model(r: f64, n: usize) -> GpisModel {
    let mut pts: Vec<Point2> = (0..n).map(|k| Point2::from_angle(TAU * k as f64 / n as f64) * r).collect();
    let mut labels = vec![SURFACE_LABEL; n];
    pts.push(Point2::ZERO);
    labels.push(INTERIOR_LABEL);
    GpisModel::fit(&pts, &labels, GpisHyper::default()).unwrap()
}

fn largest(contours: &[Contour]) -> &Contour {
    contours
        .iter()
        .max_by(|a, b| a.signed_area().abs().total_cmp(&b.signed_area().abs()))
        .unwrap()
}

#[test]
fn variance_non_negative_at_random_queries() {
    let mut rng = Stream::new(21, 0);
    let (pts, labels) = random_points(&mut rng, 40);
    let m = GpisModel::fit_with_jitter(&pts, &labels, GpisHyper::default()).unwrap();
    for _ in 0..1000 {
        let x = Point2::new(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        let v = m.variance(x);
        assert!(v >= 0.0 && v <= m.prior_variance() + 1e-12, "{v}");
    }
}

#[test]
fn more_data_never_raises_variance() {
    let mut rng = Stream::new(22, 0);
    let (pts, labels) = random_points(&mut rng, 30);
    let queries: Vec<Point2> = (0..200)
        .map(|_| Point2::new(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)))
        .collect();
    let mut prev: Option<Vec<f64>> = None;
    for n in [5, 10, 20, 30] {
        let m = GpisModel::fit(&pts[..n], &labels[..n], GpisHyper::default()).unwrap();
        let v: Vec<f64> = queries.iter().map(|q| m.variance(*q)).collect();
        if let Some(p) = &prev {
            for (a, b) in v.iter().zip(p) {
                assert!(*a <= b + 1e-10, "{a} > {b} at n = {n}");
            }
        }
        prev = Some(v);
    }
}

#[test]
fn gpis_circle_contour_stays_near_radius() {
    let r = 0.5;
    let m = circle_model(r, 16);
    let grid = m.mean_grid(Point2::new(-0.8, -0.8), 0.02, 81, 81).unwrap();
    let cs = marching_squares(&grid, 0.0, None).unwrap();
    let c = largest(&cs);
    assert!(c.closed);
    for p in &c.points {
        assert!((p.norm() - r).abs() < 0.1 * r, "{}", p.norm());
    }
    assert!((c.signed_area().abs() - PI * r * r).abs() < 0.1 * PI * r * r);
}

#[test]
fn analytic_circle_contour_area() {
    let r = 0.37;
    let grid = Grid2::from_fn(Point2::new(-0.5, -0.5), 0.01, 101, 101, |p| p.norm() - r).unwrap();
    let cs = marching_squares(&grid, 0.0, None).unwrap();
    assert_eq!(cs.len(), 1);
    let c = &cs[0];
    assert!(c.closed);
    assert!((c.signed_area().abs() - PI * r * r).abs() < 1e-3 * PI * r * r);
    assert!((c.length() - TAU * r).abs() < 1e-3 * TAU * r);
    for p in &c.points {
        assert!((p.norm() - r).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hessian_is_symmetric(seed in 0u64..10_000, qx in -2.0..2.0f64, qy in -2.0..2.0f64) {
        let mut rng = Stream::new(seed, 0);
        let (pts, labels) = random_points(&mut rng, 12);
        let m = GpisModel::fit_with_jitter(&pts, &labels, GpisHyper::default()).unwrap();
        let h = m.query(Point2::new(qx, qy)).hessian;
        prop_assert!((h[0][1] - h[1][0]).abs() < 1e-12);
    }

    #[test]
    fn mean_is_translation_invariant(seed in 0u64..10_000, dx in -1.0..1.0f64, dy in -1.0..1.0f64) {
        let mut rng = Stream::new(seed, 1);
        let (pts, labels) = random_points(&mut rng, 10);
        let shift = Point2::new(dx, dy);
        let moved: Vec<Point2> = pts.iter().map(|p| *p + shift).collect();
        let a = GpisModel::fit_with_jitter(&pts, &labels, GpisHyper::default()).unwrap();
        let b = GpisModel::fit_with_jitter(&moved, &labels, GpisHyper::default()).unwrap();
        let q = Point2::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        prop_assert!((a.mean(q) - b.mean(q + shift)).abs() < 1e-8);
        prop_assert!((a.variance(q) - b.variance(q + shift)).abs() < 1e-8);
    }
}
