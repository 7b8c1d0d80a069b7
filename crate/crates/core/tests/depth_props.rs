use proptest::prelude::*;
use whisker_core::depth::{
    kf_predict, kf_step, process_predict, FusionConfig, FusionVariant, KfState, PairFusion, WallState,
};
use whisker_core::geom::{Point2, Pose2};
use whisker_core::rng::Stream;

/// Distance along `yaw` from `o` to the line through `a` with direction angle `phi`.
fn ray_line(o: Point2, yaw: f64, a: Point2, phi: f64) -> f64 {
    let (dx, dy) = (yaw.cos(), yaw.sin());
    let (ux, uy) = (phi.cos(), phi.sin());
    let det = -dx * uy + dy * ux;
    let (rx, ry) = (a.x - o.x, a.y - o.y);
    (-rx * uy + ry * ux) / det
}

fn wall_depth(pose: &Pose2, mount: Point2, wall_x: f64) -> f64 {
    let m = pose.offset(mount);
    (wall_x - m.x) / m.yaw.cos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn process_model_matches_ray_line(
        x in -1.0..1.0f64, y in -1.0..1.0f64, yaw in -3.0..3.0f64,
        theta in -0.8..0.8f64, d_k in 0.02..0.15f64,
        dx in -0.02..0.02f64, dy in -0.02..0.02f64, dpsi in -0.1..0.1f64,
    ) {
        let pose_k = Pose2::new(x, y, yaw);
        let pose_k1 = Pose2::new(x + dx, y + dy, yaw + dpsi);
        let wall = WallState::from_drone_angle(0.0, theta, yaw);
        let hit = pose_k.position() + Point2::from_angle(yaw) * d_k;
        let expect = ray_line(pose_k1.position(), pose_k1.yaw, hit, wall.theta_wall_w);
        let got = process_predict(d_k, &wall, &pose_k, &pose_k1).unwrap();
        prop_assert!((got - expect).abs() < 1e-9 * (1.0 + expect.abs()), "{got} vs {expect}");
    }

    #[test]
    fn kf_variance_bounds(
        p in 1e-9..1e-2f64, q in 1e-9..1e-2f64, r in 1e-9..1e-2f64,
        d in -1.0..1.0f64, m in -1.0..1.0f64,
    ) {
        let s = KfState { d: 0.0, p, q, r };
        let prior = kf_predict(&s, d);
        let post = kf_step(&s, d, m);
        prop_assert!(prior.p > p);
        prop_assert!(post.p > 0.0 && post.p <= prior.p);
        prop_assert!((post.d - d).abs() <= (m - d).abs() + 1e-15);
    }
}

#[test]
fn fusion_beats_raw_measurements_on_approach() {
    let wall_x = 0.3;
    let cfg = FusionConfig::with_variant(FusionVariant::Full);
    let mounts = cfg.mounts();
    let mut fusion = PairFusion::new(cfg).unwrap();
    let mut rng = Stream::new(5, 0);
    let sigma = 5e-3;
    let (mut raw, mut fused, mut n) = (0.0, 0.0, 0.0);
    let mut pose = Pose2::new(0.0, 0.0, 0.1);
    for k in 0..200 {
        let truth = mounts.map(|m| wall_depth(&pose, m, wall_x));
        let meas = truth.map(|t| t + rng.gaussian(0.0, sigma));
        let out = fusion.step(pose, Some(meas[0]), Some(meas[1]));
        if k >= 20 {
            for (i, f) in [out.d_l, out.d_r].iter().enumerate() {
                raw += (meas[i] - truth[i]).powi(2);
                fused += (f.unwrap() - truth[i]).powi(2);
                n += 1.0;
            }
        }
        pose = Pose2::new(pose.x + 0.0005, pose.y + 0.0003, pose.yaw + 0.001 * (k as f64 * 0.1).sin());
    }
    let (raw, fused) = ((raw / n).sqrt(), (fused / n).sqrt());
    assert!(fused < 0.6 * raw, "fused {fused} raw {raw}");
}

#[test]
fn measurement_only_variant_is_identity() {
    let cfg = FusionConfig::with_variant(FusionVariant::MeasurementOnly);
    let mut fusion = PairFusion::new(cfg).unwrap();
    let out = fusion.step(Pose2::default(), Some(0.071), None);
    assert_eq!(out.d_l, Some(0.071));
    assert_eq!(out.d_r, None);
}
