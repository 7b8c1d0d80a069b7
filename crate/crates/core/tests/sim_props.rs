use proptest::prelude::*;
use whisker_core::geom::{Point2, Pose2, Segment2};
use whisker_core::sim::sensors::{synth_range, whisker_contact, Side};
use whisker_core::sim::{
    reconstruction_error, run_episode, telemetry_bytes, DroneModel, DroneParams, EpisodeConfig, MissionKind, World,
};

fn navigate() -> EpisodeConfig {
    EpisodeConfig {
        mission: MissionKind::Navigate,
        ..EpisodeConfig::default()
    }
}

fn point_segment(p: Point2, s: &Segment2) -> f64 {
    let (ax, ay, bx, by) = (s.a.x, s.a.y, s.b.x, s.b.y);
    let (ex, ey) = (bx - ax, by - ay);
    let t = (((p.x - ax) * ex + (p.y - ay) * ey) / (ex * ex + ey * ey)).clamp(0.0, 1.0);
    let (qx, qy) = (ax + t * ex, ay + t * ey);
    ((p.x - qx).powi(2) + (p.y - qy).powi(2)).sqrt()
}

/// Distance along `yaw` from `o` to the infinite line through `a` with direction `u`.
fn ray_line(o: Point2, yaw: f64, a: Point2, u: Point2) -> f64 {
    let (dx, dy) = (yaw.cos(), yaw.sin());
    let det = -dx * u.y + dy * u.x;
    let (rx, ry) = (a.x - o.x, a.y - o.y);
    (-rx * u.y + ry * u.x) / det
}

#[test]
fn episodes_are_deterministic() {
    let world = World::baffles().unwrap();
    let a = run_episode(&world, &navigate(), 5).unwrap();
    let b = run_episode(&world, &navigate(), 5).unwrap();
    assert_eq!(telemetry_bytes(&a.telemetry), telemetry_bytes(&b.telemetry));
    assert_eq!(a.metrics, b.metrics);
    let room = World::square_room(2.0, 0.8, 0.4).unwrap();
    let a = run_episode(&room, &EpisodeConfig::default(), 2).unwrap();
    let b = run_episode(&room, &EpisodeConfig::default(), 2).unwrap();
    assert_eq!(telemetry_bytes(&a.telemetry), telemetry_bytes(&b.telemetry));
    assert_eq!(a.snapshots, b.snapshots);
}

#[test]
fn travel_is_path_length_of_telemetry() {
    for (world, cfg) in [
        (World::baffles().unwrap(), navigate()),
        (World::straight_wall(0.5, 3.0, 0.1).unwrap(), navigate()),
        (World::square_room(2.0, 0.8, 1.1).unwrap(), EpisodeConfig::default()),
    ] {
        let r = run_episode(&world, &cfg, 0).unwrap();
        let rows = &r.telemetry;
        let mut sum: f64 = rows
            .windows(2)
            .map(|w| ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt())
            .sum();
        let last = rows.last().unwrap();
        sum += ((r.final_pose.x - last.x).powi(2) + (r.final_pose.y - last.y).powi(2)).sqrt();
        assert!((sum - r.metrics.travel_m).abs() < 1e-9, "{sum} vs {}", r.metrics.travel_m);
    }
}

#[test]
fn reconstruction_matches_brute_force() {
    let world = World::square_room(2.0, 0.8, 0.3).unwrap();
    let mut rng = whisker_core::rng::Stream::new(4, 0);
    let pts: Vec<Point2> = (0..500)
        .map(|_| Point2::new(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)))
        .collect();
    let errs: Vec<f64> = pts
        .iter()
        .map(|p| world.segments.iter().map(|s| point_segment(*p, s)).fold(f64::INFINITY, f64::min))
        .collect();
    let n = errs.len() as f64;
    let mae = errs.iter().sum::<f64>() / n;
    let rmse = (errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let (m, r) = reconstruction_error(&world, &pts).unwrap();
    assert!((m - mae).abs() < 1e-9 && (r - rmse).abs() < 1e-9);
    assert!(r >= m);
    assert_eq!(reconstruction_error(&world, &[]), None);
    assert_eq!(reconstruction_error(&World::empty(1.0), &pts), None);
}

#[test]
fn ideal_range_noise_has_configured_sigma() {
    let (d, sigma) = (0.08, 0.01);
    let xs: Vec<f64> = (0..10_000).map(|k| synth_range(Some(d), sigma, 17, 0, k).unwrap()).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((sd - sigma).abs() < 0.05 * sigma, "{sd}");
    assert!((mean - d).abs() < 4.0 * sigma / n.sqrt());
    assert_eq!(synth_range(None, sigma, 17, 0, 3), None);
    assert_eq!(synth_range(Some(d), sigma, 17, 0, 3), synth_range(Some(d), sigma, 17, 0, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn whisker_depth_matches_ray_line(
        dist in 0.05..0.25f64,
        tilt in -0.6..0.6f64,
        yaw in -0.5..0.5f64,
        y0 in -0.05..0.05f64,
    ) {
        let world = World::straight_wall(dist, 4.0, tilt).unwrap();
        let drone = DroneModel::new(Pose2::new(0.0, y0, yaw), DroneParams::default());
        let seg = world.segments[0];
        let u = seg.b - seg.a;
        for (i, side) in Side::BOTH.iter().enumerate() {
            let mount = drone.mount_pose(i);
            let expect = ray_line(mount.position(), mount.yaw, seg.a, u);
            let got = whisker_contact(&world, &drone, *side);
            if expect > 0.0 && expect <= drone.params.whisker.reach() - 1e-9 {
                let c = got.unwrap();
                prop_assert!((c.depth - expect).abs() < 1e-9, "{} vs {}", c.depth, expect);
                prop_assert_eq!(c.segment, 0);
            } else if expect > drone.params.whisker.reach() + 1e-9 {
                prop_assert!(got.is_none());
            }
        }
    }
}
