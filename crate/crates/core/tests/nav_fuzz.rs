use proptest::prelude::*;
use whisker_core::geom::{normalize_angle, Pose2};
use whisker_core::nav::{
    fsm_step, ExploreConfig, Explorer, FsmConfig, FsmInput, MissionState, NavState, SensorFrame, Sweep, VelocityCmd,
    WallSubstate,
};
use whisker_core::rng::Stream;

const MISSIONS: [MissionState; 5] = [
    MissionState::Hovering,
    MissionState::FlyingForward,
    MissionState::WallFollowing,
    MissionState::ResumeForward,
    MissionState::Landing,
];

const SUBS: [Option<WallSubstate>; 6] = [
    None,
    Some(WallSubstate::FlySideways),
    Some(WallSubstate::FlyForward),
    Some(WallSubstate::FlyBackward),
    Some(WallSubstate::TurnLeft),
    Some(WallSubstate::TurnRight),
];

fn wild_depth(rng: &mut Stream) -> f64 {
    match rng.below(8) {
        0 => f64::NAN,
        1 => f64::INFINITY,
        2 => -rng.uniform(0.0, 1.0),
        3 => 0.0,
        _ => rng.uniform(0.0, 0.2),
    }
}

fn within(cmd: &VelocityCmd, cfg: &FsmConfig) -> bool {
    cmd.v_forward.abs() <= cfg.v_max
        && cmd.v_side.abs() <= cfg.v_max
        && cmd.yaw_rate.abs() <= cfg.omega_max
        && cmd.v_forward.is_finite()
        && cmd.v_side.is_finite()
        && cmd.yaw_rate.is_finite()
}

#[test]
fn fsm_total_over_random_inputs() {
    let cfg = FsmConfig::default();
    let mut rng = Stream::new(7, 0);
    for _ in 0..100_000 {
        let state = NavState {
            mission: MISSIONS[rng.below(5)],
            sub: SUBS[rng.below(6)],
            sweep: if rng.below(2) == 0 { Sweep::Left } else { Sweep::Right },
            ticks: rng.below(1000) as u32,
            clear_ticks: rng.below(1000) as u32,
        };
        let input = FsmInput {
            d_l: wild_depth(&mut rng),
            d_r: wild_depth(&mut rng),
            contact_l: rng.below(2) == 0,
            contact_r: rng.below(2) == 0,
            target_reached: rng.below(50) == 0,
        };
        let (next, cmd) = fsm_step(&state, &input, &cfg);
        assert!(within(&cmd, &cfg), "{state:?} {input:?} -> {cmd:?}");
        assert!(MISSIONS.contains(&next.mission));
        if next.mission != MissionState::WallFollowing {
            assert_eq!(next.sub, None);
        }
        if input.target_reached {
            assert_eq!(next.mission, MissionState::Landing);
            assert_eq!(cmd, VelocityCmd::ZERO);
        }
    }
}

#[test]
fn explorer_survives_random_frames() {
    let cfg = ExploreConfig::default();
    let cap = cfg.map.hyper.cap;
    let fsm = cfg.fsm;
    let mut ex = Explorer::new(cfg, Pose2::default()).unwrap();
    let mut rng = Stream::new(8, 0);
    let mut pose = Pose2::default();
    for _ in 0..20_000 {
        let m = |rng: &mut Stream| (rng.below(3) == 0).then(|| rng.uniform(0.0, 0.14));
        let frame = SensorFrame {
            pose,
            m_l: m(&mut rng),
            m_r: m(&mut rng),
        };
        let act = ex.step(&frame);
        assert!(within(&act.cmd, &fsm), "{act:?}");
        assert!(ex.training().0.len() <= cap);
        let dt = 0.02;
        pose = Pose2::new(
            pose.x + (pose.forward() * act.cmd.v_forward + pose.left() * act.cmd.v_side).x * dt,
            pose.y + (pose.forward() * act.cmd.v_forward + pose.left() * act.cmd.v_side).y * dt,
            pose.yaw + act.cmd.yaw_rate * dt,
        );
        if ex.is_done() {
            break;
        }
    }
}

#[test]
fn bootstrap_headings_are_quarter_turns() {
    let start = Pose2::new(0.2, -0.1, 0.7);
    let ex = Explorer::new(ExploreConfig::default(), start).unwrap();
    for (k, deg) in [0.0f64, 90.0, 180.0, 270.0].iter().enumerate() {
        let expect = normalize_angle(start.yaw + deg.to_radians());
        assert!((ex.sortie_heading(k) - expect).abs() < 1e-15);
    }
    assert_eq!(ExploreConfig::default().bootstrap_headings_deg, vec![0.0, 90.0, 180.0, 270.0]);
}

proptest! {
    #[test]
    fn saturation_respects_limits(
        v in prop_oneof![any::<f64>(), -10.0..10.0f64],
        s in prop_oneof![any::<f64>(), -10.0..10.0f64],
        w in prop_oneof![any::<f64>(), -10.0..10.0f64],
        v_max in 0.01..1.0f64,
        w_max in 0.01..2.0f64,
    ) {
        let c = VelocityCmd { v_forward: v, v_side: s, yaw_rate: w }.saturate(v_max, w_max);
        prop_assert!(c.v_forward.abs() <= v_max && c.v_side.abs() <= v_max && c.yaw_rate.abs() <= w_max);
        if v.is_finite() && v.abs() <= v_max {
            prop_assert_eq!(c.v_forward, v);
        }
    }

    #[test]
    fn fsm_commands_saturated(
        d_l in -1.0..1.0f64,
        d_r in -1.0..1.0f64,
        cl in any::<bool>(),
        cr in any::<bool>(),
        m in 0usize..5,
        v_max in 0.05..0.5f64,
    ) {
        let cfg = FsmConfig { v_max, ..FsmConfig::default() };
        let state = NavState { mission: MISSIONS[m], ..NavState::default() };
        let input = FsmInput { d_l, d_r, contact_l: cl, contact_r: cr, target_reached: false };
        let (_, cmd) = fsm_step(&state, &input, &cfg);
        prop_assert!(within(&cmd, &cfg));
    }
}
