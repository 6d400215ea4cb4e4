use proptest::prelude::*;
use rlaod_core::environment::{
    degrade_labeled, generate_scene, DegradeKind, DegradeOp, Environment, LabeledImage, OracleDetector, SceneParams,
};
use rlaod_core::imaging::{estimate_brightness_level_rgb, AttributeAction, DEFAULT_THETA};
use rlaod_core::metrics::{performance_score, reward};
use rlaod_core::Error;

fn env() -> Environment {
    Environment::with_detector(Box::new(OracleDetector::new(Default::default()).unwrap()))
}

fn scene(seed: u64) -> LabeledImage {
    let params = SceneParams {
        empty_fraction: 0.0,
        ..SceneParams::default()
    };
    let mut img = generate_scene(seed, &params).unwrap().labeled();
    img.key = seed;
    img
}

fn toward_nominal(level: f64, up: AttributeAction, down: AttributeAction) -> AttributeAction {
    if level < 0.0 {
        up
    } else {
        down
    }
}

#[test]
fn reset_records_first_detection_pass() {
    let env = env();
    let img = scene(3);
    let st = env.reset(&img, 4).unwrap();
    assert_eq!(st.step, 0);
    assert_eq!(st.cumulative_scale_factor, 1.0);
    assert!(st.brightness_level().abs() < 0.15, "clean level {}", st.brightness_level());
    assert_eq!(st.last_p, performance_score(&st.last_output.detections, &img.truths));
}

#[test]
fn zero_detection_image_has_scale_level_zero() {
    let env = env();
    let params = SceneParams {
        empty_fraction: 1.0,
        ..SceneParams::default()
    };
    let img = generate_scene(1, &params).unwrap().labeled();
    assert!(img.truths.is_empty());
    let st = env.reset(&img, 2).unwrap();
    assert_eq!(st.scale_level(), 0.0);
}

#[test]
fn horizon_and_action_contracts() {
    let env = env();
    let img = scene(5);
    assert!(matches!(env.reset(&img, 0), Err(Error::Contract(_))));
    let mut st = env.reset(&img, 1).unwrap();
    assert!(matches!(env.step(&mut st, None, None), Err(Error::Contract(_))));
    let out = env.step(&mut st, Some(AttributeAction::Brighten), None).unwrap();
    assert!(out.terminal);
    assert_eq!(out.reward_scale, None);
    assert!(out.reward_brightness.is_some());
    assert!(matches!(
        env.step(&mut st, Some(AttributeAction::Brighten), None),
        Err(Error::Contract(_))
    ));
}

#[test]
fn wrong_family_action_is_rejected() {
    let env = env();
    let mut st = env.reset(&scene(6), 2).unwrap();
    assert!(env.step(&mut st, Some(AttributeAction::ZoomIn), None).is_err());
}

#[test]
fn under_exposure_lands_near_requested_level() {
    let img = scene(8);
    let base = estimate_brightness_level_rgb(&img.image);
    let dark = degrade_labeled(&img, DegradeOp::new(DegradeKind::UnderExpose, 0.8).unwrap()).unwrap();
    let level = estimate_brightness_level_rgb(&dark.image);
    let expected = (base - 0.8).max(-1.0);
    assert!((level - expected).abs() < 0.05, "level {level} expected {expected}");
}

#[test]
fn toward_nominal_policy_never_lowers_p() {
    let env = env();
    let ops = [
        DegradeOp::new(DegradeKind::UnderExpose, 0.7).unwrap(),
        DegradeOp::new(DegradeKind::OverExpose, 0.6).unwrap(),
        DegradeOp::new(DegradeKind::ZoomOutDegrade, 0.25).unwrap(),
        DegradeOp::new(DegradeKind::ZoomInDegrade, 3.0).unwrap(),
    ];
    for seed in 0..6 {
        for op in ops {
            let img = degrade_labeled(&scene(seed), op).unwrap();
            let mut st = env.reset(&img, 8).unwrap();
            let start = st.last_p;
            let mut prev = start;
            while !st.is_terminal() {
                let b = toward_nominal(st.brightness_level(), AttributeAction::Brighten, AttributeAction::Darken);
                let s = toward_nominal(st.scale_level(), AttributeAction::ZoomIn, AttributeAction::ZoomOut);
                let (b, s) = if op.kind.is_exposure() { (Some(b), None) } else { (None, Some(s)) };
                let out = env.step(&mut st, b, s).unwrap();
                // resized sides round to whole pixels, so mean IoU can wobble slightly
                assert!(st.last_p >= prev - 1e-3, "seed {seed} {op:?}: p fell {prev} -> {}", st.last_p);
                let r = out.reward_brightness.or(out.reward_scale).unwrap();
                assert_eq!(r, reward(st.last_p, prev));
                prev = st.last_p;
            }
            assert!(st.last_p >= start - 1e-3);
        }
    }
}

#[test]
fn brightness_sweep_is_unimodal_with_peak_in_band() {
    let env = env();
    let img = scene(11);
    let base = estimate_brightness_level_rgb(&img.image);
    let mut ps = Vec::new();
    for i in 0..=16 {
        let target = -0.8 + 0.1 * i as f64;
        let delta = target - base;
        let kind = if delta < 0.0 { DegradeKind::UnderExpose } else { DegradeKind::OverExpose };
        let shown = if delta.abs() < 1e-9 {
            img.clone()
        } else {
            degrade_labeled(&img, DegradeOp::new(kind, delta.abs()).unwrap()).unwrap()
        };
        let st = env.reset(&shown, 1).unwrap();
        ps.push((target, st.last_p));
    }
    let peak = ps.iter().map(|&(_, p)| p).fold(f64::MIN, f64::max);
    let first = ps.iter().position(|&(_, p)| p == peak).unwrap();
    for w in ps[..=first].windows(2) {
        assert!(w[1].1 >= w[0].1 - 1e-9, "rising side {:?}", w);
    }
    for w in ps[first..].windows(2) {
        assert!(w[1].1 <= w[0].1 + 1e-9, "falling side {:?}", w);
    }
    assert!(ps[first].0.abs() <= 0.15 + 1e-9, "peak at {}", ps[first].0);
}

fn run(env: &Environment, img: &LabeledImage, actions: &[(u8, u8)]) -> Vec<(f64, Vec<u8>)> {
    let mut st = env.reset(img, actions.len()).unwrap();
    actions
        .iter()
        .map(|&(b, s)| {
            let b = [None, Some(AttributeAction::Brighten), Some(AttributeAction::Darken)][b as usize];
            let s = [None, Some(AttributeAction::ZoomIn), Some(AttributeAction::ZoomOut)][s as usize];
            let (b, s) = if b.is_none() && s.is_none() { (Some(AttributeAction::Brighten), s) } else { (b, s) };
            env.step(&mut st, b, s).unwrap();
            (st.last_p, st.current_image.data().to_vec())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cumulative_scale_factor_tracks_level(seed in 0u64..50, actions in prop::collection::vec((0u8..3, 0u8..3), 1..6)) {
        let env = env();
        let img = scene(seed);
        let mut st = env.reset(&img, actions.len()).unwrap();
        for &(b, s) in &actions {
            let b = [None, Some(AttributeAction::Brighten), Some(AttributeAction::Darken)][b as usize];
            let s = [None, Some(AttributeAction::ZoomIn), Some(AttributeAction::ZoomOut)][s as usize];
            let b = if b.is_none() && s.is_none() { Some(AttributeAction::Darken) } else { b };
            env.step(&mut st, b, s).unwrap();
            let expected = DEFAULT_THETA.powf(st.scale_level() - st.initial_scale_level);
            prop_assert!((st.cumulative_scale_factor - expected).abs() <= 1e-9 * expected);
        }
    }

    #[test]
    fn episodes_are_deterministic(seed in 0u64..50, actions in prop::collection::vec((0u8..3, 0u8..3), 1..5)) {
        let env = env();
        let img = scene(seed);
        prop_assert_eq!(run(&env, &img, &actions), run(&env, &img, &actions));
    }
}
