use rlaod_core::agent::{agent_layer_sizes, init_params, TrainConfig};
use rlaod_core::environment::{LabeledImage, SceneParams};
use rlaod_core::imaging::ActionFamily;
use rlaod_core::orchestrator::{
    degraded_set, emit_report, evaluate_modes, load_report, rollout, run_rl_aod, test_scenes, train_agent,
    AgentBundle, EvalMode, EvalReport, RunConfig, METRICS, REPORT_CSV, REPORT_JSON, VARIANTS_PER_SCENE,
};
use rlaod_core::Error;

fn tiny_config() -> RunConfig {
    RunConfig {
        train_scenes: 4,
        test_scenes: 4,
        scene: SceneParams {
            width: 96,
            height: 96,
            min_area: 400.0,
            max_area: 900.0,
            max_objects: 3,
            ..SceneParams::default()
        },
        train: TrainConfig {
            brightness_iterations: 60,
            scale_iterations: 60,
            hidden_width: 8,
            batch_size: 8,
            target_sync_every: 10,
            ..TrainConfig::default()
        },
        ..RunConfig::default()
    }
}

fn random_bundle(seed: u64) -> AgentBundle {
    let sizes = agent_layer_sizes(8);
    AgentBundle::new(init_params(&sizes, seed).unwrap(), init_params(&sizes, seed + 1).unwrap()).unwrap()
}

fn scenes(cfg: &RunConfig) -> Vec<LabeledImage> {
    test_scenes(cfg).unwrap()
}

#[test]
fn training_is_reproducible_and_logs_every_iteration() {
    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    let data = scenes(&cfg);
    let dir = tempfile::tempdir().unwrap();
    let ckpt = RunConfig {
        checkpoint_every: 20,
        ..cfg.clone()
    };
    let a = train_agent(ActionFamily::Brightness, &ckpt, &env, &data, Some(dir.path())).unwrap();
    let b = train_agent(ActionFamily::Brightness, &cfg, &env, &data, None).unwrap();
    assert_eq!(a.log.len(), 60);
    assert_eq!(a.params, b.params);
    assert_eq!(a.log, b.log);
    let mut files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files.len(), 3, "{files:?}");
    assert!(a.log.iter().all(|r| (0.1..=1.0).contains(&r.epsilon)));
}

#[test]
fn training_without_scenes_is_a_config_error() {
    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    assert!(matches!(
        train_agent(ActionFamily::Scale, &cfg, &env, &[], None),
        Err(Error::Config(_))
    ));
}

#[test]
fn run_produces_horizon_steps_deterministically() {
    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    let data = scenes(&cfg);
    let bundle = random_bundle(3);
    let a = run_rl_aod(&env, &bundle, &data, 3).unwrap();
    let b = run_rl_aod(&env, &bundle, &data, 3).unwrap();
    assert_eq!(a.len(), data.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.trajectory.steps.len(), 3);
        assert_eq!(x.trajectory, y.trajectory);
        assert_eq!(x.image, y.image);
    }
    assert!(matches!(run_rl_aod(&env, &bundle, &data, 0), Err(Error::Contract(_))));
}

#[test]
fn rollout_without_scale_agent_keeps_scale_level() {
    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    let bundle = random_bundle(5);
    let img = &scenes(&cfg)[0];
    let r = rollout(&env, &bundle.brightness, None, img, 4).unwrap();
    assert_eq!(r.snapshots.len(), 5);
    for s in &r.trajectory.steps {
        assert_eq!(s.scale_action, None);
        assert_eq!(s.scale_level, r.trajectory.initial_scale_level);
    }
}

#[test]
fn degraded_set_has_clean_variant_first() {
    let cfg = tiny_config();
    let data = scenes(&cfg);
    let set = degraded_set(&data, 9).unwrap();
    assert_eq!(set.len() as u64, data.len() as u64 * VARIANTS_PER_SCENE);
    for (i, scene) in data.iter().enumerate() {
        let clean = &set[i * VARIANTS_PER_SCENE as usize];
        assert_eq!(clean.image, scene.image);
        assert_eq!(clean.key, scene.key * VARIANTS_PER_SCENE);
    }
    assert_eq!(degraded_set(&data, 9).unwrap(), set);
}

#[test]
fn modes_are_independent_of_request_order() {
    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    let data = scenes(&cfg);
    let bundle = random_bundle(7);
    let forward = [EvalMode::Fr, EvalMode::B2, EvalMode::Bs4, EvalMode::FrStar];
    let a = evaluate_modes(&env, Some(&bundle), &data, &forward, 1).unwrap();
    let b = evaluate_modes(&env, Some(&bundle), &data, &[EvalMode::FrStar, EvalMode::Bs4, EvalMode::B2], 1).unwrap();
    let alone = evaluate_modes(&env, Some(&bundle), &data, &[EvalMode::B2], 1).unwrap();
    assert_eq!(a.modes.iter().map(|m| m.mode).collect::<Vec<_>>(), forward);
    for m in &b.modes {
        assert_eq!(Some(m), a.get(m.mode));
    }
    assert_eq!(alone.get(EvalMode::B2), a.get(EvalMode::B2));
    let fr_star = a.get(EvalMode::FrStar).unwrap();
    assert!(fr_star.ap.ap50.unwrap() >= 0.9, "{fr_star:?}");
}

#[test]
fn agent_modes_need_a_bundle() {
    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    let data = scenes(&cfg);
    assert!(evaluate_modes(&env, None, &data, &[EvalMode::Fr], 0).is_ok());
    assert!(matches!(
        evaluate_modes(&env, None, &data, &[EvalMode::B4], 0),
        Err(Error::Config(_))
    ));
}

#[test]
fn reports_round_trip_and_handle_empty_results() {
    let dir = tempfile::tempdir().unwrap();
    emit_report(dir.path(), &EvalReport::default()).unwrap();
    assert_eq!(load_report(&dir.path().join(REPORT_JSON)).unwrap(), EvalReport::default());

    let cfg = tiny_config();
    let env = cfg.environment().unwrap();
    let report = evaluate_modes(&env, None, &scenes(&cfg), &[EvalMode::Fr, EvalMode::FrStar], 0).unwrap();
    emit_report(dir.path(), &report).unwrap();
    assert_eq!(load_report(&dir.path().join(REPORT_JSON)).unwrap(), report);
    let csv = std::fs::read_to_string(dir.path().join(REPORT_CSV)).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * METRICS.len());
    for metric in METRICS {
        assert!(dir.path().join(format!("plot_{metric}.dat")).exists());
    }
}
