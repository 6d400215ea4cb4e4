mod common;

use ndarray::Array2;
use rlaod_core::agent::{
    agent_layer_sizes, encoded_len, init_params, load_params, save_params, MlpParams, WEIGHT_MAGIC,
};
use rlaod_core::features::STATE_DIM;
use rlaod_core::Error;

use common::{all_coords, checkable_params, gradient_check, mdp_optimal_q, mdp_train, random_batch};

#[test]
fn gradients_match_finite_differences_small_nets() {
    for (h, seed) in [(4, 1), (16, 2)] {
        let p = checkable_params(&[6, h, h, h, 2], seed);
        let x = random_batch(5, 6, seed + 10);
        let g = random_batch(5, 2, seed + 20);
        let err = gradient_check(&p, &x, &g, &all_coords(&p));
        assert!(err <= 1e-4, "h = {h}: {err}");
    }
}

#[test]
fn per_head_gradients_flow_through_shared_layers_only() {
    let p = checkable_params(&[5, 8, 8, 2], 7);
    let x = random_batch(3, 5, 8);
    let mut head0 = Array2::zeros((3, 2));
    head0.column_mut(0).fill(1.0);
    let coords = all_coords(&p);
    assert!(gradient_check(&p, &x, &head0, &coords) <= 1e-4);

    let (_, cache) = p.forward_batch(x.view()).unwrap();
    let grads = p.backward(&cache, head0.view()).unwrap();
    let last = grads.layers.last().unwrap();
    // the unused head's output row gets nothing
    assert!(last.weights.row(1).iter().all(|&v| v == 0.0));
    assert_eq!(last.biases[1], 0.0);
    assert_eq!(last.biases[0], 3.0);
}

#[test]
fn weight_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("agent.weights");
    let mut p = init_params(&agent_layer_sizes(32), 5).unwrap();
    p.round_to_f32();
    save_params(&path, &p).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..8], WEIGHT_MAGIC);
    assert_eq!(bytes.len(), encoded_len(&agent_layer_sizes(32)));
    let expected: usize = 12 + agent_layer_sizes(32).windows(2).map(|w| 8 + 4 * (w[0] * w[1] + w[1])).sum::<usize>();
    assert_eq!(bytes.len(), expected);

    let back = load_params(&path).unwrap();
    let states = random_batch(100, STATE_DIM, 3);
    for row in states.rows() {
        let s = row.to_vec();
        let (a, b) = (p.forward(&s).unwrap(), back.forward(&s).unwrap());
        assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

#[test]
fn weight_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.weights");
    let p: MlpParams = init_params(&[4, 3, 2], 0).unwrap();
    save_params(&path, &p).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[3] ^= 0xFF;
    std::fs::write(&path, &bytes).unwrap();
    assert!(matches!(load_params(&path), Err(Error::WeightFile { .. })));
    assert!(matches!(load_params(&dir.path().join("missing")), Err(Error::WeightFile { .. })));
}

#[test]
fn mdp_reference_values() {
    let q = mdp_optimal_q(0.9);
    assert!((q[1][0] - 10.0).abs() < 1e-9);
    assert!((q[0][1] - 8.0).abs() < 1e-9);
    assert!((q[0][0] - 7.2).abs() < 1e-9);
    assert!((q[1][1] - 7.2).abs() < 1e-9);
}

#[test]
fn double_dqn_learns_mdp() {
    let err = mdp_train(11, 5_000);
    assert!(err <= 0.05, "max |Q - Q*| = {err}");
}

#[test]
fn training_is_reproducible() {
    assert_eq!(mdp_train(4, 300).to_bits(), mdp_train(4, 300).to_bits());
}
