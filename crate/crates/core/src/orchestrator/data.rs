use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::environment::{
    degrade_labeled, generate_scene, load_dataset, sample_degradation, write_dataset, DegradeKind, LabeledImage,
    Manifest, SceneParams,
};
use crate::error::Result;
use crate::orchestrator::RunConfig;
use crate::util::hash_words;

/// Keys of training scenes start here so they never collide with test ids.
pub const TRAIN_KEY_OFFSET: u64 = 1 << 40;

/// Copies per scene in a degraded set: the clean image plus one per
/// degradation kind.
pub const VARIANTS_PER_SCENE: u64 = 5;

/// `n` scenes keyed `key_offset + i`, each generated from `(seed, key)`.
pub fn generate_scenes(seed: u64, n: usize, params: &SceneParams, key_offset: u64) -> Result<Vec<LabeledImage>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let key = key_offset + i;
            let scene = generate_scene(hash_words(&[seed, key]), params)?;
            Ok(LabeledImage {
                key,
                image: scene.image,
                truths: scene.truths,
            })
        })
        .collect()
}

/// Test scenes: the configured dataset, or generated ones.
pub fn test_scenes(cfg: &RunConfig) -> Result<Vec<LabeledImage>> {
    match &cfg.dataset {
        Some(dir) => load_dataset(dir),
        None => generate_scenes(cfg.seed, cfg.test_scenes, &cfg.scene, 0),
    }
}

pub fn train_scenes(cfg: &RunConfig) -> Result<Vec<LabeledImage>> {
    generate_scenes(cfg.seed, cfg.train_scenes, &cfg.scene, TRAIN_KEY_OFFSET)
}

/// Each scene followed by its four degradations, with ids
/// `key * 5 + variant`. Magnitudes depend only on `(seed, key, variant)`.
pub fn degraded_set(scenes: &[LabeledImage], seed: u64) -> Result<Vec<LabeledImage>> {
    let per_scene: Vec<Vec<LabeledImage>> = scenes
        .par_iter()
        .map(|scene| {
            let mut out = Vec::with_capacity(VARIANTS_PER_SCENE as usize);
            out.push(LabeledImage {
                key: scene.key * VARIANTS_PER_SCENE,
                ..scene.clone()
            });
            for (v, kind) in (1..).zip(DegradeKind::ALL) {
                let mut rng = ChaCha8Rng::seed_from_u64(hash_words(&[seed, scene.key, v]));
                let mut img = degrade_labeled(scene, sample_degradation(kind, &mut rng))?;
                img.key = scene.key * VARIANTS_PER_SCENE + v;
                out.push(img);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_scene.into_iter().flatten().collect())
}

/// Writes `n` generated scenes to `out_dir`.
pub fn generate_dataset_cmd(seed: u64, n: usize, params: &SceneParams, out_dir: &Path) -> Result<Manifest> {
    write_dataset(out_dir, &generate_scenes(seed, n, params, 0)?)
}

/// Writes the five-variant degraded version of the dataset in `input`.
pub fn degrade_dataset_cmd(input: &Path, seed: u64, out_dir: &Path) -> Result<Manifest> {
    write_dataset(out_dir, &degraded_set(&load_dataset(input)?, seed)?)
}
