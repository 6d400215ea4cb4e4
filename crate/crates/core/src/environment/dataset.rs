//! Image sets on disk: PPM files plus a JSON manifest with `[x, y, w, h]`
//! annotations.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{read_ppm, write_ppm, RgbImage};
use crate::metrics::{Box2D, GroundTruthBox};

/// An image with its ground truth. `key` is the image id; it is also the
/// detector's image key, which stays fixed through an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub key: u64,
    pub image: RgbImage,
    pub truths: Vec<GroundTruthBox>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestImage {
    pub id: u64,
    pub file: String,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub image_id: u64,
    /// `[x, y, w, h]`
    pub bbox: [f64; 4],
    #[serde(default)]
    pub category: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub images: Vec<ManifestImage>,
    pub annotations: Vec<Annotation>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes `images` as `img_<id>.ppm` plus `manifest.json` into `dir`.
/// Images are identified by their `key`.
pub fn write_dataset(dir: &Path, images: &[LabeledImage]) -> Result<Manifest> {
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = images.iter().find(|i| !seen.insert(i.key)) {
        return Err(Error::input(format!("duplicate image id {}", dup.key)));
    }
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest::default();
    for item in images {
        let file = format!("img_{:06}.ppm", item.key);
        write_ppm(&dir.join(&file), &item.image)?;
        manifest.images.push(ManifestImage {
            id: item.key,
            file,
            width: item.image.width(),
            height: item.image.height(),
        });
        manifest.annotations.extend(item.truths.iter().map(|t| Annotation {
            image_id: item.key,
            bbox: t.bbox.to_xywh(),
            category: t.category,
        }));
    }
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(dir.join(MANIFEST_FILE), json)?;
    Ok(manifest)
}

pub fn load_dataset(dir: &Path) -> Result<Vec<LabeledImage>> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join(MANIFEST_FILE))?)
        .map_err(|e| Error::Config(format!("manifest in {}: {e}", dir.display())))?;
    manifest
        .images
        .iter()
        .map(|entry| {
            let image = read_ppm(&dir.join(&entry.file))?;
            if (image.width(), image.height()) != (entry.width, entry.height) {
                return Err(Error::input(format!("{} size differs from manifest", entry.file)));
            }
            let truths = manifest
                .annotations
                .iter()
                .filter(|a| a.image_id == entry.id)
                .map(|a| {
                    let [x, y, w, h] = a.bbox;
                    Ok(GroundTruthBox {
                        bbox: Box2D::from_xywh(x, y, w, h)?,
                        category: a.category,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LabeledImage {
                key: entry.id,
                image,
                truths,
            })
        })
        .collect()
}
