use std::path::Path;

use crate::agent::{Layer, MlpParams};
use crate::error::{Error, Result};

pub const WEIGHT_MAGIC: &[u8; 8] = b"RLAODW1\0";

/// Size in bytes of the encoded form of a network with these layer sizes.
pub fn encoded_len(layer_sizes: &[usize]) -> usize {
    12 + layer_sizes
        .windows(2)
        .map(|w| 8 + 4 * (w[1] * w[0] + w[1]))
        .sum::<usize>()
}

pub fn encode_params(params: &MlpParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(encoded_len(&params.layer_sizes()));
    out.extend_from_slice(WEIGHT_MAGIC);
    out.extend_from_slice(&(params.layers().len() as u32).to_le_bytes());
    for layer in params.layers() {
        out.extend_from_slice(&(layer.outputs() as u32).to_le_bytes());
        out.extend_from_slice(&(layer.inputs() as u32).to_le_bytes());
        for &v in layer.weights.iter().chain(layer.biases.iter()) {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> std::result::Result<&[u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<usize, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn f32s(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        let raw = self.take(n.checked_mul(4).ok_or("layer too large")?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))))
            .collect())
    }
}

pub fn decode_params(bytes: &[u8]) -> std::result::Result<MlpParams, String> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(8).map_err(|_| "file shorter than magic".to_string())? != WEIGHT_MAGIC {
        return Err("bad magic".into());
    }
    let count = cur.u32()?;
    if count == 0 {
        return Err("zero layers".into());
    }
    let mut layers = Vec::with_capacity(count.min(64));
    for i in 0..count {
        let rows = cur.u32()?;
        let cols = cur.u32()?;
        if rows == 0 || cols == 0 {
            return Err(format!("layer {i} has an empty shape"));
        }
        let w = cur.f32s(rows.checked_mul(cols).ok_or("layer too large")?)?;
        let b = cur.f32s(rows)?;
        if w.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(format!("layer {i} holds non-finite values"));
        }
        layers.push(Layer {
            weights: ndarray::Array2::from_shape_vec((rows, cols), w).expect("sized"),
            biases: ndarray::Array1::from(b),
        });
    }
    if cur.pos != bytes.len() {
        return Err(format!("{} trailing bytes", bytes.len() - cur.pos));
    }
    MlpParams::from_layers(layers).map_err(|e| format!("shape mismatch: {e}"))
}

/// Writes `params` as f32 little-endian; values are rounded to f32.
pub fn save_params(path: &Path, params: &MlpParams) -> Result<()> {
    std::fs::write(path, encode_params(params)).map_err(|e| Error::WeightFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn load_params(path: &Path) -> Result<MlpParams> {
    let fail = |reason: String| Error::WeightFile {
        path: path.to_path_buf(),
        reason,
    };
    let bytes = std::fs::read(path).map_err(|e| fail(e.to_string()))?;
    decode_params(&bytes).map_err(fail)
}
