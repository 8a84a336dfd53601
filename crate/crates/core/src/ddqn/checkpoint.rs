//! Portable JSON checkpoints. Per layer the weights are stored row-major
//! with shape (inputs, outputs), followed by the biases.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::mlp::{Dense, Mlp};
use super::QNetwork;
use crate::{Error, Result};

const FORMAT: &str = "dogfight-qnet";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    version: u32,
    activation: String,
    layout: String,
    sizes: Vec<usize>,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weights: Vec<f32>,
    biases: Vec<f32>,
}

pub fn to_json(net: &QNetwork) -> String {
    let file = CheckpointFile {
        format: FORMAT.into(),
        version: VERSION,
        activation: "relu hidden, linear output".into(),
        layout: "per layer: weights (inputs x outputs, row-major), then biases".into(),
        sizes: net.sizes(),
        layers: net
            .layers
            .iter()
            .map(|l| LayerFile {
                weights: l.w.iter().copied().collect(),
                biases: l.b.to_vec(),
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("plain data serializes")
}

pub fn from_json(text: &str) -> Result<QNetwork> {
    let file: CheckpointFile = serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
    if file.format != FORMAT || file.version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported format {} v{}",
            file.format, file.version
        )));
    }
    if file.sizes.len() != file.layers.len() + 1 {
        return Err(Error::Checkpoint("layer count does not match sizes".into()));
    }
    let layers = file
        .sizes
        .windows(2)
        .zip(file.layers)
        .enumerate()
        .map(|(k, (pair, layer))| {
            let w = Array2::from_shape_vec((pair[0], pair[1]), layer.weights)
                .map_err(|e| Error::Checkpoint(format!("layer {k} weights: {e}")))?;
            if layer.biases.len() != pair[1] {
                return Err(Error::Checkpoint(format!("layer {k}: {} biases for {} outputs", layer.biases.len(), pair[1])));
            }
            Ok(Dense {
                w,
                b: Array1::from(layer.biases),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mlp { layers })
}

pub fn save_checkpoint(net: &QNetwork, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(net)).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
}

pub fn load_checkpoint(path: &Path) -> Result<QNetwork> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
    from_json(&text)
}
