//! JSON weight files.
//!
//! ```json
//! {"format":"hri-lstm","version":1,"arch":[45,64,64,64,8],
//!  "layers":[{"w_i":[..],"w_f":[..],"w_o":[..],"w_g":[..],
//!             "u_i":[..],...,"b_i":[..],...}, ...],
//!  "output":{"weight":[..],"bias":[..]}}
//! ```
//!
//! Matrices are row-major. Numbers are written in shortest round-trip form,
//! so a save/load cycle is bit-exact.

use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

use super::matrix::Matrix;
use super::network::{Gate, LstmLayerParams, LstmNetwork, NUM_LAYERS};
use crate::activity::NUM_CLASSES;
use crate::skeleton::FRAME_DIM;

const FORMAT: &str = "hri-lstm";
const VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum WeightsError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed weight file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("architecture mismatch: {0}")]
    Architecture(String),
}

fn field_err(field: impl Into<String>, reason: impl Into<String>) -> WeightsError {
    WeightsError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

pub fn weights_to_string(net: &LstmNetwork) -> String {
    let mut root = Map::new();
    root.insert("format".into(), FORMAT.into());
    root.insert("version".into(), VERSION.into());
    root.insert("arch".into(), net.arch().into());
    let layers: Vec<Value> = net
        .layers()
        .iter()
        .map(|l| {
            let mut m = Map::new();
            for gate in Gate::ALL {
                m.insert(format!("w_{}", gate.suffix()), l.w_gate(gate).to_vec().into());
            }
            for gate in Gate::ALL {
                m.insert(format!("u_{}", gate.suffix()), l.u_gate(gate).to_vec().into());
            }
            for gate in Gate::ALL {
                m.insert(format!("b_{}", gate.suffix()), l.b_gate(gate).to_vec().into());
            }
            Value::Object(m)
        })
        .collect();
    root.insert("layers".into(), layers.into());
    let mut out = Map::new();
    out.insert("weight".into(), net.output_weights().as_slice().to_vec().into());
    out.insert("bias".into(), net.output_bias().to_vec().into());
    root.insert("output".into(), Value::Object(out));
    let mut text = Value::Object(root).to_string();
    text.push('\n');
    text
}

pub fn save_weights(net: &LstmNetwork, path: impl AsRef<Path>) -> Result<(), WeightsError> {
    std::fs::write(path, weights_to_string(net))?;
    Ok(())
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<LstmNetwork, WeightsError> {
    parse_weights(&std::fs::read_to_string(path)?)
}

pub fn parse_weights(text: &str) -> Result<LstmNetwork, WeightsError> {
    let root: Value = serde_json::from_str(text)?;
    let root = root
        .as_object()
        .ok_or_else(|| field_err("<root>", "expected an object"))?;
    match root.get("format").and_then(Value::as_str) {
        Some(FORMAT) => {}
        _ => return Err(field_err("format", format!("expected \"{FORMAT}\""))),
    }
    match root.get("version").and_then(Value::as_u64) {
        Some(VERSION) => {}
        _ => return Err(field_err("version", format!("expected {VERSION}"))),
    }
    let arch = root
        .get("arch")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("arch", "expected an array of dimensions"))?
        .iter()
        .map(|v| v.as_u64().map(|d| d as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| field_err("arch", "dimensions must be non-negative integers"))?;
    if arch.len() != NUM_LAYERS + 2 {
        return Err(WeightsError::Architecture(format!(
            "expected {} dims, got {}",
            NUM_LAYERS + 2,
            arch.len()
        )));
    }
    if arch[0] != FRAME_DIM {
        return Err(WeightsError::Architecture(format!("input dim {} != {FRAME_DIM}", arch[0])));
    }
    if arch[NUM_LAYERS + 1] != NUM_CLASSES {
        return Err(WeightsError::Architecture(format!(
            "output dim {} != {NUM_CLASSES}",
            arch[NUM_LAYERS + 1]
        )));
    }
    if arch[1..=NUM_LAYERS].contains(&0) {
        return Err(WeightsError::Architecture("zero hidden size".into()));
    }

    let layer_values = root
        .get("layers")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("layers", "expected an array"))?;
    if layer_values.len() != NUM_LAYERS {
        return Err(field_err("layers", format!("expected {NUM_LAYERS} entries")));
    }
    let mut layers = Vec::with_capacity(NUM_LAYERS);
    for (k, lv) in layer_values.iter().enumerate() {
        let (input, hidden) = (arch[k], arch[k + 1]);
        let obj = lv
            .as_object()
            .ok_or_else(|| field_err(format!("layers[{k}]"), "expected an object"))?;
        let mut w = Vec::with_capacity(4 * hidden * input);
        let mut u = Vec::with_capacity(4 * hidden * hidden);
        let mut b = Vec::with_capacity(4 * hidden);
        for gate in Gate::ALL {
            let s = gate.suffix();
            w.extend(numbers(obj, &format!("w_{s}"), &format!("layers[{k}]"), hidden * input)?);
        }
        for gate in Gate::ALL {
            let s = gate.suffix();
            u.extend(numbers(obj, &format!("u_{s}"), &format!("layers[{k}]"), hidden * hidden)?);
        }
        for gate in Gate::ALL {
            let s = gate.suffix();
            b.extend(numbers(obj, &format!("b_{s}"), &format!("layers[{k}]"), hidden)?);
        }
        layers.push(LstmLayerParams::from_parts(
            input,
            hidden,
            Matrix::from_vec(4 * hidden, input, w).expect("sized above"),
            Matrix::from_vec(4 * hidden, hidden, u).expect("sized above"),
            b,
        ));
    }
    let out = root
        .get("output")
        .and_then(Value::as_object)
        .ok_or_else(|| field_err("output", "expected an object"))?;
    let top = arch[NUM_LAYERS];
    let out_w = numbers(out, "weight", "output", NUM_CLASSES * top)?;
    let out_b = numbers(out, "bias", "output", NUM_CLASSES)?;
    LstmNetwork::from_parts(
        layers,
        Matrix::from_vec(NUM_CLASSES, top, out_w).expect("sized above"),
        out_b,
    )
    .map_err(|e| WeightsError::Architecture(e.to_string()))
}

fn numbers(obj: &Map<String, Value>, key: &str, parent: &str, len: usize) -> Result<Vec<f64>, WeightsError> {
    let name = format!("{parent}.{key}");
    let arr = obj
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| field_err(&name, "missing or not an array"))?;
    if arr.len() != len {
        return Err(field_err(&name, format!("expected {len} values, got {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| field_err(format!("{name}[{i}]"), "not a finite number"))
        })
        .collect()
}
