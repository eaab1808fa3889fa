//! Builders for the two circuits the models run: the 8-qubit fast
//! programmer with scalar data encoding, and the 7-qubit weight-generator
//! QNN that has no data encoding at all.
//!
//! Both are stacks of the same variational block: an entangling CNOT pass
//! plus one slotted `RotY` per qubit. Slots are laid out layer-major, so
//! layer `j` of an `n`-qubit circuit owns slots `j*n .. (j+1)*n`.

use crate::error::{Error, Result};
use crate::sim::{CircuitSpec, GateOp};

/// Qubits in the fast-programmer circuit.
pub const FAST_QUBITS: usize = 8;
/// Variational layers in the fast-programmer circuit.
pub const FAST_LAYERS: usize = 2;
/// Slotted parameters in the fast-programmer circuit.
pub const FAST_PARAMS: usize = FAST_QUBITS * FAST_LAYERS;
/// Qubits in the weight-generator QNN: ceil(log2(106)).
pub const QT_QUBITS: usize = 7;

/// Wiring of the entangling pass inside a variational block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    /// CNOT(q, q+1) for q = 0..n-2.
    #[default]
    Chain,
    /// The chain plus a closing CNOT(n-1, 0).
    Ring,
}

/// Whether the per-qubit rotations come before or after the entangler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationOrder {
    #[default]
    AfterEntangler,
    BeforeEntangler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockConfig {
    pub topology: Topology,
    pub rotation_order: RotationOrder,
}

/// One variational block: entangler plus one slotted rotation per qubit,
/// with slots `layer_index*n .. (layer_index+1)*n`.
pub fn variational_block(num_qubits: usize, layer_index: usize) -> Result<Vec<GateOp>> {
    variational_block_with(BlockConfig::default(), num_qubits, layer_index)
}

pub fn variational_block_with(
    config: BlockConfig,
    num_qubits: usize,
    layer_index: usize,
) -> Result<Vec<GateOp>> {
    if num_qubits < 2 {
        return Err(Error::Config(format!(
            "a variational block needs at least 2 qubits, got {num_qubits}"
        )));
    }
    let mut entangler: Vec<GateOp> = (0..num_qubits - 1)
        .map(|q| GateOp::Cnot {
            control: q,
            target: q + 1,
        })
        .collect();
    if config.topology == Topology::Ring {
        entangler.push(GateOp::Cnot {
            control: num_qubits - 1,
            target: 0,
        });
    }
    let rotations: Vec<GateOp> = (0..num_qubits)
        .map(|q| GateOp::RotY {
            target: q,
            angle: 0.0,
            param_slot: Some(layer_index * num_qubits + q),
        })
        .collect();
    let mut ops = Vec::with_capacity(entangler.len() + rotations.len());
    match config.rotation_order {
        RotationOrder::AfterEntangler => {
            ops.extend(entangler);
            ops.extend(rotations);
        }
        RotationOrder::BeforeEntangler => {
            ops.extend(rotations);
            ops.extend(entangler);
        }
    }
    Ok(ops)
}

/// The fast programmer: H then `RotY(x)` on every qubit (the same scalar
/// broadcast to all eight wires), followed by two variational layers.
/// 16 parameter slots.
pub fn fast_programmer_circuit(x: f64) -> Result<CircuitSpec> {
    fast_programmer_circuit_with(BlockConfig::default(), x)
}

pub fn fast_programmer_circuit_with(config: BlockConfig, x: f64) -> Result<CircuitSpec> {
    if !x.is_finite() {
        return Err(Error::Input(format!("encoding input must be finite, got {x}")));
    }
    let mut ops = Vec::new();
    for q in 0..FAST_QUBITS {
        ops.push(GateOp::Hadamard { target: q });
        ops.push(GateOp::RotY {
            target: q,
            angle: x,
            param_slot: None,
        });
    }
    for layer in 0..FAST_LAYERS {
        ops.extend(variational_block_with(config, FAST_QUBITS, layer)?);
    }
    CircuitSpec::new(FAST_QUBITS, ops)
}

/// The weight-generator QNN: H on all 7 qubits, then `num_layers`
/// variational blocks. No data encoding; 7 slots per layer.
pub fn qt_circuit(num_layers: usize) -> Result<CircuitSpec> {
    qt_circuit_with(BlockConfig::default(), num_layers)
}

pub fn qt_circuit_with(config: BlockConfig, num_layers: usize) -> Result<CircuitSpec> {
    if num_layers < 1 {
        return Err(Error::Config(format!(
            "QNN needs at least one layer, got {num_layers}"
        )));
    }
    let mut ops = Vec::new();
    for q in 0..QT_QUBITS {
        ops.push(GateOp::Hadamard { target: q });
    }
    for layer in 0..num_layers {
        ops.extend(variational_block_with(config, QT_QUBITS, layer)?);
    }
    CircuitSpec::new(QT_QUBITS, ops)
}
