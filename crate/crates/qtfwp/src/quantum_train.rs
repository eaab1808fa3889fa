//! Quantum-train weight generation: the 106 slow-programmer weights are
//! not trained but produced from a 7-qubit QNN. Basis state `i` contributes
//! its bit pattern and its measured probability to an affine mapping model,
//! which emits weight `kappa_i`. Only the first 106 of the 128 basis states
//! are consumed.

use serde::{Deserialize, Serialize};

use crate::circuits::{self, QT_QUBITS};
use crate::error::{Error, Result};
use crate::programmer::SlowWeights;
use crate::sim::{basis_probabilities, observable_gradient, run_circuit, Observable};

/// Number of weights the QNN must cover: the slow programmer's 106.
pub const QT_TARGET_COUNT: usize = 106;
/// Size of the QNN's computational basis, 2^7.
pub const QT_BASIS: usize = 1 << QT_QUBITS;
/// Scalars in [`MappingParams`]: 7 bit weights + 1 probability weight + bias.
pub const MAPPING_PARAM_COUNT: usize = QT_QUBITS + 2;

/// The affine mapping model: one real weight per basis-index bit, one for
/// the (scaled) probability, and a bias. No activation, so outputs cover
/// all of R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingParams {
    pub bit_weights: [f64; QT_QUBITS],
    pub prob_weight: f64,
    pub bias: f64,
}

impl MappingParams {
    pub fn zeros() -> Self {
        MappingParams {
            bit_weights: [0.0; QT_QUBITS],
            prob_weight: 0.0,
            bias: 0.0,
        }
    }

    /// Order: bit_weights, prob_weight, bias.
    pub fn to_flat(&self) -> [f64; MAPPING_PARAM_COUNT] {
        let mut out = [0.0; MAPPING_PARAM_COUNT];
        out[..QT_QUBITS].copy_from_slice(&self.bit_weights);
        out[QT_QUBITS] = self.prob_weight;
        out[QT_QUBITS + 1] = self.bias;
        out
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() != MAPPING_PARAM_COUNT {
            return Err(Error::Shape(format!(
                "mapping model needs {MAPPING_PARAM_COUNT} scalars, got {}",
                flat.len()
            )));
        }
        let mut p = MappingParams::zeros();
        p.bit_weights.copy_from_slice(&flat[..QT_QUBITS]);
        p.prob_weight = flat[QT_QUBITS];
        p.bias = flat[QT_QUBITS + 1];
        Ok(p)
    }
}

/// How basis-index bits enter the mapping model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BitEncoding {
    /// Bit j of index i contributes bit_weights[j] when set, 0 otherwise.
    #[default]
    ZeroOne,
    /// Bits contribute +bit_weights[j] when set, -bit_weights[j] otherwise.
    PlusMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingConfig {
    /// Probabilities are multiplied by this before entering the model.
    /// Raw probabilities average 1/128; the default scale makes the
    /// average input O(1).
    pub prob_scale: f64,
    pub bit_encoding: BitEncoding,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            prob_scale: QT_BASIS as f64,
            bit_encoding: BitEncoding::ZeroOne,
        }
    }
}

/// The trainable state of the weight generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QtModel {
    /// QNN angles, 7 per layer.
    pub gamma: Vec<f64>,
    pub beta: MappingParams,
    #[serde(default)]
    pub config: MappingConfig,
}

impl QtModel {
    pub fn qt_layers(&self) -> usize {
        self.gamma.len() / QT_QUBITS
    }
}

/// Basis probabilities of the weight-generator QNN run with `gamma`.
/// The layer count is implied by `gamma.len() = 7 * layers`.
pub fn qnn_probabilities(gamma: &[f64]) -> Result<Vec<f64>> {
    if gamma.is_empty() || gamma.len() % QT_QUBITS != 0 {
        return Err(Error::Shape(format!(
            "QNN angle count must be a positive multiple of {QT_QUBITS}, got {}",
            gamma.len()
        )));
    }
    let circuit = circuits::qt_circuit(gamma.len() / QT_QUBITS)?;
    let state = run_circuit(&circuit, gamma)?;
    Ok(basis_probabilities(&state))
}

fn bit_feature(index: usize, bit: usize, encoding: BitEncoding) -> f64 {
    let set = index >> bit & 1 == 1;
    match encoding {
        BitEncoding::ZeroOne => {
            if set {
                1.0
            } else {
                0.0
            }
        }
        BitEncoding::PlusMinus => {
            if set {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Maps the first 106 basis probabilities to slow weights:
/// `kappa_i = sum_j bit_j(i) * bit_weights[j] + scale * p_i * prob_weight + bias`.
pub fn map_weights(probs: &[f64], beta: &MappingParams) -> Result<SlowWeights> {
    map_weights_with(&MappingConfig::default(), probs, beta)
}

pub fn map_weights_with(
    config: &MappingConfig,
    probs: &[f64],
    beta: &MappingParams,
) -> Result<SlowWeights> {
    if probs.len() != QT_BASIS {
        return Err(Error::Shape(format!(
            "expected {QT_BASIS} probabilities, got {}",
            probs.len()
        )));
    }
    let mut kappa = Vec::with_capacity(QT_TARGET_COUNT);
    for (i, p) in probs.iter().take(QT_TARGET_COUNT).enumerate() {
        let mut v = beta.bias + config.prob_scale * p * beta.prob_weight;
        for (j, bw) in beta.bit_weights.iter().enumerate() {
            v += bit_feature(i, j, config.bit_encoding) * bw;
        }
        kappa.push(v);
    }
    SlowWeights::from_flat(&kappa)
}

/// Full generator: QNN probabilities through the mapping model.
pub fn generate_slow_weights(model: &QtModel) -> Result<SlowWeights> {
    let probs = qnn_probabilities(&model.gamma)?;
    map_weights_with(&model.config, &probs, &model.beta)
}

/// Reverse-mode companion of [`map_weights_with`]: given the cotangent of
/// the 106 generated weights, returns the gradient of the mapping
/// parameters and the cotangent to push into the probabilities.
pub fn map_weights_backward(
    config: &MappingConfig,
    probs: &[f64],
    beta: &MappingParams,
    d_weights: &SlowWeights,
) -> (MappingParams, Vec<f64>) {
    let d_kappa = d_weights.to_flat();
    let mut d_beta = MappingParams::zeros();
    let mut d_probs = vec![0.0; QT_BASIS];
    for (i, dk) in d_kappa.iter().enumerate() {
        d_beta.bias += dk;
        d_beta.prob_weight += config.prob_scale * probs[i] * dk;
        for (j, dbw) in d_beta.bit_weights.iter_mut().enumerate() {
            *dbw += bit_feature(i, j, config.bit_encoding) * dk;
        }
        d_probs[i] = config.prob_scale * beta.prob_weight * dk;
    }
    (d_beta, d_probs)
}

/// Gradient of `<d_probs, qnn_probabilities(gamma)>` with respect to gamma.
pub fn qnn_backward(gamma: &[f64], d_probs: &[f64]) -> Result<Vec<f64>> {
    if gamma.is_empty() || gamma.len() % QT_QUBITS != 0 {
        return Err(Error::Shape(format!(
            "QNN angle count must be a positive multiple of {QT_QUBITS}, got {}",
            gamma.len()
        )));
    }
    let circuit = circuits::qt_circuit(gamma.len() / QT_QUBITS)?;
    observable_gradient(&circuit, gamma, Observable::BasisProbabilities, d_probs)
}
