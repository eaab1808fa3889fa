//! The fast-weight-programmer core: a small classical network (the slow
//! programmer) turns each incoming scalar into a per-layer vector `L` and a
//! per-qubit vector `Q`, and their outer product is added onto the fast
//! programmer's angle matrix. After a window of such updates the fast
//! circuit runs once on the window's last value and an affine head maps
//! four Z expectations to the prediction.

use serde::{Deserialize, Serialize};

use crate::circuits::{self, BlockConfig, FAST_LAYERS, FAST_QUBITS};
use crate::error::{Error, Result};
use crate::sim::{run_circuit, z_expectations};

/// Hidden width of the slow programmer's encoder.
pub const SLOW_HIDDEN: usize = 8;
/// Scalar count of [`SlowWeights`]: 8 + 8 + 16 + 2 + 64 + 8.
pub const SLOW_WEIGHT_COUNT: usize = 106;
/// Z expectations consumed by the post-processing head.
pub const POST_INPUTS: usize = 4;

/// Weights of the slow programmer, a 1 -> 8 -> {2, 8} tanh network.
///
/// These are *generated* each forward pass, never trained directly, so
/// they carry no optimizer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowWeights {
    pub encoder_w: [f64; SLOW_HIDDEN],
    pub encoder_b: [f64; SLOW_HIDDEN],
    pub head_l_w: [[f64; SLOW_HIDDEN]; FAST_LAYERS],
    pub head_l_b: [f64; FAST_LAYERS],
    pub head_q_w: [[f64; SLOW_HIDDEN]; FAST_QUBITS],
    pub head_q_b: [f64; FAST_QUBITS],
}

impl SlowWeights {
    pub fn zeros() -> Self {
        SlowWeights {
            encoder_w: [0.0; SLOW_HIDDEN],
            encoder_b: [0.0; SLOW_HIDDEN],
            head_l_w: [[0.0; SLOW_HIDDEN]; FAST_LAYERS],
            head_l_b: [0.0; FAST_LAYERS],
            head_q_w: [[0.0; SLOW_HIDDEN]; FAST_QUBITS],
            head_q_b: [0.0; FAST_QUBITS],
        }
    }

    /// Flattens in the fixed order encoder_w, encoder_b, head_l_w
    /// (row-major), head_l_b, head_q_w (row-major), head_q_b.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(SLOW_WEIGHT_COUNT);
        out.extend_from_slice(&self.encoder_w);
        out.extend_from_slice(&self.encoder_b);
        for row in &self.head_l_w {
            out.extend_from_slice(row);
        }
        out.extend_from_slice(&self.head_l_b);
        for row in &self.head_q_w {
            out.extend_from_slice(row);
        }
        out.extend_from_slice(&self.head_q_b);
        out
    }

    /// Inverse of [`SlowWeights::to_flat`].
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() != SLOW_WEIGHT_COUNT {
            return Err(Error::Shape(format!(
                "slow weights need {SLOW_WEIGHT_COUNT} scalars, got {}",
                flat.len()
            )));
        }
        let mut w = SlowWeights::zeros();
        let mut it = flat.iter().copied();
        let mut next = || it.next().expect("length checked above");
        for v in w.encoder_w.iter_mut() {
            *v = next();
        }
        for v in w.encoder_b.iter_mut() {
            *v = next();
        }
        for row in w.head_l_w.iter_mut() {
            for v in row.iter_mut() {
                *v = next();
            }
        }
        for v in w.head_l_b.iter_mut() {
            *v = next();
        }
        for row in w.head_q_w.iter_mut() {
            for v in row.iter_mut() {
                *v = next();
            }
        }
        for v in w.head_q_b.iter_mut() {
            *v = next();
        }
        Ok(w)
    }
}

/// The fast programmer's angle matrix, layer-major: `theta[layer][qubit]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastParams {
    pub theta: [[f64; FAST_QUBITS]; FAST_LAYERS],
}

impl FastParams {
    pub fn zeros() -> Self {
        FastParams {
            theta: [[0.0; FAST_QUBITS]; FAST_LAYERS],
        }
    }

    /// Layer-major flattening; matches the slot layout of the fast circuit.
    pub fn to_flat(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (i, row) in self.theta.iter().enumerate() {
            out[i * FAST_QUBITS..(i + 1) * FAST_QUBITS].copy_from_slice(row);
        }
        out
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() != FAST_LAYERS * FAST_QUBITS {
            return Err(Error::Shape(format!(
                "fast params need {} scalars, got {}",
                FAST_LAYERS * FAST_QUBITS,
                flat.len()
            )));
        }
        let mut p = FastParams::zeros();
        for (i, row) in p.theta.iter_mut().enumerate() {
            row.copy_from_slice(&flat[i * FAST_QUBITS..(i + 1) * FAST_QUBITS]);
        }
        Ok(p)
    }
}

/// Affine head mapping the first four Z expectations to the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostProcessor {
    pub weights: [f64; POST_INPUTS],
    pub bias: f64,
}

impl PostProcessor {
    pub fn zeros() -> Self {
        PostProcessor {
            weights: [0.0; POST_INPUTS],
            bias: 0.0,
        }
    }

    pub fn apply(&self, z: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(z)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + self.bias
    }
}

/// One slow-programmer pass: `h = tanh(Wx + b)`, then the two tanh heads.
/// Every component of `L` and `Q` lies in `(-1, 1)`.
pub fn slow_forward(x: f64, w: &SlowWeights) -> ([f64; FAST_LAYERS], [f64; FAST_QUBITS]) {
    let mut h = [0.0; SLOW_HIDDEN];
    for (i, v) in h.iter_mut().enumerate() {
        *v = (w.encoder_w[i] * x + w.encoder_b[i]).tanh();
    }
    let mut l = [0.0; FAST_LAYERS];
    for (i, v) in l.iter_mut().enumerate() {
        let pre: f64 = w.head_l_w[i].iter().zip(&h).map(|(a, b)| a * b).sum();
        *v = (pre + w.head_l_b[i]).tanh();
    }
    let mut q = [0.0; FAST_QUBITS];
    for (j, v) in q.iter_mut().enumerate() {
        let pre: f64 = w.head_q_w[j].iter().zip(&h).map(|(a, b)| a * b).sum();
        *v = (pre + w.head_q_b[j]).tanh();
    }
    (l, q)
}

/// Rank-1 additive update: `theta'[i][j] = theta[i][j] + l[i] * q[j]`.
pub fn outer_update(
    params: &FastParams,
    l: &[f64; FAST_LAYERS],
    q: &[f64; FAST_QUBITS],
) -> FastParams {
    let mut out = *params;
    for (i, row) in out.theta.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v += l[i] * q[j];
        }
    }
    out
}

/// Accumulates a window of updates into the angles starting from `theta0`,
/// then measures the fast circuit on the window's last value and applies
/// the post-processing head.
pub fn predict_window(
    window: &[f64],
    slow: &SlowWeights,
    theta0: &FastParams,
    post: &PostProcessor,
) -> Result<f64> {
    predict_window_with(BlockConfig::default(), window, slow, theta0, post)
        .map(|(prediction, _)| prediction)
}

/// As [`predict_window`], but with an explicit circuit config and returning
/// the final angle matrix so callers can chain windows.
pub fn predict_window_with(
    config: BlockConfig,
    window: &[f64],
    slow: &SlowWeights,
    theta0: &FastParams,
    post: &PostProcessor,
) -> Result<(f64, FastParams)> {
    if window.is_empty() {
        return Err(Error::Input("window must contain at least one value".into()));
    }
    if let Some(bad) = window.iter().find(|x| !x.is_finite()) {
        return Err(Error::Input(format!("window contains non-finite value {bad}")));
    }
    let mut theta = *theta0;
    for &x in window {
        let (l, q) = slow_forward(x, slow);
        theta = outer_update(&theta, &l, &q);
    }
    let x_last = *window.last().expect("window checked non-empty");
    let circuit = circuits::fast_programmer_circuit_with(config, x_last)?;
    let state = run_circuit(&circuit, &theta.to_flat())?;
    let z = z_expectations(&state);
    Ok((post.apply(&z[..POST_INPUTS]), theta))
}

/// Census of trainable scalars, split into classical and quantum counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterCensus {
    pub classical: usize,
    pub quantum: usize,
}

/// Which variant of the architecture is being counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Slow weights generated by the QNN; only the mapping model and the
    /// post-processor are classical trainables.
    QtQfwp { qt_layers: usize },
    /// The slow programmer itself is trained.
    Qfwp,
}

/// Counts trainable scalars. Generated slow weights are excluded.
pub fn count_parameters(kind: ModelKind) -> ParameterCensus {
    match kind {
        ModelKind::QtQfwp { qt_layers } => ParameterCensus {
            classical: crate::quantum_train::MAPPING_PARAM_COUNT + POST_INPUTS + 1,
            quantum: circuits::FAST_PARAMS + circuits::QT_QUBITS * qt_layers,
        },
        ModelKind::Qfwp => ParameterCensus {
            classical: SLOW_WEIGHT_COUNT + POST_INPUTS + 1,
            quantum: circuits::FAST_PARAMS,
        },
    }
}
