//! Dense statevector simulation of small qubit registers.
//!
//! The register holds all `2^n` complex amplitudes, gates are applied in
//! place, and observables diagonal in the computational basis (Pauli-Z
//! expectations, basis probabilities) come with exact adjoint-mode
//! gradients with respect to the `RotY` rotation angles.
//!
//! Convention: qubit `k` is bit `k` of the basis-state index, so qubit 0
//! is the least significant bit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on register size; dense simulation above this is a misuse.
pub const MAX_QUBITS: usize = 12;

/// One gate in a circuit. `RotY` may either carry a literal angle or take
/// its angle from the parameter vector via `param_slot`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Hadamard {
        target: usize,
    },
    RotY {
        target: usize,
        angle: f64,
        param_slot: Option<usize>,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl GateOp {
    fn validate(&self, num_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q < num_qubits {
                Ok(())
            } else {
                Err(Error::Circuit(format!(
                    "qubit index {q} out of range for {num_qubits}-qubit register"
                )))
            }
        };
        match *self {
            GateOp::Hadamard { target } => check(target),
            GateOp::RotY { target, .. } => check(target),
            GateOp::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::Circuit(format!(
                        "CNOT control and target are both qubit {control}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// A gate sequence over a fixed register size with named parameter slots.
///
/// Slot indices must cover the contiguous range `0..num_params`; a slot may
/// appear in more than one gate, in which case gradients accumulate.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    num_qubits: usize,
    ops: Vec<GateOp>,
    num_params: usize,
}

impl CircuitSpec {
    pub fn new(num_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        if num_qubits < 1 || num_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "register size {num_qubits} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        let mut seen = Vec::new();
        for op in &ops {
            op.validate(num_qubits)?;
            if let GateOp::RotY {
                param_slot: Some(slot),
                ..
            } = op
            {
                if seen.len() <= *slot {
                    seen.resize(*slot + 1, false);
                }
                seen[*slot] = true;
            }
        }
        if let Some(gap) = seen.iter().position(|used| !used) {
            return Err(Error::Circuit(format!(
                "parameter slots are not contiguous: slot {gap} unused"
            )));
        }
        Ok(CircuitSpec {
            num_qubits,
            ops,
            num_params: seen.len(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }
}

/// Full complex amplitude vector of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// Creates `|0...0>`: amplitude 1 on basis index 0.
pub fn new_zero_state(num_qubits: usize) -> Result<StateVector> {
    if num_qubits < 1 || num_qubits > MAX_QUBITS {
        return Err(Error::Config(format!(
            "register size {num_qubits} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        num_qubits,
        amplitudes,
    })
}

impl StateVector {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a real 2x2 matrix to the `target` qubit, in place.
    fn apply_single(&mut self, target: usize, m: &[[f64; 2]; 2]) {
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let j = i | bit;
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[j];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
    }

    /// Applies `op` with its angle resolved against `params`, in place.
    fn apply_resolved(&mut self, op: &GateOp, params: &[f64]) {
        match *op {
            GateOp::Hadamard { target } => self.apply_single(target, &HADAMARD),
            GateOp::RotY {
                target,
                angle,
                param_slot,
            } => {
                let phi = param_slot.map_or(angle, |slot| params[slot]);
                self.apply_single(target, &roty_matrix(phi));
            }
            GateOp::Cnot { control, target } => self.apply_cnot(control, target),
        }
    }

    /// Applies the inverse of `op`, in place.
    fn apply_resolved_inverse(&mut self, op: &GateOp, params: &[f64]) {
        match *op {
            // H and CNOT are their own inverses.
            GateOp::Hadamard { .. } | GateOp::Cnot { .. } => self.apply_resolved(op, params),
            GateOp::RotY {
                target,
                angle,
                param_slot,
            } => {
                let phi = param_slot.map_or(angle, |slot| params[slot]);
                self.apply_single(target, &roty_matrix(-phi));
            }
        }
    }
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const HADAMARD: [[f64; 2]; 2] = [
    [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
    [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
];

fn roty_matrix(phi: f64) -> [[f64; 2]; 2] {
    let (s, c) = (phi / 2.0).sin_cos();
    [[c, -s], [s, c]]
}

/// d RotY(phi) / d phi.
fn roty_derivative(phi: f64) -> [[f64; 2]; 2] {
    let (s, c) = (phi / 2.0).sin_cos();
    [[-0.5 * s, -0.5 * c], [0.5 * c, -0.5 * s]]
}

/// Applies a single gate to a state, using the gate's literal angle.
pub fn apply_gate(state: StateVector, op: &GateOp) -> Result<StateVector> {
    op.validate(state.num_qubits)?;
    let mut state = state;
    state.apply_resolved(op, &[]);
    Ok(state)
}

/// Runs a circuit from `|0...0>`, resolving slotted rotations against `params`.
pub fn run_circuit(circuit: &CircuitSpec, params: &[f64]) -> Result<StateVector> {
    if params.len() != circuit.num_params {
        return Err(Error::Shape(format!(
            "expected {} parameters, got {}",
            circuit.num_params,
            params.len()
        )));
    }
    let mut state = new_zero_state(circuit.num_qubits)?;
    for op in &circuit.ops {
        state.apply_resolved(op, params);
    }
    Ok(state)
}

/// Per-qubit Pauli-Z expectation values, each in `[-1, 1]`.
pub fn z_expectations(state: &StateVector) -> Vec<f64> {
    let mut out = vec![0.0; state.num_qubits];
    for (i, amp) in state.amplitudes.iter().enumerate() {
        let p = amp.norm_sqr();
        for (k, entry) in out.iter_mut().enumerate() {
            if i >> k & 1 == 0 {
                *entry += p;
            } else {
                *entry -= p;
            }
        }
    }
    out
}

/// Probabilities of all `2^n` computational basis states.
pub fn basis_probabilities(state: &StateVector) -> Vec<f64> {
    state.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// The two measurement read-outs used by the models. Both are diagonal in
/// the computational basis, which is what makes the adjoint gradient sweep
/// below exact and cheap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    ZExpectations,
    BasisProbabilities,
}

impl Observable {
    pub fn output_len(&self, num_qubits: usize) -> usize {
        match self {
            Observable::ZExpectations => num_qubits,
            Observable::BasisProbabilities => 1 << num_qubits,
        }
    }

    pub fn evaluate(&self, state: &StateVector) -> Vec<f64> {
        match self {
            Observable::ZExpectations => z_expectations(state),
            Observable::BasisProbabilities => basis_probabilities(state),
        }
    }

    /// Diagonal weights `w` such that `<cotangent, observable> = <psi|diag(w)|psi>`.
    fn diagonal_weights(&self, cotangent: &[f64], num_qubits: usize) -> Vec<f64> {
        match self {
            Observable::BasisProbabilities => cotangent.to_vec(),
            Observable::ZExpectations => {
                let dim = 1usize << num_qubits;
                let mut w = vec![0.0; dim];
                for (i, entry) in w.iter_mut().enumerate() {
                    for (k, c) in cotangent.iter().enumerate() {
                        if i >> k & 1 == 0 {
                            *entry += c;
                        } else {
                            *entry -= c;
                        }
                    }
                }
                w
            }
        }
    }
}

fn check_gradient_shapes(
    circuit: &CircuitSpec,
    params: &[f64],
    observable: Observable,
    cotangent: &[f64],
) -> Result<()> {
    if params.len() != circuit.num_params {
        return Err(Error::Shape(format!(
            "expected {} parameters, got {}",
            circuit.num_params,
            params.len()
        )));
    }
    let want = observable.output_len(circuit.num_qubits);
    if cotangent.len() != want {
        return Err(Error::Shape(format!(
            "cotangent length {} does not match observable output length {want}",
            cotangent.len()
        )));
    }
    Ok(())
}

/// Exact gradient of `<cotangent, observable(circuit, params)>` with respect
/// to `params`, by an adjoint-mode reverse sweep.
///
/// With `g = <psi|D|psi>` for the diagonal `D` built from the cotangent,
/// the contribution of a rotation at position `k` is
/// `2 Re(<lambda_k| dU_k |psi_{k-1}>)`, where `lambda_k` un-applies the
/// gates after `k` from `D|psi>` and `psi_{k-1}` un-applies the gates from
/// the end of the circuit back to `k`. One forward pass plus one backward
/// pass over the gate list, regardless of the number of parameters.
pub fn observable_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    observable: Observable,
    cotangent: &[f64],
) -> Result<Vec<f64>> {
    check_gradient_shapes(circuit, params, observable, cotangent)?;
    let psi = run_circuit(circuit, params)?;
    let weights = observable.diagonal_weights(cotangent, circuit.num_qubits);

    let mut lambda = psi.clone();
    for (amp, w) in lambda.amplitudes.iter_mut().zip(&weights) {
        *amp *= *w;
    }
    let mut phi = psi;

    let mut grad = vec![0.0; circuit.num_params];
    for op in circuit.ops.iter().rev() {
        phi.apply_resolved_inverse(op, params);
        if let GateOp::RotY {
            target,
            param_slot: Some(slot),
            ..
        } = *op
        {
            let d = roty_derivative(params[slot]);
            let bit = 1usize << target;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..phi.amplitudes.len() {
                if i & bit == 0 {
                    let j = i | bit;
                    let p0 = phi.amplitudes[i];
                    let p1 = phi.amplitudes[j];
                    let v0 = d[0][0] * p0 + d[0][1] * p1;
                    let v1 = d[1][0] * p0 + d[1][1] * p1;
                    acc += lambda.amplitudes[i].conj() * v0 + lambda.amplitudes[j].conj() * v1;
                }
            }
            grad[slot] += 2.0 * acc.re;
        }
        lambda.apply_resolved_inverse(op, params);
    }
    Ok(grad)
}

/// Central-difference estimate of the same gradient. Test oracle for
/// [`observable_gradient`]; deliberately goes through nothing but
/// [`run_circuit`] and [`Observable::evaluate`].
pub fn finite_diff_gradient(
    circuit: &CircuitSpec,
    params: &[f64],
    observable: Observable,
    cotangent: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    check_gradient_shapes(circuit, params, observable, cotangent)?;
    if step <= 0.0 {
        return Err(Error::Input(format!("step must be positive, got {step}")));
    }
    let value = |p: &[f64]| -> Result<f64> {
        let state = run_circuit(circuit, p)?;
        let obs = observable.evaluate(&state);
        Ok(obs.iter().zip(cotangent).map(|(o, c)| o * c).sum())
    };
    let mut shifted = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        shifted[i] = params[i] + step;
        let plus = value(&shifted)?;
        shifted[i] = params[i] - step;
        let minus = value(&shifted)?;
        shifted[i] = params[i];
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs(state: &StateVector) -> Vec<f64> {
        basis_probabilities(state)
    }

    #[test]
    fn zero_state_is_basis_zero() {
        let s = new_zero_state(1).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes()[1], Complex64::new(0.0, 0.0));

        let s = new_zero_state(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm_sqr() == 0.0));

        let s = new_zero_state(3).unwrap();
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn zero_state_rejects_bad_sizes() {
        assert!(matches!(new_zero_state(0), Err(Error::Config(_))));
        assert!(matches!(new_zero_state(13), Err(Error::Config(_))));
    }

    #[test]
    fn hadamard_on_zero() {
        let s = new_zero_state(1).unwrap();
        let s = apply_gate(s, &GateOp::Hadamard { target: 0 }).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn roty_pi_flips_zero_to_one() {
        let s = new_zero_state(1).unwrap();
        let s = apply_gate(
            s,
            &GateOp::RotY {
                target: 0,
                angle: std::f64::consts::PI,
                param_slot: None,
            },
        )
        .unwrap();
        assert!(s.amplitudes()[0].norm_sqr() < 1e-30);
        assert!((s.amplitudes()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        // |10> in our convention: qubit 0 (control) is set, index 0b01.
        let s = new_zero_state(2).unwrap();
        let s = apply_gate(
            s,
            &GateOp::RotY {
                target: 0,
                angle: std::f64::consts::PI,
                param_slot: None,
            },
        )
        .unwrap();
        let s = apply_gate(
            s,
            &GateOp::Cnot {
                control: 0,
                target: 1,
            },
        )
        .unwrap();
        // Target flipped: index 0b11.
        assert!((s.amplitudes()[3].re.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_gate_rejects_bad_indices() {
        let s = new_zero_state(2).unwrap();
        assert!(matches!(
            apply_gate(s.clone(), &GateOp::Hadamard { target: 2 }),
            Err(Error::Circuit(_))
        ));
        assert!(matches!(
            apply_gate(
                s,
                &GateOp::Cnot {
                    control: 1,
                    target: 1
                }
            ),
            Err(Error::Circuit(_))
        ));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = CircuitSpec::new(2, vec![]).unwrap();
        let s = run_circuit(&c, &[]).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_hadamards_make_uniform_superposition() {
        let c = CircuitSpec::new(
            2,
            vec![GateOp::Hadamard { target: 0 }, GateOp::Hadamard { target: 1 }],
        )
        .unwrap();
        let s = run_circuit(&c, &[]).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn slotted_roty_zero_is_identity() {
        let c = CircuitSpec::new(
            1,
            vec![
                GateOp::Hadamard { target: 0 },
                GateOp::RotY {
                    target: 0,
                    angle: 0.0,
                    param_slot: Some(0),
                },
            ],
        )
        .unwrap();
        let s = run_circuit(&c, &[0.0]).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn run_circuit_checks_param_length() {
        let c = CircuitSpec::new(
            1,
            vec![GateOp::RotY {
                target: 0,
                angle: 0.0,
                param_slot: Some(0),
            }],
        )
        .unwrap();
        assert!(matches!(run_circuit(&c, &[]), Err(Error::Shape(_))));
    }

    #[test]
    fn circuit_spec_rejects_slot_gaps() {
        let err = CircuitSpec::new(
            1,
            vec![GateOp::RotY {
                target: 0,
                angle: 0.0,
                param_slot: Some(1),
            }],
        );
        assert!(matches!(err, Err(Error::Circuit(_))));
    }

    #[test]
    fn z_expectation_eigenstates() {
        let s = new_zero_state(1).unwrap();
        assert!((z_expectations(&s)[0] - 1.0).abs() < 1e-15);

        let plus = apply_gate(s, &GateOp::Hadamard { target: 0 }).unwrap();
        assert!(z_expectations(&plus)[0].abs() < 1e-15);

        let one = apply_gate(
            new_zero_state(1).unwrap(),
            &GateOp::RotY {
                target: 0,
                angle: std::f64::consts::PI,
                param_slot: None,
            },
        )
        .unwrap();
        assert!((z_expectations(&one)[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_probability_examples() {
        let s = new_zero_state(2).unwrap();
        assert_eq!(probs(&s), vec![1.0, 0.0, 0.0, 0.0]);

        let s = apply_gate(s, &GateOp::Hadamard { target: 0 }).unwrap();
        let s = apply_gate(s, &GateOp::Hadamard { target: 1 }).unwrap();
        for p in probs(&s) {
            assert!((p - 0.25).abs() < 1e-15);
        }

        let half = apply_gate(
            new_zero_state(1).unwrap(),
            &GateOp::RotY {
                target: 0,
                angle: std::f64::consts::FRAC_PI_2,
                param_slot: None,
            },
        )
        .unwrap();
        let p = probs(&half);
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_single_roty_z() {
        let c = CircuitSpec::new(
            1,
            vec![GateOp::RotY {
                target: 0,
                angle: 0.0,
                param_slot: Some(0),
            }],
        )
        .unwrap();
        let g = observable_gradient(&c, &[0.0], Observable::ZExpectations, &[1.0]).unwrap();
        assert!(g[0].abs() < 1e-15);

        let g = observable_gradient(
            &c,
            &[std::f64::consts::FRAC_PI_2],
            Observable::ZExpectations,
            &[1.0],
        )
        .unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_diff_matches_analytic_derivative() {
        let c = CircuitSpec::new(
            1,
            vec![GateOp::RotY {
                target: 0,
                angle: 0.0,
                param_slot: Some(0),
            }],
        )
        .unwrap();
        let g = finite_diff_gradient(
            &c,
            &[std::f64::consts::FRAC_PI_2],
            Observable::ZExpectations,
            &[1.0],
            1e-4,
        )
        .unwrap();
        assert!((g[0] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_cotangent_gives_zero_gradient() {
        let c = CircuitSpec::new(
            2,
            vec![
                GateOp::Hadamard { target: 0 },
                GateOp::RotY {
                    target: 0,
                    angle: 0.0,
                    param_slot: Some(0),
                },
                GateOp::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
        )
        .unwrap();
        for obs in [Observable::ZExpectations, Observable::BasisProbabilities] {
            let cot = vec![0.0; obs.output_len(2)];
            let g = finite_diff_gradient(&c, &[0.3], obs, &cot, 1e-4).unwrap();
            assert_eq!(g, vec![0.0]);
            let g = observable_gradient(&c, &[0.3], obs, &cot).unwrap();
            assert_eq!(g, vec![0.0]);
        }
    }

    #[test]
    fn gradient_shape_errors() {
        let c = CircuitSpec::new(
            1,
            vec![GateOp::RotY {
                target: 0,
                angle: 0.0,
                param_slot: Some(0),
            }],
        )
        .unwrap();
        assert!(matches!(
            observable_gradient(&c, &[0.0, 1.0], Observable::ZExpectations, &[1.0]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            observable_gradient(&c, &[0.0], Observable::ZExpectations, &[1.0, 2.0]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn determinism_bitwise() {
        let c = CircuitSpec::new(
            3,
            vec![
                GateOp::Hadamard { target: 0 },
                GateOp::RotY {
                    target: 1,
                    angle: 0.7,
                    param_slot: None,
                },
                GateOp::Cnot {
                    control: 0,
                    target: 2,
                },
                GateOp::RotY {
                    target: 2,
                    angle: 0.0,
                    param_slot: Some(0),
                },
            ],
        )
        .unwrap();
        let a = run_circuit(&c, &[0.123]).unwrap();
        let b = run_circuit(&c, &[0.123]).unwrap();
        assert_eq!(a, b);
        let ga = observable_gradient(&c, &[0.123], Observable::BasisProbabilities, &[1.0; 8]);
        let gb = observable_gradient(&c, &[0.123], Observable::BasisProbabilities, &[1.0; 8]);
        assert_eq!(ga.unwrap(), gb.unwrap());
    }
}
