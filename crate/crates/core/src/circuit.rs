//! Gate-level circuit representation and reusable sub-circuit builders.
//!
//! Conventions used throughout the crate:
//! - qubit 0 is the least-significant bit of the integer labeling a basis
//!   state, and bitstrings render most-significant-first;
//! - gate order is execution order (left to right);
//! - `RX/RY/RZ(theta) = exp(-i*theta/2 * P)` and likewise for the two-qubit
//!   rotations `RXX/RYY/RZZ`; `CPHASE(theta) = diag(1,1,1,e^{i*theta})`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The gate alphabet. Multi-qubit gates list control(s) first, target last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    RX,
    RY,
    RZ,
    RXX,
    RYY,
    RZZ,
    CPHASE,
    CX,
    CZ,
    SWAP,
    CCX,
    MCX,
}

impl GateKind {
    /// Fixed qubit count per kind; `None` for MCX (variable arity).
    pub fn arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            H | X | Y | Z | RX | RY | RZ => Some(1),
            RXX | RYY | RZZ | CPHASE | CX | CZ | SWAP => Some(2),
            CCX => Some(3),
            MCX => None,
        }
    }

    /// Whether the kind carries a rotation/phase angle.
    pub fn takes_angle(self) -> bool {
        use GateKind::*;
        matches!(self, RX | RY | RZ | RXX | RYY | RZZ | CPHASE)
    }
}

/// One gate application: kind, qubit operands, and an angle for the
/// parameterized kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<f64>) -> Self {
        let g = Gate { kind, qubits, angle };
        g.validate().expect("malformed gate");
        g
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q], None)
    }
    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], None)
    }
    pub fn y(q: usize) -> Self {
        Self::new(GateKind::Y, vec![q], None)
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, vec![q], None)
    }
    pub fn rx(q: usize, theta: f64) -> Self {
        Self::new(GateKind::RX, vec![q], Some(theta))
    }
    pub fn ry(q: usize, theta: f64) -> Self {
        Self::new(GateKind::RY, vec![q], Some(theta))
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Self::new(GateKind::RZ, vec![q], Some(theta))
    }
    pub fn rxx(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::RXX, vec![a, b], Some(theta))
    }
    pub fn ryy(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::RYY, vec![a, b], Some(theta))
    }
    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self::new(GateKind::RZZ, vec![a, b], Some(theta))
    }
    pub fn cphase(control: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::CPHASE, vec![control, target], Some(theta))
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, vec![control, target], None)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, vec![a, b], None)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::SWAP, vec![a, b], None)
    }
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Self::new(GateKind::CCX, vec![c0, c1, target], None)
    }
    pub fn mcx(controls: &[usize], target: usize) -> Self {
        let mut qs = controls.to_vec();
        qs.push(target);
        Self::new(GateKind::MCX, qs, None)
    }

    /// Number of control qubits (defined for CX/CZ/CPHASE/CCX/MCX).
    pub fn num_controls(&self) -> usize {
        match self.kind {
            GateKind::CX | GateKind::CZ | GateKind::CPHASE => 1,
            GateKind::CCX => 2,
            GateKind::MCX => self.qubits.len() - 1,
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(arity) = self.kind.arity() {
            if self.qubits.len() != arity {
                return Err(Error::invalid(format!(
                    "{:?} takes {} qubit(s), got {}",
                    self.kind,
                    arity,
                    self.qubits.len()
                )));
            }
        } else if self.qubits.len() < 2 {
            return Err(Error::invalid("MCX needs at least one control and a target"));
        }
        for (i, a) in self.qubits.iter().enumerate() {
            if self.qubits[i + 1..].contains(a) {
                return Err(Error::invalid(format!(
                    "{:?} has repeated qubit index {}",
                    self.kind, a
                )));
            }
        }
        match (self.kind.takes_angle(), self.angle) {
            (true, Some(a)) if a.is_finite() => Ok(()),
            (true, _) => Err(Error::invalid(format!(
                "{:?} requires a finite angle",
                self.kind
            ))),
            (false, None) => Ok(()),
            (false, Some(_)) => Err(Error::invalid(format!(
                "{:?} does not take an angle",
                self.kind
            ))),
        }
    }

    /// The inverse gate: self-inverse kinds unchanged, rotations negated.
    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.clone(),
            angle: self.angle.map(|a| -a),
        }
    }
}

/// An ordered gate list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        assert!(num_qubits > 0, "circuit needs at least one qubit");
        Circuit {
            num_qubits,
            gates: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    /// Append a gate, checking its indices against `num_qubits`.
    pub fn push(&mut self, gate: Gate) {
        debug_assert!(gate.validate().is_ok());
        for &q in &gate.qubits {
            assert!(
                q < self.num_qubits,
                "gate qubit {} out of range for {}-qubit circuit",
                q,
                self.num_qubits
            );
        }
        self.gates.push(gate);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push(g);
        }
    }

    /// Append all gates of `other` (widths must agree).
    pub fn append(&mut self, other: &Circuit) {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.extend(other.gates.iter().cloned());
    }

    /// The exact inverse circuit: gates reversed, angles negated.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("circuit serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Circuit> {
        let c: Circuit = serde_json::from_value(v.clone())?;
        for g in &c.gates {
            g.validate()?;
            for &q in &g.qubits {
                if q >= c.num_qubits {
                    return Err(Error::invalid(format!(
                        "gate qubit {} out of range for {}-qubit circuit",
                        q, c.num_qubits
                    )));
                }
            }
        }
        Ok(c)
    }
}

/// One- and two-qubit gate counts after expanding CCX and MCX.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCensus {
    pub n_1q: usize,
    pub n_2q: usize,
}

impl std::ops::Add for GateCensus {
    type Output = GateCensus;
    fn add(self, rhs: GateCensus) -> GateCensus {
        GateCensus {
            n_1q: self.n_1q + rhs.n_1q,
            n_2q: self.n_2q + rhs.n_2q,
        }
    }
}

/// CCX expands to the standard 6-CX network with 9 one-qubit gates.
const CCX_CENSUS: GateCensus = GateCensus { n_1q: 9, n_2q: 6 };

/// Count one- and two-qubit gates, expanding CCX via its standard 6-CX
/// decomposition and MCX via the v-chain of [`decompose_mcx`].
pub fn gate_census(circuit: &Circuit) -> GateCensus {
    let mut census = GateCensus::default();
    for gate in &circuit.gates {
        census = census + gate_census_one(gate);
    }
    census
}

fn gate_census_one(gate: &Gate) -> GateCensus {
    match gate.kind {
        GateKind::CCX => CCX_CENSUS,
        GateKind::MCX => {
            let k = gate.num_controls();
            match k {
                1 => GateCensus { n_1q: 0, n_2q: 1 },
                _ => {
                    // 2k-3 Toffolis in the v-chain (one for k = 2).
                    let toffolis = 2 * k - 3;
                    GateCensus {
                        n_1q: toffolis * CCX_CENSUS.n_1q,
                        n_2q: toffolis * CCX_CENSUS.n_2q,
                    }
                }
            }
        }
        kind => match kind.arity() {
            Some(1) => GateCensus { n_1q: 1, n_2q: 0 },
            Some(2) => GateCensus { n_1q: 0, n_2q: 1 },
            _ => unreachable!("3+ qubit kinds handled above"),
        },
    }
}

/// Build the quantum Fourier transform on `n` qubits, including the final
/// qubit-order reversal, so that the unitary action on basis state `|k>` is
/// `(1/sqrt(N)) * sum_j exp(2*pi*i*j*k/N) |j>`.
pub fn build_qft(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::invalid("QFT needs at least one qubit"));
    }
    let mut c = Circuit::new(n);
    for i in (0..n).rev() {
        c.push(Gate::h(i));
        for j in (0..i).rev() {
            c.push(Gate::cphase(j, i, PI / f64::powi(2.0, (i - j) as i32)));
        }
    }
    for b in 0..n / 2 {
        c.push(Gate::swap(b, n - 1 - b));
    }
    Ok(c)
}

/// Decompose a multi-controlled X into CX/CCX via the v-chain over clean
/// ancillas. Needs `max(0, controls - 2)` ancillas; with all ancillas in
/// `|0>` the output flips `target` iff every control is 1 and returns the
/// ancillas to `|0>`.
pub fn decompose_mcx(controls: &[usize], target: usize, ancillas: &[usize]) -> Result<Vec<Gate>> {
    let k = controls.len();
    if k == 0 {
        return Err(Error::invalid("MCX needs at least one control"));
    }
    let needed = k.saturating_sub(2);
    if ancillas.len() < needed {
        return Err(Error::invalid(format!(
            "v-chain for {} controls needs {} ancillas, got {}",
            k,
            needed,
            ancillas.len()
        )));
    }
    let mut all = controls.to_vec();
    all.push(target);
    all.extend_from_slice(&ancillas[..needed]);
    for (i, a) in all.iter().enumerate() {
        if all[i + 1..].contains(a) {
            return Err(Error::invalid(format!("repeated qubit index {a} in MCX layout")));
        }
    }

    match k {
        1 => Ok(vec![Gate::cx(controls[0], target)]),
        2 => Ok(vec![Gate::ccx(controls[0], controls[1], target)]),
        _ => {
            let anc = &ancillas[..needed];
            let mut forward = vec![Gate::ccx(controls[0], controls[1], anc[0])];
            for i in 1..k - 2 {
                forward.push(Gate::ccx(controls[i + 1], anc[i - 1], anc[i]));
            }
            let mut gates = forward.clone();
            gates.push(Gate::ccx(controls[k - 1], anc[k - 3], target));
            gates.extend(forward.into_iter().rev());
            Ok(gates)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{simulate, StateVector};
    use num_complex::Complex64;

    #[test]
    fn qft_on_one_qubit_is_hadamard() {
        let c = build_qft(1).unwrap();
        assert_eq!(c.gates, vec![Gate::h(0)]);
    }

    #[test]
    fn qft_rejects_zero_qubits() {
        assert!(build_qft(0).is_err());
    }

    #[test]
    fn qft_of_zero_state_is_uniform() {
        let c = build_qft(3).unwrap();
        let s = simulate(&c, None).unwrap();
        for p in s.probabilities() {
            assert!((p - 1.0 / 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn qft_matrix_matches_dft_oracle() {
        // Brute-force DFT matrix oracle: F[j][k] = exp(2*pi*i*j*k/N)/sqrt(N).
        let n = 4;
        let dim = 1usize << n;
        let c = build_qft(n).unwrap();
        for k in 0..dim {
            let mut state = StateVector::basis(n, k as u64);
            state.apply_circuit(&c).unwrap();
            for j in 0..dim {
                let expected = Complex64::from_polar(
                    1.0 / (dim as f64).sqrt(),
                    2.0 * PI * (j as f64) * (k as f64) / dim as f64,
                );
                let got = state.amplitudes()[j];
                assert!(
                    (got - expected).norm() < 1e-9,
                    "entry ({j},{k}): got {got}, expected {expected}"
                );
            }
        }
    }

    #[test]
    fn qft_followed_by_inverse_is_identity() {
        for n in 1..=6 {
            let c = build_qft(n).unwrap();
            let inv = c.inverse();
            for k in 0..(1u64 << n) {
                let mut state = StateVector::basis(n, k);
                state.apply_circuit(&c).unwrap();
                state.apply_circuit(&inv).unwrap();
                for (idx, amp) in state.amplitudes().iter().enumerate() {
                    let expected = if idx as u64 == k { 1.0 } else { 0.0 };
                    assert!((amp - Complex64::new(expected, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn mcx_small_cases() {
        assert_eq!(
            decompose_mcx(&[0], 1, &[]).unwrap(),
            vec![Gate::cx(0, 1)]
        );
        assert_eq!(
            decompose_mcx(&[0, 1], 2, &[]).unwrap(),
            vec![Gate::ccx(0, 1, 2)]
        );
        assert!(decompose_mcx(&[0, 1, 2, 3], 4, &[5]).is_err());
    }

    #[test]
    fn mcx_four_controls_truth_table() {
        // 4 controls, target, 2 ancillas: exhaustive over control/target inputs.
        let controls = [0, 1, 2, 3];
        let target = 4;
        let ancillas = [5, 6];
        let gates = decompose_mcx(&controls, target, &ancillas).unwrap();
        assert_eq!(gates.len(), 2 * 4 - 3);
        let mut c = Circuit::new(7);
        c.extend(gates);
        for input in 0..(1u64 << 5) {
            let mut state = StateVector::basis(7, input);
            state.apply_circuit(&c).unwrap();
            let controls_all_one = input & 0b1111 == 0b1111;
            let expected = if controls_all_one {
                input ^ (1 << target)
            } else {
                input
            };
            for (idx, amp) in state.amplitudes().iter().enumerate() {
                let want = if idx as u64 == expected { 1.0 } else { 0.0 };
                assert!(
                    (amp.re - want).abs() < 1e-12 && amp.im.abs() < 1e-12,
                    "input {input:05b}: bad amplitude at {idx}"
                );
            }
        }
    }

    #[test]
    fn mcx_decomposition_stays_in_layout() {
        let gates = decompose_mcx(&[2, 4, 6, 8], 10, &[1, 3]).unwrap();
        let layout: Vec<usize> = vec![2, 4, 6, 8, 10, 1, 3];
        for g in &gates {
            for q in &g.qubits {
                assert!(layout.contains(q));
            }
        }
    }

    #[test]
    fn census_empty_circuit() {
        let c = Circuit::new(2);
        assert_eq!(gate_census(&c), GateCensus { n_1q: 0, n_2q: 0 });
    }

    #[test]
    fn census_additive_under_concatenation() {
        let mut a = Circuit::new(5);
        a.push(Gate::h(0));
        a.push(Gate::ccx(0, 1, 2));
        a.push(Gate::mcx(&[0, 1, 2, 3], 4));
        let mut b = Circuit::new(5);
        b.push(Gate::rzz(1, 3, 0.25));
        b.push(Gate::rx(2, 1.0));
        let mut ab = a.clone();
        ab.append(&b);
        assert_eq!(gate_census(&ab), gate_census(&a) + gate_census(&b));
    }

    #[test]
    fn census_counts_mcx_via_vchain() {
        let mut c = Circuit::new(6);
        c.push(Gate::mcx(&[0, 1, 2, 3], 4));
        // 4 controls -> 5 Toffolis -> (45, 30).
        assert_eq!(gate_census(&c), GateCensus { n_1q: 45, n_2q: 30 });
    }

    #[test]
    fn gate_rejects_duplicate_qubits() {
        assert!(Gate {
            kind: GateKind::CX,
            qubits: vec![1, 1],
            angle: None
        }
        .validate()
        .is_err());
    }

    #[test]
    fn circuit_json_round_trip() {
        let mut c = Circuit::new(3).with_metadata("family", "demo");
        c.push(Gate::h(0));
        c.push(Gate::cphase(0, 2, 0.5));
        c.push(Gate::mcx(&[0, 1], 2));
        let v = c.to_json();
        assert_eq!(Circuit::from_json(&v).unwrap(), c);
        // The interchange schema uses "kind"/"qubits"/"angle" keys.
        let first = &v["gates"][0];
        assert_eq!(first["kind"], "H");
        assert_eq!(first["qubits"][0], 0);
    }
}
