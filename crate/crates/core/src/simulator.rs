//! Deterministic statevector execution, exact outcome distributions, shot
//! sampling, depolarizing noise, and distribution-distance utilities.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

/// Default cap on simulated qubits (2^24 amplitudes, ~256 MiB).
pub const DEFAULT_QUBIT_CAP: usize = 24;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Pure state of `num_qubits` qubits as a dense amplitude vector.
///
/// Qubit 0 is the least-significant bit of the amplitude index.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// The computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: u64) -> Self {
        assert!(num_qubits > 0 && num_qubits < 64);
        assert!(index < (1u64 << num_qubits));
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        StateVector { amps, num_qubits }
    }

    /// Build a state from raw amplitudes (length must be a power of two);
    /// the vector is normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::invalid("amplitude vector length must be a power of two >= 2"));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            amps,
            num_qubits: dim.trailing_zeros() as usize,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply every gate of `circuit` in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits != self.num_qubits {
            return Err(Error::invalid(format!(
                "circuit width {} does not match state width {}",
                circuit.num_qubits, self.num_qubits
            )));
        }
        for gate in &circuit.gates {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate()?;
        for &q in &gate.qubits {
            if q >= self.num_qubits {
                return Err(Error::invalid(format!("gate qubit {q} out of range")));
            }
        }
        let theta = gate.angle.unwrap_or(0.0);
        match gate.kind {
            GateKind::H => self.apply_1q(
                gate.qubits[0],
                [
                    [Complex64::new(SQRT_HALF, 0.0), Complex64::new(SQRT_HALF, 0.0)],
                    [Complex64::new(SQRT_HALF, 0.0), Complex64::new(-SQRT_HALF, 0.0)],
                ],
            ),
            GateKind::X => self.apply_1q(
                gate.qubits[0],
                [
                    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                ],
            ),
            GateKind::Y => self.apply_1q(
                gate.qubits[0],
                [
                    [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
                    [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
                ],
            ),
            GateKind::Z => self.apply_1q(
                gate.qubits[0],
                [
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
                ],
            ),
            GateKind::RX => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                self.apply_1q(
                    gate.qubits[0],
                    [
                        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                    ],
                )
            }
            GateKind::RY => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                self.apply_1q(
                    gate.qubits[0],
                    [
                        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                    ],
                )
            }
            GateKind::RZ => {
                let half = theta / 2.0;
                self.apply_1q(
                    gate.qubits[0],
                    [
                        [Complex64::from_polar(1.0, -half), Complex64::new(0.0, 0.0)],
                        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, half)],
                    ],
                )
            }
            GateKind::CX => {
                let (c, t) = (gate.qubits[0], gate.qubits[1]);
                let (cb, tb) = (1usize << c, 1usize << t);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            GateKind::CZ => {
                let mask = (1usize << gate.qubits[0]) | (1usize << gate.qubits[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::CPHASE => {
                let mask = (1usize << gate.qubits[0]) | (1usize << gate.qubits[1]);
                let phase = Complex64::from_polar(1.0, theta);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a *= phase;
                    }
                }
            }
            GateKind::SWAP => {
                let (ab, bb) = (1usize << gate.qubits[0], 1usize << gate.qubits[1]);
                for i in 0..self.amps.len() {
                    if i & ab != 0 && i & bb == 0 {
                        self.amps.swap(i, (i & !ab) | bb);
                    }
                }
            }
            GateKind::RZZ => {
                let (ab, bb) = (1usize << gate.qubits[0], 1usize << gate.qubits[1]);
                let plus = Complex64::from_polar(1.0, theta / 2.0);
                let minus = Complex64::from_polar(1.0, -theta / 2.0);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    // Z(x)Z eigenvalue +1 when the bits agree.
                    let agree = (i & ab != 0) == (i & bb != 0);
                    *a *= if agree { minus } else { plus };
                }
            }
            GateKind::RXX => {
                let mask = (1usize << gate.qubits[0]) | (1usize << gate.qubits[1]);
                let c = Complex64::new((theta / 2.0).cos(), 0.0);
                let ms = Complex64::new(0.0, -(theta / 2.0).sin());
                for i in 0..self.amps.len() {
                    let j = i ^ mask;
                    if i < j {
                        let (ai, aj) = (self.amps[i], self.amps[j]);
                        self.amps[i] = c * ai + ms * aj;
                        self.amps[j] = c * aj + ms * ai;
                    }
                }
            }
            GateKind::RYY => {
                let (ab, bb) = (1usize << gate.qubits[0], 1usize << gate.qubits[1]);
                let mask = ab | bb;
                let c = Complex64::new((theta / 2.0).cos(), 0.0);
                let ms = Complex64::new(0.0, -(theta / 2.0).sin());
                for i in 0..self.amps.len() {
                    let j = i ^ mask;
                    if i < j {
                        // <i|YY|j> = -1 when the two bits of i agree, +1 otherwise.
                        let agree = (i & ab != 0) == (i & bb != 0);
                        let sign = if agree { -1.0 } else { 1.0 };
                        let (ai, aj) = (self.amps[i], self.amps[j]);
                        self.amps[i] = c * ai + ms * sign * aj;
                        self.amps[j] = c * aj + ms * sign * ai;
                    }
                }
            }
            GateKind::CCX | GateKind::MCX => {
                let (controls, target) = gate.qubits.split_at(gate.qubits.len() - 1);
                let cmask: usize = controls.iter().map(|&q| 1usize << q).sum();
                let tb = 1usize << target[0];
                for i in 0..self.amps.len() {
                    if i & cmask == cmask && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i0 in 0..self.amps.len() {
            if i0 & bit == 0 {
                let i1 = i0 | bit;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// `<psi|P|psi>` for a Pauli string over `{I,X,Y,Z}`; character `i` acts
    /// on qubit `i`.
    pub fn pauli_expectation(&self, pauli: &str) -> Result<f64> {
        if pauli.len() != self.num_qubits {
            return Err(Error::invalid(format!(
                "Pauli string length {} does not match {} qubits",
                pauli.len(),
                self.num_qubits
            )));
        }
        let mut xmask = 0usize;
        let mut ymask = 0usize;
        let mut zmask = 0usize;
        for (q, ch) in pauli.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => xmask |= 1 << q,
                'Y' => {
                    xmask |= 1 << q;
                    ymask |= 1 << q;
                }
                'Z' => zmask |= 1 << q,
                other => {
                    return Err(Error::invalid(format!("bad Pauli character `{other}`")));
                }
            }
        }
        // P|b> = i^{|Y|} * (-1)^{|b & (Y|Z)|} |b ^ xmask>.
        let y_count = ymask.count_ones() as usize;
        let i_pow = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let sign_mask = ymask | zmask;
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amps.iter().enumerate() {
            let sign = if ((b & sign_mask).count_ones()) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += self.amps[b ^ xmask].conj() * i_pow * sign * amp;
        }
        Ok(acc.re)
    }
}

/// Born-rule probabilities over bitstrings of a measured qubit subset.
///
/// Keys pack the measured qubits in ascending order: bit `j` of a key is the
/// value of `measured[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: BTreeMap<u64, f64>,
    num_bits: usize,
}

impl OutcomeDistribution {
    pub fn from_probs(probs: BTreeMap<u64, f64>, num_bits: usize) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty distribution"));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-6 || probs.values().any(|&p| p < 0.0) {
            return Err(Error::invalid(format!(
                "probabilities must be nonnegative and sum to 1 (sum = {total})"
            )));
        }
        Ok(OutcomeDistribution { probs, num_bits })
    }

    /// Point mass on one outcome.
    pub fn point(num_bits: usize, key: u64) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(key, 1.0);
        OutcomeDistribution { probs, num_bits }
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn prob(&self, key: u64) -> f64 {
        self.probs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&k, &p)| (k, p))
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }
}

/// Bitstring counts returned by a backend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    counts: BTreeMap<u64, u64>,
    shots: u64,
    num_bits: usize,
}

impl ShotHistogram {
    pub fn new(counts: BTreeMap<u64, u64>, num_bits: usize) -> Self {
        let shots = counts.values().sum();
        ShotHistogram {
            counts,
            shots,
            num_bits,
        }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn count(&self, key: u64) -> u64 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// Empirical distribution; errors on a zero-shot histogram.
    pub fn normalized(&self) -> Result<OutcomeDistribution> {
        if self.shots == 0 {
            return Err(Error::invalid("empty histogram"));
        }
        let probs = self
            .counts
            .iter()
            .map(|(&k, &c)| (k, c as f64 / self.shots as f64))
            .collect();
        OutcomeDistribution::from_probs(probs, self.num_bits)
    }

    /// Histogram over a subset of bit positions (ascending order in the key).
    pub fn marginal(&self, bits: &[usize]) -> Result<ShotHistogram> {
        for &b in bits {
            if b >= self.num_bits {
                return Err(Error::invalid(format!("bit {b} out of range")));
            }
        }
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for (&key, &c) in &self.counts {
            let mut sub = 0u64;
            for (j, &b) in bits.iter().enumerate() {
                sub |= ((key >> b) & 1) << j;
            }
            *counts.entry(sub).or_insert(0) += c;
        }
        Ok(ShotHistogram::new(counts, bits.len()))
    }

    /// Render an outcome key as a most-significant-bit-first bitstring.
    pub fn render_key(&self, key: u64) -> String {
        render_bits(key, self.num_bits)
    }
}

pub fn render_bits(key: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if (key >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bits(s: &str) -> Result<(u64, usize)> {
    let mut key = 0u64;
    for ch in s.chars() {
        key <<= 1;
        match ch {
            '0' => {}
            '1' => key |= 1,
            other => return Err(Error::invalid(format!("bad bitstring character `{other}`"))),
        }
    }
    Ok((key, s.len()))
}

// Interchange format: {"shots": int, "counts": {"bitstring": int}}.
impl Serialize for ShotHistogram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            shots: u64,
            counts: BTreeMap<String, &'a u64>,
        }
        let counts = self
            .counts
            .iter()
            .map(|(&k, c)| (render_bits(k, self.num_bits), c))
            .collect();
        Wire {
            shots: self.shots,
            counts,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ShotHistogram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            shots: u64,
            counts: BTreeMap<String, u64>,
        }
        let wire = Wire::deserialize(deserializer)?;
        let mut counts = BTreeMap::new();
        let mut num_bits = 0usize;
        for (s, c) in wire.counts {
            let (key, width) = parse_bits(&s).map_err(serde::de::Error::custom)?;
            if num_bits == 0 {
                num_bits = width;
            } else if num_bits != width {
                return Err(serde::de::Error::custom("inconsistent bitstring lengths"));
            }
            counts.insert(key, c);
        }
        let h = ShotHistogram::new(counts, num_bits);
        if h.shots != wire.shots {
            return Err(serde::de::Error::custom("counts do not sum to shots"));
        }
        Ok(h)
    }
}

/// Per-gate depolarizing noise strengths and the sampling seed.
///
/// After each gate, with probability `p1` (one-qubit gates) or `p2`
/// (multi-qubit gates) a Pauli string drawn uniformly over all Paulis on the
/// gate's qubits (identity included) is applied, so `p = 1` fully
/// depolarizes the touched qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
            return Err(Error::invalid("depolarizing probabilities must lie in [0, 1]"));
        }
        Ok(NoiseModel { p1, p2, seed })
    }
}

/// Exact noiseless statevector of `circuit` starting from `|0..0>`.
pub fn simulate(circuit: &Circuit, cap: Option<usize>) -> Result<StateVector> {
    let cap = cap.unwrap_or(DEFAULT_QUBIT_CAP);
    if circuit.num_qubits > cap {
        return Err(Error::ResourceLimit(format!(
            "{} qubits exceeds the simulator cap of {cap}",
            circuit.num_qubits
        )));
    }
    let mut state = StateVector::zero(circuit.num_qubits);
    state.apply_circuit(circuit)?;
    Ok(state)
}

/// Marginal Born-rule probabilities over `measured` (ascending bit order in
/// the outcome keys). Zero-probability outcomes are omitted.
pub fn exact_distribution(state: &StateVector, measured: &[usize]) -> Result<OutcomeDistribution> {
    if measured.is_empty() {
        return Err(Error::invalid("measured subset must be non-empty"));
    }
    for (i, &q) in measured.iter().enumerate() {
        if q >= state.num_qubits() {
            return Err(Error::invalid(format!("measured qubit {q} out of range")));
        }
        if measured[i + 1..].contains(&q) {
            return Err(Error::invalid(format!("measured qubit {q} repeated")));
        }
    }
    let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p > 0.0 {
            let mut key = 0u64;
            for (j, &q) in measured.iter().enumerate() {
                key |= (((idx >> q) & 1) as u64) << j;
            }
            *probs.entry(key).or_insert(0.0) += p;
        }
    }
    OutcomeDistribution::from_probs(probs, measured.len())
}

/// Multinomial sample of `shots` outcomes; identical `(d, shots, seed)`
/// yields an identical histogram.
pub fn sample(d: &OutcomeDistribution, shots: u64, seed: u64) -> Result<ShotHistogram> {
    if shots == 0 {
        return Err(Error::invalid("shots must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cumulative: Vec<(f64, u64)> = Vec::with_capacity(d.probs.len());
    let mut acc = 0.0;
    for (&key, &p) in &d.probs {
        acc += p;
        cumulative.push((acc, key));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let pos = cumulative.partition_point(|&(c, _)| c <= u);
        let key = cumulative[pos.min(cumulative.len() - 1)].1;
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(ShotHistogram::new(counts, d.num_bits))
}

/// Per-shot trajectory sampling under depolarizing noise; measures all
/// qubits. With `p1 = p2 = 0` this reduces to sampling the exact
/// distribution with the model's seed.
pub fn simulate_noisy(
    circuit: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    cap: Option<usize>,
) -> Result<ShotHistogram> {
    if shots == 0 {
        return Err(Error::invalid("shots must be >= 1"));
    }
    if noise.p1 == 0.0 && noise.p2 == 0.0 {
        let state = simulate(circuit, cap)?;
        let measured: Vec<usize> = (0..circuit.num_qubits).collect();
        return sample(&exact_distribution(&state, &measured)?, shots, noise.seed);
    }
    let cap = cap.unwrap_or(DEFAULT_QUBIT_CAP);
    if circuit.num_qubits > cap {
        return Err(Error::ResourceLimit(format!(
            "{} qubits exceeds the simulator cap of {cap}",
            circuit.num_qubits
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let mut state = StateVector::zero(circuit.num_qubits);
        for gate in &circuit.gates {
            state.apply_gate(gate)?;
            let p = if gate.qubits.len() == 1 { noise.p1 } else { noise.p2 };
            if p > 0.0 && rng.gen::<f64>() < p {
                for &q in &gate.qubits {
                    match rng.gen_range(0u8..4) {
                        0 => {}
                        1 => state.apply_gate(&Gate::x(q))?,
                        2 => state.apply_gate(&Gate::y(q))?,
                        _ => state.apply_gate(&Gate::z(q))?,
                    }
                }
            }
        }
        let probs = state.probabilities();
        let mut u: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
        let mut outcome = probs.len() - 1;
        for (idx, p) in probs.iter().enumerate() {
            if u < *p {
                outcome = idx;
                break;
            }
            u -= p;
        }
        *counts.entry(outcome as u64).or_insert(0) += 1;
    }
    Ok(ShotHistogram::new(counts, circuit.num_qubits))
}

/// Anything with a bitstring outcome distribution.
pub trait AsDistribution {
    fn as_distribution(&self) -> Result<OutcomeDistribution>;
}

impl AsDistribution for OutcomeDistribution {
    fn as_distribution(&self) -> Result<OutcomeDistribution> {
        Ok(self.clone())
    }
}

impl AsDistribution for ShotHistogram {
    fn as_distribution(&self) -> Result<OutcomeDistribution> {
        self.normalized()
    }
}

/// Hellinger fidelity `(sum_i sqrt(p_i q_i))^2`; histograms are normalized
/// first. Requires both inputs over the same outcome width.
pub fn hellinger_fidelity<P: AsDistribution + ?Sized, Q: AsDistribution + ?Sized>(
    p: &P,
    q: &Q,
) -> Result<f64> {
    let p = p.as_distribution()?;
    let q = q.as_distribution()?;
    if p.num_bits() != q.num_bits() {
        return Err(Error::invalid(format!(
            "distributions over different outcome spaces ({} vs {} bits)",
            p.num_bits(),
            q.num_bits()
        )));
    }
    let mut bc = 0.0;
    for (key, pp) in p.iter() {
        let qq = q.prob(key);
        if qq > 0.0 {
            bc += (pp * qq).sqrt();
        }
    }
    Ok(bc * bc)
}
