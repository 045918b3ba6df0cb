//! Dense statevector simulation.
//!
//! Qubit 0 is the most significant bit of a basis index, so it is the
//! leftmost character of an outcome label: on two qubits, index 2 is `|10⟩`
//! (qubit 0 set).
//!
//! Gate conventions: `RX(θ) = exp(iθX/2)`, `RY(θ) = exp(iθY/2)`,
//! `P(γ) = diag(1, e^{iγ})`, `RZZ(θ) = exp(iθ Z⊗Z/2)`; `H` and `CNOT` are the
//! usual matrices.
//!
//! # Random streams
//!
//! All sampling draws from [`ChaCha8Rng`]. A stream is addressed by a pair
//! `(seed, stream)`: the key comes from `seed` through `seed_from_u64` and the
//! ChaCha stream id is set to `stream`. Callers derive one stream id per
//! executed circuit, so evaluations never share a generator and results do not
//! depend on evaluation order or thread count.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_QUBITS: usize = 12;

/// Tolerance used when checking that a state is normalized.
pub const NORM_TOL: f64 = 1e-8;

/// Opens the random stream `stream` under `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    P,
    RZZ,
    CNOT,
    H,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::P,
        GateKind::RZZ,
        GateKind::CNOT,
        GateKind::H,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::RZZ | GateKind::CNOT => 2,
            _ => 1,
        }
    }

    pub fn is_parameterized(self) -> bool {
        !matches!(self, GateKind::CNOT | GateKind::H)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::P => "P",
            GateKind::RZZ => "RZZ",
            GateKind::CNOT => "CNOT",
            GateKind::H => "H",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate with a concrete angle, ready to act on a state.
///
/// For two-qubit gates `qubits[0]` is the control of a CNOT. The angle is
/// ignored for `CNOT` and `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: [usize; 2],
    pub angle: f64,
}

impl Gate {
    pub fn one(kind: GateKind, q: usize, angle: f64) -> Self {
        Gate {
            kind,
            qubits: [q, q],
            angle,
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize, angle: f64) -> Self {
        Gate {
            kind,
            qubits: [a, b],
            angle,
        }
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Gate::one(GateKind::RX, q, angle)
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Gate::one(GateKind::RY, q, angle)
    }

    pub fn p(q: usize, angle: f64) -> Self {
        Gate::one(GateKind::P, q, angle)
    }

    pub fn h(q: usize) -> Self {
        Gate::one(GateKind::H, q, 0.0)
    }

    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Gate::two(GateKind::RZZ, a, b, angle)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::two(GateKind::CNOT, control, target, 0.0)
    }

    pub fn targets(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    /// 2×2 matrix of a single-qubit gate, row-major.
    pub fn matrix_1q(kind: GateKind, angle: f64) -> [[C64; 2]; 2] {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match kind {
            GateKind::RX => {
                let (s, c) = (angle / 2.0).sin_cos();
                let is = C64::new(0.0, s);
                [[C64::new(c, 0.0), is], [is, C64::new(c, 0.0)]]
            }
            GateKind::RY => {
                let (s, c) = (angle / 2.0).sin_cos();
                [
                    [C64::new(c, 0.0), C64::new(s, 0.0)],
                    [C64::new(-s, 0.0), C64::new(c, 0.0)],
                ]
            }
            GateKind::P => [[one, zero], [zero, C64::from_polar(1.0, angle)]],
            GateKind::H => {
                let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[r, r], [r, -r]]
            }
            GateKind::RZZ | GateKind::CNOT => panic!("{kind} is a two-qubit gate"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Pauli {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][i & 3]
    }
}

/// One bit pattern over the measured qubits together with its count.
///
/// `bits` holds the pattern with the first measured qubit as the most
/// significant of `width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub bits: usize,
    pub width: usize,
    pub count: u64,
}

impl MeasurementOutcome {
    pub fn label(&self) -> String {
        (0..self.width)
            .map(|k| {
                if self.bits >> (self.width - 1 - k) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::InvalidValue(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The vector must have length `2^n` and unit norm
    /// within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::Dimension(format!(
                "amplitude vector length {} is not a power of two ≥ 2",
                amps.len()
            )));
        }
        check_qubit_count(n_qubits)?;
        let state = StateVector { n_qubits, amps };
        let norm = state.norm_sqr();
        if norm.is_nan() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        for q in 0..n_qubits {
            s.apply(&Gate::h(q))?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "inner product of {}- and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn check_targets(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitIndex {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        self.check_targets(gate.targets())?;
        if !gate.angle.is_finite() {
            return Err(Error::InvalidValue(format!(
                "{} angle {} is not finite",
                gate.kind.name(),
                gate.angle
            )));
        }
        match gate.kind {
            GateKind::CNOT => {
                let (c, t) = (self.mask(gate.qubits[0]), self.mask(gate.qubits[1]));
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::RZZ => {
                let (a, b) = (self.mask(gate.qubits[0]), self.mask(gate.qubits[1]));
                let even = C64::from_polar(1.0, gate.angle / 2.0);
                let odd = even.conj();
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    let parity = (i & a != 0) != (i & b != 0);
                    *amp *= if parity { odd } else { even };
                }
            }
            kind => self.apply_1q(gate.qubits[0], &Gate::matrix_1q(kind, gate.angle)),
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: &[[C64; 2]; 2]) {
        let bit = self.mask(q);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// Applies a single-qubit Pauli in place. Panics on an invalid index.
    pub fn apply_pauli(&mut self, q: usize, pauli: Pauli) {
        assert!(q < self.n_qubits, "qubit {q} out of range");
        let bit = self.mask(q);
        match pauli {
            Pauli::I => {}
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Y => {
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let j = i | bit;
                        let (a, b) = (self.amps[i], self.amps[j]);
                        self.amps[i] = C64::new(b.im, -b.re);
                        self.amps[j] = C64::new(-a.im, a.re);
                    }
                }
            }
            Pauli::Z => {
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    /// Marginal distribution over `qubits`; entry `k` is the probability of
    /// the pattern whose first listed qubit is the most significant bit of `k`.
    pub fn probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_targets(qubits)?;
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, amp) in self.amps.iter().enumerate() {
            let label = masks
                .iter()
                .fold(0, |acc, &m| (acc << 1) | usize::from(i & m != 0));
            probs[label] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Multinomial draw of `shots` outcomes over `qubits`, using `rng`.
    /// Returns patterns with non-zero counts in ascending order.
    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: u64,
        rng: &mut R,
    ) -> Result<Vec<MeasurementOutcome>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let probs = self.probabilities(qubits)?;
        let mut counts = vec![0u64; probs.len()];
        for _ in 0..shots {
            counts[draw_index(&probs, rng)] += 1;
        }
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(bits, count)| MeasurementOutcome {
                bits,
                width: qubits.len(),
                count,
            })
            .collect())
    }

    /// [`sample_with`](Self::sample_with) on stream 0 of `seed`.
    pub fn sample(
        &self,
        qubits: &[usize],
        shots: u64,
        seed: u64,
    ) -> Result<Vec<MeasurementOutcome>> {
        self.sample_with(qubits, shots, &mut rng_stream(seed, 0))
    }
}

/// Inverse-CDF draw from a discrete distribution. The last index absorbs any
/// rounding slack in the cumulative sum.
pub fn draw_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount {
            got: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}
