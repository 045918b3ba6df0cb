//! Device calibration tables and Monte-Carlo trajectory noise.
//!
//! After every gate, a trajectory applies a uniformly random non-identity
//! Pauli on the gate's qubits with the gate's depolarizing probability.
//! Measured bits flip independently with the qubit's SPAM error. T1/T2 are
//! parsed and kept as metadata only.
//!
//! Error rates come straight from the calibration: single-qubit gates use the
//! qubit's `u2_error`, CNOT uses the pair's CNOT error, and RZZ (compiled as
//! two CNOTs around an RZ) uses `1 − (1 − p_cnot)²`. Pairs missing from the
//! table, in either direction, fall back to the mean listed CNOT error.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::lhst::{build_lhst_circuits, CostEstimate, CostMode, PAIR_QUBITS};
use crate::simcore::{draw_index, rng_stream, Gate, Pauli, StateVector};

/// Logical LHST qubits `(A0, A1, B0, B1)` on device qubits: the measured
/// pairs `(A0,B0)` and `(A1,B1)` sit on the chain edges `Q0–Q1` and `Q2–Q3`.
pub const LHST_LAYOUT: [usize; 4] = [0, 2, 1, 3];

/// Device qubits carrying the two spins in the evolution comparison.
pub const EVOLUTION_LAYOUT: [usize; 2] = [1, 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitCalibration {
    pub id: usize,
    pub t1_us: f64,
    pub t2_us: f64,
    /// Average readout error `(T(0|1) + T(1|0)) / 2`.
    pub spam: f64,
    pub u2_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0_given_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_given_0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnotCalibration {
    pub pair: [usize; 2],
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub qubits: Vec<QubitCalibration>,
    pub cnot: Vec<CnotCalibration>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQubit {
    id: usize,
    t1_us: f64,
    t2_us: f64,
    #[serde(default)]
    spam: Option<f64>,
    u2_error: f64,
    #[serde(default)]
    p0_given_1: Option<f64>,
    #[serde(default)]
    p1_given_0: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    qubits: Vec<RawQubit>,
    #[serde(default)]
    cnot: Vec<CnotCalibration>,
}

fn check_prob(what: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Calibration(format!(
            "{what} = {p} is not a probability"
        )));
    }
    Ok(())
}

/// Parses a calibration document. When both asymmetric readout rates are
/// given, the SPAM error is their mean.
pub fn load_calibration(document: &str) -> Result<CalibrationTable> {
    let raw: RawTable =
        serde_json::from_str(document).map_err(|e| Error::Calibration(e.to_string()))?;
    let mut qubits = Vec::with_capacity(raw.qubits.len());
    for q in raw.qubits {
        let spam = match (q.p0_given_1, q.p1_given_0, q.spam) {
            (Some(a), Some(b), _) => {
                check_prob(&format!("qubit {} p0_given_1", q.id), a)?;
                check_prob(&format!("qubit {} p1_given_0", q.id), b)?;
                (a + b) / 2.0
            }
            (_, _, Some(s)) => s,
            _ => {
                return Err(Error::Calibration(format!(
                    "qubit {} has no spam value or readout rate pair",
                    q.id
                )))
            }
        };
        if !(q.t1_us > 0.0 && q.t2_us > 0.0) {
            return Err(Error::Calibration(format!(
                "qubit {}: T1 and T2 must be positive",
                q.id
            )));
        }
        check_prob(&format!("qubit {} spam", q.id), spam)?;
        check_prob(&format!("qubit {} u2_error", q.id), q.u2_error)?;
        qubits.push(QubitCalibration {
            id: q.id,
            t1_us: q.t1_us,
            t2_us: q.t2_us,
            spam,
            u2_error: q.u2_error,
            p0_given_1: q.p0_given_1,
            p1_given_0: q.p1_given_0,
        });
    }
    qubits.sort_by_key(|q| q.id);
    for (expected, q) in qubits.iter().enumerate() {
        if q.id != expected {
            return Err(Error::Calibration(format!(
                "qubit rows must cover ids 0..{}; missing id {expected}",
                qubits.len()
            )));
        }
    }
    if qubits.is_empty() {
        return Err(Error::Calibration("no qubit rows".into()));
    }
    for c in &raw.cnot {
        check_prob(&format!("cnot {:?}", c.pair), c.error)?;
        if c.pair.iter().any(|&q| q >= qubits.len()) || c.pair[0] == c.pair[1] {
            return Err(Error::Calibration(format!(
                "cnot pair {:?} is invalid",
                c.pair
            )));
        }
    }
    Ok(CalibrationTable {
        qubits,
        cnot: raw.cnot,
    })
}

impl CalibrationTable {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        load_calibration(&std::fs::read_to_string(path)?)
    }

    pub fn qubit(&self, id: usize) -> Option<&QubitCalibration> {
        self.qubits.get(id)
    }

    /// CNOT error for `(a, b)`, trying the reverse direction second.
    pub fn cnot_error(&self, a: usize, b: usize) -> Option<f64> {
        let find = |p: [usize; 2]| self.cnot.iter().find(|c| c.pair == p).map(|c| c.error);
        find([a, b]).or_else(|| find([b, a]))
    }

    fn mean_cnot_error(&self) -> f64 {
        if self.cnot.is_empty() {
            0.0
        } else {
            self.cnot.iter().map(|c| c.error).sum::<f64>() / self.cnot.len() as f64
        }
    }
}

/// Per-gate depolarizing and per-qubit readout probabilities, indexed by
/// logical qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    one_qubit: Vec<f64>,
    two_qubit: Vec<Vec<f64>>,
    readout: Vec<f64>,
}

impl NoiseModel {
    /// No noise at all on `n` qubits.
    pub fn ideal(n: usize) -> Self {
        Self::uniform(n, 0.0, 0.0, 0.0).expect("zero rates are valid")
    }

    pub fn uniform(n: usize, p1: f64, p2: f64, readout: f64) -> Result<Self> {
        for (what, p) in [("p1", p1), ("p2", p2), ("readout", readout)] {
            check_prob(what, p)?;
        }
        Ok(NoiseModel {
            one_qubit: vec![p1; n],
            two_qubit: vec![vec![p2; n]; n],
            readout: vec![readout; n],
        })
    }

    /// Model for a register whose logical qubit `i` lives on device qubit
    /// `layout[i]`.
    pub fn from_calibration(table: &CalibrationTable, layout: &[usize]) -> Result<Self> {
        let n = layout.len();
        let cal = |i: usize| {
            table.qubit(layout[i]).ok_or_else(|| {
                Error::Calibration(format!(
                    "layout names device qubit {} with no row",
                    layout[i]
                ))
            })
        };
        let mut one_qubit = Vec::with_capacity(n);
        let mut readout = Vec::with_capacity(n);
        for i in 0..n {
            one_qubit.push(cal(i)?.u2_error);
            readout.push(cal(i)?.spam);
        }
        let fallback = table.mean_cnot_error();
        let two_qubit = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| table.cnot_error(layout[a], layout[b]).unwrap_or(fallback))
                    .collect()
            })
            .collect();
        Ok(NoiseModel {
            one_qubit,
            two_qubit,
            readout,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.one_qubit.len()
    }

    pub fn readout(&self, q: usize) -> f64 {
        self.readout[q]
    }

    /// Every probability multiplied by `factor`, capped at 1.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |p: &f64| (p * factor).clamp(0.0, 1.0);
        NoiseModel {
            one_qubit: self.one_qubit.iter().map(s).collect(),
            two_qubit: self
                .two_qubit
                .iter()
                .map(|row| row.iter().map(s).collect())
                .collect(),
            readout: self.readout.iter().map(s).collect(),
        }
    }

    /// Depolarizing probability applied after `gate`.
    pub fn gate_error(&self, gate: &Gate) -> f64 {
        use crate::simcore::GateKind::*;
        let [a, b] = gate.qubits;
        match gate.kind {
            RX | RY | P | H => self.one_qubit[a],
            CNOT => self.two_qubit[a][b],
            RZZ => {
                let p = self.two_qubit[a][b];
                1.0 - (1.0 - p) * (1.0 - p)
            }
        }
    }

    fn covers(&self, n: usize) -> Result<()> {
        if self.n_qubits() < n {
            return Err(Error::Dimension(format!(
                "noise model covers {} qubits, circuit needs {n}",
                self.n_qubits()
            )));
        }
        Ok(())
    }
}

/// Applies a uniformly random non-identity Pauli on the gate's qubits.
pub fn apply_random_pauli<R: Rng + ?Sized>(state: &mut StateVector, gate: &Gate, rng: &mut R) {
    let targets = gate.targets();
    if targets.len() == 1 {
        state.apply_pauli(targets[0], Pauli::from_index(rng.random_range(1..4)));
    } else {
        let k = rng.random_range(1..16);
        state.apply_pauli(targets[0], Pauli::from_index(k >> 2));
        state.apply_pauli(targets[1], Pauli::from_index(k & 3));
    }
}

/// One noisy gate: the ideal gate, then a random Pauli with the gate's error
/// probability.
pub fn apply_noise<R: Rng + ?Sized>(
    state: &mut StateVector,
    gate: &Gate,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    model.covers(state.n_qubits())?;
    state.apply(gate)?;
    let p = model.gate_error(gate);
    if p > 0.0 && rng.random::<f64>() < p {
        apply_random_pauli(state, gate, rng);
    }
    Ok(())
}

/// Flips each bit of `bits` (first listed qubit most significant) with its
/// readout error.
pub fn readout_flips<R: Rng + ?Sized>(
    bits: usize,
    qubits: &[usize],
    model: &NoiseModel,
    rng: &mut R,
) -> usize {
    let width = qubits.len();
    let mut out = bits;
    for (k, &q) in qubits.iter().enumerate() {
        let eps = model.readout[q];
        if eps > 0.0 && rng.random::<f64>() < eps {
            out ^= 1 << (width - 1 - k);
        }
    }
    out
}

/// A circuit prepared for repeated noisy shots: resolved gates, their error
/// probabilities, and the ideal state after each gate.
struct ShotSampler {
    gates: Vec<Gate>,
    errors: Vec<f64>,
    ideal: Vec<StateVector>,
    clean_prob: f64,
    first_error: Vec<f64>,
}

impl ShotSampler {
    fn new(circuit: &ParamCircuit, input: &StateVector, model: &NoiseModel) -> Result<Self> {
        model.covers(circuit.n_qubits())?;
        let gates = circuit.resolved()?;
        let errors: Vec<f64> = gates.iter().map(|g| model.gate_error(g)).collect();
        let mut ideal = Vec::with_capacity(gates.len() + 1);
        let mut s = input.clone();
        ideal.push(s.clone());
        for g in &gates {
            s.apply(g)?;
            ideal.push(s.clone());
        }
        // P(first error at gate g) = Π_{h<g}(1 − p_h) · p_g
        let mut survive = 1.0;
        let mut first_error = Vec::with_capacity(gates.len());
        for p in &errors {
            first_error.push(survive * p);
            survive *= 1.0 - p;
        }
        let total: f64 = first_error.iter().sum();
        if total > 0.0 {
            first_error.iter_mut().for_each(|w| *w /= total);
        }
        Ok(ShotSampler {
            gates,
            errors,
            ideal,
            clean_prob: survive,
            first_error,
        })
    }

    /// Final state of one trajectory. Error-free trajectories share the cached
    /// ideal state; the rest start from the first error, drawn directly.
    fn trajectory<R: Rng + ?Sized>(&self, rng: &mut R) -> std::borrow::Cow<'_, StateVector> {
        use std::borrow::Cow;
        if rng.random::<f64>() < self.clean_prob {
            return Cow::Borrowed(self.ideal.last().unwrap());
        }
        let first = draw_index(&self.first_error, rng);
        let mut s = self.ideal[first + 1].clone();
        apply_random_pauli(&mut s, &self.gates[first], rng);
        for (g, p) in self.gates.iter().zip(&self.errors).skip(first + 1) {
            s.apply(g).expect("validated on construction");
            if *p > 0.0 && rng.random::<f64>() < *p {
                apply_random_pauli(&mut s, g, rng);
            }
        }
        Cow::Owned(s)
    }
}

/// Runs one noisy trajectory of `circuit` from `input`.
pub fn run_trajectory<R: Rng + ?Sized>(
    circuit: &ParamCircuit,
    input: &StateVector,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<StateVector> {
    let mut s = input.clone();
    for g in circuit.resolved()? {
        apply_noise(&mut s, &g, model, rng)?;
    }
    Ok(s)
}

/// Shot-sampled LHST cost with trajectory noise on every gate and readout
/// flips on the measured qubits. Circuit `j` draws from stream
/// `2·stream_base + j`.
pub fn noisy_cost_stream(
    u: &ParamCircuit,
    v: &ParamCircuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
    stream_base: u64,
) -> Result<CostEstimate> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let circuits = build_lhst_circuits(u, v)?;
    let zero = StateVector::zero(4)?;
    let mut pr00 = [0.0; 2];
    for (j, c) in circuits.iter().enumerate() {
        let sampler = ShotSampler::new(c, &zero, model)?;
        let measured = &PAIR_QUBITS[j];
        let clean = sampler.ideal.last().unwrap().probabilities(measured)?;
        let mut rng = rng_stream(seed, 2 * stream_base + j as u64);
        let mut hits = 0u64;
        for _ in 0..shots {
            let state = sampler.trajectory(&mut rng);
            let bits = match state {
                std::borrow::Cow::Borrowed(_) => draw_index(&clean, &mut rng),
                std::borrow::Cow::Owned(s) => draw_index(&s.probabilities(measured)?, &mut rng),
            };
            if readout_flips(bits, measured, model, &mut rng) == 0 {
                hits += 1;
            }
        }
        pr00[j] = hits as f64 / shots as f64;
    }
    Ok(CostEstimate::from_pr00(pr00, CostMode::Noisy, shots, seed))
}

pub fn noisy_cost(
    u: &ParamCircuit,
    v: &ParamCircuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<CostEstimate> {
    noisy_cost_stream(u, v, model, shots, seed, 0)
}

/// Per-trajectory fidelities `|⟨target_k|ψ_k⟩|²` at several checkpoints of
/// one circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFidelities {
    /// `values[trajectory][checkpoint]`
    pub values: Vec<Vec<f64>>,
}

impl TrajectoryFidelities {
    pub fn n_trajectories(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self, checkpoint: usize) -> f64 {
        self.values.iter().map(|v| v[checkpoint]).sum::<f64>() / self.values.len() as f64
    }

    pub fn means(&self) -> Vec<f64> {
        let k = self.values.first().map_or(0, Vec::len);
        (0..k).map(|c| self.mean(c)).collect()
    }

    /// Mean and standard error of the paired difference between two
    /// checkpoints, `later − earlier`.
    pub fn paired_difference(&self, earlier: usize, later: usize) -> (f64, f64) {
        let n = self.values.len() as f64;
        let d: Vec<f64> = self.values.iter().map(|v| v[later] - v[earlier]).collect();
        let mean = d.iter().sum::<f64>() / n;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }
}

/// Runs `trajectories` noisy trajectories of `circuit` from `input` and
/// records the fidelity with `targets[k]` after the first `checkpoints[k]`
/// gates. Trajectory `i` draws from stream `stream_base + i` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn trajectory_fidelities(
    circuit: &ParamCircuit,
    input: &StateVector,
    model: &NoiseModel,
    checkpoints: &[usize],
    targets: &[StateVector],
    trajectories: usize,
    seed: u64,
    stream_base: u64,
) -> Result<TrajectoryFidelities> {
    if checkpoints.len() != targets.len() {
        return Err(Error::Dimension(format!(
            "{} checkpoints but {} targets",
            checkpoints.len(),
            targets.len()
        )));
    }
    if checkpoints.windows(2).any(|w| w[0] > w[1])
        || checkpoints.last().is_some_and(|&c| c > circuit.len())
    {
        return Err(Error::InvalidValue(
            "checkpoints must be non-decreasing and within the circuit".into(),
        ));
    }
    model.covers(circuit.n_qubits())?;
    let gates = circuit.resolved()?;
    let values = (0..trajectories)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut rng = rng_stream(seed, stream_base + i as u64);
            let mut s = input.clone();
            let mut done = 0;
            let mut out = Vec::with_capacity(checkpoints.len());
            for (&cp, target) in checkpoints.iter().zip(targets) {
                for g in &gates[done..cp] {
                    apply_noise(&mut s, g, model, &mut rng)?;
                }
                done = cp;
                out.push(target.inner(&s)?.norm_sqr().min(1.0));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryFidelities { values })
}
