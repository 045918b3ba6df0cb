//! Local Hilbert-Schmidt test for two-qubit unitaries.
//!
//! Register A is qubits (0,1), register B is qubits (2,3), and `A_j` is paired
//! with `B_j`. Both test circuits prepare Bell pairs on (A_0,B_0) and
//! (A_1,B_1), apply `U` on A and `V*` on B, and then undo the Bell
//! preparation on one pair only: pair 0 in the first circuit, pair 1 in the
//! second. The cost is `C = 1 − (Pr(00)_pair1 + Pr(00)_pair2)/2`, and it is
//! zero iff `V = e^{iφ}U`.
//!
//! `U` enters the test circuits with its angles frozen, so only `V`'s
//! parameters stay live and `U` may reuse `V`'s parameter names.

use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::simcore::{rng_stream, GateKind, StateVector};

/// Qubits measured by each test circuit, `(A_j, B_j)`.
pub const PAIR_QUBITS: [[usize; 2]; 2] = [[0, 2], [1, 3]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Analytic,
    Sampled,
    Noisy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub value: f64,
    pub pr00_pair1: f64,
    pub pr00_pair2: f64,
    pub mode: CostMode,
    pub shots: u64,
    pub seed: u64,
}

impl CostEstimate {
    pub fn from_pr00(pr00: [f64; 2], mode: CostMode, shots: u64, seed: u64) -> Self {
        let value = (1.0 - (pr00[0] + pr00[1]) / 2.0).clamp(0.0, 1.0);
        CostEstimate {
            value,
            pr00_pair1: pr00[0],
            pr00_pair2: pr00[1],
            mode,
            shots,
            seed,
        }
    }
}

fn check_two_qubit(c: &ParamCircuit, what: &str) -> Result<()> {
    if c.n_qubits() != 2 {
        return Err(Error::Dimension(format!(
            "{what} must act on 2 qubits, got {}",
            c.n_qubits()
        )));
    }
    Ok(())
}

/// The two 4-qubit test circuits, pair 0 first.
pub fn build_lhst_circuits(u: &ParamCircuit, v: &ParamCircuit) -> Result<[ParamCircuit; 2]> {
    check_two_qubit(u, "U")?;
    check_two_qubit(v, "V")?;
    let u = u.frozen()?;
    let v_conj = v.conjugate();
    let build = |tested: usize| -> Result<ParamCircuit> {
        let mut c = ParamCircuit::new(4)?;
        for [a, b] in PAIR_QUBITS {
            c.add_fixed(GateKind::H, &[a])?;
            c.add_fixed(GateKind::CNOT, &[a, b])?;
        }
        c.append(&u, 0)?;
        c.append(&v_conj, 2)?;
        let [a, b] = PAIR_QUBITS[tested];
        c.add_fixed(GateKind::CNOT, &[a, b])?;
        c.add_fixed(GateKind::H, &[a])?;
        Ok(c)
    };
    Ok([build(0)?, build(1)?])
}

/// Exact Pr(00) of each test circuit.
pub fn pr00_analytic(circuits: &[ParamCircuit; 2]) -> Result<[f64; 2]> {
    let zero = StateVector::zero(4)?;
    let mut out = [0.0; 2];
    for (j, c) in circuits.iter().enumerate() {
        out[j] = c.run(&zero)?.probabilities(&PAIR_QUBITS[j])?[0];
    }
    Ok(out)
}

pub fn cost_analytic(u: &ParamCircuit, v: &ParamCircuit) -> Result<CostEstimate> {
    let circuits = build_lhst_circuits(u, v)?;
    Ok(CostEstimate::from_pr00(
        pr00_analytic(&circuits)?,
        CostMode::Analytic,
        0,
        0,
    ))
}

/// Shot-sampled cost. Circuit `j` draws from stream `2·stream_base + j` of
/// `seed`.
pub fn cost_sampled_stream(
    u: &ParamCircuit,
    v: &ParamCircuit,
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
        let state = c.run(&zero)?;
        let mut rng = rng_stream(seed, 2 * stream_base + j as u64);
        let counts = state.sample_with(&PAIR_QUBITS[j], shots, &mut rng)?;
        let hits = counts.iter().find(|o| o.bits == 0).map_or(0, |o| o.count);
        pr00[j] = hits as f64 / shots as f64;
    }
    Ok(CostEstimate::from_pr00(
        pr00,
        CostMode::Sampled,
        shots,
        seed,
    ))
}

pub fn cost_sampled(
    u: &ParamCircuit,
    v: &ParamCircuit,
    shots: u64,
    seed: u64,
) -> Result<CostEstimate> {
    cost_sampled_stream(u, v, shots, seed, 0)
}

/// `1 − |Tr(U V†)|²/d²` from the dense unitaries. Used as a cross-check.
pub fn hst_global(u: &ParamCircuit, v: &ParamCircuit) -> Result<f64> {
    check_two_qubit(u, "U")?;
    check_two_qubit(v, "V")?;
    let (um, vm) = (u.unitary_of()?, v.unitary_of()?);
    let d = um.nrows() as f64;
    let tr = (&um * vm.adjoint()).trace();
    Ok((1.0 - tr.norm_sqr() / (d * d)).max(0.0))
}
