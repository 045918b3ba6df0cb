//! Transverse-field Ising chain, its second-order Trotter step and the exact
//! propagator.
//!
//! `H = J Σ_i Z_i Z_{i+1} + B Σ_i X_i` with periodic wrap, so on two spins the
//! `Z₁Z₂` bond is counted twice: `H = 2J Z₁Z₂ + B(X₁ + X₂)`.

use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::linalg::{embed_1q, hermitian_eigen, pauli_x, pauli_z, CMatrix};
use crate::simcore::{GateKind, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsingParams {
    pub n_spins: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub dt: f64,
}

impl Default for IsingParams {
    fn default() -> Self {
        IsingParams {
            n_spins: 2,
            j: 1.0,
            b: 1.0,
            dt: 0.2,
        }
    }
}

impl IsingParams {
    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::simcore::MAX_QUBITS).contains(&self.n_spins) {
            return Err(Error::InvalidValue(format!(
                "n_spins must be at least 2, got {}",
                self.n_spins
            )));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidValue(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !self.j.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidValue("J and B must be finite".into()));
        }
        Ok(())
    }

    /// Same chain with the exchange switched off.
    pub fn without_exchange(&self) -> Self {
        IsingParams { j: 0.0, ..*self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian(CMatrix);

impl Hamiltonian {
    /// Wraps a matrix after checking it is Hermitian within 1e-12.
    pub fn new(m: CMatrix) -> Result<Self> {
        hermitian_eigen(&m, 1e-12)?;
        Ok(Hamiltonian(m))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigen(&self.0, 1e-12)
            .expect("checked at construction")
            .0
    }
}

pub fn build_hamiltonian(p: &IsingParams) -> Result<Hamiltonian> {
    p.validate()?;
    let n = p.n_spins;
    let dim = 1 << n;
    let (x, z) = (pauli_x(), pauli_z());
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..n {
        let bond = embed_1q(&z, i, n) * embed_1q(&z, (i + 1) % n, n);
        h += bond * C64::new(p.j, 0.0);
        h += embed_1q(&x, i, n) * C64::new(p.b, 0.0);
    }
    Ok(Hamiltonian(h))
}

/// One second-order Trotter step approximating `exp(−iH·dt)` on two spins.
///
/// The step is a symmetric bracket applied twice, each bracket covering
/// `dt/2`: `RX(−θ_B)⊗RX(−θ_B) · RZZ(−θ_J)_{0,1} · RZZ(−θ_J)_{1,0} ·
/// RX(−θ_B)⊗RX(−θ_B)` with `θ_B = B·dt/2` and `θ_J = 2J·dt/2`. The two RZZ
/// gates are the two periodic bonds of the 2-spin ring. Angles are negative
/// because the gates are `exp(+iθ·G/2)`.
pub fn trotter_step_circuit(p: &IsingParams) -> Result<ParamCircuit> {
    p.validate()?;
    if p.n_spins != 2 {
        return Err(Error::InvalidValue(format!(
            "Trotter circuit is built for 2 spins, got {}",
            p.n_spins
        )));
    }
    let theta_b = p.b * p.dt / 2.0;
    let theta_j = 2.0 * p.j * p.dt / 2.0;
    let mut c = ParamCircuit::new(2)?;
    for _ in 0..2 {
        for q in 0..2 {
            c.add_literal(GateKind::RX, &[q], -theta_b)?;
        }
        c.add_literal(GateKind::RZZ, &[0, 1], -theta_j)?;
        c.add_literal(GateKind::RZZ, &[1, 0], -theta_j)?;
        for q in 0..2 {
            c.add_literal(GateKind::RX, &[q], -theta_b)?;
        }
    }
    Ok(c)
}

/// `k_steps` consecutive Trotter steps.
pub fn trotterized_evolution(p: &IsingParams, k_steps: usize) -> Result<ParamCircuit> {
    let step = trotter_step_circuit(p)?;
    let mut c = ParamCircuit::new(2)?;
    for _ in 0..k_steps {
        c.append(&step, 0)?;
    }
    Ok(c)
}

/// `exp(−iHt)` through the eigendecomposition of `H`.
pub fn exact_evolution(h: &Hamiltonian, t: f64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(h.matrix(), 1e-12)?;
    let phases = nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|l| C64::from_polar(1.0, -l * t)),
    );
    Ok(&vecs * CMatrix::from_diagonal(&phases) * vecs.adjoint())
}
