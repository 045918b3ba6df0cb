//! Spectral ansatz `V(θ, γ) = W(θ) D(γ) W(θ)†` on two qubits.
//!
//! `D(γ)` is `RZZ(γ₁)` on (0,1), then `P(γ₂)` on qubit 0 and `P(γ₃)` on
//! qubit 1. `W(θ)` has three layers; each layer applies RX, RY, P to qubit 0
//! and then RX, RY, P to qubit 1, and a `CNOT(0→1)` separates consecutive
//! layers. `θ_{6ℓ+3q+g}` (0-based) drives gate `g` of qubit `q` in layer `ℓ`.

use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::simcore::GateKind;

pub const N_THETA: usize = 18;
pub const N_GAMMA: usize = 3;
pub const N_PARAMS: usize = N_THETA + N_GAMMA;

const LAYER_GATES: [GateKind; 3] = [GateKind::RX, GateKind::RY, GateKind::P];

pub fn theta_name(k: usize) -> String {
    format!("theta_{}", k + 1)
}

pub fn gamma_name(l: usize) -> String {
    format!("gamma_{}", l + 1)
}

/// Names of all 21 parameters, θ first.
pub fn param_names() -> Vec<String> {
    (0..N_THETA)
        .map(theta_name)
        .chain((0..N_GAMMA).map(gamma_name))
        .collect()
}

/// Position of `θ_k` (0-based) in `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaSlot {
    pub layer: usize,
    pub qubit: usize,
    pub kind: GateKind,
}

pub fn theta_slot(k: usize) -> ThetaSlot {
    assert!(k < N_THETA);
    ThetaSlot {
        layer: k / 6,
        qubit: (k % 6) / 3,
        kind: LAYER_GATES[k % 3],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAnsatz", into = "RawAnsatz")]
pub struct SpectralAnsatz {
    pub theta: [f64; N_THETA],
    pub gamma: [f64; N_GAMMA],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnsatz {
    theta: Vec<f64>,
    gamma: Vec<f64>,
}

impl TryFrom<RawAnsatz> for SpectralAnsatz {
    type Error = Error;

    fn try_from(raw: RawAnsatz) -> Result<Self> {
        let theta: [f64; N_THETA] = raw.theta.try_into().map_err(|v: Vec<f64>| {
            Error::InvalidValue(format!("expected {N_THETA} theta values, got {}", v.len()))
        })?;
        let gamma: [f64; N_GAMMA] = raw.gamma.try_into().map_err(|v: Vec<f64>| {
            Error::InvalidValue(format!("expected {N_GAMMA} gamma values, got {}", v.len()))
        })?;
        SpectralAnsatz::new(theta, gamma)
    }
}

impl From<SpectralAnsatz> for RawAnsatz {
    fn from(a: SpectralAnsatz) -> Self {
        RawAnsatz {
            theta: a.theta.to_vec(),
            gamma: a.gamma.to_vec(),
        }
    }
}

impl Default for SpectralAnsatz {
    fn default() -> Self {
        SpectralAnsatz {
            theta: [0.0; N_THETA],
            gamma: [0.0; N_GAMMA],
        }
    }
}

impl SpectralAnsatz {
    pub fn new(theta: [f64; N_THETA], gamma: [f64; N_GAMMA]) -> Result<Self> {
        if theta.iter().chain(&gamma).any(|x| !x.is_finite()) {
            return Err(Error::InvalidValue("ansatz angles must be finite".into()));
        }
        Ok(SpectralAnsatz { theta, gamma })
    }

    /// From a flat `[θ₁..θ₁₈, γ₁..γ₃]` slice.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.len() != N_PARAMS {
            return Err(Error::InvalidValue(format!(
                "expected {N_PARAMS} parameters, got {}",
                values.len()
            )));
        }
        let mut theta = [0.0; N_THETA];
        let mut gamma = [0.0; N_GAMMA];
        theta.copy_from_slice(&values[..N_THETA]);
        gamma.copy_from_slice(&values[N_THETA..]);
        Self::new(theta, gamma)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.theta.iter().chain(&self.gamma).copied().collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn build_d(gamma: &[f64; N_GAMMA]) -> Result<ParamCircuit> {
    let mut c = ParamCircuit::new(2)?;
    for (l, g) in gamma.iter().enumerate() {
        c.declare(&gamma_name(l), *g)?;
    }
    c.add_param(GateKind::RZZ, &[0, 1], &gamma_name(0), 1.0)?;
    c.add_param(GateKind::P, &[0], &gamma_name(1), 1.0)?;
    c.add_param(GateKind::P, &[1], &gamma_name(2), 1.0)?;
    Ok(c)
}

pub fn build_w(theta: &[f64; N_THETA]) -> Result<ParamCircuit> {
    let mut c = ParamCircuit::new(2)?;
    for (k, t) in theta.iter().enumerate() {
        c.declare(&theta_name(k), *t)?;
    }
    for layer in 0..3 {
        if layer > 0 {
            c.add_fixed(GateKind::CNOT, &[0, 1])?;
        }
        for k in 6 * layer..6 * layer + 6 {
            let slot = theta_slot(k);
            c.add_param(slot.kind, &[slot.qubit], &theta_name(k), 1.0)?;
        }
    }
    Ok(c)
}

/// `V = W D W†`, emitted in execution order `W†`, `D`, `W`. Each `θ_k` occurs
/// once in `W†` (sign −1) and once in `W`.
pub fn build_v(a: &SpectralAnsatz) -> Result<ParamCircuit> {
    build_v_scaled(a, 1.0)
}

/// `W D(γ·t/dt) W†`; depth does not depend on `t`, and `t/dt` may be any real.
pub fn build_v_fast_forward(a: &SpectralAnsatz, t: f64, dt: f64) -> Result<ParamCircuit> {
    if dt == 0.0 || !dt.is_finite() || !t.is_finite() {
        return Err(Error::InvalidValue(format!(
            "fast-forward needs finite t and non-zero dt, got t={t}, dt={dt}"
        )));
    }
    build_v_scaled(a, t / dt)
}

fn build_v_scaled(a: &SpectralAnsatz, k: f64) -> Result<ParamCircuit> {
    let w = build_w(&a.theta)?;
    let d = build_d(&a.gamma.map(|g| g * k))?;
    let mut v = ParamCircuit::new(2)?;
    v.append(&w.adjoint(), 0)?;
    v.append(&d, 0)?;
    v.append(&w, 0)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues_by_phase, frobenius_dist, identity, unitarity_error};
    use crate::simcore::{rng_stream, C64};
    use rand::Rng;

    fn random_ansatz(seed: u64) -> SpectralAnsatz {
        let mut rng = rng_stream(seed, 0);
        let theta = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let gamma = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        SpectralAnsatz::new(theta, gamma).unwrap()
    }

    #[test]
    fn zero_angles_identity() {
        let a = SpectralAnsatz::default();
        for c in [
            build_d(&a.gamma).unwrap(),
            build_w(&a.theta).unwrap(),
            build_v(&a).unwrap(),
        ] {
            assert!(frobenius_dist(&c.unitary_of().unwrap(), &identity(4)) < 1e-14);
        }
    }

    #[test]
    fn d_is_diagonal() {
        for seed in 0..100 {
            let a = random_ansatz(seed);
            let m = build_d(&a.gamma).unwrap().unitary_of().unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    if r != c {
                        assert!(m[(r, c)].norm() <= 1e-12);
                    }
                }
            }
        }
        let theta = 0.83;
        let m = build_d(&[theta, 0.0, 0.0]).unwrap().unitary_of().unwrap();
        let want = [theta / 2.0, -theta / 2.0, -theta / 2.0, theta / 2.0];
        for (i, ph) in want.iter().enumerate() {
            assert!((m[(i, i)] - C64::from_polar(1.0, *ph)).norm() < 1e-14);
        }
    }

    #[test]
    fn w_structure() {
        let a = random_ansatz(3);
        let w = build_w(&a.theta).unwrap();
        assert_eq!(w.count(GateKind::CNOT), 2);
        assert_eq!(
            w.gates()
                .iter()
                .filter(|g| g.occurrence().is_some())
                .count(),
            18
        );
        assert!(unitarity_error(&w.unitary_of().unwrap()) <= 1e-10);
        assert_eq!(
            theta_slot(10),
            ThetaSlot {
                layer: 1,
                qubit: 1,
                kind: GateKind::RY
            }
        );
    }

    #[test]
    fn v_matches_matrix_product() {
        for seed in 0..10 {
            let a = random_ansatz(seed);
            let w = build_w(&a.theta).unwrap().unitary_of().unwrap();
            let d = build_d(&a.gamma).unwrap().unitary_of().unwrap();
            let v = build_v(&a).unwrap();
            assert_eq!(v.count(GateKind::CNOT), 4);
            assert_eq!(v.cnot_equivalent_count(), 6);
            let want = &w * &d * w.adjoint();
            assert!(frobenius_dist(&v.unitary_of().unwrap(), &want) < 1e-10);

            let mut ev = eigenvalues_by_phase(&v.unitary_of().unwrap());
            let mut dv: Vec<C64> = d.diagonal().iter().copied().collect();
            dv.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
            ev.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
            for (x, y) in ev.iter().zip(&dv) {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn theta_shared_between_w_and_w_dagger() {
        let v = build_v(&random_ansatz(1)).unwrap();
        let occ = v.occurrences(&theta_name(4));
        assert_eq!(occ.len(), 2);
        assert_eq!(occ[0].sign, -1.0);
        assert_eq!(occ[1].sign, 1.0);
        assert_eq!(v.occurrences(&gamma_name(0)).len(), 1);
    }

    #[test]
    fn fast_forward_powers() {
        let a = random_ansatz(5);
        let dt = 0.2;
        let v = build_v(&a).unwrap().unitary_of().unwrap();
        let same = build_v_fast_forward(&a, dt, dt).unwrap();
        assert_eq!(same, build_v(&a).unwrap());
        let v2 = build_v_fast_forward(&a, 2.0 * dt, dt)
            .unwrap()
            .unitary_of()
            .unwrap();
        assert!(frobenius_dist(&v2, &(&v * &v)) < 1e-9);
        let vinv = build_v_fast_forward(&a, -dt, dt)
            .unwrap()
            .unitary_of()
            .unwrap();
        assert!(frobenius_dist(&vinv, &v.adjoint()) < 1e-9);
        assert!(build_v_fast_forward(&a, 1.0, 0.0).is_err());
        assert_eq!(
            build_v_fast_forward(&a, dt, dt).unwrap().len(),
            build_v_fast_forward(&a, 96.0 * dt, dt).unwrap().len()
        );
    }

    #[test]
    fn json_shape() {
        let a = random_ansatz(9);
        let text = a.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["theta"].as_array().unwrap().len(), 18);
        assert_eq!(v["gamma"].as_array().unwrap().len(), 3);
        assert_eq!(SpectralAnsatz::from_json(&text).unwrap(), a);
        assert!(SpectralAnsatz::from_json(r#"{"theta":[1,2],"gamma":[0,0,0]}"#).is_err());
    }
}
