//! Distances between unitaries and spectra, gradient agreement, and state
//! fidelity. All comparisons of unitaries are taken modulo a global phase.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::simcore::{StateVector, C64, NORM_TOL};

/// Tolerance on `|λ| = 1` for spectrum inputs.
pub const UNIT_MODULUS_TOL: f64 = 1e-6;

const TIE_TOL: f64 = 1e-12;

/// `min_φ ‖U − e^{iφ}V‖_F` and the minimizing `φ`.
///
/// The optimal phase is `φ = −arg Tr(U†V)`; the distance is then evaluated
/// directly rather than through `‖U‖² + ‖V‖² − 2|Tr(U†V)|`, which cancels
/// badly near zero.
pub fn frobenius_phase_distance(u: &CMatrix, v: &CMatrix) -> Result<(f64, f64)> {
    if u.shape() != v.shape() {
        return Err(Error::Dimension(format!(
            "cannot compare {:?} with {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let overlap: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    let phi = -overlap.arg();
    let z = C64::from_polar(1.0, phi);
    let d2: f64 = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| (a - z * b).norm_sqr())
        .sum();
    Ok((d2.sqrt(), phi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub exact_eigenvalues: Vec<C64>,
    pub learned_eigenvalues: Vec<C64>,
    pub best_phase: f64,
    /// Exact eigenvalue `i` is matched with learned eigenvalue
    /// `best_permutation[i]`.
    pub best_permutation: Vec<usize>,
    pub distance: f64,
}

impl SpectrumComparison {
    /// `Σ_i |λ_i^exact − e^{iφ} λ_{χ(i)}|²` evaluated term by term.
    pub fn sum_of_squares(&self) -> f64 {
        let phase = C64::from_polar(1.0, self.best_phase);
        self.exact_eigenvalues
            .iter()
            .zip(&self.best_permutation)
            .map(|(e, &j)| (e - phase * self.learned_eigenvalues[j]).norm_sqr())
            .sum()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    // Heap's algorithm
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut out = vec![p.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `min_{φ,χ} ‖D_exact − e^{iφ} χ D_learned χ†‖_F` over every relabeling χ
/// of the learned eigenvalues, with the closed-form phase for each.
pub fn eigenvalue_error(exact: &[C64], learned: &[C64]) -> Result<SpectrumComparison> {
    if exact.len() != learned.len() || exact.is_empty() || exact.len() > 8 {
        return Err(Error::Dimension(format!(
            "spectra of sizes {} and {} cannot be matched",
            exact.len(),
            learned.len()
        )));
    }
    for z in exact.iter().chain(learned) {
        if (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::InvalidValue(format!(
                "eigenvalue {z} is not unit modulus"
            )));
        }
    }
    let norms: f64 = exact.iter().chain(learned).map(|z| z.norm_sqr()).sum();
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    for perm in permutations(exact.len()) {
        let overlap: C64 = exact
            .iter()
            .zip(&perm)
            .map(|(e, &j)| e.conj() * learned[j])
            .sum();
        let d2 = (norms - 2.0 * overlap.norm()).max(0.0);
        let phase = -overlap.arg();
        // ties go to the smallest phase correction
        let better = best.as_ref().is_none_or(|(b, p, _)| {
            d2 < *b - TIE_TOL || (d2 <= *b + TIE_TOL && phase.abs() < p.abs() - TIE_TOL)
        });
        if better {
            best = Some((d2, phase, perm));
        }
    }
    let (d2, best_phase, best_permutation) = best.expect("at least one permutation");
    Ok(SpectrumComparison {
        exact_eigenvalues: exact.to_vec(),
        learned_eigenvalues: learned.to_vec(),
        best_phase,
        best_permutation,
        distance: d2.sqrt(),
    })
}

/// Angle in degrees between two gradient vectors.
pub fn gradient_angle(measured: &[f64], exact: &[f64]) -> Result<f64> {
    if measured.len() != exact.len() {
        return Err(Error::Dimension(format!(
            "gradients of length {} and {}",
            measured.len(),
            exact.len()
        )));
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (norm(measured), norm(exact));
    if a == 0.0 || b == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = measured.iter().zip(exact).map(|(x, y)| x * y).sum();
    Ok((dot / (a * b)).clamp(-1.0, 1.0).acos().to_degrees())
}

/// `|⟨ψ|φ⟩|²` for normalized states.
pub fn state_fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    for s in [psi, phi] {
        let dev = (s.norm_sqr() - 1.0).abs();
        if dev.is_nan() || dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
    }
    Ok(psi.inner(phi)?.norm_sqr().min(1.0))
}
