//! Parameter-shift gradients and plain gradient descent on the LHST cost.
//!
//! Every parameter of `V` is differentiated occurrence by occurrence: the
//! occurrence's executed angle is shifted by `±π/2` with the rest untouched,
//! and `∂C/∂p = Σ_o s_o·[C(+π/2) − C(−π/2)]/2` where `s_o` is the sign with
//! which `p` enters occurrence `o`. Each `θ_k` occurs twice (in `W†` and `W`)
//! and each `γ_l` once, so one gradient takes 78 cost evaluations, 156
//! circuits.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_d, build_v, param_names, SpectralAnsatz, N_PARAMS};
use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::lhst::{cost_analytic, cost_sampled_stream, CostEstimate};
use crate::linalg::eigenvalues_by_phase;
use crate::metrics::{eigenvalue_error, frobenius_phase_distance, gradient_angle};
use crate::model::{trotter_step_circuit, IsingParams};
use crate::noise::{noisy_cost_stream, NoiseModel};
use crate::simcore::{rng_stream, C64};

/// Circuits measured per cost evaluation.
pub const CIRCUITS_PER_COST: u64 = 2;

/// Cost evaluations per gradient: two shifts per occurrence.
pub const EVALS_PER_GRADIENT: usize = 78;

/// Stream keys reserved per training step.
const STREAMS_PER_STEP: u64 = 1000;

/// Stream offset for random initial angles, clear of the training keys.
const INIT_STREAM: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningSchedule {
    pub eta0: f64,
    pub kappa: f64,
    pub delta: f64,
    pub n_steps: usize,
}

impl Default for LearningSchedule {
    fn default() -> Self {
        LearningSchedule {
            eta0: 1.1,
            kappa: 0.5,
            delta: 12.0,
            n_steps: 16,
        }
    }
}

impl LearningSchedule {
    /// `η(j) = η₀ / (1 + j/δ)^κ`
    pub fn eta(&self, j: usize) -> f64 {
        self.eta0 / (1.0 + j as f64 / self.delta).powf(self.kappa)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 >= 0.0 && self.eta0.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "eta0 must be >= 0, got {}",
                self.eta0
            )));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// `(∂C/∂θ₁ … ∂C/∂θ₁₈, ∂C/∂γ₁ … ∂C/∂γ₃)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientVector(pub [f64; N_PARAMS]);

impl GradientVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// How each cost value is obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Estimator {
    Analytic,
    Sampled { shots: u64 },
    Noisy { shots: u64, model: NoiseModel },
}

impl Estimator {
    pub fn shots(&self) -> u64 {
        match self {
            Estimator::Analytic => 0,
            Estimator::Sampled { shots } | Estimator::Noisy { shots, .. } => *shots,
        }
    }
}

/// Evaluates `C(U, V)` for a fixed target and counts the circuits measured.
pub struct CostEvaluator<'a> {
    target: ParamCircuit,
    estimator: &'a Estimator,
    seed: u64,
    circuits: AtomicU64,
}

impl<'a> CostEvaluator<'a> {
    pub fn new(target: &ParamCircuit, estimator: &'a Estimator, seed: u64) -> Result<Self> {
        Ok(CostEvaluator {
            target: target.frozen()?,
            estimator,
            seed,
            circuits: AtomicU64::new(0),
        })
    }

    pub fn target(&self) -> &ParamCircuit {
        &self.target
    }

    /// Circuits measured so far.
    pub fn circuits(&self) -> u64 {
        self.circuits.load(Ordering::Relaxed)
    }

    pub fn reset_counter(&self) {
        self.circuits.store(0, Ordering::Relaxed);
    }

    /// One cost value. `stream` selects the random stream for shot-based
    /// estimators and is ignored by the analytic one.
    pub fn cost(&self, v: &ParamCircuit, stream: u64) -> Result<CostEstimate> {
        self.circuits
            .fetch_add(CIRCUITS_PER_COST, Ordering::Relaxed);
        let u = &self.target;
        match self.estimator {
            Estimator::Analytic => cost_analytic(u, v),
            Estimator::Sampled { shots } => cost_sampled_stream(u, v, *shots, self.seed, stream),
            Estimator::Noisy { shots, model } => {
                noisy_cost_stream(u, v, model, *shots, self.seed, stream)
            }
        }
    }

    /// Parameter-shift gradient at `a`. Cost evaluation `e` of the gradient
    /// uses stream `stream_base + e`.
    pub fn gradient(&self, a: &SpectralAnsatz, stream_base: u64) -> Result<GradientVector> {
        let v = build_v(a)?;
        let mut jobs = Vec::with_capacity(EVALS_PER_GRADIENT);
        for (p, name) in param_names().iter().enumerate() {
            for occ in v.occurrences(name) {
                for delta in [FRAC_PI_2, -FRAC_PI_2] {
                    jobs.push((p, occ.id, occ.sign, delta));
                }
            }
        }
        debug_assert_eq!(jobs.len(), EVALS_PER_GRADIENT);
        let values = jobs
            .par_iter()
            .enumerate()
            .map(|(e, &(_, id, _, delta))| {
                let shifted = v.shift_occurrence(id, delta)?;
                Ok(self.cost(&shifted, stream_base + e as u64)?.value)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut g = [0.0; N_PARAMS];
        for (&(p, _, sign, delta), c) in jobs.iter().zip(values) {
            g[p] += sign * delta.signum() * c / 2.0;
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidValue("non-finite gradient".into()));
        }
        Ok(GradientVector(g))
    }
}

/// Noise-free parameter-shift gradient of `C(U, V(a))`.
pub fn gradient(u: &ParamCircuit, a: &SpectralAnsatz) -> Result<GradientVector> {
    CostEvaluator::new(u, &Estimator::Analytic, 0)?.gradient(a, 0)
}

/// Settings for the initial fit to the exchange-free evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitOptions {
    pub restarts: usize,
    pub steps: usize,
    pub threshold: f64,
    pub eta: f64,
    /// Random offsets are drawn uniformly from `[−scale, scale]`.
    pub scale: f64,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions {
            restarts: 10,
            steps: 500,
            threshold: 1e-3,
            eta: 1.0,
            scale: 0.1,
        }
    }
}

/// Angles whose `W` maps the computational basis onto the `±X` product
/// basis: `RY(π/2)` on both qubits in the first layer, everything else zero.
/// The exchange-free step is diagonal in that basis.
pub fn x_basis_angles() -> [f64; N_PARAMS] {
    let mut p = [0.0; N_PARAMS];
    for q in 0..2 {
        p[3 * q + 1] = FRAC_PI_2;
    }
    p
}

/// Fits the ansatz to the Trotter step with `J = 0`. Each attempt starts from
/// [`x_basis_angles`] plus small random angles and runs analytic gradient
/// descent until the cost is a tenth of the threshold.
pub fn init_params(p: &IsingParams, seed: u64) -> Result<SpectralAnsatz> {
    init_params_with(p, seed, &InitOptions::default())
}

pub fn init_params_with(p: &IsingParams, seed: u64, opts: &InitOptions) -> Result<SpectralAnsatz> {
    use rand::Rng;
    let target = trotter_step_circuit(&p.without_exchange())?;
    let eval = CostEvaluator::new(&target, &Estimator::Analytic, seed)?;
    let mut best: Option<(f64, SpectralAnsatz)> = None;
    for restart in 0..opts.restarts {
        let mut rng = rng_stream(seed, INIT_STREAM + restart as u64);
        let start: Vec<f64> = x_basis_angles()
            .iter()
            .map(|x| x + rng.random_range(-opts.scale..=opts.scale))
            .collect();
        let mut a = SpectralAnsatz::from_slice(&start)?;
        let mut cost = eval.cost(&build_v(&a)?, 0)?.value;
        for _ in 0..opts.steps {
            if cost <= opts.threshold / 10.0 {
                break;
            }
            let g = eval.gradient(&a, 0)?;
            a = step(&a, &g, opts.eta)?;
            cost = eval.cost(&build_v(&a)?, 0)?.value;
        }
        if cost <= opts.threshold {
            return Ok(a);
        }
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, a));
        }
    }
    Err(Error::InitNotConverged {
        best: best.map_or(f64::INFINITY, |(c, _)| c),
        threshold: opts.threshold,
    })
}

/// `a − η·g`
pub fn step(a: &SpectralAnsatz, g: &GradientVector, eta: f64) -> Result<SpectralAnsatz> {
    let next: Vec<f64> = a
        .to_vec()
        .iter()
        .zip(g.0)
        .map(|(x, d)| x - eta * d)
        .collect();
    SpectralAnsatz::from_slice(&next)
}

/// One recorded training step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub j: usize,
    pub eta: f64,
    pub raw_cost: f64,
    pub ideal_cost: f64,
    pub params: Vec<f64>,
    pub gradient: Vec<f64>,
    /// `min_φ ‖U − e^{iφ}V‖_F`
    pub frob_uv: f64,
    /// Permutation- and phase-minimized distance between the spectrum of `U`
    /// and the diagonal of `D`.
    pub eig_err: f64,
    /// Angle between the estimated and the noise-free gradient; absent when
    /// either vanishes.
    pub grad_angle_deg: Option<f64>,
    /// Circuits measured for this row's gradient.
    pub circuits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub schedule: LearningSchedule,
    pub shots: u64,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
}

impl TrainingTrace {
    pub fn final_ansatz(&self) -> Result<SpectralAnsatz> {
        let last = self
            .rows
            .last()
            .ok_or_else(|| Error::InvalidValue("empty trace".into()))?;
        SpectralAnsatz::from_slice(&last.params)
    }

    pub fn csv_header() -> String {
        let mut cols = vec![
            "j".to_string(),
            "eta".into(),
            "raw_cost".into(),
            "ideal_cost".into(),
        ];
        let names = param_names();
        cols.extend(names.iter().cloned());
        cols.extend(names.iter().map(|n| format!("grad_{n}")));
        cols.extend(["frob_uv", "eig_err", "grad_angle_deg"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header();
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{}", r.j, r.eta, r.raw_cost, r.ideal_cost);
            for x in r.params.iter().chain(&r.gradient) {
                let _ = write!(out, ",{x}");
            }
            let _ = write!(out, ",{},{},", r.frob_uv, r.eig_err);
            if let Some(a) = r.grad_angle_deg {
                let _ = write!(out, "{a}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Diagonal of `D(γ)`.
pub fn learned_diagonal(a: &SpectralAnsatz) -> Result<Vec<C64>> {
    let d = build_d(&a.gamma)?.unitary_of()?;
    Ok((0..d.nrows()).map(|i| d[(i, i)]).collect())
}

/// Gradient descent from `a0` for `schedule.n_steps` updates. Rows are
/// recorded for `j = 0..=n_steps`; the update after row `j` uses `η(j)`.
/// The ideal cost and the reference gradient are noise-free side channels
/// and never feed the update.
pub fn train(
    u: &ParamCircuit,
    a0: &SpectralAnsatz,
    schedule: &LearningSchedule,
    estimator: &Estimator,
    seed: u64,
) -> Result<TrainingTrace> {
    schedule.validate()?;
    let eval = CostEvaluator::new(u, estimator, seed)?;
    let exact = CostEvaluator::new(u, &Estimator::Analytic, seed)?;
    let u_mat = eval.target().unitary_of()?;
    let exact_spectrum = eigenvalues_by_phase(&u_mat);
    let mut a = a0.clone();
    let mut rows = Vec::with_capacity(schedule.n_steps + 1);
    for j in 0..=schedule.n_steps {
        let base = j as u64 * STREAMS_PER_STEP;
        let v = build_v(&a)?;
        eval.reset_counter();
        let g = eval.gradient(&a, base)?;
        let circuits = eval.circuits();
        let raw = eval.cost(&v, base + EVALS_PER_GRADIENT as u64)?.value;
        let ideal = exact.cost(&v, 0)?.value;
        let g_exact = match estimator {
            Estimator::Analytic => g,
            _ => exact.gradient(&a, 0)?,
        };
        let grad_angle_deg = match gradient_angle(g.as_slice(), g_exact.as_slice()) {
            Ok(x) => Some(x),
            Err(Error::ZeroVector) => None,
            Err(e) => return Err(e),
        };
        let (frob_uv, _) = frobenius_phase_distance(&u_mat, &v.unitary_of()?)?;
        let eig_err = eigenvalue_error(&exact_spectrum, &learned_diagonal(&a)?)?.distance;
        let eta = schedule.eta(j);
        rows.push(TraceRow {
            j,
            eta,
            raw_cost: raw,
            ideal_cost: ideal,
            params: a.to_vec(),
            gradient: g.0.to_vec(),
            frob_uv,
            eig_err,
            grad_angle_deg,
            circuits,
        });
        if j < schedule.n_steps {
            a = step(&a, &g, eta)?;
        }
    }
    Ok(TrainingTrace {
        schedule: *schedule,
        shots: estimator.shots(),
        seed,
        rows,
    })
}
