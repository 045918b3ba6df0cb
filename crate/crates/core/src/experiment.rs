//! Experiment configuration and the end-to-end commands behind `vff`.
//!
//! The config is TOML; every key is optional and defaults to the reference
//! setup (two spins, `J = B = 1`, `Δt = 0.2`, `η₀ = 1.1`, `κ = 0.5`,
//! `δ = 12`, 16 steps, 8000 shots, times `8kΔt` for `k = 0..=12`):
//!
//! ```toml
//! seed = 0
//! shots = 8000
//! analytic = false
//! noise = "data/bogota_calibration.json"
//! output_dir = "out"
//! times = [0.0, 1.6, 3.2]
//! trajectories = 2000
//! dump_circuits = false
//!
//! [ising]
//! n_spins = 2
//! J = 1.0
//! B = 1.0
//! dt = 0.2
//!
//! [schedule]
//! eta0 = 1.1
//! kappa = 0.5
//! delta = 12.0
//! n_steps = 16
//! ```

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{build_v, build_v_fast_forward, SpectralAnsatz};
use crate::circuit::ParamCircuit;
use crate::error::{Error, Result};
use crate::lhst::{build_lhst_circuits, cost_analytic, cost_sampled, CostEstimate};
use crate::linalg::eigenvalues_by_phase;
use crate::metrics::{eigenvalue_error, state_fidelity, SpectrumComparison};
use crate::model::{build_hamiltonian, exact_evolution, trotter_step_circuit, IsingParams};
use crate::noise::{
    noisy_cost, trajectory_fidelities, CalibrationTable, NoiseModel, TrajectoryFidelities,
    EVOLUTION_LAYOUT, LHST_LAYOUT,
};
use crate::simcore::{StateVector, C64};
use crate::trainer::{
    init_params, learned_diagonal, train, Estimator, LearningSchedule, TrainingTrace,
};

/// Time points closer than this to a multiple of `Δt` count as multiples.
const STEP_TOL: f64 = 1e-9;

/// Trajectory streams for the VFF circuit at time index `i` start at
/// `(i + 1) << 32`; the Trotter circuit uses streams from 0.
const VFF_STREAM_SHIFT: u32 = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub shots: u64,
    /// Exact costs and gradients instead of shot estimates.
    pub analytic: bool,
    /// Calibration file; when set, shot estimates carry trajectory noise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Evolution times for the fast-forward comparison; defaults to
    /// `8kΔt` for `k = 0..=12`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Noise trajectories per time point.
    pub trajectories: usize,
    pub dump_circuits: bool,
    pub ising: IsingParams,
    pub schedule: LearningSchedule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            shots: 8000,
            analytic: false,
            noise: None,
            output_dir: PathBuf::from("out"),
            times: None,
            trajectories: 2000,
            dump_circuits: false,
            ising: IsingParams::default(),
            schedule: LearningSchedule::default(),
        }
    }
}

fn line_of(offset: usize, doc: &str) -> usize {
    doc[..offset.min(doc.len())].matches('\n').count() + 1
}

/// Line of the first `key = …` assignment in `doc`, if any.
fn key_line(doc: &str, key: &str) -> Option<usize> {
    doc.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

impl ExperimentConfig {
    /// Parses and validates a TOML document. Errors carry the offending line.
    pub fn from_toml(doc: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(doc).map_err(|e| {
            let msg = e.message().trim().to_string();
            match e.span() {
                Some(span) => Error::Config(format!("line {}: {msg}", line_of(span.start, doc))),
                None => Error::Config(msg),
            }
        })?;
        cfg.validate_in(Some(doc))?;
        Ok(cfg.resolved())
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let doc = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&doc)
    }

    /// Same config with the default time grid written out.
    pub fn resolved(mut self) -> Self {
        if self.times.is_none() {
            self.times = Some(self.time_grid());
        }
        self
    }

    pub fn time_grid(&self) -> Vec<f64> {
        self.times.clone().unwrap_or_else(|| {
            (0..=12)
                .map(|k| ((8 * k) as f64 * self.ising.dt * 1e9).round() / 1e9)
                .collect()
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_in(None)
    }

    fn validate_in(&self, doc: Option<&str>) -> Result<()> {
        let fail = |key: &str, msg: String| {
            let line = doc.and_then(|d| key_line(d, key));
            Error::Config(match line {
                Some(l) => format!("line {l}: {msg}"),
                None => msg,
            })
        };
        let p = &self.ising;
        if p.n_spins != 2 {
            return Err(fail(
                "n_spins",
                format!("n_spins must be 2, got {}", p.n_spins),
            ));
        }
        if let Err(e) = p.validate() {
            let key = if !(p.dt > 0.0 && p.dt.is_finite()) {
                "dt"
            } else {
                "J"
            };
            return Err(fail(key, e.to_string()));
        }
        let s = &self.schedule;
        for (key, ok) in [
            ("eta0", s.eta0 >= 0.0 && s.eta0.is_finite()),
            ("kappa", s.kappa >= 0.0 && s.kappa.is_finite()),
            ("delta", s.delta > 0.0 && s.delta.is_finite()),
        ] {
            if !ok {
                return Err(fail(key, format!("{key} is out of range")));
            }
        }
        if self.shots == 0 && !self.analytic {
            return Err(fail("shots", "shots must be at least 1".into()));
        }
        if self.trajectories == 0 {
            return Err(fail(
                "trajectories",
                "trajectories must be at least 1".into(),
            ));
        }
        if let Some(times) = &self.times {
            if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                return Err(fail(
                    "times",
                    format!("times must be finite and >= 0, got {t}"),
                ));
            }
        }
        Ok(())
    }

    /// Effective config as TOML; feeding it back reproduces the run.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.clone().resolved()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load_noise(&self) -> Result<Option<CalibrationTable>> {
        self.noise
            .as_ref()
            .map(CalibrationTable::from_path)
            .transpose()
    }

    /// The estimator used for training under this config.
    pub fn estimator(&self) -> Result<Estimator> {
        if self.analytic {
            return Ok(Estimator::Analytic);
        }
        Ok(match self.load_noise()? {
            Some(table) => Estimator::Noisy {
                shots: self.shots,
                model: NoiseModel::from_calibration(&table, &LHST_LAYOUT)?,
            },
            None => Estimator::Sampled { shots: self.shots },
        })
    }

    fn ensure_output_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.output_dir)?;
        Ok(&self.output_dir)
    }
}

/// Process exit status for an error: 2 for configuration and input problems,
/// 3 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Calibration(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 3,
    }
}

pub struct TrainOutput {
    pub trace: TrainingTrace,
    pub ansatz: SpectralAnsatz,
    pub files: Vec<PathBuf>,
}

/// Fits the ansatz to one Trotter step and writes `trace.csv`, `trace.json`,
/// `ansatz.json` and, when asked, `circuits.txt`.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<TrainOutput> {
    cfg.validate()?;
    let estimator = cfg.estimator()?;
    let u = trotter_step_circuit(&cfg.ising)?;
    let a0 = init_params(&cfg.ising, cfg.seed)?;
    let trace = train(&u, &a0, &cfg.schedule, &estimator, cfg.seed)?;
    let ansatz = trace.final_ansatz()?;

    let dir = cfg.ensure_output_dir()?;
    let mut files = Vec::new();
    let mut write = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        files.push(path);
        Ok(())
    };
    write("trace.csv", trace.to_csv())?;
    write("trace.json", trace.to_json()?)?;
    write("ansatz.json", ansatz.to_json()?)?;
    if cfg.dump_circuits {
        write("circuits.txt", circuit_dump(&u, &ansatz)?)?;
    }
    Ok(TrainOutput {
        trace,
        ansatz,
        files,
    })
}

fn circuit_dump(u: &ParamCircuit, a: &SpectralAnsatz) -> Result<String> {
    let v = build_v(a)?;
    let [c1, c2] = build_lhst_circuits(u, &v)?;
    let mut out = String::new();
    for (title, c) in [
        ("target U (one Trotter step)", u),
        ("trained V = W D W†", &v),
        ("LHST circuit, pair 1", &c1),
        ("LHST circuit, pair 2", &c2),
    ] {
        let _ = writeln!(out, "## {title}\n{c}");
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityRow {
    pub t: f64,
    pub vff_ideal: f64,
    /// Absent when `t` is not a whole number of Trotter steps.
    pub trotter_ideal: Option<f64>,
    pub vff_noisy: Option<f64>,
    pub trotter_noisy: Option<f64>,
}

pub struct FastForwardOutput {
    pub rows: Vec<FidelityRow>,
    /// Per-trajectory Trotter fidelities at the time points that are whole
    /// step counts, in time order.
    pub trotter_trajectories: Option<TrajectoryFidelities>,
    pub csv: String,
}

/// Number of Trotter steps for time `t`, if `t` is a multiple of `dt`.
pub fn trotter_steps(t: f64, dt: f64) -> Option<usize> {
    let k = (t / dt).round();
    ((t / dt - k).abs() < STEP_TOL && k >= 0.0).then_some(k as usize)
}

/// Fidelity of fast-forwarded and Trotterized evolution of `|+⟩⊗|+⟩` with
/// the exact evolution, at every configured time.
pub fn fast_forward(
    cfg: &ExperimentConfig,
    ansatz: &SpectralAnsatz,
    noise: Option<&NoiseModel>,
) -> Result<FastForwardOutput> {
    cfg.validate()?;
    let p = &cfg.ising;
    let h = build_hamiltonian(p)?;
    let plus = StateVector::plus(2)?;
    let times = cfg.time_grid();
    let step = trotter_step_circuit(p)?;

    let mut exact_states = Vec::with_capacity(times.len());
    for &t in &times {
        let e = exact_evolution(&h, t)?;
        let psi = &e * nalgebra::DVector::from_column_slice(plus.amplitudes());
        exact_states.push(StateVector::from_amplitudes(psi.iter().copied().collect())?);
    }

    let steps: Vec<Option<usize>> = times.iter().map(|&t| trotter_steps(t, p.dt)).collect();
    let k_max = steps.iter().flatten().copied().max().unwrap_or(0);
    let mut trotter = ParamCircuit::new(2)?;
    for _ in 0..k_max {
        trotter.append(&step, 0)?;
    }
    let gates = trotter.resolved()?;

    let mut rows = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let vff = build_v_fast_forward(ansatz, t, p.dt)?.run(&plus)?;
        let trotter_ideal = match steps[i] {
            Some(k) => {
                let mut s = plus.clone();
                for g in &gates[..k * step.len()] {
                    s.apply(g)?;
                }
                Some(state_fidelity(&exact_states[i], &s)?)
            }
            None => None,
        };
        rows.push(FidelityRow {
            t,
            vff_ideal: state_fidelity(&exact_states[i], &vff)?,
            trotter_ideal,
            vff_noisy: None,
            trotter_noisy: None,
        });
    }

    let mut trotter_trajectories = None;
    if let Some(model) = noise {
        for (i, &t) in times.iter().enumerate() {
            let vff = build_v_fast_forward(ansatz, t, p.dt)?;
            let f = trajectory_fidelities(
                &vff,
                &plus,
                model,
                &[vff.len()],
                &exact_states[i..=i],
                cfg.trajectories,
                cfg.seed,
                ((i as u64) + 1) << VFF_STREAM_SHIFT,
            )?;
            rows[i].vff_noisy = Some(f.mean(0));
        }
        let whole: Vec<usize> = (0..times.len()).filter(|&i| steps[i].is_some()).collect();
        let mut order = whole.clone();
        order.sort_by_key(|&i| steps[i]);
        let checkpoints: Vec<usize> = order
            .iter()
            .map(|&i| steps[i].unwrap() * step.len())
            .collect();
        let targets: Vec<StateVector> = order.iter().map(|&i| exact_states[i].clone()).collect();
        let f = trajectory_fidelities(
            &trotter,
            &plus,
            model,
            &checkpoints,
            &targets,
            cfg.trajectories,
            cfg.seed,
            0,
        )?;
        for (c, &i) in order.iter().enumerate() {
            rows[i].trotter_noisy = Some(f.mean(c));
        }
        trotter_trajectories = Some(f);
    }

    let csv = fidelity_csv(&rows, noise.is_some());
    Ok(FastForwardOutput {
        rows,
        trotter_trajectories,
        csv,
    })
}

pub fn fidelity_csv(rows: &[FidelityRow], noisy: bool) -> String {
    let cell = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    let mut out = String::from("t,fidelity_vff_ideal,fidelity_trotter_ideal");
    if noisy {
        out.push_str(",fidelity_vff_noisy,fidelity_trotter_noisy");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{},{}", r.t, r.vff_ideal, cell(r.trotter_ideal));
        if noisy {
            let _ = write!(out, ",{},{}", cell(r.vff_noisy), cell(r.trotter_noisy));
        }
        out.push('\n');
    }
    out
}

pub fn load_ansatz(path: impl AsRef<Path>) -> Result<SpectralAnsatz> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    SpectralAnsatz::from_json(&text)
}

/// Runs [`fast_forward`] with the configured noise and writes `fidelity.csv`.
pub fn cmd_fast_forward(cfg: &ExperimentConfig, ansatz_path: &Path) -> Result<FastForwardOutput> {
    let ansatz = load_ansatz(ansatz_path)?;
    let model = cfg
        .load_noise()?
        .map(|t| NoiseModel::from_calibration(&t, &EVOLUTION_LAYOUT))
        .transpose()?;
    let out = fast_forward(cfg, &ansatz, model.as_ref())?;
    let dir = cfg.ensure_output_dir()?;
    fs::write(dir.join("fidelity.csv"), &out.csv)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub comparison: SpectrumComparison,
    /// `Σ_i |λ_i^exact − e^{iφ} λ_{χ(i)}|²`, evaluated term by term.
    pub sum_of_squares: f64,
}

pub fn spectrum_report(target: &ParamCircuit, ansatz: &SpectralAnsatz) -> Result<SpectrumReport> {
    let exact = eigenvalues_by_phase(&target.unitary_of()?);
    let comparison = eigenvalue_error(&exact, &learned_diagonal(ansatz)?)?;
    Ok(SpectrumReport {
        sum_of_squares: comparison.sum_of_squares(),
        comparison,
    })
}

fn fmt_c(z: &C64) -> String {
    format!("{:+.6}{:+.6}i (phase {:+.6})", z.re, z.im, z.arg())
}

impl fmt::Display for SpectrumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.comparison;
        writeln!(f, "exact eigenvalues of U:")?;
        for z in &c.exact_eigenvalues {
            writeln!(f, "  {}", fmt_c(z))?;
        }
        writeln!(f, "learned diagonal of D:")?;
        for z in &c.learned_eigenvalues {
            writeln!(f, "  {}", fmt_c(z))?;
        }
        writeln!(f, "best phase: {:.9}", c.best_phase)?;
        writeln!(f, "best permutation: {:?}", c.best_permutation)?;
        writeln!(f, "eigenvalue error: {:.9}", c.distance)?;
        writeln!(
            f,
            "sum of squared eigenvalue errors: {:.9}",
            self.sum_of_squares
        )
    }
}

pub fn cmd_spectrum(cfg: &ExperimentConfig, ansatz_path: &Path) -> Result<SpectrumReport> {
    cfg.validate()?;
    let ansatz = load_ansatz(ansatz_path)?;
    spectrum_report(&trotter_step_circuit(&cfg.ising)?, &ansatz)
}

pub fn load_circuit(path: &Path) -> Result<ParamCircuit> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    text.parse()
}

/// LHST cost between two circuit files, using the configured estimator.
pub fn cmd_cost(cfg: &ExperimentConfig, u_path: &Path, v_path: &Path) -> Result<CostEstimate> {
    cfg.validate()?;
    let (u, v) = (load_circuit(u_path)?, load_circuit(v_path)?);
    if cfg.analytic {
        return cost_analytic(&u, &v);
    }
    match cfg.load_noise()? {
        Some(t) => noisy_cost(
            &u,
            &v,
            &NoiseModel::from_calibration(&t, &LHST_LAYOUT)?,
            cfg.shots,
            cfg.seed,
        ),
        None => cost_sampled(&u, &v, cfg.shots, cfg.seed),
    }
}
