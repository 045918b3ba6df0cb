//! End-to-end acceptance suite. Each criterion prints one `PASS`/`FAIL` line
//! to stderr (uncaptured) and then asserts.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use spectral_vff::ansatz::{build_v, build_v_fast_forward, param_names, N_PARAMS};
use spectral_vff::experiment::{cmd_fast_forward, cmd_train, fast_forward, ExperimentConfig};
use spectral_vff::lhst::{build_lhst_circuits, cost_analytic};
use spectral_vff::linalg::{eigenvalues_by_phase, frobenius_dist, identity, unitary_power};
use spectral_vff::model::{build_hamiltonian, trotter_step_circuit};
use spectral_vff::noise::{CalibrationTable, NoiseModel, EVOLUTION_LAYOUT};
use spectral_vff::simcore::{rng_stream, GateKind, C64};
use spectral_vff::trainer::{
    gradient, init_params, train, CostEvaluator, Estimator, TrainingTrace,
};
use spectral_vff::{ParamCircuit, SpectralAnsatz};

fn report(n: usize, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "{verdict} criterion {n:>2} ({name}): {detail}"
    );
}

fn calibration_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/bogota_calibration.json")
}

fn random_circuit(seed: u64, n_gates: usize) -> ParamCircuit {
    let mut rng = rng_stream(seed, 7);
    let mut c = ParamCircuit::new(2).unwrap();
    for _ in 0..n_gates {
        let q = rng.random_range(0..2usize);
        let angle = rng.random_range(-PI..PI);
        match rng.random_range(0..6) {
            0 => c.add_literal(GateKind::RX, &[q], angle).unwrap(),
            1 => c.add_literal(GateKind::RY, &[q], angle).unwrap(),
            2 => c.add_literal(GateKind::P, &[q], angle).unwrap(),
            3 => c.add_literal(GateKind::RZZ, &[q, 1 - q], angle).unwrap(),
            4 => c.add_fixed(GateKind::CNOT, &[q, 1 - q]).unwrap(),
            _ => c.add_fixed(GateKind::H, &[q]).unwrap(),
        }
    }
    c
}

/// `c` followed by gates whose product is `e^{i(φ+π)}·I`:
/// `RX(π)·P(φ)·RX(π)·P(φ) = (iX)P(φ)(iX)P(φ) = −e^{iφ}·I`.
fn with_global_phase(c: &ParamCircuit, phi: f64) -> ParamCircuit {
    let mut out = c.clone();
    for _ in 0..2 {
        out.add_literal(GateKind::P, &[0], phi).unwrap();
        out.add_literal(GateKind::RX, &[0], PI).unwrap();
    }
    out
}

fn random_ansatz(seed: u64, theta_scale: f64, gamma_scale: f64) -> SpectralAnsatz {
    let mut rng = rng_stream(seed, 3);
    let v: Vec<f64> = (0..N_PARAMS)
        .map(|i| {
            let s = if i < 18 { theta_scale } else { gamma_scale };
            rng.random_range(-s..s)
        })
        .collect();
    SpectralAnsatz::from_slice(&v).unwrap()
}

#[test]
fn criterion_01_cost_faithfulness() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rng = rng_stream(101, 0);
    for pair in 0..20 {
        let u = random_circuit(1000 + pair, 16);
        for _ in 0..20 {
            let phi = rng.random_range(-PI..PI);
            let v = with_global_phase(&u, phi);
            let expected = u.unitary_of().unwrap() * C64::from_polar(1.0, phi + PI);
            assert!(frobenius_dist(&v.unitary_of().unwrap(), &expected) < 1e-12);
            worst = worst.max(cost_analytic(&u, &v).unwrap().value);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-10 && elapsed < Duration::from_secs(5);
    report(1, "cost faithfulness", ok, &format!(
        "max C(U, e^(i phi) U) over 400 cases = {worst:.3e} (bound 1e-10), {elapsed:.2?} (bound 5 s)"
    ));
    assert!(ok);
}

#[test]
fn criterion_02_gradient_correctness() {
    let start = Instant::now();
    let u = trotter_step_circuit(&Default::default()).unwrap();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for point in 0..20 {
        let a = random_ansatz(200 + point, PI, PI);
        let g = gradient(&u, &a).unwrap();
        let base = a.to_vec();
        for i in 0..N_PARAMS {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[i] += h;
            minus[i] -= h;
            let cp = cost_analytic(
                &u,
                &build_v(&SpectralAnsatz::from_slice(&plus).unwrap()).unwrap(),
            )
            .unwrap();
            let cm = cost_analytic(
                &u,
                &build_v(&SpectralAnsatz::from_slice(&minus).unwrap()).unwrap(),
            )
            .unwrap();
            let fd = (cp.value - cm.value) / (2.0 * h);
            worst = worst.max((fd - g.0[i]).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-5 && elapsed < Duration::from_secs(30);
    report(2, "gradient correctness", ok, &format!(
        "max |shift − central FD| over 20 points = {worst:.3e} (bound 1e-5), {elapsed:.2?} (bound 30 s)"
    ));
    assert!(ok);
}

#[test]
fn criterion_03_circuit_accounting() {
    let u = trotter_step_circuit(&Default::default()).unwrap();
    let a = random_ansatz(300, PI, PI);
    let estimator = Estimator::Sampled { shots: 100 };
    let eval = CostEvaluator::new(&u, &estimator, 0).unwrap();
    eval.gradient(&a, 0).unwrap();
    let counted = eval.circuits();

    let v = build_v(&a).unwrap();
    let mut distinct = HashSet::new();
    for name in param_names() {
        for occ in v.occurrences(&name) {
            for delta in [FRAC_PI_2, -FRAC_PI_2] {
                let shifted = v.shift_occurrence(occ.id, delta).unwrap();
                for c in build_lhst_circuits(&u, &shifted).unwrap() {
                    distinct.insert(c.to_text());
                }
            }
        }
    }
    let ok = counted == 156 && distinct.len() == 156;
    report(
        3,
        "circuit accounting",
        ok,
        &format!(
            "evaluation counter = {counted}, distinct circuits = {} (expected 156)",
            distinct.len()
        ),
    );
    assert!(ok);
}

struct ConvergenceRun {
    traces: Vec<TrainingTrace>,
    elapsed: Duration,
}

fn convergence_run() -> &'static ConvergenceRun {
    static RUN: OnceLock<ConvergenceRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let cfg = ExperimentConfig::default();
        let u = trotter_step_circuit(&cfg.ising).unwrap();
        let traces = (0..10)
            .map(|seed| {
                let a0 = init_params(&cfg.ising, seed).unwrap();
                train(&u, &a0, &cfg.schedule, &Estimator::Analytic, seed).unwrap()
            })
            .collect();
        ConvergenceRun {
            traces,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_04_training_convergence() {
    let run = convergence_run();
    let finals: Vec<f64> = run
        .traces
        .iter()
        .map(|t| t.rows.last().unwrap().ideal_cost)
        .collect();
    let reached = finals.iter().filter(|&&c| c <= 0.05).count();
    let ok = reached >= 8 && run.elapsed < Duration::from_secs(300);
    let listed: Vec<String> = finals.iter().map(|c| format!("{c:.4}")).collect();
    report(4, "training convergence", ok, &format!(
        "{reached}/10 seeds reach ideal cost <= 0.05 after 16 steps (need 8), finals [{}], {:.2?} (bound 5 min)",
        listed.join(", "),
        run.elapsed
    ));
    assert!(ok);
}

#[test]
fn criterion_05_eigenvalue_learning() {
    let run = convergence_run();
    let mut failures = Vec::new();
    let mut worst_final: f64 = 0.0;
    for t in &run.traces {
        let first = t.rows[0].eig_err;
        let last = t.rows.last().unwrap().eig_err;
        worst_final = worst_final.max(last);
        if !(last < first && last <= 0.3) {
            failures.push(format!("seed {}: {first:.4} -> {last:.4}", t.seed));
        }
    }
    let ok = failures.is_empty();
    report(
        5,
        "eigenvalue learning",
        ok,
        &if ok {
            format!("final eig_err < initial on all 10 traces, worst final {worst_final:.4} (bound 0.3)")
        } else {
            format!("violations: {}", failures.join("; "))
        },
    );
    assert!(ok);
}

#[test]
fn criterion_06_spectrum_oracle() {
    let p = Default::default();
    let h = build_hamiltonian(&p).unwrap();
    let spectrum = h.spectrum();
    let expected = [-2.0 * SQRT_2, -2.0, 2.0, 2.0 * SQRT_2];
    let spec_err = spectrum
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let step = trotter_step_circuit(&p).unwrap().unitary_of().unwrap();
    let mut trotter_phases: Vec<f64> = eigenvalues_by_phase(&step)
        .iter()
        .map(|z| z.arg())
        .collect();
    let mut exact_phases: Vec<f64> = expected.iter().map(|l| -l * p.dt).collect();
    trotter_phases.sort_by(f64::total_cmp);
    exact_phases.sort_by(f64::total_cmp);
    let phase_err = trotter_phases
        .iter()
        .zip(&exact_phases)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let ok = spec_err <= 1e-10 && phase_err <= 5e-3;
    report(6, "spectrum oracle", ok, &format!(
        "spectrum error {spec_err:.3e} (bound 1e-10), Trotter eigenphase error {phase_err:.3e} (bound 5e-3)"
    ));
    assert!(ok);
}

#[test]
fn criterion_07_fast_forward_powers() {
    let start = Instant::now();
    let dt = 0.2;
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let a = random_ansatz(700 + seed, PI, 1.0);
        let v = build_v(&a).unwrap().unitary_of().unwrap();
        let v_inv = v.adjoint();
        let int_power = |k: i32| {
            let base = if k < 0 { &v_inv } else { &v };
            (0..k.unsigned_abs()).fold(identity(4), |acc, _| &acc * base)
        };
        for k in [-2.0, 0.5, 1.0, 7.0] {
            let ff = build_v_fast_forward(&a, k * dt, dt)
                .unwrap()
                .unitary_of()
                .unwrap();
            let err = if k.fract() == 0.0 {
                frobenius_dist(&ff, &int_power(k as i32))
            } else {
                frobenius_dist(&(&ff * &ff), &v).max(frobenius_dist(&ff, &unitary_power(&v, k)))
            };
            worst = worst.max(err);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-8 && elapsed < Duration::from_secs(1);
    report(7, "fast-forward powers", ok, &format!(
        "max ||V_ff(k dt) − V^k||_F over k in {{-2, 0.5, 1, 7}} = {worst:.3e} (bound 1e-8), {elapsed:.2?} (bound 1 s)"
    ));
    assert!(ok);
}

#[test]
fn criterion_08_ideal_evolution() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let u = trotter_step_circuit(&cfg.ising).unwrap();
    let a0 = init_params(&cfg.ising, cfg.seed).unwrap();
    let trace = train(&u, &a0, &cfg.schedule, &Estimator::Analytic, cfg.seed).unwrap();
    let ideal_cost = trace.rows.last().unwrap().ideal_cost;
    let out = fast_forward(&cfg, &trace.final_ansatz().unwrap(), None).unwrap();
    let elapsed = start.elapsed();

    let below: Vec<String> = out
        .rows
        .iter()
        .filter(|r| r.trotter_ideal.unwrap() < 0.99)
        .map(|r| format!("t={} F={:.4}", r.t, r.trotter_ideal.unwrap()))
        .collect();
    let last = out.rows.last().unwrap();
    let trotter_ok = below.is_empty();
    let vff_ok = ideal_cost <= 0.02 && (last.t - 19.2).abs() < 1e-9 && last.vff_ideal >= 0.8;
    let ok = trotter_ok && vff_ok && elapsed < Duration::from_secs(120);
    report(8, "ideal evolution", ok, &format!(
        "Trotter >= 0.99 at all t: {} ; VFF at t=19.2 = {:.4} with ideal cost {ideal_cost:.4} (need >= 0.8, cost <= 0.02); {elapsed:.2?}",
        if trotter_ok { "yes".to_string() } else { format!("no, {}", below.join(", ")) },
        last.vff_ideal,
    ));
    assert!(ok);
}

#[test]
fn criterion_09_noisy_crossover() {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        noise: Some(calibration_path()),
        ..Default::default()
    };
    let u = trotter_step_circuit(&cfg.ising).unwrap();
    let a0 = init_params(&cfg.ising, cfg.seed).unwrap();
    let trace = train(&u, &a0, &cfg.schedule, &cfg.estimator().unwrap(), cfg.seed).unwrap();
    let table = CalibrationTable::from_path(calibration_path()).unwrap();
    let model = NoiseModel::from_calibration(&table, &EVOLUTION_LAYOUT).unwrap();
    let out = fast_forward(&cfg, &trace.final_ansatz().unwrap(), Some(&model)).unwrap();
    let elapsed = start.elapsed();

    let f = out.trotter_trajectories.as_ref().unwrap();
    let k = f.means().len();
    let rising: Vec<String> = (1..k)
        .filter_map(|c| {
            let (d, se) = f.paired_difference(c - 1, c);
            (d > 3.0 * se).then(|| format!("checkpoint {c}: +{d:.4} (SE {se:.4})"))
        })
        .collect();
    let (overall, overall_se) = f.paired_difference(0, k - 1);
    let decreasing = rising.is_empty() && overall + 3.0 * overall_se < 0.0;

    let late: Vec<_> = out.rows.iter().filter(|r| r.t >= 16.0 - 1e-9).collect();
    let crossed = !late.is_empty()
        && late
            .iter()
            .all(|r| r.trotter_noisy.unwrap() < r.vff_noisy.unwrap());
    let at16 = late[0];
    let ok = decreasing && crossed && elapsed < Duration::from_secs(600);
    report(9, "noisy crossover", ok, &format!(
        "noisy Trotter {:.3} -> {:.3} (overall change {overall:+.3}, SE {overall_se:.3}{}); at t={} Trotter {:.3} vs VFF {:.3}; crossover held for all t >= 16: {crossed}; {} trajectories, {elapsed:.2?} (bound 10 min)",
        f.mean(0),
        f.mean(k - 1),
        if rising.is_empty() { String::new() } else { format!(", rises at {}", rising.join(", ")) },
        at16.t,
        at16.trotter_noisy.unwrap(),
        at16.vff_noisy.unwrap(),
        f.n_trajectories(),
    ));
    assert!(ok);
}

#[test]
fn criterion_10_determinism() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut traces = Vec::new();
    let mut fidelities = Vec::new();
    for d in &dirs {
        let mut cfg = ExperimentConfig {
            noise: Some(calibration_path()),
            output_dir: d.path().to_path_buf(),
            trajectories: 200,
            ..Default::default()
        };
        cfg.schedule.n_steps = 3;
        cmd_train(&cfg).unwrap();
        cmd_fast_forward(&cfg, &d.path().join("ansatz.json")).unwrap();
        traces.push(std::fs::read(d.path().join("trace.csv")).unwrap());
        fidelities.push(std::fs::read(d.path().join("fidelity.csv")).unwrap());
    }
    let same_trace = traces[0] == traces[1];
    let same_fidelity = fidelities[0] == fidelities[1];
    let ok = same_trace && same_fidelity;
    report(10, "determinism", ok, &format!(
        "trace.csv identical: {same_trace} ({} bytes), fidelity.csv identical: {same_fidelity} ({} bytes)",
        traces[0].len(),
        fidelities[0].len()
    ));
    assert!(ok);
}
