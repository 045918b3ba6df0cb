//! Calibration-driven trajectory noise: the raw cost it adds to the LHST and
//! the noisy fidelity crossover between fast-forwarding and Trotter steps.
//!
//! `cargo run --release --example noise_calibration [trajectories]`

use spectral_vff::ansatz::build_v;
use spectral_vff::experiment::{fast_forward, ExperimentConfig};
use spectral_vff::lhst::cost_analytic;
use spectral_vff::model::trotter_step_circuit;
use spectral_vff::noise::{
    noisy_cost, CalibrationTable, NoiseModel, EVOLUTION_LAYOUT, LHST_LAYOUT,
};
use spectral_vff::trainer::{init_params, train, Estimator};

fn main() -> spectral_vff::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/bogota_calibration.json");
    let table = CalibrationTable::from_path(path)?;
    for q in &table.qubits {
        println!(
            "Q{}: T1 {} us, T2 {} us, SPAM {:.4}, u2 {:.2e}",
            q.id, q.t1_us, q.t2_us, q.spam, q.u2_error
        );
    }
    let lhst = NoiseModel::from_calibration(&table, &LHST_LAYOUT)?;

    let mut cfg = ExperimentConfig::default();
    if let Some(n) = std::env::args().nth(1) {
        cfg.trajectories = n.parse().expect("trajectories must be an integer");
    }
    let u = trotter_step_circuit(&cfg.ising)?;
    println!(
        "\nnoisy C(U, U) at 8000 shots: {:.4}",
        noisy_cost(&u, &u, &lhst, 8000, 0)?.value
    );

    let trace = train(
        &u,
        &init_params(&cfg.ising, 0)?,
        &cfg.schedule,
        &Estimator::Analytic,
        0,
    )?;
    let a = trace.final_ansatz()?;
    let v = build_v(&a)?;
    println!(
        "trained V: ideal cost {:.4}, noisy raw cost {:.4}",
        cost_analytic(&u, &v)?.value,
        noisy_cost(&u, &v, &lhst, 8000, 0)?.value
    );

    let evolution = NoiseModel::from_calibration(&table, &EVOLUTION_LAYOUT)?;
    let out = fast_forward(&cfg, &a, Some(&evolution))?;
    println!(
        "\n{:>5} {:>10} {:>10}   ({} trajectories)",
        "t", "VFF", "Trotter", cfg.trajectories
    );
    for r in &out.rows {
        println!(
            "{:>5} {:>10.4} {:>10.4}",
            r.t,
            r.vff_noisy.unwrap(),
            r.trotter_noisy.unwrap()
        );
    }
    Ok(())
}
