//! Trains `V = W D W†` against one Trotter step with the reference schedule,
//! starting from a fit to the exchange-free evolution.
//!
//! `cargo run --release --example learn_spectral_decomposition [shots]`
//!
//! Without an argument the gradients are exact.

use spectral_vff::model::trotter_step_circuit;
use spectral_vff::trainer::{init_params, train, Estimator, LearningSchedule};
use spectral_vff::IsingParams;

fn main() -> spectral_vff::Result<()> {
    let estimator = match std::env::args().nth(1) {
        Some(s) => Estimator::Sampled {
            shots: s.parse().expect("shots must be an integer"),
        },
        None => Estimator::Analytic,
    };
    let p = IsingParams::default();
    let u = trotter_step_circuit(&p)?;
    let a0 = init_params(&p, 0)?;
    let trace = train(&u, &a0, &LearningSchedule::default(), &estimator, 0)?;

    println!(
        "{:>3} {:>7} {:>10} {:>10} {:>9} {:>9} {:>9}",
        "j", "eta", "raw", "ideal", "frob", "eig_err", "angle"
    );
    for r in &trace.rows {
        let angle = r
            .grad_angle_deg
            .map_or("-".to_string(), |a| format!("{a:.2}"));
        println!(
            "{:>3} {:>7.4} {:>10.6} {:>10.6} {:>9.5} {:>9.5} {:>9}",
            r.j, r.eta, r.raw_cost, r.ideal_cost, r.frob_uv, r.eig_err, angle
        );
    }
    let a = trace.final_ansatz()?;
    println!("\nlearned gamma: {:?}", a.gamma);
    println!("circuits per gradient: {}", trace.rows[0].circuits);
    Ok(())
}
