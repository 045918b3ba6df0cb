//! Compares the learned diagonal of `D` with the exact eigenvalues of the
//! Trotter step, minimizing over global phase and eigenvalue ordering.
//!
//! `cargo run --release --example spectrum_report`

use spectral_vff::experiment::spectrum_report;
use spectral_vff::model::trotter_step_circuit;
use spectral_vff::trainer::{init_params, train, Estimator, LearningSchedule};
use spectral_vff::IsingParams;

fn main() -> spectral_vff::Result<()> {
    let p = IsingParams::default();
    let u = trotter_step_circuit(&p)?;
    let a0 = init_params(&p, 0)?;
    println!("before training:\n{}", spectrum_report(&u, &a0)?);
    let trace = train(
        &u,
        &a0,
        &LearningSchedule::default(),
        &Estimator::Analytic,
        0,
    )?;
    println!(
        "after {} steps:\n{}",
        trace.rows.len() - 1,
        spectrum_report(&u, &trace.final_ansatz()?)?
    );
    Ok(())
}
