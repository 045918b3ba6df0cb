//! Fast-forwarding: one trained `W D W†` replayed as `W D(γ·t/Δt) W†` at
//! fixed depth, against repeated Trotter steps, both compared with exact
//! evolution of `|+⟩|+⟩`.
//!
//! `cargo run --release --example fast_forward_ising`

use spectral_vff::ansatz::build_v_fast_forward;
use spectral_vff::experiment::{fast_forward, ExperimentConfig};
use spectral_vff::model::{trotter_step_circuit, trotterized_evolution};
use spectral_vff::trainer::{init_params, train, Estimator};

fn main() -> spectral_vff::Result<()> {
    let cfg = ExperimentConfig::default();
    let u = trotter_step_circuit(&cfg.ising)?;
    let trace = train(
        &u,
        &init_params(&cfg.ising, cfg.seed)?,
        &cfg.schedule,
        &Estimator::Analytic,
        cfg.seed,
    )?;
    let a = trace.final_ansatz()?;
    println!(
        "trained to ideal cost {:.5}",
        trace.rows.last().unwrap().ideal_cost
    );

    let out = fast_forward(&cfg, &a, None)?;
    println!(
        "\n{:>5} {:>6} {:>10} {:>8} {:>10}",
        "t", "steps", "VFF", "CNOTs", "Trotter"
    );
    for r in &out.rows {
        let k = (r.t / cfg.ising.dt).round() as usize;
        let vff_cnots = build_v_fast_forward(&a, r.t, cfg.ising.dt)?.cnot_equivalent_count();
        let trotter_cnots = trotterized_evolution(&cfg.ising, k)?.cnot_equivalent_count();
        println!(
            "{:>5} {:>6} {:>10.5} {:>8} {:>10.5}   ({trotter_cnots} CNOTs)",
            r.t,
            k,
            r.vff_ideal,
            vff_cnots,
            r.trotter_ideal.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
