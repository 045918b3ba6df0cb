//! The two-spin Ising Hamiltonian, its second-order Trotter step and the
//! exact propagator.
//!
//! `cargo run --example trotter_vs_exact`

use spectral_vff::linalg::{eigenvalues_by_phase, frobenius_dist};
use spectral_vff::model::{
    build_hamiltonian, exact_evolution, trotter_step_circuit, trotterized_evolution,
};
use spectral_vff::IsingParams;

fn main() -> spectral_vff::Result<()> {
    let p = IsingParams::default();
    let h = build_hamiltonian(&p)?;
    println!("J = {}, B = {}, dt = {}", p.j, p.b, p.dt);
    println!("spectrum of H: {:?}", h.spectrum());

    let step = trotter_step_circuit(&p)?;
    println!(
        "\none Trotter step ({} gates, {} CNOT-equivalent):\n{step}",
        step.len(),
        step.cnot_equivalent_count()
    );
    let u = step.unitary_of()?;
    let e = exact_evolution(&h, p.dt)?;
    println!(
        "||U_trotter - exp(-iH dt)||_F = {:.3e}",
        frobenius_dist(&u, &e)
    );
    let phases: Vec<String> = eigenvalues_by_phase(&u)
        .iter()
        .map(|z| format!("{:+.5}", z.arg()))
        .collect();
    let exact: Vec<String> = h
        .spectrum()
        .iter()
        .rev()
        .map(|l| format!("{:+.5}", -l * p.dt))
        .collect();
    println!("Trotter eigenphases: {}", phases.join(" "));
    println!("exact -lambda dt:    {}", exact.join(" "));

    println!("\nerror at T = 0.8 as dt shrinks:");
    for dt in [0.2, 0.1, 0.05] {
        let q = IsingParams { dt, ..p };
        let k = (0.8 / dt).round() as usize;
        let err = frobenius_dist(
            &trotterized_evolution(&q, k)?.unitary_of()?,
            &exact_evolution(&h, 0.8)?,
        );
        println!("  dt = {dt:<5} steps = {k:<3} error = {err:.3e}");
    }
    Ok(())
}
