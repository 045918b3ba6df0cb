//! The local Hilbert-Schmidt test: circuits, exact cost, shot estimates and
//! the global test it lower-bounds.
//!
//! `cargo run --example lhst_cost`

use spectral_vff::ansatz::build_v;
use spectral_vff::lhst::{build_lhst_circuits, cost_analytic, cost_sampled, hst_global};
use spectral_vff::model::trotter_step_circuit;
use spectral_vff::trainer::init_params;
use spectral_vff::IsingParams;

fn main() -> spectral_vff::Result<()> {
    let p = IsingParams::default();
    let u = trotter_step_circuit(&p)?;
    let v = build_v(&init_params(&p, 0)?)?;

    let [c1, c2] = build_lhst_circuits(&u, &v)?;
    println!("pair 1 circuit (A0,B0 = q0,q2), {} gates:\n{c1}", c1.len());
    println!("pair 2 circuit (A1,B1 = q1,q3), {} gates", c2.len());

    let exact = cost_analytic(&u, &v)?;
    println!(
        "\nanalytic: C = {:.6} (Pr00 = {:.6}, {:.6})",
        exact.value, exact.pr00_pair1, exact.pr00_pair2
    );
    println!("global HST cost: {:.6}", hst_global(&u, &v)?);
    for shots in [1_000, 8_000, 100_000] {
        let s = cost_sampled(&u, &v, shots, 7)?;
        let sigma = (0.25 / shots as f64).sqrt();
        println!("{shots:>7} shots: C = {:.6} (sigma ~ {sigma:.4})", s.value);
    }
    println!("C(U, U) = {:.2e}", cost_analytic(&u, &u)?.value);
    Ok(())
}
