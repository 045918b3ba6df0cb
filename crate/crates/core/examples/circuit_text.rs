//! Shared parameters, occurrence shifts, conjugation and the text format.
//!
//! `cargo run --example circuit_text`

use std::collections::HashMap;

use spectral_vff::simcore::GateKind;
use spectral_vff::ParamCircuit;

fn main() -> spectral_vff::Result<()> {
    let mut c = ParamCircuit::new(2)?;
    c.declare("theta", 0.3)?;
    c.add_param(GateKind::RX, &[0], "theta", 1.0)?;
    c.add_fixed(GateKind::CNOT, &[0, 1])?;
    c.add_param(GateKind::RY, &[1], "theta", -1.0)?;
    c.add_literal(GateKind::P, &[1], 0.25)?;
    print!("{c}");

    for occ in c.occurrences("theta") {
        println!(
            "theta occurrence {} at gate {} (sign {})",
            occ.id, occ.gate_index, occ.sign
        );
    }
    let first = c.occurrences("theta")[0].id;
    let shifted = c.shift_occurrence(first, std::f64::consts::FRAC_PI_2)?;
    println!("\nafter shifting occurrence {first} by +pi/2:\n{shifted}");

    let bound = c.bind(&HashMap::from([("theta".to_string(), 1.2)]))?;
    println!(
        "bound theta = {:?}, source still {:?}",
        bound.value("theta"),
        c.value("theta")
    );

    println!("\nconjugate:\n{}", c.conjugate());
    let parsed: ParamCircuit = c.to_text().parse()?;
    println!(
        "text round trip preserves gates: {}",
        parsed.gates() == c.gates()
    );
    Ok(())
}
