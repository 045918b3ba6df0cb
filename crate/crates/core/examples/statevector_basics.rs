//! Bell state preparation, marginals and seeded sampling.
//!
//! `cargo run --example statevector_basics`

use spectral_vff::simcore::{Gate, StateVector};

fn main() -> spectral_vff::Result<()> {
    let mut s = StateVector::zero(2)?;
    s.apply(&Gate::h(0))?;
    s.apply(&Gate::cnot(0, 1))?;
    let amps: Vec<String> = s.amplitudes().iter().map(|a| format!("{a:.4}")).collect();
    println!("amplitudes: [{}]", amps.join(", "));
    println!("P(q0 q1) = {:?}", s.probabilities(&[0, 1])?);
    println!("P(q0)    = {:?}", s.probabilities(&[0])?);

    for seed in [1, 1, 2] {
        let counts: Vec<String> = s
            .sample(&[0, 1], 8000, seed)?
            .iter()
            .map(|o| format!("{}: {}", o.label(), o.count))
            .collect();
        println!("seed {seed}: {}", counts.join(", "));
    }

    // Qubit 0 is the most significant bit: |10⟩ is index 2.
    let mut t = StateVector::basis(2, 2)?;
    t.apply(&Gate::cnot(0, 1))?;
    println!("CNOT|10> = |11>: {}", t.amplitudes()[3].norm() > 0.999);
    Ok(())
}
