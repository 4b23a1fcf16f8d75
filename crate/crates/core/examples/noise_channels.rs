//! Prepares a Bell pair on a density matrix and watches it degrade under
//! depolarizing noise and T1/T2 relaxation.

use toniq::sim::{probabilities, DensityMatrix, GateOp, NoiseChannel, QuantumState, StateVector};

fn bell_fidelity(rho: &DensityMatrix) -> f64 {
    // <Φ+|ρ|Φ+> with Φ+ = (|00> + |11>)/√2
    0.5 * (rho.entry(0, 0) + rho.entry(0, 3) + rho.entry(3, 0) + rho.entry(3, 3)).re
}

fn main() -> toniq::Result<()> {
    let bell = [GateOp::H(0), GateOp::Cnot { control: 0, target: 1 }];
    let mut pure = StateVector::zero(2)?;
    for g in &bell {
        pure.apply_gate(g)?;
    }
    println!("ideal Bell pair probabilities {:?}", probabilities(&pure));

    for p in [0.0, 0.01, 0.05, 0.2] {
        let mut rho = DensityMatrix::from_pure(&pure);
        rho.apply_channel(&NoiseChannel::depolarizing(2, p)?, &[0, 1])?;
        println!("two-qubit depolarizing p={p:<5} fidelity {:.4}", bell_fidelity(&rho));
    }

    let (t1, t2) = (100e-6, 80e-6);
    for micros in [1.0, 10.0, 50.0, 200.0] {
        let mut rho = DensityMatrix::from_pure(&pure);
        for q in 0..2 {
            for ch in NoiseChannel::decoherence(micros * 1e-6, t1, t2)? {
                rho.apply_channel(&ch, &[q])?;
            }
        }
        println!(
            "idle {micros:>5} us: fidelity {:.4}, P(00) {:.4}, trace {:.6}",
            bell_fidelity(&rho),
            probabilities(&rho)[0],
            rho.trace().re
        );
    }
    Ok(())
}
