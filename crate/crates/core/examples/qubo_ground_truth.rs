//! Generates a QUBO instance, solves it exhaustively and checks the stored
//! ground truth.
//!
//! ```text
//! cargo run --release --example qubo_ground_truth -- 4 11
//! ```

use toniq::qubo::{bits_of, bits_to_string, brute_force_solve, builtin_instances, cost_table, generate_instance};

fn main() -> toniq::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("numeric argument"));
    let n = args.next().unwrap_or(4) as usize;
    let seed = args.next().unwrap_or(11);

    let inst = generate_instance(n, seed)?;
    println!("generated {n}-variable instance from seed {seed}");
    for row in inst.q.rows() {
        println!(
            "  {}",
            row.iter().map(|v| format!("{v:7.3}")).collect::<Vec<_>>().join(" ")
        );
    }

    let costs = cost_table(&inst.q);
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
    println!("lowest costs (qubit 0 first):");
    for &idx in order.iter().take(4) {
        println!("  {}  {:8.4}", bits_to_string(&bits_of(idx, n)), costs[idx]);
    }

    let truth = brute_force_solve(&inst.q)?;
    assert_eq!(truth.dec_states, inst.dec_states);
    println!(
        "ground state {} with energy {:.4}",
        bits_to_string(&truth.states[0]),
        truth.energy
    );

    let shipped = builtin_instances(3)?;
    shipped.verify()?;
    println!("built-in {} verified: ground {:?}", shipped.id, shipped.ground_states);
    Ok(())
}
