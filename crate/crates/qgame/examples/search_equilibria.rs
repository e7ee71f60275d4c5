//! Grid search with pattern refinement for Nash plays.

use qgame::equilibrium_search::{search_nash, GridSpec};
use qgame::qlinalg::{random_unitary, Unitary4};
use qgame::quantum_game::QuantumGameSpec;

fn main() {
    let grid = GridSpec::default();
    for (name, u) in [
        ("identity", Unitary4::identity()),
        ("cnot", Unitary4::cnot()),
        ("random(11)", random_unitary(11)),
    ] {
        let report = search_nash(&QuantumGameSpec::prisoners_dilemma(u), &grid).unwrap();
        println!(
            "{name}: {} cells, {} refinement evaluations, equilibrium found = {}",
            report.stats.cells_evaluated,
            report.stats.refinement_evaluations,
            report.equilibrium_found
        );
        if let Some(note) = &report.note {
            println!("  note: {note}");
        }
        for c in &report.candidates {
            let [a, b] = c.angles;
            println!(
                "  A(alpha {:.4}, phi {:.4})  B(alpha {:.4}, phi {:.4})  worst margin {:+.2e}",
                a.alpha, a.phi, b.alpha, b.phi, c.worst_margin
            );
        }
    }
}
