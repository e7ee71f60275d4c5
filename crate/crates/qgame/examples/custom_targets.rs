//! A game with custom target sets on a random unitary.

use qgame::equilibrium_search::{search_nash, GridSpec};
use qgame::qlinalg::random_unitary;
use qgame::quantum_game::{QuantumGameSpec, TargetSet};
use qgame::Player;

fn main() {
    // a coordination game: both players want the outcome on |11>
    let spec = QuantumGameSpec::new(
        random_unitary(2024),
        TargetSet::new(vec![4]).unwrap(),
        TargetSet::new(vec![4]).unwrap(),
    );
    let grid = GridSpec::new(13, 8, 10, 3).unwrap();
    let report = search_nash(&spec, &grid).unwrap();
    println!("equilibrium found: {}", report.equilibrium_found);
    if let Some(best) = report.best() {
        println!("best play: A = {}, B = {}", best.play.a, best.play.b);
        for p in Player::BOTH {
            for m in best.certificate.margins_for(p) {
                println!("  player {p} b{}: margin {:+.2e}", m.target, m.margin);
            }
        }
    }
}
