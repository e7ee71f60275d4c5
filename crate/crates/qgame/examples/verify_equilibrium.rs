//! Closed-form Nash certificates for a few plays.

use qgame::qlinalg::{QubitState, Unitary4};
use qgame::quantum_game::{verify_nash, Play, QuantumGameSpec, ANALYTIC_EPSILON};

fn main() {
    let (zero, one) = (QubitState::zero(), QubitState::one());
    let cases = [
        ("identity", Unitary4::identity(), Play::new(one, one)),
        ("identity", Unitary4::identity(), Play::new(zero, zero)),
        ("cnot", Unitary4::cnot(), Play::new(one, zero)),
        ("swap", Unitary4::swap(), Play::new(one, one)),
    ];
    for (name, u, play) in cases {
        let spec = QuantumGameSpec::prisoners_dilemma(u);
        let cert = verify_nash(&spec, &play, ANALYTIC_EPSILON);
        println!(
            "{name} at ({}, {}): verdict {}",
            play.a, play.b, cert.verdict
        );
        for m in &cert.margins {
            println!(
                "  player {} target b{}: achieved {:.6} best {:.6} margin {:+.2e}",
                m.player, m.target, m.achieved, m.best_response, m.margin
            );
        }
    }
}
