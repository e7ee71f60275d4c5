//! Outcome state of a play and its theta-distance to each basis observable.

use std::f64::consts::FRAC_PI_2;

use qgame::qlinalg::{from_angles, BlochAngles, QubitState, Unitary4};
use qgame::quantum_game::{outcome, theta, Play, QuantumGameSpec};

fn main() {
    let spec = QuantumGameSpec::prisoners_dilemma(Unitary4::cnot());
    let plus = from_angles(BlochAngles::new(FRAC_PI_2, 0.0).unwrap());

    for (label, play) in [
        (
            "(|1>, |0>)",
            Play::new(QubitState::one(), QubitState::zero()),
        ),
        ("(|+>, |0>)", Play::new(plus, QubitState::zero())),
        ("(|+>, |+>)", Play::new(plus, plus)),
    ] {
        let n = outcome(&spec, &play);
        println!("play {label}");
        for i in 1..=4 {
            let amp = n.amp(i);
            println!(
                "  b{i}: amp {amp:.4}  |amp| {:.4}  theta {:.4}",
                amp.norm(),
                theta(&n, i).unwrap().value()
            );
        }
    }
}
