//! Nash equilibria and dominant strategies in two-qubit quantum computations
//! played as two-player non-cooperative games.
//!
//! A gamed computation is a 4x4 unitary `U`. Player I picks the first input
//! qubit, Player II the second, and the outcome is `N = U (A ⊗ B)`. Each player
//! wants `N` close to a set of computational basis states (for the quantum
//! Prisoner's Dilemma: Player I targets `|10>, |11>`, Player II targets
//! `|01>, |11>`). Closeness is measured by `theta(N, b_i) = arccos(|<b_i|N>|^2)`.
//!
//! Modules:
//!
//! - [`qlinalg`]: qubit / two-qubit states, 4x4 unitaries, gate library,
//!   seeded random unitaries, Bloch parameterization.
//! - [`classical_game`]: 2x2 normal-form games with ordinal preferences,
//!   dominance and pure Nash enumeration.
//! - [`quantum_game`]: outcomes, theta-distance, preference relations and
//!   closed-form Nash certificates.
//! - [`inequality_analysis`]: the coefficient set `P, Q, P', Q', S, T, S', T'`,
//!   the deviation inequalities, triangle bounds and case classification.
//! - [`equilibrium_search`]: grid search with local refinement for Nash plays
//!   and the strictly competitive mini-max value.
//! - [`cli`]: config validation, command dispatch and JSON reports used by the
//!   `qgame` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod classical_game;
pub mod cli;
pub mod equilibrium_search;
pub mod inequality_analysis;
pub mod qlinalg;
pub mod quantum_game;

use serde::{Deserialize, Serialize};

pub use num_complex::Complex64;

/// One of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "I")]
    One,
    #[serde(rename = "II")]
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Accepts 1 or 2.
    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::One => "I",
            Player::Two => "II",
        })
    }
}
