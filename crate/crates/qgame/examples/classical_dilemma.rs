//! Classical Prisoner's Dilemma: dominance and pure Nash equilibria.

use qgame::classical_game::{ClassicalGame, Outcome};
use qgame::Player;

fn main() {
    let game = ClassicalGame::prisoners_dilemma();

    for player in Player::BOTH {
        for s in game.strategies(player) {
            let dominant = game.is_strongly_dominant(player, s).unwrap();
            println!("player {player}: {s} strongly dominant = {dominant}");
        }
    }

    // {o3, o4} over {o1, o2} for Player I, read two ways
    let o = |s: &str| Outcome::new(s);
    let (upper, lower) = ([o("o3"), o("o4")], [o("o1"), o("o2")]);
    println!(
        "player I, pairwise: {}, dominance-induced: {}",
        game.strict_pairwise_dominance(Player::One, &upper, &lower)
            .unwrap(),
        game.dominance_induced(Player::One, &upper, &lower).unwrap(),
    );

    for (s1, s2) in game.pure_nash() {
        println!(
            "pure Nash: ({s1}, {s2}) -> {}",
            game.outcome_of(&s1, &s2).unwrap()
        );
    }
}
