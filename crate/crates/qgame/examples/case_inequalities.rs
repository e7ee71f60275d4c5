//! Coefficient set, case pairs and triangle bounds at a certified play.

use qgame::inequality_analysis::{classify_cases, triangle_bounds, Convention};
use qgame::qlinalg::{from_angles, BlochAngles, QubitState, Unitary4};
use qgame::quantum_game::Play;
use qgame::Player;

fn main() {
    let u = Unitary4::cnot();
    let star = Play::new(QubitState::one(), QubitState::zero());
    let alt = Play::new(
        from_angles(BlochAngles::new(1.0, 0.3).unwrap()),
        from_angles(BlochAngles::new(2.0, 1.1).unwrap()),
    );

    for convention in [Convention::Corrected, Convention::PaperLiteral] {
        let report = classify_cases(&u, &star, &alt, convention);
        let c = &report.coefficients;
        println!(
            "{convention:?}: P {:.3} Q {:.3} P' {:.3} Q' {:.3} S {:.3} T {:.3} S' {:.3} T' {:.3}",
            c.p, c.q, c.p_prime, c.q_prime, c.s, c.t, c.s_prime, c.t_prime
        );
        for check in report.cases.iter().chain(&report.raw) {
            println!(
                "  {:<7} {:.4} <= {:.4}  {}",
                check.label, check.lhs, check.rhs, check.holds
            );
        }
    }

    for player in Player::BOTH {
        let dev = *alt.strategy(player);
        let r = triangle_bounds(&u, &star, &dev, player, Convention::Corrected);
        for b in &r.bounds {
            println!(
                "player {player} {} (b{}): {:.4} vs star bound {:.4}, deviation bound {:.4}",
                b.label, b.row, b.lhs, b.star_bound, b.deviation_bound
            );
        }
    }
}
