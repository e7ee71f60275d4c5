//! Strictly competitive reading: mini-max of each target amplitude against
//! the smallest singular value of its 2x2 kernel.

use qgame::equilibrium_search::{minimax_search, singular_values_2x2, target_kernel, GridSpec};
use qgame::qlinalg::{random_unitary, Unitary4};

fn main() {
    let grid = GridSpec::new(64, 64, 3, 1).unwrap();
    for (name, u) in [
        ("identity", Unitary4::identity()),
        ("cnot", Unitary4::cnot()),
        ("random(4)", random_unitary(4)),
    ] {
        println!("{name}");
        for t in 1..=4 {
            let r = minimax_search(&u, t, &grid).unwrap();
            let (s_max, s_min) = singular_values_2x2(&target_kernel(&u, t).unwrap());
            println!(
                "  b{t}: grid {:.5}  closed form {:.5}  gap {:.1e}  (sigma {s_max:.3}, {s_min:.3})",
                r.value, r.closed_form_value, r.gap
            );
        }
    }
}
