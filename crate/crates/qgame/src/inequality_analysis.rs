//! Coefficient algebra and case inequalities for the quantum Prisoner's Dilemma.
//!
//! Player I's targets are rows 3 and 4 of `U`, Player II's are rows 2 and 4.
//! At a starred play `(A*, B*)` each target amplitude factors into the
//! deviating player's own coordinates:
//!
//! ```text
//! I,  row 3:  |N_3| <= P |x1| + Q |y1|     P  = |U31 x2* + U32 y2*|,  Q  = |U33 x2* + U34 y2*|
//! I,  row 4:  |N_4| <= P'|x1| + Q'|y1|     P' = |U41 x2* + U42 y2*|,  Q' = |U43 x2* + U44 y2*|
//! II, row 2:  |N_2| <= S |x2| + T |y2|     S  = |U21 x1* + U23 y1*|,  T  = |U22 x1* + U24 y1*|
//! II, row 4:  |N_4| <= S'|x2| + T'|y2|     S' = |U41 x1* + U43 y1*|,  T' = |U42 x1* + U44 y1*|
//! ```
//!
//! [`Convention::PaperLiteral`] instead sets `S' = T' = |U42 x1* + U44 y1*|`.
//! Case inequalities are only evaluated and reported here; nothing in this
//! module tries to solve them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qlinalg::{QubitState, Unitary4};
use crate::quantum_game::Play;
use crate::Player;

/// Slack used for every `<=` / `>=` comparison in this module.
pub const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `S'` from the Player II factoring of row 4.
    #[default]
    Corrected,
    /// `S'` and `T'` both equal to `|U42 x1* + U44 y1*|`.
    PaperLiteral,
}

impl std::str::FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corrected" => Ok(Convention::Corrected),
            "paper-literal" | "paper_literal" => Ok(Convention::PaperLiteral),
            _ => Err(format!(
                "unknown convention `{s}` (expected corrected or paper-literal)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSet {
    pub p: f64,
    pub q: f64,
    pub p_prime: f64,
    pub q_prime: f64,
    pub s: f64,
    pub t: f64,
    pub s_prime: f64,
    pub t_prime: f64,
    pub convention: Convention,
}

impl CoefficientSet {
    /// The pair multiplying `(|x|, |y|)` for `player` on `target` (3/4 for I, 2/4 for II).
    pub fn pair(&self, player: Player, target: usize) -> Option<(f64, f64)> {
        match (player, target) {
            (Player::One, 3) => Some((self.p, self.q)),
            (Player::One, 4) => Some((self.p_prime, self.q_prime)),
            (Player::Two, 2) => Some((self.s, self.t)),
            (Player::Two, 4) => Some((self.s_prime, self.t_prime)),
            _ => None,
        }
    }
}

/// Rows of `U` that each player's preference reads.
pub fn target_rows(player: Player) -> [usize; 2] {
    match player {
        Player::One => [3, 4],
        Player::Two => [2, 4],
    }
}

pub fn coefficients(u: &Unitary4, star: &Play, convention: Convention) -> CoefficientSet {
    let (x1, y1) = (star.a.x(), star.a.y());
    let (x2, y2) = (star.b.x(), star.b.y());
    let m = |a: Complex64, xa: Complex64, b: Complex64, xb: Complex64| (a * xa + b * xb).norm();
    let e = |i, j| u.entry(i, j);
    let t_prime = m(e(4, 2), x1, e(4, 4), y1);
    let s_prime = match convention {
        Convention::Corrected => m(e(4, 1), x1, e(4, 3), y1),
        Convention::PaperLiteral => t_prime,
    };
    CoefficientSet {
        p: m(e(3, 1), x2, e(3, 2), y2),
        q: m(e(3, 3), x2, e(3, 4), y2),
        p_prime: m(e(4, 1), x2, e(4, 2), y2),
        q_prime: m(e(4, 3), x2, e(4, 4), y2),
        s: m(e(2, 1), x1, e(2, 3), y1),
        t: m(e(2, 2), x1, e(2, 4), y1),
        s_prime,
        t_prime,
        convention,
    }
}

/// `|N_row|` at the play `(a, b)`.
fn row_modulus(u: &Unitary4, row: usize, a: &QubitState, b: &QubitState) -> f64 {
    (u.entry(row, 1) * a.x() * b.x()
        + u.entry(row, 2) * a.x() * b.y()
        + u.entry(row, 3) * a.y() * b.x()
        + u.entry(row, 4) * a.y() * b.y())
    .norm()
}

/// One evaluated inequality `lhs <= rhs` (or `>=`, per label).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn le(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + EQ_TOL,
        }
    }

    fn ge(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            holds: lhs + EQ_TOL >= rhs,
        }
    }
}

fn raw_labels(player: Player) -> [&'static str; 2] {
    match player {
        Player::One => ["ineq1", "ineq2"],
        Player::Two => ["ineq3", "ineq4"],
    }
}

/// The two modulus inequalities for `player`: `|N_row|` at the deviated play
/// must not exceed `|N_row|` at the starred play, for each of the player's rows.
pub fn raw_deviation_inequalities(
    u: &Unitary4,
    star: &Play,
    deviation: &QubitState,
    player: Player,
) -> [InequalityCheck; 2] {
    let dev = star.with(player, *deviation);
    let labels = raw_labels(player);
    let rows = target_rows(player);
    [0, 1].map(|k| {
        InequalityCheck::le(
            labels[k],
            row_modulus(u, rows[k], &dev.a, &dev.b),
            row_modulus(u, rows[k], &star.a, &star.b),
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleBound {
    pub label: String,
    pub row: usize,
    /// `|N_row|` at the deviated play.
    pub lhs: f64,
    /// Coefficient pair weighted by the starred coordinates, e.g. `P|x1*| + Q|y1*|`.
    pub star_bound: f64,
    /// Coefficient pair weighted by the deviation's coordinates, e.g. `P|x1| + Q|y1|`.
    pub deviation_bound: f64,
    /// `lhs <= star_bound`. Holds at a Nash play for every deviation.
    pub holds_star: bool,
    /// `lhs <= deviation_bound`. Always holds (triangle inequality).
    pub holds_deviation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    pub player: Player,
    pub coefficients: CoefficientSet,
    pub bounds: [TriangleBound; 2],
}

fn triangle_labels(player: Player) -> [&'static str; 2] {
    match player {
        Player::One => ["shortineq1", "shortineq2"],
        Player::Two => ["shortineq3", "shortineq4"],
    }
}

fn weighted(pair: (f64, f64), s: &QubitState) -> f64 {
    pair.0 * s.x().norm() + pair.1 * s.y().norm()
}

/// Compact triangle bounds for `player`'s two rows.
pub fn triangle_bounds(
    u: &Unitary4,
    star: &Play,
    deviation: &QubitState,
    player: Player,
    convention: Convention,
) -> TriangleReport {
    let coefficients = coefficients(u, star, convention);
    let dev = star.with(player, *deviation);
    let rows = target_rows(player);
    let labels = triangle_labels(player);
    let own_star = star.strategy(player);
    let bounds = [0, 1].map(|k| {
        let pair = coefficients
            .pair(player, rows[k])
            .expect("row belongs to player");
        let lhs = row_modulus(u, rows[k], &dev.a, &dev.b);
        let star_bound = weighted(pair, own_star);
        let deviation_bound = weighted(pair, deviation);
        TriangleBound {
            label: labels[k].to_string(),
            row: rows[k],
            lhs,
            star_bound,
            deviation_bound,
            holds_star: lhs <= star_bound + EQ_TOL,
            holds_deviation: lhs <= deviation_bound + EQ_TOL,
        }
    });
    TriangleReport {
        player,
        coefficients,
        bounds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub coefficients: CoefficientSet,
    /// `case18` .. `case25`, in order.
    pub cases: Vec<InequalityCheck>,
    /// `ineq1` .. `ineq4`: I deviates to `alt.a`, II deviates to `alt.b`.
    pub raw: Vec<InequalityCheck>,
}

impl CaseReport {
    pub fn case(&self, n: u32) -> Option<&InequalityCheck> {
        self.cases.iter().find(|c| c.label == format!("case{n}"))
    }

    pub fn ineq(&self, n: u32) -> Option<&InequalityCheck> {
        self.raw.iter().find(|c| c.label == format!("ineq{n}"))
    }
}

/// Evaluates the eight case inequalities, comparing `alt`'s coordinates with
/// the starred coordinates under the coefficients at `star`.
pub fn classify_cases(u: &Unitary4, star: &Play, alt: &Play, convention: Convention) -> CaseReport {
    let coefficients = coefficients(u, star, convention);
    let mut cases = Vec::with_capacity(8);
    let groups = [
        (Player::One, 3, 18),
        (Player::One, 4, 20),
        (Player::Two, 2, 22),
        (Player::Two, 4, 24),
    ];
    for (player, row, first) in groups {
        let pair = coefficients
            .pair(player, row)
            .expect("row belongs to player");
        let lhs = weighted(pair, alt.strategy(player));
        let rhs = weighted(pair, star.strategy(player));
        cases.push(InequalityCheck::le(format!("case{first}"), lhs, rhs));
        cases.push(InequalityCheck::ge(format!("case{}", first + 1), lhs, rhs));
    }
    let mut raw = Vec::with_capacity(4);
    raw.extend(raw_deviation_inequalities(u, star, &alt.a, Player::One));
    raw.extend(raw_deviation_inequalities(u, star, &alt.b, Player::Two));
    CaseReport {
        coefficients,
        cases,
        raw,
    }
}
