//! The gamed two-qubit computation.
//!
//! Player I chooses `A = x1|0> + y1|1>`, Player II chooses `B = x2|0> + y2|1>`
//! and the outcome is `N = U (A ⊗ B)`, so that
//!
//! ```text
//! N_i = U_i1 x1 x2 + U_i2 x1 y2 + U_i3 y1 x2 + U_i4 y1 y2
//! ```
//!
//! A play is a Nash equilibrium when no unilateral deviation moves the outcome
//! strictly closer to any of the deviating player's targets. Because
//! `theta = arccos(|N_t|^2)` is strictly decreasing in `|N_t|`, that condition
//! is equivalent to `|N_t|` already being maximal over the deviating player's
//! strategies for every target `t`. `N_t` is linear in each player's own
//! amplitudes, so the maximum is the norm of the coefficient pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qlinalg::{apply, tensor, LinalgError, QubitState, TwoQubitState, Unitary4};
use crate::Player;

/// Default certification tolerance for analytically constructed plays.
pub const ANALYTIC_EPSILON: f64 = 1e-9;
/// Default certification tolerance for plays found on a grid.
pub const GRID_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error("empty target set")]
    Empty,
    #[error("target index {0} out of range 1..=4")]
    OutOfRange(usize),
}

/// Nonempty set of basis indices in `1..=4`, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TargetSet(Vec<usize>);

impl TargetSet {
    pub fn new(mut targets: Vec<usize>) -> Result<Self, TargetError> {
        if targets.is_empty() {
            return Err(TargetError::Empty);
        }
        if let Some(&bad) = targets.iter().find(|&&t| !(1..=4).contains(&t)) {
            return Err(TargetError::OutOfRange(bad));
        }
        targets.sort_unstable();
        targets.dedup();
        Ok(Self(targets))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.contains(&t)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl TryFrom<Vec<usize>> for TargetSet {
    type Error = TargetError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        TargetSet::new(v)
    }
}

impl From<TargetSet> for Vec<usize> {
    fn from(t: TargetSet) -> Self {
        t.0
    }
}

/// A unitary together with the basis states each player wants the outcome near.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumGameSpec {
    pub unitary: Unitary4,
    pub targets: [TargetSet; 2],
    pub name: Option<String>,
}

pub const PRISONERS_DILEMMA: &str = "prisoners_dilemma";

impl QuantumGameSpec {
    pub fn new(unitary: Unitary4, targets_one: TargetSet, targets_two: TargetSet) -> Self {
        Self {
            unitary,
            targets: [targets_one, targets_two],
            name: None,
        }
    }

    /// Quantum Prisoner's Dilemma: Player I targets `{b3, b4}`, Player II `{b2, b4}`.
    pub fn prisoners_dilemma(unitary: Unitary4) -> Self {
        Self {
            unitary,
            targets: [TargetSet(vec![3, 4]), TargetSet(vec![2, 4])],
            name: Some(PRISONERS_DILEMMA.to_string()),
        }
    }

    pub fn targets(&self, player: Player) -> &TargetSet {
        &self.targets[player.index()]
    }
}

/// One strategy per player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Play {
    pub a: QubitState,
    pub b: QubitState,
}

impl Play {
    pub fn new(a: QubitState, b: QubitState) -> Self {
        Self { a, b }
    }

    pub fn strategy(&self, player: Player) -> &QubitState {
        match player {
            Player::One => &self.a,
            Player::Two => &self.b,
        }
    }

    /// This play with `player`'s strategy replaced by `s`.
    pub fn with(&self, player: Player, s: QubitState) -> Play {
        match player {
            Player::One => Play { a: s, b: self.b },
            Player::Two => Play { a: self.a, b: s },
        }
    }
}

/// Outcome state `U (A ⊗ B)`.
pub fn outcome(spec: &QuantumGameSpec, play: &Play) -> TwoQubitState {
    apply(&spec.unitary, &tensor(&play.a, &play.b))
}

/// Angle in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `theta(n, b_i) = arccos(|n_i|^2)`.
///
/// This is the squared-modulus form, not the Fubini-Study `arccos(|n_i|)`.
/// Both are strictly decreasing in `|n_i|`, so every comparison agrees.
pub fn theta(n: &TwoQubitState, i: usize) -> Result<Angle, LinalgError> {
    crate::qlinalg::basis_index(i)?;
    let m = n.amp(i).norm_sqr().clamp(0.0, 1.0);
    let a = m.acos();
    debug_assert!((0.0..=PI).contains(&a));
    Ok(Angle(a))
}

fn theta_unchecked(n: &TwoQubitState, i: usize) -> f64 {
    n.amp(i).norm_sqr().clamp(0.0, 1.0).acos()
}

/// OR-form preference: `p ≻ q` if `p` is strictly closer than `q` to at least
/// one of `player`'s targets.
///
/// This relation is not antisymmetric (both `p ≻ q` and `q ≻ p` can hold), so
/// it is exposed for inspection only; certification uses
/// [`deviation_dominates`].
pub fn prefers_or(
    spec: &QuantumGameSpec,
    player: Player,
    p: &TwoQubitState,
    q: &TwoQubitState,
) -> bool {
    spec.targets(player)
        .iter()
        .any(|t| theta_unchecked(p, t) < theta_unchecked(q, t))
}

/// AND-form deviation condition: the deviation outcome `dev` is no closer to
/// any of `player`'s targets than `n`.
pub fn deviation_dominates(
    spec: &QuantumGameSpec,
    player: Player,
    n: &TwoQubitState,
    dev: &TwoQubitState,
) -> bool {
    spec.targets(player)
        .iter()
        .all(|t| theta_unchecked(dev, t) >= theta_unchecked(n, t))
}

/// Coefficients `(c1, c2)` with `N_t = c1 x + c2 y` in the deciding player's
/// own amplitudes `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffPair {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl CoeffPair {
    pub fn eval(&self, s: &QubitState) -> Complex64 {
        self.c1 * s.x() + self.c2 * s.y()
    }
}

/// Factors row `target` of `U` into `player`'s own amplitudes with the
/// opponent fixed.
pub fn response_coeffs(
    u: &Unitary4,
    player: Player,
    target: usize,
    opponent: &QubitState,
) -> CoeffPair {
    let (ox, oy) = (opponent.x(), opponent.y());
    let e = |j| u.entry(target, j);
    match player {
        Player::One => CoeffPair {
            c1: e(1) * ox + e(2) * oy,
            c2: e(3) * ox + e(4) * oy,
        },
        Player::Two => CoeffPair {
            c1: e(1) * ox + e(3) * oy,
            c2: e(2) * ox + e(4) * oy,
        },
    }
}

/// Coefficient pairs for every target of `player`, in ascending target order.
pub fn best_response_coeffs(
    spec: &QuantumGameSpec,
    player: Player,
    opponent: &QubitState,
) -> Vec<(usize, CoeffPair)> {
    spec.targets(player)
        .iter()
        .map(|t| (t, response_coeffs(&spec.unitary, player, t, opponent)))
        .collect()
}

/// Maximum of `|c1 x + c2 y|` over unit `(x, y)` and a strategy attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub value: f64,
    pub strategy: QubitState,
}

/// Exact best response by Cauchy-Schwarz: the maximum is
/// `sqrt(|c1|^2 + |c2|^2)`, attained at `(conj c1, conj c2) / norm`.
/// The returned strategy has a real nonnegative `|0>` amplitude; when both
/// coefficients vanish every strategy is optimal and `|0>` is returned.
pub fn max_deviation_amplitude(pair: &CoeffPair) -> BestResponse {
    let value = pair.c1.norm().hypot(pair.c2.norm());
    if value == 0.0 {
        return BestResponse {
            value,
            strategy: QubitState::zero(),
        };
    }
    let x = pair.c1.conj() / value;
    let y = pair.c2.conj() / value;
    let strategy = if x.norm() > 0.0 {
        let w = Complex64::from_polar(1.0, -x.arg());
        QubitState::from_unit(Complex64::new(x.norm(), 0.0), y * w)
    } else {
        QubitState::from_unit(Complex64::new(0.0, 0.0), Complex64::new(y.norm(), 0.0))
    };
    BestResponse { value, strategy }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetMargin {
    pub player: Player,
    pub target: usize,
    /// `|N_t|` at the certified play.
    pub achieved: f64,
    /// `max |N_t|` over the player's unilateral deviations.
    pub best_response: f64,
    /// `achieved - best_response`, never above rounding noise.
    pub margin: f64,
    pub best_response_strategy: QubitState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashCertificate {
    pub play: Play,
    pub outcome: TwoQubitState,
    pub margins: Vec<TargetMargin>,
    pub epsilon: f64,
    pub verdict: bool,
    /// Nash strategies in this model are strongly dominant, so this mirrors
    /// `verdict`.
    pub dominant_flag: bool,
}

impl NashCertificate {
    pub fn worst_margin(&self) -> f64 {
        self.margins
            .iter()
            .map(|m| m.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn margins_for(&self, player: Player) -> impl Iterator<Item = &TargetMargin> {
        self.margins.iter().filter(move |m| m.player == player)
    }
}

/// Closed-form Nash certificate for `play`.
///
/// # Panics
/// If `epsilon` is negative or NaN.
pub fn verify_nash(spec: &QuantumGameSpec, play: &Play, epsilon: f64) -> NashCertificate {
    assert!(epsilon >= 0.0, "epsilon must be nonnegative");
    let n = outcome(spec, play);
    let mut margins = Vec::with_capacity(4);
    for player in Player::BOTH {
        let opponent = play.strategy(player.other());
        for (target, pair) in best_response_coeffs(spec, player, opponent) {
            let achieved = n.amp(target).norm();
            let best = max_deviation_amplitude(&pair);
            margins.push(TargetMargin {
                player,
                target,
                achieved,
                best_response: best.value,
                margin: achieved - best.value,
                best_response_strategy: best.strategy,
            });
        }
    }
    let verdict = margins.iter().all(|m| m.margin >= -epsilon);
    NashCertificate {
        play: *play,
        outcome: n,
        margins,
        epsilon,
        verdict,
        dominant_flag: verdict,
    }
}

/// Smallest of the margins, without building a certificate.
pub(crate) fn worst_margin(spec: &QuantumGameSpec, play: &Play) -> f64 {
    let n = outcome(spec, play);
    let mut worst = f64::INFINITY;
    for player in Player::BOTH {
        let opponent = play.strategy(player.other());
        for t in spec.targets(player).iter() {
            let pair = response_coeffs(&spec.unitary, player, t, opponent);
            let best = pair.c1.norm().hypot(pair.c2.norm());
            worst = worst.min(n.amp(t).norm() - best);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pd(u: Unitary4) -> QuantumGameSpec {
        QuantumGameSpec::prisoners_dilemma(u)
    }

    fn basis(i: usize) -> TwoQubitState {
        TwoQubitState::basis(i).unwrap()
    }

    #[test]
    fn outcome_examples() {
        let zero = QubitState::zero();
        let one = QubitState::one();
        assert_eq!(
            outcome(&pd(Unitary4::identity()), &Play::new(zero, zero)),
            basis(1)
        );
        assert_eq!(
            outcome(&pd(Unitary4::cnot()), &Play::new(one, zero)),
            basis(4)
        );
        let plus = QubitState::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let n = outcome(&pd(Unitary4::cnot()), &Play::new(plus, zero));
        let want = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        for (z, w) in n.amplitudes().iter().zip(want) {
            assert!((z - c(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn outcome_matches_expanded_formula() {
        let u = crate::qlinalg::random_unitary(3);
        let a = QubitState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let b = QubitState::new(c(0.0, FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2, 0.0)).unwrap();
        let n = outcome(&pd(u), &Play::new(a, b));
        for i in 1..=4 {
            let want = u.entry(i, 1) * a.x() * b.x()
                + u.entry(i, 2) * a.x() * b.y()
                + u.entry(i, 3) * a.y() * b.x()
                + u.entry(i, 4) * a.y() * b.y();
            assert!((n.amp(i) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&basis(3), 3).unwrap().value(), 0.0);
        assert!((theta(&basis(3), 1).unwrap().value() - PI / 2.0).abs() < 1e-15);
        let h = c(0.5, 0.0);
        let uniform = TwoQubitState::new([h, h, h, h]).unwrap();
        for i in 1..=4 {
            assert!((theta(&uniform, i).unwrap().value() - 1.318_116_071_652_818).abs() < 1e-12);
        }
        assert!(theta(&uniform, 0).is_err());
    }

    #[test]
    fn or_preference_examples() {
        let spec = pd(Unitary4::identity());
        assert!(prefers_or(&spec, Player::One, &basis(3), &basis(1)));
        assert!(!prefers_or(&spec, Player::One, &basis(1), &basis(1)));
        // b3 is closer to b3, b4 is closer to b4: each is "preferred" to the other
        assert!(prefers_or(&spec, Player::One, &basis(3), &basis(4)));
        assert!(prefers_or(&spec, Player::One, &basis(4), &basis(3)));
    }

    #[test]
    fn deviation_condition_examples() {
        let spec = pd(Unitary4::identity());
        let n = basis(4);
        let no_b3 =
            TwoQubitState::new([c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(deviation_dominates(&spec, Player::One, &n, &no_b3));
        let some_b3 =
            TwoQubitState::new([c(0.6, 0.0), c(0.0, 0.0), c(0.8, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(!deviation_dominates(&spec, Player::One, &n, &some_b3));
        assert!(deviation_dominates(&spec, Player::One, &some_b3, &some_b3));
        assert!(!deviation_dominates(
            &spec,
            Player::One,
            &basis(1),
            &basis(3)
        ));
    }

    #[test]
    fn coefficient_examples() {
        let cnot = pd(Unitary4::cnot());
        let got = best_response_coeffs(&cnot, Player::One, &QubitState::zero());
        assert_eq!(
            got[1],
            (
                4,
                CoeffPair {
                    c1: c(0.0, 0.0),
                    c2: c(1.0, 0.0)
                }
            )
        );
        let id = pd(Unitary4::identity());
        let got = best_response_coeffs(&id, Player::One, &QubitState::one());
        assert_eq!(
            got[0],
            (
                3,
                CoeffPair {
                    c1: c(0.0, 0.0),
                    c2: c(0.0, 0.0)
                }
            )
        );
        let got = best_response_coeffs(&id, Player::Two, &QubitState::one());
        assert_eq!(
            got[1],
            (
                4,
                CoeffPair {
                    c1: c(0.0, 0.0),
                    c2: c(1.0, 0.0)
                }
            )
        );
    }

    #[test]
    fn best_response_examples() {
        let br = max_deviation_amplitude(&CoeffPair {
            c1: c(0.0, 0.0),
            c2: c(1.0, 0.0),
        });
        assert_eq!(br.value, 1.0);
        assert_eq!(br.strategy, QubitState::one());
        let br = max_deviation_amplitude(&CoeffPair {
            c1: c(0.0, 0.0),
            c2: c(0.0, 0.0),
        });
        assert_eq!(br.value, 0.0);
        let pair = CoeffPair {
            c1: c(0.6, 0.0),
            c2: c(0.0, 0.8),
        };
        let br = max_deviation_amplitude(&pair);
        assert!((br.value - 1.0).abs() < 1e-15);
        assert!((br.strategy.x() - c(0.6, 0.0)).norm() < 1e-15);
        assert!((br.strategy.y() - c(0.0, -0.8)).norm() < 1e-15);
        assert!((pair.eval(&br.strategy).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn best_response_dominates_an_angle_grid() {
        let pair = CoeffPair {
            c1: c(0.6, 0.0),
            c2: c(0.0, 0.8),
        };
        let n = 200;
        for i in 0..=n {
            for j in 0..n {
                let alpha = PI * i as f64 / n as f64;
                let phi = 2.0 * PI * j as f64 / n as f64;
                let s = crate::qlinalg::from_angles_raw(alpha, phi);
                assert!(pair.eval(&s).norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn verify_examples() {
        let (zero, one) = (QubitState::zero(), QubitState::one());
        let cert = verify_nash(&pd(Unitary4::cnot()), &Play::new(one, zero), 1e-9);
        assert!(cert.verdict && cert.dominant_flag);
        let got: Vec<_> = cert
            .margins
            .iter()
            .map(|m| (m.player, m.target, m.achieved, m.best_response))
            .collect();
        assert_eq!(
            got,
            vec![
                (Player::One, 3, 0.0, 0.0),
                (Player::One, 4, 1.0, 1.0),
                (Player::Two, 2, 0.0, 0.0),
                (Player::Two, 4, 1.0, 1.0),
            ]
        );
        assert!(cert.margins.iter().all(|m| m.margin == 0.0));

        let cert = verify_nash(&pd(Unitary4::identity()), &Play::new(one, one), 1e-9);
        assert!(cert.verdict);
        assert_eq!(cert.worst_margin(), 0.0);

        let cert = verify_nash(&pd(Unitary4::identity()), &Play::new(zero, zero), 1e-9);
        assert!(!cert.verdict && !cert.dominant_flag);
        // with B = |0> the b4 amplitude is y1 y2 = 0 for every A; b3 = y1 x2 fails
        let m3 = cert
            .margins_for(Player::One)
            .find(|m| m.target == 3)
            .unwrap();
        assert_eq!((m3.achieved, m3.best_response), (0.0, 1.0));
        let m4 = cert
            .margins_for(Player::One)
            .find(|m| m.target == 4)
            .unwrap();
        assert_eq!((m4.achieved, m4.best_response), (0.0, 0.0));
    }

    #[test]
    fn target_set_validation() {
        assert_eq!(TargetSet::new(vec![]), Err(TargetError::Empty));
        assert_eq!(TargetSet::new(vec![0]), Err(TargetError::OutOfRange(0)));
        assert_eq!(TargetSet::new(vec![4, 3, 4]).unwrap().as_slice(), &[3, 4]);
    }
}
