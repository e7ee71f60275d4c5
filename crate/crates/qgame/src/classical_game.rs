//! Two-player, two-strategy normal-form games with strict ordinal preferences.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Player;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("unknown strategy `{label}` for player {player}")]
    UnknownStrategy { player: Player, label: String },
    #[error("player {0} strategy labels must be distinct")]
    DuplicateStrategy(Player),
    #[error("outcome labels in the table must be four distinct labels")]
    DuplicateOutcome,
    #[error(
        "preference order of player {player} must rank exactly the table's outcomes: {reason}"
    )]
    BadPreference { player: Player, reason: String },
    #[error("outcome sets must partition the four outcomes into two pairs")]
    NotAPartition,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Outcome(pub String);

impl Outcome {
    pub fn new(label: impl Into<String>) -> Self {
        Outcome(label.into())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Strict total order over outcomes, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PreferenceOrder {
    ranking: Vec<Outcome>,
}

impl PreferenceOrder {
    pub fn new(ranking: Vec<Outcome>) -> Self {
        Self { ranking }
    }

    pub fn ranking(&self) -> &[Outcome] {
        &self.ranking
    }

    /// Position in the ranking, 0 = most preferred.
    pub fn rank(&self, o: &Outcome) -> Option<usize> {
        self.ranking.iter().position(|r| r == o)
    }

    /// `a ≻ b`. Outcomes missing from the order are never preferred.
    pub fn prefers(&self, a: &Outcome, b: &Outcome) -> bool {
        match (self.rank(a), self.rank(b)) {
            (Some(ra), Some(rb)) => ra < rb,
            _ => false,
        }
    }
}

/// A strategy pair, Player I's label first.
pub type StrategyPair = (String, String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicalGame {
    strategies: [[String; 2]; 2],
    /// `table[i][j]` is the outcome when I plays `strategies[0][i]` and II plays `strategies[1][j]`.
    table: [[Outcome; 2]; 2],
    prefs: [PreferenceOrder; 2],
}

impl ClassicalGame {
    pub fn new(
        strategies: [[String; 2]; 2],
        table: [[Outcome; 2]; 2],
        prefs: [PreferenceOrder; 2],
    ) -> Result<Self, GameError> {
        for p in Player::BOTH {
            let [a, b] = &strategies[p.index()];
            if a == b {
                return Err(GameError::DuplicateStrategy(p));
            }
        }
        let outcomes: HashSet<&Outcome> = table.iter().flatten().collect();
        if outcomes.len() != 4 {
            return Err(GameError::DuplicateOutcome);
        }
        for p in Player::BOTH {
            let ranking = prefs[p.index()].ranking();
            let ranked: HashSet<&Outcome> = ranking.iter().collect();
            if ranking.len() != 4 || ranked.len() != 4 {
                return Err(GameError::BadPreference {
                    player: p,
                    reason: "must list four distinct outcomes".into(),
                });
            }
            if ranked != outcomes {
                return Err(GameError::BadPreference {
                    player: p,
                    reason: "ranks an outcome that is not in the table".into(),
                });
            }
        }
        Ok(Self {
            strategies,
            table,
            prefs,
        })
    }

    /// Prisoner's Dilemma: `P(C,C)=o1, P(C,D)=o2, P(D,C)=o3, P(D,D)=o4`,
    /// I: `o3 ≻ o1 ≻ o4 ≻ o2`, II: `o2 ≻ o1 ≻ o4 ≻ o3`.
    pub fn prisoners_dilemma() -> Self {
        let o = |s: &str| Outcome::new(s);
        let cd = || ["C".to_string(), "D".to_string()];
        Self::new(
            [cd(), cd()],
            [[o("o1"), o("o2")], [o("o3"), o("o4")]],
            [
                PreferenceOrder::new(vec![o("o3"), o("o1"), o("o4"), o("o2")]),
                PreferenceOrder::new(vec![o("o2"), o("o1"), o("o4"), o("o3")]),
            ],
        )
        .expect("prisoner's dilemma preset is well formed")
    }

    pub fn strategies(&self, player: Player) -> &[String; 2] {
        &self.strategies[player.index()]
    }

    pub fn preferences(&self, player: Player) -> &PreferenceOrder {
        &self.prefs[player.index()]
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.table.iter().flatten()
    }

    fn strategy_index(&self, player: Player, label: &str) -> Result<usize, GameError> {
        self.strategies[player.index()]
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| GameError::UnknownStrategy {
                player,
                label: label.to_string(),
            })
    }

    fn cell(&self, i: usize, j: usize) -> &Outcome {
        &self.table[i][j]
    }

    /// Outcome with `own` as `player`'s strategy index and `opp` as the opponent's.
    fn cell_for(&self, player: Player, own: usize, opp: usize) -> &Outcome {
        match player {
            Player::One => self.cell(own, opp),
            Player::Two => self.cell(opp, own),
        }
    }

    pub fn outcome_of(&self, s1: &str, s2: &str) -> Result<&Outcome, GameError> {
        let i = self.strategy_index(Player::One, s1)?;
        let j = self.strategy_index(Player::Two, s2)?;
        Ok(self.cell(i, j))
    }

    /// True iff `s` gives `player` a strictly preferred outcome against every
    /// opponent strategy, compared with the player's other strategy.
    pub fn is_strongly_dominant(&self, player: Player, s: &str) -> Result<bool, GameError> {
        let own = self.strategy_index(player, s)?;
        let alt = 1 - own;
        let pref = self.preferences(player);
        Ok((0..2).all(|opp| {
            pref.prefers(
                self.cell_for(player, own, opp),
                self.cell_for(player, alt, opp),
            )
        }))
    }

    fn check_partition(&self, upper: &[Outcome], lower: &[Outcome]) -> Result<(), GameError> {
        let up: HashSet<&Outcome> = upper.iter().collect();
        let lo: HashSet<&Outcome> = lower.iter().collect();
        let all: HashSet<&Outcome> = self.outcomes().collect();
        let ok = upper.len() == 2
            && lower.len() == 2
            && up.len() == 2
            && lo.len() == 2
            && up.is_disjoint(&lo)
            && up.union(&lo).copied().collect::<HashSet<_>>() == all;
        if ok {
            Ok(())
        } else {
            Err(GameError::NotAPartition)
        }
    }

    /// Set preference read pairwise: every outcome in `upper` is preferred by
    /// `player` over every outcome in `lower`.
    pub fn strict_pairwise_dominance(
        &self,
        player: Player,
        upper: &[Outcome],
        lower: &[Outcome],
    ) -> Result<bool, GameError> {
        self.check_partition(upper, lower)?;
        let pref = self.preferences(player);
        Ok(upper
            .iter()
            .all(|u| lower.iter().all(|l| pref.prefers(u, l))))
    }

    /// Set preference read as dominance structure: some strategy of `player`
    /// yields exactly the `upper` outcomes (one per opponent strategy), and that
    /// strategy is strongly dominant.
    pub fn dominance_induced(
        &self,
        player: Player,
        upper: &[Outcome],
        lower: &[Outcome],
    ) -> Result<bool, GameError> {
        self.check_partition(upper, lower)?;
        let up: HashSet<&Outcome> = upper.iter().collect();
        for own in 0..2 {
            let row: HashSet<&Outcome> =
                (0..2).map(|opp| self.cell_for(player, own, opp)).collect();
            if row == up {
                let label = self.strategies(player)[own].clone();
                return self.is_strongly_dominant(player, &label);
            }
        }
        Ok(false)
    }

    /// True iff `player` strictly prefers the outcome of switching to their
    /// other strategy at play `(i, j)`.
    fn deviation_improves(&self, player: Player, i: usize, j: usize) -> bool {
        let pref = self.preferences(player);
        let here = self.cell(i, j);
        let there = match player {
            Player::One => self.cell(1 - i, j),
            Player::Two => self.cell(i, 1 - j),
        };
        pref.prefers(there, here)
    }

    /// All pure Nash plays, ordered by (Player I index, Player II index) in
    /// strategy declaration order.
    pub fn pure_nash(&self) -> Vec<StrategyPair> {
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                if !self.deviation_improves(Player::One, i, j)
                    && !self.deviation_improves(Player::Two, i, j)
                {
                    out.push((self.strategies[0][i].clone(), self.strategies[1][j].clone()));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Outcome {
        Outcome::new(s)
    }

    fn labels(a: &str, b: &str) -> [String; 2] {
        [a.to_string(), b.to_string()]
    }

    #[test]
    fn pd_outcomes() {
        let g = ClassicalGame::prisoners_dilemma();
        assert_eq!(g.outcome_of("C", "C").unwrap(), &o("o1"));
        assert_eq!(g.outcome_of("C", "D").unwrap(), &o("o2"));
        assert_eq!(g.outcome_of("D", "C").unwrap(), &o("o3"));
        assert_eq!(g.outcome_of("D", "D").unwrap(), &o("o4"));
        assert!(matches!(
            g.outcome_of("X", "C"),
            Err(GameError::UnknownStrategy { .. })
        ));
    }

    #[test]
    fn pd_dominance() {
        let g = ClassicalGame::prisoners_dilemma();
        assert!(g.is_strongly_dominant(Player::One, "D").unwrap());
        assert!(g.is_strongly_dominant(Player::Two, "D").unwrap());
        assert!(!g.is_strongly_dominant(Player::One, "C").unwrap());
        assert!(!g.is_strongly_dominant(Player::Two, "C").unwrap());
    }

    #[test]
    fn pd_dominance_structure_both_readings() {
        let g = ClassicalGame::prisoners_dilemma();
        let (u1, l1) = ([o("o3"), o("o4")], [o("o1"), o("o2")]);
        // o1 ≻ o4 for player I breaks the pairwise reading
        assert!(!g.strict_pairwise_dominance(Player::One, &u1, &l1).unwrap());
        assert!(g.dominance_induced(Player::One, &u1, &l1).unwrap());
        let (u2, l2) = ([o("o2"), o("o4")], [o("o1"), o("o3")]);
        assert!(!g.strict_pairwise_dominance(Player::Two, &u2, &l2).unwrap());
        assert!(g.dominance_induced(Player::Two, &u2, &l2).unwrap());
        // top two outcomes always satisfy the pairwise reading
        assert!(g
            .strict_pairwise_dominance(Player::One, &[o("o3"), o("o1")], &[o("o4"), o("o2")])
            .unwrap());
        assert_eq!(
            g.strict_pairwise_dominance(Player::One, &[o("o3"), o("o3")], &[o("o1"), o("o2")]),
            Err(GameError::NotAPartition)
        );
        assert_eq!(
            g.dominance_induced(Player::One, &[o("o3")], &[o("o1"), o("o2"), o("o4")]),
            Err(GameError::NotAPartition)
        );
    }

    #[test]
    fn dominance_induced_is_false_when_upper_is_not_a_strategy_row() {
        let g = ClassicalGame::prisoners_dilemma();
        // {o1, o4} is a diagonal, not a row of player I
        assert!(!g
            .dominance_induced(Player::One, &[o("o1"), o("o4")], &[o("o2"), o("o3")])
            .unwrap());
    }

    #[test]
    fn pd_nash_is_defect_defect() {
        let g = ClassicalGame::prisoners_dilemma();
        assert_eq!(g.pure_nash(), vec![("D".to_string(), "D".to_string())]);
    }

    #[test]
    fn commonly_best_cell_is_an_equilibrium() {
        let g = ClassicalGame::new(
            [labels("C", "D"), labels("C", "D")],
            [[o("a"), o("b")], [o("c"), o("d")]],
            [
                PreferenceOrder::new(vec![o("a"), o("d"), o("b"), o("c")]),
                PreferenceOrder::new(vec![o("a"), o("d"), o("c"), o("b")]),
            ],
        )
        .unwrap();
        assert!(g.pure_nash().contains(&("C".to_string(), "C".to_string())));
    }

    #[test]
    fn matching_pennies_has_no_pure_equilibrium() {
        let g = ClassicalGame::new(
            [labels("H", "T"), labels("H", "T")],
            [[o("o1"), o("o2")], [o("o3"), o("o4")]],
            [
                PreferenceOrder::new(vec![o("o1"), o("o4"), o("o2"), o("o3")]),
                PreferenceOrder::new(vec![o("o2"), o("o3"), o("o1"), o("o4")]),
            ],
        )
        .unwrap();
        assert!(g.pure_nash().is_empty());
    }

    #[test]
    fn construction_errors() {
        let pd = ClassicalGame::prisoners_dilemma();
        let prefs = [
            pd.preferences(Player::One).clone(),
            pd.preferences(Player::Two).clone(),
        ];
        assert_eq!(
            ClassicalGame::new(
                [labels("C", "C"), labels("C", "D")],
                pd.table.clone(),
                prefs.clone()
            ),
            Err(GameError::DuplicateStrategy(Player::One))
        );
        assert_eq!(
            ClassicalGame::new(
                [labels("C", "D"), labels("C", "D")],
                [[o("o1"), o("o1")], [o("o3"), o("o4")]],
                prefs.clone()
            ),
            Err(GameError::DuplicateOutcome)
        );
        let bad = PreferenceOrder::new(vec![o("o3"), o("o1"), o("o4"), o("o9")]);
        assert!(matches!(
            ClassicalGame::new(
                [labels("C", "D"), labels("C", "D")],
                pd.table.clone(),
                [bad, prefs[1].clone()]
            ),
            Err(GameError::BadPreference {
                player: Player::One,
                ..
            })
        ));
    }
}
