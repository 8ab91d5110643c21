//! Surviving type-choice sets, run reports, and the comparison of two procedures.

use serde::Serialize;
use thiserror::Error;

use crate::game::{GameError, Player};
use crate::levels::{LevelError, PointBelief};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("level weights cover levels 0..={available} but the game needs 0..={needed}")]
    WeightsTooShort { needed: usize, available: usize },
    #[error("reports disagree on {0}")]
    Mismatch(&'static str),
    #[error("subset violated: {player} level {level} keeps choice {choice} in the one-by-one run but not in the rationalization run")]
    SubsetViolation { player: Player, level: usize, choice: usize },
    #[error("history {history} has zero prior probability under the given belief")]
    ZeroProbabilityHistory { history: usize },
    #[error("elimination did not reach a fixed point within {0} steps")]
    NoFixedPoint(usize),
    #[error("tie breaking did not converge after {0} passes")]
    PerturbationDiverged(usize),
    #[error("perturbation size must be positive")]
    NonPositiveEpsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Procedure {
    /// One-by-one cognitive hierarchy on a static game.
    Ch,
    /// Iterated elimination under the level belief restrictions, static game.
    DeltaKappa,
    /// One-by-one cognitive hierarchy with sequential rationality.
    Dch,
    /// Iterated elimination with strong belief, multistage game.
    DynamicDeltaKappa,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::Ch => "ch",
            Procedure::DeltaKappa => "dkr",
            Procedure::Dch => "dch",
            Procedure::DynamicDeltaKappa => "ddkr",
        }
    }

    pub fn is_one_by_one(self) -> bool {
        matches!(self, Procedure::Ch | Procedure::Dch)
    }
}

/// Per player and level, the surviving choices (actions or strategies) in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeChoiceSet {
    sets: [Vec<Vec<usize>>; 2],
}

pub type TypeActionSet = TypeChoiceSet;
pub type TypeStrategySet = TypeChoiceSet;

impl TypeChoiceSet {
    /// Every level keeps every choice.
    pub fn full(choice_counts: [usize; 2], max_level: usize) -> Self {
        let make = |n: usize| vec![(0..n).collect::<Vec<_>>(); max_level + 1];
        TypeChoiceSet { sets: [make(choice_counts[0]), make(choice_counts[1])] }
    }

    pub fn max_level(&self) -> usize {
        self.sets[0].len() - 1
    }

    pub fn get(&self, player: Player, level: usize) -> &[usize] {
        &self.sets[player.index()][level]
    }

    /// All level sections of one player.
    pub fn player(&self, player: Player) -> &[Vec<usize>] {
        &self.sets[player.index()]
    }

    pub fn set(&mut self, player: Player, level: usize, mut choices: Vec<usize>) {
        choices.sort_unstable();
        choices.dedup();
        self.sets[player.index()][level] = choices;
    }
}

/// A step where the one-by-one procedure found several optimal choices for the level
/// being resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tie {
    pub step: usize,
    pub player: Player,
    pub level: usize,
    pub choices: Vec<usize>,
}

/// A belief under which `choice` is optimal (sequentially optimal, for strategies) for
/// the given level type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub player: Player,
    pub level: usize,
    pub choice: usize,
    pub belief: PointBelief,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub procedure: Procedure,
    pub max_level: usize,
    pub sets: TypeChoiceSet,
    /// `trace[n]` is the snapshot after step `n`; `trace[0]` keeps everything.
    pub trace: Vec<TypeChoiceSet>,
    pub ties: Vec<Tie>,
    /// One entry per surviving pair with level ≥ 1.
    pub witnesses: Vec<Witness>,
}

impl SolveReport {
    pub fn survivors(&self, player: Player, level: usize) -> &[usize] {
        self.sets.get(player, level)
    }

    /// Number of steps performed.
    pub fn steps(&self) -> usize {
        self.trace.len() - 1
    }

    pub fn witness(&self, player: Player, level: usize, choice: usize) -> Option<&Witness> {
        self.witnesses.iter().find(|w| w.player == player && w.level == level && w.choice == choice)
    }
}

/// `(step, player, level)` points where the one-by-one run had multiple optimal choices.
pub fn detect_ties(report: &SolveReport) -> Vec<Tie> {
    report.ties.clone()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub player: Player,
    pub level: usize,
    pub one_by_one: Vec<usize>,
    pub rationalizable: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub equal: bool,
    pub divergences: Vec<Divergence>,
    pub tie_detected: bool,
}

/// Checks that every one-by-one survivor is rationalizable and lists where the two
/// runs differ. A subset breach is reported as an error.
pub fn compare(rationalizable: &SolveReport, one_by_one: &SolveReport) -> Result<Comparison, SolverError> {
    if rationalizable.max_level != one_by_one.max_level {
        return Err(SolverError::Mismatch("max level"));
    }
    if !one_by_one.procedure.is_one_by_one() || rationalizable.procedure.is_one_by_one() {
        return Err(SolverError::Mismatch("procedure kinds"));
    }
    let mut divergences = Vec::new();
    for player in Player::BOTH {
        for level in 0..=one_by_one.max_level {
            let small = one_by_one.survivors(player, level);
            let big = rationalizable.survivors(player, level);
            if let Some(&choice) = small.iter().find(|c| big.binary_search(c).is_err()) {
                return Err(SolverError::SubsetViolation { player, level, choice });
            }
            if small != big {
                divergences.push(Divergence {
                    player,
                    level,
                    one_by_one: small.to_vec(),
                    rationalizable: big.to_vec(),
                });
            }
        }
    }
    Ok(Comparison { equal: divergences.is_empty(), divergences, tie_detected: !one_by_one.ties.is_empty() })
}
