//! The one-by-one cognitive hierarchy procedure and iterated elimination under the level
//! belief restrictions, for static games.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::game::{augment_with_levels, LevelAugmentedGame, NormalForm, Player, StaticGame};
use crate::levels::{build_belief_polytope, ch_point_belief, BeliefPolytope, LevelError, LevelWeights, PointBelief};
use crate::lp::{lp_feasible, Constraint, Feasibility, LinearSystem, Relation};
use crate::rational::{int, zero, Rational};
use crate::solution::{Procedure, SolveReport, SolverError, Tie, TypeChoiceSet, Witness};

/// Outcome of a "is there a supporting belief" test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Supported(PointBelief),
    Unsupported,
}

impl Support {
    pub fn is_supported(&self) -> bool {
        matches!(self, Support::Supported(_))
    }

    pub fn witness(&self) -> Option<&PointBelief> {
        match self {
            Support::Supported(b) => Some(b),
            Support::Unsupported => None,
        }
    }
}

pub(crate) fn check_weights<G>(game: &LevelAugmentedGame<G>, f: &LevelWeights) -> Result<(), SolverError> {
    if f.max_level() < game.max_level() {
        return Err(SolverError::WeightsTooShort { needed: game.max_level(), available: f.max_level() });
    }
    Ok(())
}

/// Expected payoff of each own choice for a level-`k` type holding `belief`.
pub fn expected_values<G: NormalForm>(
    game: &LevelAugmentedGame<G>,
    player: Player,
    k: usize,
    belief: &PointBelief,
) -> Vec<Rational> {
    let base = game.base();
    let own = base.choice_count(player);
    if k == 0 {
        return vec![zero(); own];
    }
    // payoffs ignore the opponent's level, so only the choice marginal matters
    let marginal = belief.choice_marginal();
    (0..own)
        .map(|a| {
            marginal
                .iter()
                .enumerate()
                .filter(|(_, m)| !m.is_zero())
                .fold(zero(), |acc, (b, m)| acc + m * base.value(player, a, b))
        })
        .collect()
}

/// Own choices maximizing expected payoff against `belief`; all choices at level 0.
pub fn best_responses<G: NormalForm>(
    game: &LevelAugmentedGame<G>,
    player: Player,
    k: usize,
    belief: &PointBelief,
) -> Vec<usize> {
    argmax(&expected_values(game, player, k, belief))
}

pub(crate) fn argmax(values: &[Rational]) -> Vec<usize> {
    let Some(best) = values.iter().max() else { return Vec::new() };
    values.iter().enumerate().filter(|(_, v)| *v == best).map(|(i, _)| i).collect()
}

/// Gain `v(action, b) − v(alt, b)` against each opponent choice `b`.
fn gains<G: NormalForm>(game: &G, player: Player, action: usize, alt: usize) -> Vec<Rational> {
    game.choices(player.opponent()).map(|b| game.value(player, action, b) - game.value(player, alt, b)).collect()
}

/// The belief that is uniform over each allowed block.
fn block_uniform_belief(polytope: &BeliefPolytope) -> PointBelief {
    let assignment: Vec<Rational> = polytope
        .variables()
        .iter()
        .map(|(t, _)| Rational::new(1.into(), (polytope.allowed(*t).len() as i64).into()))
        .collect();
    polytope.belief_from(&assignment)
}

/// True when some single alternative beats `action` under every belief in the polytope.
/// Alternatives in `first` are tried before the rest.
fn dominated_over_polytope<G: NormalForm>(
    game: &G,
    player: Player,
    action: usize,
    polytope: &BeliefPolytope,
    first: &[usize],
) -> bool {
    let masses = polytope.type_masses();
    let level_zero = polytope.level_zero_conditional();
    let rest = game.choices(player).filter(|a| !first.contains(a));
    first.iter().copied().chain(rest).filter(|&alt| alt != action).any(|alt| {
        let g = gains(game, player, action, alt);
        let mut best = &masses[0] * &level_zero * g.iter().fold(zero(), |a, x| a + x);
        for t in 1..polytope.owner_level() {
            let top = polytope.allowed(t).iter().map(|&b| &g[b]).max().expect("nonempty block");
            best += &masses[t] * top;
        }
        best.is_negative()
    })
}

/// Builds the LP: polytope constraints plus `E[u(action)] ≥ E[u(alt)]` for every `alt`.
fn support_system<G: NormalForm>(
    game: &G,
    player: Player,
    action: usize,
    polytope: &BeliefPolytope,
) -> Option<LinearSystem> {
    let vars = polytope.variables();
    let masses = polytope.type_masses();
    let level_zero = polytope.level_zero_conditional();
    let mut system = polytope.linear_system();
    let mut seen = std::collections::HashSet::new();
    for alt in game.choices(player).filter(|&alt| alt != action) {
        let g = gains(game, player, action, alt);
        let coeffs: Vec<Rational> = vars.iter().map(|(t, b)| &masses[*t] * &g[*b]).collect();
        let rhs = -(&masses[0] * &level_zero * g.iter().fold(zero(), |a, x| a + x));
        if coeffs.iter().all(Zero::is_zero) {
            if rhs.is_positive() {
                return None;
            }
            continue;
        }
        if seen.insert((coeffs.clone(), rhs.clone())) {
            system.push(Constraint::new(coeffs, Relation::Ge, rhs));
        }
    }
    Some(system)
}

/// Decides by linear programming alone whether some belief in the polytope makes
/// `action` weakly optimal for a level-`k` type.
pub fn supports_action_lp<G: NormalForm>(
    game: &LevelAugmentedGame<G>,
    player: Player,
    action: usize,
    polytope: &BeliefPolytope,
) -> Support {
    match support_system(game.base(), player, action, polytope) {
        None => Support::Unsupported,
        Some(system) => match lp_feasible(&system) {
            Feasibility::Feasible(x) => Support::Supported(polytope.belief_from(&x)),
            Feasibility::Infeasible => Support::Unsupported,
        },
    }
}

/// The block-uniform belief of a polytope and its best responses, shared by every
/// candidate tested against that polytope.
struct Screen {
    uniform: PointBelief,
    best: Vec<usize>,
}

impl Screen {
    fn new<G: NormalForm>(game: &LevelAugmentedGame<G>, player: Player, polytope: &BeliefPolytope) -> Self {
        let uniform = block_uniform_belief(polytope);
        let best = best_responses(game, player, polytope.owner_level(), &uniform);
        Screen { uniform, best }
    }

    fn decide<G: NormalForm>(
        &self,
        game: &LevelAugmentedGame<G>,
        player: Player,
        action: usize,
        polytope: &BeliefPolytope,
    ) -> Support {
        if self.best.contains(&action) {
            return Support::Supported(self.uniform.clone());
        }
        if dominated_over_polytope(game.base(), player, action, polytope, &self.best) {
            return Support::Unsupported;
        }
        supports_action_lp(game, player, action, polytope)
    }
}

fn check_polytope(k: usize, polytope: &BeliefPolytope) -> Result<(), SolverError> {
    if k == 0 {
        return Err(LevelError::LevelZero.into());
    }
    if polytope.owner_level() != k {
        return Err(SolverError::Mismatch("polytope level"));
    }
    Ok(())
}

/// Whether `action` is a best response for level `k` to some belief in `polytope`.
///
/// Tries the block-uniform belief and a pure-dominance certificate before falling back
/// to the exact LP.
pub fn supports_action<G: NormalForm>(
    game: &LevelAugmentedGame<G>,
    player: Player,
    k: usize,
    action: usize,
    polytope: &BeliefPolytope,
) -> Result<Support, SolverError> {
    check_polytope(k, polytope)?;
    Ok(Screen::new(game, player, polytope).decide(game, player, action, polytope))
}

/// Iterated elimination where every level reasons at every step, each surviving pair
/// being a best response to some admissible belief concentrated on the previous step's
/// survivors. Runs to a fixed point.
pub fn run_delta_kappa_static<G: NormalForm + Sync>(
    game: &LevelAugmentedGame<G>,
    f: &LevelWeights,
) -> Result<SolveReport, SolverError> {
    check_weights(game, f)?;
    let max = game.max_level();
    let counts = [game.base().choice_count(Player::One), game.base().choice_count(Player::Two)];
    let mut current = TypeChoiceSet::full(counts, max);
    let mut trace = vec![current.clone()];
    for _step in 1..=max + 2 {
        let mut next = current.clone();
        let mut witnesses = Vec::new();
        for player in Player::BOTH {
            let opp = player.opponent();
            for k in 1..=max {
                let polytope = build_belief_polytope(k, current.player(opp), counts[opp.index()], f)?;
                let screen = Screen::new(game, player, &polytope);
                let verdicts: Vec<(usize, Support)> = current
                    .get(player, k)
                    .par_iter()
                    .map(|&a| (a, screen.decide(game, player, a, &polytope)))
                    .collect();
                let mut kept = Vec::new();
                for (a, verdict) in verdicts {
                    if let Support::Supported(belief) = verdict {
                        kept.push(a);
                        witnesses.push(Witness { player, level: k, choice: a, belief });
                    }
                }
                next.set(player, k, kept);
            }
        }
        trace.push(next.clone());
        if next == current {
            return Ok(SolveReport {
                procedure: Procedure::DeltaKappa,
                max_level: max,
                sets: next,
                trace,
                ties: Vec::new(),
                witnesses,
            });
        }
        current = next;
    }
    Err(SolverError::NoFixedPoint(max + 2))
}

/// The one-by-one cognitive hierarchy: step `n+1` resolves level `n+1` only, as the best
/// responses to the uniform-over-survivors belief about levels `0..=n`.
pub fn run_ch<G: NormalForm>(game: &LevelAugmentedGame<G>, f: &LevelWeights) -> Result<SolveReport, SolverError> {
    check_weights(game, f)?;
    let max = game.max_level();
    let counts = [game.base().choice_count(Player::One), game.base().choice_count(Player::Two)];
    let mut current = TypeChoiceSet::full(counts, max);
    let mut trace = vec![current.clone()];
    let mut ties = Vec::new();
    let mut witnesses = Vec::new();
    for level in 1..=max {
        let mut next = current.clone();
        for player in Player::BOTH {
            let opp = player.opponent();
            let belief = ch_point_belief(level, current.player(opp), counts[opp.index()], f)?;
            let best = best_responses(game, player, level, &belief);
            if best.len() > 1 {
                ties.push(Tie { step: level, player, level, choices: best.clone() });
            }
            for &a in &best {
                witnesses.push(Witness { player, level, choice: a, belief: belief.clone() });
            }
            next.set(player, level, best);
        }
        trace.push(next.clone());
        current = next;
    }
    Ok(SolveReport { procedure: Procedure::Ch, max_level: max, sets: current, trace, ties, witnesses })
}

/// A payoff increment applied while breaking a tie.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bump {
    pub step: usize,
    pub player: Player,
    pub action: usize,
    pub opponent_action: usize,
    #[serde(serialize_with = "crate::format::serialize_rational")]
    pub amount: Rational,
}

#[derive(Debug, Clone)]
pub struct Perturbation {
    pub game: StaticGame,
    pub bumps: Vec<Bump>,
    /// Σ over profiles and players of the absolute payoff change.
    pub distance: Rational,
}

/// Smallest positive gap between the best and the next-best expected value among the
/// one-by-one decisions of `player` at levels `1..below`.
fn smallest_gap(
    game: &LevelAugmentedGame<StaticGame>,
    report: &SolveReport,
    f: &LevelWeights,
    player: Player,
    below: usize,
) -> Result<Option<Rational>, SolverError> {
    let opp = player.opponent();
    let n_opp = game.base().choice_count(opp);
    let mut smallest: Option<Rational> = None;
    for level in 1..below {
        let belief = ch_point_belief(level, report.trace[level - 1].player(opp), n_opp, f)?;
        let values = expected_values(game, player, level, &belief);
        let best = values.iter().max().expect("nonempty");
        if let Some(second) = values.iter().filter(|v| *v < best).max() {
            let gap = best - second;
            if smallest.as_ref().is_none_or(|s| gap < *s) {
                smallest = Some(gap);
            }
        }
    }
    Ok(smallest)
}

/// Breaks every tie of the one-by-one run by small payoff increments.
///
/// The earliest tie at step `k` is resolved in favour of its lowest-index tied action by
/// adding `eps / 2^(k+1)` (halved further if needed so that no earlier strict preference
/// of the same player flips) to that action's payoff against the opponent's first action.
/// Repeats until the run is tie-free. Each (step, player) pair is bumped at most once, so
/// the total change stays below `eps`.
pub fn perturb_to_generic(
    game: &StaticGame,
    eps: &Rational,
    f: &LevelWeights,
    max_level: usize,
) -> Result<Perturbation, SolverError> {
    if !eps.is_positive() {
        return Err(SolverError::NonPositiveEpsilon);
    }
    let mut current = game.clone();
    let mut bumps = Vec::new();
    let passes = 2 * max_level + 1;
    for _ in 0..passes {
        let augmented = augment_with_levels(current.clone(), max_level)?;
        let report = run_ch(&augmented, f)?;
        let Some(tie) = report.ties.first() else {
            let distance = current.payoff_distance(game).expect("same shape");
            return Ok(Perturbation { game: current, bumps, distance });
        };
        let mut amount = eps / int(1i64 << (tie.step + 1).min(62));
        if let Some(gap) = smallest_gap(&augmented, &report, f, tie.player, tie.level)? {
            while amount >= gap {
                amount /= int(2);
            }
        }
        let action = tie.choices[0];
        current.add_to_payoff(tie.player, action, 0, &amount);
        bumps.push(Bump { step: tie.step, player: tie.player, action, opponent_action: 0, amount });
    }
    Err(SolverError::PerturbationDiverged(passes))
}
