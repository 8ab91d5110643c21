//! Dynamic cognitive hierarchy and dynamic elimination with strong belief, on games given
//! by their strategic form plus the strategies consistent with each history.
//!
//! A type's conditional beliefs come from one initial belief by Bayes' rule. Level-0
//! opponents play every strategy with positive probability, so every history has positive
//! probability and the conditional system is pinned down by the initial belief.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::game::{LevelAugmentedGame, NormalForm, Player, SequentialGame};
use crate::levels::{build_belief_polytope, ch_point_belief, BeliefPolytope, LevelError, LevelWeights, PointBelief};
use crate::lp::{lp_feasible, Constraint, Feasibility, LinearSystem, Relation};
use crate::rational::{int, zero, Rational};
use crate::solution::{Procedure, SolveReport, SolverError, Tie, TypeChoiceSet, Witness};
use crate::static_solver::{check_weights, Support};

/// Whether elimination step `n+1` conditions on the survivors of step `n` or of `n-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeliefLag {
    #[default]
    None,
    One,
}

/// `μ(·|h)` for a type of `player`, conditioning on the opponent strategies that reach `h`.
pub fn bayes_update(
    game: &SequentialGame,
    player: Player,
    belief: &PointBelief,
    history: usize,
) -> Result<PointBelief, SolverError> {
    let reach = game.reaching(player.opponent(), history);
    let mass = belief.rows().iter().flat_map(|row| reach.iter().map(move |&s| &row[s])).fold(zero(), |a, m| a + m);
    if !mass.is_positive() {
        return Err(SolverError::ZeroProbabilityHistory { history });
    }
    let rows = belief
        .rows()
        .iter()
        .map(|row| {
            let mut out = vec![zero(); row.len()];
            for &s in reach {
                out[s] = &row[s] / &mass;
            }
            out
        })
        .collect();
    Ok(PointBelief::from_rows(rows))
}

/// A conditional probability system: one belief per non-terminal history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalBeliefs {
    pub by_history: Vec<PointBelief>,
}

impl ConditionalBeliefs {
    /// Derives every conditional from `initial` by Bayes' rule.
    pub fn from_initial(game: &SequentialGame, player: Player, initial: &PointBelief) -> Result<Self, SolverError> {
        let by_history =
            (0..game.histories().len()).map(|h| bayes_update(game, player, initial, h)).collect::<Result<_, _>>()?;
        Ok(ConditionalBeliefs { by_history })
    }

    pub fn at(&self, history: usize) -> &PointBelief {
        &self.by_history[history]
    }

    /// Checks `μ(E|h) = μ(E|h')·μ(S(h')|h)` for each history `h'` and its parent `h`, and
    /// that `μ(·|h)` lives on strategies reaching `h`.
    pub fn satisfies_chain_rule(&self, game: &SequentialGame, player: Player) -> bool {
        let opp = player.opponent();
        game.histories().iter().enumerate().all(|(h, view)| {
            let belief = &self.by_history[h];
            let on_reach = belief
                .rows()
                .iter()
                .all(|row| row.iter().enumerate().all(|(s, m)| m.is_zero() || game.reaches(opp, h, s)));
            let Some(parent) = view.parent else { return on_reach && belief.is_distribution() };
            let upper = &self.by_history[parent];
            let reach_prob = upper
                .rows()
                .iter()
                .flat_map(|row| game.reaching(opp, h).iter().map(move |&s| &row[s]))
                .fold(zero(), |a, m| a + m);
            on_reach
                && belief.rows().iter().zip(upper.rows()).all(|(row, up)| {
                    row.iter().enumerate().all(|(s, m)| {
                        let expected = if game.reaches(opp, h, s) { up[s].clone() } else { zero() };
                        m * &reach_prob == expected
                    })
                })
        })
    }
}

fn expected_value(game: &SequentialGame, player: Player, own: usize, marginal: &[Rational]) -> Rational {
    marginal
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .fold(zero(), |acc, (b, m)| acc + m * game.value(player, own, b))
}

/// Whether `strategy` maximizes conditional expected payoff at every history it reaches,
/// against every strategy of the player that also reaches that history.
pub fn sequentially_rational(
    game: &LevelAugmentedGame<SequentialGame>,
    player: Player,
    k: usize,
    strategy: usize,
    initial: &PointBelief,
) -> Result<bool, SolverError> {
    if k == 0 {
        return Ok(true);
    }
    let base = game.base();
    for h in 0..base.histories().len() {
        if !base.reaches(player, h, strategy) {
            continue;
        }
        // the conditional is a positive multiple of the restricted initial belief
        let conditional = bayes_update(base, player, initial, h)?.choice_marginal();
        let own = expected_value(base, player, strategy, &conditional);
        for &alt in base.reaching(player, h) {
            if alt != strategy && expected_value(base, player, alt, &conditional) > own {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Strategies sequentially rational for a level-`k` type holding `initial`.
pub fn sequential_best_responses(
    game: &LevelAugmentedGame<SequentialGame>,
    player: Player,
    k: usize,
    initial: &PointBelief,
) -> Result<Vec<usize>, SolverError> {
    let mut out = Vec::new();
    for s in game.base().choices(player) {
        if sequentially_rational(game, player, k, s, initial)? {
            out.push(s);
        }
    }
    Ok(out)
}

fn gains(game: &SequentialGame, player: Player, strategy: usize, alt: usize) -> Vec<Rational> {
    game.choices(player.opponent()).map(|b| game.value(player, strategy, b) - game.value(player, alt, b)).collect()
}

/// Comparisons `(history, alternative)` that a sequentially rational strategy must win.
fn comparisons(game: &SequentialGame, player: Player, strategy: usize) -> Vec<(usize, usize)> {
    (0..game.histories().len())
        .filter(|&h| game.reaches(player, h, strategy))
        .flat_map(|h| game.reaching(player, h).iter().filter(move |&&alt| alt != strategy).map(move |&alt| (h, alt)))
        .collect()
}

fn dominated_at_some_history(
    game: &SequentialGame,
    player: Player,
    strategy: usize,
    polytope: &BeliefPolytope,
) -> bool {
    let opp = player.opponent();
    let masses = polytope.type_masses();
    let level_zero = polytope.level_zero_conditional();
    comparisons(game, player, strategy).into_iter().any(|(h, alt)| {
        let g = gains(game, player, strategy, alt);
        let reach = game.reaching(opp, h);
        let mut best = &masses[0] * &level_zero * reach.iter().fold(zero(), |a, &b| a + &g[b]);
        for t in 1..polytope.owner_level() {
            let top = polytope
                .allowed(t)
                .iter()
                .map(|&b| if game.reaches(opp, h, b) { g[b].clone() } else { zero() })
                .max()
                .expect("nonempty block");
            best += &masses[t] * top;
        }
        best.is_negative()
    })
}

fn support_system(
    game: &SequentialGame,
    player: Player,
    strategy: usize,
    polytope: &BeliefPolytope,
) -> Option<LinearSystem> {
    let opp = player.opponent();
    let vars = polytope.variables();
    let masses = polytope.type_masses();
    let level_zero = polytope.level_zero_conditional();
    let mut system = polytope.linear_system();
    let mut seen = std::collections::HashSet::new();
    for (h, alt) in comparisons(game, player, strategy) {
        let g = gains(game, player, strategy, alt);
        let coeffs: Vec<Rational> =
            vars.iter().map(|&(t, b)| if game.reaches(opp, h, b) { &masses[t] * &g[b] } else { zero() }).collect();
        let reach_sum = game.reaching(opp, h).iter().fold(zero(), |a, &b| a + &g[b]);
        let rhs = -(&masses[0] * &level_zero * reach_sum);
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

/// Exact LP test, without screening, for a belief in `polytope` under which `strategy`
/// is sequentially rational.
pub fn supports_strategy_lp(
    game: &LevelAugmentedGame<SequentialGame>,
    player: Player,
    strategy: usize,
    polytope: &BeliefPolytope,
) -> Support {
    match support_system(game.base(), player, strategy, polytope) {
        None => Support::Unsupported,
        Some(system) => match lp_feasible(&system) {
            Feasibility::Feasible(x) => Support::Supported(polytope.belief_from(&x)),
            Feasibility::Infeasible => Support::Unsupported,
        },
    }
}

/// Whether some initial belief in `polytope` makes `strategy` sequentially rational for
/// a level-`k` type.
pub fn supports_strategy(
    game: &LevelAugmentedGame<SequentialGame>,
    player: Player,
    k: usize,
    strategy: usize,
    polytope: &BeliefPolytope,
) -> Result<Support, SolverError> {
    if k == 0 {
        return Err(LevelError::LevelZero.into());
    }
    if polytope.owner_level() != k {
        return Err(SolverError::Mismatch("polytope level"));
    }
    let assignment: Vec<Rational> = polytope
        .variables()
        .iter()
        .map(|(t, _)| Rational::new(1.into(), (polytope.allowed(*t).len() as i64).into()))
        .collect();
    let uniform = polytope.belief_from(&assignment);
    if sequentially_rational(game, player, k, strategy, &uniform)? {
        return Ok(Support::Supported(uniform));
    }
    if dominated_at_some_history(game.base(), player, strategy, polytope) {
        return Ok(Support::Unsupported);
    }
    Ok(supports_strategy_lp(game, player, strategy, polytope))
}

fn counts(game: &SequentialGame) -> [usize; 2] {
    [game.choice_count(Player::One), game.choice_count(Player::Two)]
}

/// One-by-one dynamic cognitive hierarchy: level `n+1` keeps the strategies sequentially
/// rational against the uniform-over-survivors belief about levels `0..=n`.
pub fn run_dch(game: &LevelAugmentedGame<SequentialGame>, f: &LevelWeights) -> Result<SolveReport, SolverError> {
    check_weights(game, f)?;
    let max = game.max_level();
    let counts = counts(game.base());
    let mut current = TypeChoiceSet::full(counts, max);
    let mut trace = vec![current.clone()];
    let mut ties = Vec::new();
    let mut witnesses = Vec::new();
    for level in 1..=max {
        let mut next = current.clone();
        for player in Player::BOTH {
            let opp = player.opponent();
            let belief = ch_point_belief(level, current.player(opp), counts[opp.index()], f)?;
            let best = sequential_best_responses(game, player, level, &belief)?;
            if best.len() > 1 {
                ties.push(Tie { step: level, player, level, choices: best.clone() });
            }
            for &s in &best {
                witnesses.push(Witness { player, level, choice: s, belief: belief.clone() });
            }
            next.set(player, level, best);
        }
        trace.push(next.clone());
        current = next;
    }
    Ok(SolveReport { procedure: Procedure::Dch, max_level: max, sets: current, trace, ties, witnesses })
}

/// Dynamic elimination: at every step every level keeps the strategies that are
/// sequentially rational under some belief concentrated on the opponent's survivors.
/// With [`BeliefLag::One`], step `n+1` conditions on the survivors of step `n-1`.
pub fn run_delta_kappa_dynamic(
    game: &LevelAugmentedGame<SequentialGame>,
    f: &LevelWeights,
    lag: BeliefLag,
) -> Result<SolveReport, SolverError> {
    check_weights(game, f)?;
    let max = game.max_level();
    let counts = counts(game.base());
    let mut trace = vec![TypeChoiceSet::full(counts, max)];
    let limit = 2 * max + 4;
    for step in 1..=limit {
        let current = trace[step - 1].clone();
        let source = match lag {
            BeliefLag::None => current.clone(),
            BeliefLag::One => trace[step.saturating_sub(2)].clone(),
        };
        let mut next = current.clone();
        let mut witnesses = Vec::new();
        for player in Player::BOTH {
            let opp = player.opponent();
            for k in 1..=max {
                let polytope = build_belief_polytope(k, source.player(opp), counts[opp.index()], f)?;
                let verdicts = current
                    .get(player, k)
                    .par_iter()
                    .map(|&s| supports_strategy(game, player, k, s, &polytope).map(|v| (s, v)))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut kept = Vec::new();
                for (s, verdict) in verdicts {
                    if let Support::Supported(belief) = verdict {
                        kept.push(s);
                        witnesses.push(Witness { player, level: k, choice: s, belief });
                    }
                }
                next.set(player, k, kept);
            }
        }
        let settled = next == current && (lag == BeliefLag::None || source == current);
        trace.push(next.clone());
        if settled {
            return Ok(SolveReport {
                procedure: Procedure::DynamicDeltaKappa,
                max_level: max,
                sets: next,
                trace,
                ties: Vec::new(),
                witnesses,
            });
        }
    }
    Err(SolverError::NoFixedPoint(limit))
}

/// Closed-form conditional beliefs of a level-`k` type of `player` who is uniform over
/// the opponent's `survivors` of each lower level.
///
/// At history `h`, level `t` gets weight `f(t)·|Λ_t ∩ S(h)| / |Λ_t|`, normalized over
/// `t < k`, and within a level the mass is uniform on `Λ_t ∩ S(h)`. This coincides with
/// Bayes updating of [`ch_point_belief`]. Weighting levels by `f(t)` alone, over the
/// levels with some consistent survivor, agrees only when every consistent level has all
/// of its survivors consistent with `h`.
pub fn lemma2_beliefs(
    game: &SequentialGame,
    player: Player,
    k: usize,
    survivors: &[Vec<usize>],
    f: &LevelWeights,
) -> Result<ConditionalBeliefs, SolverError> {
    let opp = player.opponent();
    let n = game.choice_count(opp);
    let masses = crate::levels::truncated_weights(f, k)?;
    let mut by_history = Vec::with_capacity(game.histories().len());
    for h in 0..game.histories().len() {
        let mut rows = vec![vec![zero(); n]; k];
        let mut total = zero();
        for t in 0..k {
            let lambda = &survivors[t];
            let consistent: Vec<usize> = lambda.iter().copied().filter(|&s| game.reaches(opp, h, s)).collect();
            if consistent.is_empty() {
                continue;
            }
            let weight = &masses[t] * int(consistent.len() as i64) / int(lambda.len() as i64);
            let each = &weight / int(consistent.len() as i64);
            for s in consistent {
                rows[t][s] = each.clone();
            }
            total += weight;
        }
        if !total.is_positive() {
            return Err(SolverError::ZeroProbabilityHistory { history: h });
        }
        for m in rows.iter_mut().flatten() {
            *m /= &total;
        }
        by_history.push(PointBelief::from_rows(rows));
    }
    Ok(ConditionalBeliefs { by_history })
}
