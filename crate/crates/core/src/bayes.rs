//! The Bayesian game on states `ω_mn` whose subjective priors reproduce the level belief
//! restrictions, and an equilibrium check for decision rules built from CH solutions.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::game::{LevelAugmentedGame, NormalForm, Player, StaticGame};
use crate::levels::{truncated_weights, LevelError, LevelWeights};
use crate::rational::{sum, zero, Rational};
use crate::solution::SolveReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BayesError {
    #[error("epsilon must lie strictly between 0 and 1")]
    EpsilonOutOfRange,
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error("{player} type {level} has zero prior probability")]
    ZeroMarginal { player: Player, level: usize },
    #[error("state ({0},{1}) outside the type range")]
    StateOutOfRange(usize, usize),
    #[error("decision rule does not match the game")]
    RuleShape,
}

/// States `ω_mn` for `m, n ∈ 0..=L`; in state `ω_mn` player 1 has type `t_1m` and player 2
/// type `t_2n`, and type `t_ik` carries payoff type `θ_ik`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BayesianElaboration {
    max_level: usize,
    epsilon: Rational,
    /// `priors[i][m][n]` is `p_i(ω_mn)`, normalized.
    priors: [Vec<Vec<Rational>>; 2],
}

impl BayesianElaboration {
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn prior(&self, player: Player, m: usize, n: usize) -> &Rational {
        &self.priors[player.index()][m][n]
    }

    /// Type of `player` in state `ω_mn`.
    pub fn type_of(&self, player: Player, m: usize, n: usize) -> usize {
        match player {
            Player::One => m,
            Player::Two => n,
        }
    }

    /// `p_i(τ_i = t_ik)`.
    pub fn marginal(&self, player: Player, level: usize) -> Rational {
        let p = &self.priors[player.index()];
        match player {
            Player::One => sum(&p[level]),
            Player::Two => p.iter().map(|row| &row[level]).fold(zero(), |a, m| a + m),
        }
    }
}

/// Builds the priors: for player 1, `eps` at `ω_00`, `(1−eps)·f(m)·f^m(n)` when `n < m`,
/// and 0 otherwise, then normalized; player 2 symmetrically. `f` is the distribution
/// over `0..=L` obtained by renormalizing the weights.
pub fn build_elaboration<G>(
    game: &LevelAugmentedGame<G>,
    f: &LevelWeights,
    eps: &Rational,
) -> Result<BayesianElaboration, BayesError> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(BayesError::EpsilonOutOfRange);
    }
    let max = game.max_level();
    let dist = f.normalized(max)?;
    let rest = Rational::one() - eps;
    let mut own_first = vec![vec![zero(); max + 1]; max + 1];
    own_first[0][0] = eps.clone();
    for m in 1..=max {
        let fm = truncated_weights(f, m)?;
        for (n, w) in fm.iter().enumerate() {
            own_first[m][n] = &rest * &dist[m] * w;
        }
    }
    let total = own_first.iter().flatten().fold(zero(), |a, w| a + w);
    for w in own_first.iter_mut().flatten() {
        *w /= &total;
    }
    let transposed = (0..=max).map(|m| (0..=max).map(|n| own_first[n][m].clone()).collect()).collect();
    Ok(BayesianElaboration { max_level: max, epsilon: eps.clone(), priors: [own_first, transposed] })
}

/// `p_i(·|t_ik)` as a map over the opponent's type, which is all a state adds once the
/// own type is known.
pub fn conditional_prior(el: &BayesianElaboration, player: Player, level: usize) -> Result<Vec<Rational>, BayesError> {
    if level > el.max_level {
        return Err(BayesError::StateOutOfRange(level, level));
    }
    let marginal = el.marginal(player, level);
    if marginal.is_zero() {
        return Err(BayesError::ZeroMarginal { player, level });
    }
    Ok((0..=el.max_level)
        .map(|other| {
            let (m, n) = match player {
                Player::One => (level, other),
                Player::Two => (other, level),
            };
            el.prior(player, m, n) / &marginal
        })
        .collect())
}

/// Mixed action per player and type: `rules[i][k][a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionRule {
    rules: [Vec<Vec<Rational>>; 2],
}

impl DecisionRule {
    pub fn new(rules: [Vec<Vec<Rational>>; 2]) -> Self {
        DecisionRule { rules }
    }

    pub fn mixed_action(&self, player: Player, level: usize) -> &[Rational] {
        &self.rules[player.index()][level]
    }

    pub fn mixed_action_mut(&mut self, player: Player, level: usize) -> &mut Vec<Rational> {
        &mut self.rules[player.index()][level]
    }

    /// Actions played with positive probability.
    pub fn support(&self, player: Player, level: usize) -> Vec<usize> {
        self.mixed_action(player, level).iter().enumerate().filter(|(_, p)| p.is_positive()).map(|(a, _)| a).collect()
    }
}

fn uniform_over(set: &[usize], n: usize) -> Vec<Rational> {
    let mut out = vec![zero(); n];
    let each = Rational::new(1.into(), (set.len() as i64).into());
    for &a in set {
        out[a] = each.clone();
    }
    out
}

/// Uniform mixing over each type's surviving actions; level 0 over all actions.
pub fn decision_rule_from_solution(report: &SolveReport) -> DecisionRule {
    let rules = Player::BOTH.map(|p| {
        let all = report.survivors(p, 0).len();
        (0..=report.max_level).map(|k| uniform_over(report.survivors(p, k), all)).collect()
    });
    DecisionRule { rules }
}

/// A type whose rule puts mass on a non-optimal action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub player: Player,
    pub level: usize,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumVerdict {
    pub violations: Vec<Violation>,
    /// Per player and positive-prior type `k ≥ 1`, the expected payoff of each action.
    pub expected: [Vec<Option<Vec<Rational>>>; 2],
}

impl EquilibriumVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Expected payoff of each action of type `t_ik` given its conditional prior and the
/// opponent types' mixed actions.
pub fn interim_values(
    el: &BayesianElaboration,
    rule: &DecisionRule,
    game: &LevelAugmentedGame<StaticGame>,
    player: Player,
    level: usize,
) -> Result<Vec<Rational>, BayesError> {
    let base = game.base();
    let opp = player.opponent();
    let cond = conditional_prior(el, player, level)?;
    let mut opp_marginal = vec![zero(); base.choice_count(opp)];
    for (t, p) in cond.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
        let mix = rule.mixed_action(opp, t);
        if mix.len() != opp_marginal.len() {
            return Err(BayesError::RuleShape);
        }
        for (acc, q) in opp_marginal.iter_mut().zip(mix) {
            *acc += p * q;
        }
    }
    Ok(base
        .choices(player)
        .map(|a| {
            (0..opp_marginal.len())
                .fold(zero(), |acc, b| acc + &opp_marginal[b] * game.choice_utility(player, level, a, b))
        })
        .collect())
}

/// Checks `supp σ_i(t) ⊆ argmax` for every positive-prior type; level-0 types have constant
/// payoff and pass trivially.
pub fn verify_bayesian_equilibrium(
    el: &BayesianElaboration,
    rule: &DecisionRule,
    game: &LevelAugmentedGame<StaticGame>,
) -> Result<EquilibriumVerdict, BayesError> {
    if el.max_level != game.max_level() {
        return Err(BayesError::RuleShape);
    }
    let mut violations = Vec::new();
    let mut expected = [vec![None; el.max_level + 1], vec![None; el.max_level + 1]];
    for player in Player::BOTH {
        if rule.rules[player.index()].len() != el.max_level + 1 {
            return Err(BayesError::RuleShape);
        }
        for level in 1..=el.max_level {
            if el.marginal(player, level).is_zero() {
                continue;
            }
            let values = interim_values(el, rule, game, player, level)?;
            let best = values.iter().max().cloned().unwrap_or_else(zero);
            for a in rule.support(player, level) {
                if values[a] < best {
                    violations.push(Violation { player, level, action: a });
                }
            }
            expected[player.index()][level] = Some(values);
        }
    }
    Ok(EquilibriumVerdict { violations, expected })
}

/// Actions each player's type may choose in state `ω_mn`.
pub fn state_play(
    el: &BayesianElaboration,
    rule: &DecisionRule,
    m: usize,
    n: usize,
) -> Result<[Vec<usize>; 2], BayesError> {
    if m > el.max_level || n > el.max_level {
        return Err(BayesError::StateOutOfRange(m, n));
    }
    Ok([rule.support(Player::One, m), rule.support(Player::Two, n)])
}

/// `1/|A|` vector, used by callers assembling rules by hand.
pub fn uniform_mixed_action(actions: usize) -> Vec<Rational> {
    vec![Rational::new(1.into(), (actions as i64).into()); actions]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{beauty_contest, table1};
    use crate::game::augment_with_levels;
    use crate::levels::poisson_weights;
    use crate::rational::{int, ratio};
    use crate::static_solver::run_ch;

    fn setup(tau: Rational, l: usize) -> (LevelAugmentedGame<StaticGame>, LevelWeights) {
        (augment_with_levels(table1(), l).unwrap(), poisson_weights(&tau, l).unwrap())
    }

    #[test]
    fn prior_shape() {
        let (game, f) = setup(ratio(3, 2), 2);
        let eps = ratio(1, 10);
        let el = build_elaboration(&game, &f, &eps).unwrap();
        // unnormalized: eps, then (1-eps) f(m) f^m(n) with f = (8/29, 12/29, 9/29)
        let raw_21 = ratio(9, 10) * ratio(9, 29) * ratio(3, 5);
        let raw_total = ratio(1, 10) + ratio(9, 10) * (int(1) - ratio(8, 29));
        assert_eq!(*el.prior(Player::One, 2, 1), &raw_21 / &raw_total);
        assert_eq!(*el.prior(Player::One, 0, 0), ratio(1, 10) / &raw_total);
        assert!(el.prior(Player::One, 1, 2).is_zero());
        assert!(el.prior(Player::One, 1, 1).is_zero());
        assert!(el.prior(Player::One, 0, 1).is_zero());
        assert!(el.prior(Player::Two, 2, 1).is_zero());
        assert_eq!(el.prior(Player::Two, 1, 2), el.prior(Player::One, 2, 1));
        for p in Player::BOTH {
            assert_eq!((0..=2).map(|k| el.marginal(p, k)).fold(zero(), |a, b| a + b), int(1));
        }
        assert!(build_elaboration(&game, &f, &int(1)).is_err());
        assert!(build_elaboration(&game, &f, &zero()).is_err());
    }

    #[test]
    fn conditional_priors_recover_level_beliefs() {
        let (game, f) = setup(ratio(3, 2), 2);
        let el = build_elaboration(&game, &f, &ratio(1, 10)).unwrap();
        assert_eq!(conditional_prior(&el, Player::One, 0).unwrap(), vec![int(1), zero(), zero()]);
        assert_eq!(conditional_prior(&el, Player::Two, 1).unwrap(), vec![int(1), zero(), zero()]);
        for p in Player::BOTH {
            for m in 1..=2 {
                let mut expected = truncated_weights(&f, m).unwrap();
                expected.resize(3, zero());
                assert_eq!(conditional_prior(&el, p, m).unwrap(), expected);
            }
        }
    }

    #[test]
    fn table1_ch_rule_is_an_equilibrium() {
        let (game, f) = setup(ratio(3, 2), 2);
        let report = run_ch(&game, &f).unwrap();
        let mut rule = decision_rule_from_solution(&report);
        assert_eq!(rule.mixed_action(Player::Two, 1), &[ratio(1, 2), ratio(1, 2), zero()]);
        assert_eq!(rule.mixed_action(Player::Two, 0), &[ratio(1, 3), ratio(1, 3), ratio(1, 3)]);
        let el = build_elaboration(&game, &f, &ratio(1, 10)).unwrap();
        let verdict = verify_bayesian_equilibrium(&el, &rule, &game).unwrap();
        assert!(verdict.passed());
        assert_eq!(verdict.expected[1][2].as_ref().unwrap()[1], ratio(9, 5));

        *rule.mixed_action_mut(Player::Two, 2) = vec![zero(), ratio(1, 2), ratio(1, 2)];
        let verdict = verify_bayesian_equilibrium(&el, &rule, &game).unwrap();
        assert_eq!(verdict.violations, vec![Violation { player: Player::Two, level: 2, action: 2 }]);
    }

    #[test]
    fn beauty_contest_state() {
        let game = augment_with_levels(beauty_contest(21), 7).unwrap();
        let f = poisson_weights(&ratio(3, 2), 7).unwrap();
        let report = run_ch(&game, &f).unwrap();
        let rule = decision_rule_from_solution(&report);
        let el = build_elaboration(&game, &f, &ratio(1, 10)).unwrap();
        assert!(verify_bayesian_equilibrium(&el, &rule, &game).unwrap().passed());
        assert_eq!(state_play(&el, &rule, 5, 7).unwrap(), [vec![0], vec![0]]);
        assert!(state_play(&el, &rule, 8, 0).is_err());
        assert_eq!(uniform_mixed_action(4), vec![ratio(1, 4); 4]);
    }
}
