//! Level distributions and the belief sets they induce for each level type.
//!
//! A level-`k` type (k ≥ 1) believes its opponent is of some level `t < k`, with type
//! probabilities `f^k(t)`, and that a level-0 opponent picks uniformly among all of its
//! choices. Everything else about the belief is free, subject to the support
//! restrictions an elimination step imposes. The resulting set of beliefs is a polytope
//! whose free coordinates are the conditionals `q_t(b)` for `1 ≤ t < k`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lp::{Constraint, LinearSystem, Relation};
use crate::rational::{int, sum, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("level 0 has no belief restriction")]
    LevelZero,
    #[error("level {level} exceeds the largest weighted level {max}")]
    LevelAboveMax { level: usize, max: usize },
    #[error("level weight {index} is not positive")]
    NonPositiveWeight { index: usize },
    #[error("need weights for at least levels 0 and 1, got {0}")]
    TooFewWeights(usize),
    #[error("poisson rate must be positive")]
    NonPositiveRate,
    #[error("no allowed opponent choice for level-{level} opponents")]
    EmptySupport { level: usize },
    #[error("level-0 opponents must be allowed every choice")]
    RestrictedLevelZero,
    #[error("expected allowed sets for {expected} opponent levels, got {found}")]
    WrongBlockCount { expected: usize, found: usize },
    #[error("opponent choice {0} out of range")]
    ChoiceOutOfRange(usize),
}

/// Positive, unnormalized weights `w(0..=L)` standing for a full-support level distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelWeights {
    weights: Vec<Rational>,
}

impl LevelWeights {
    pub fn new(weights: Vec<Rational>) -> Result<Self, LevelError> {
        if weights.len() < 2 {
            return Err(LevelError::TooFewWeights(weights.len()));
        }
        if let Some(index) = weights.iter().position(|w| *w <= zero()) {
            return Err(LevelError::NonPositiveWeight { index });
        }
        Ok(LevelWeights { weights })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn max_level(&self) -> usize {
        self.weights.len() - 1
    }

    /// The distribution over `0..=max_level` obtained by renormalizing the weights.
    pub fn normalized(&self, max_level: usize) -> Result<Vec<Rational>, LevelError> {
        if max_level > self.max_level() {
            return Err(LevelError::LevelAboveMax { level: max_level, max: self.max_level() });
        }
        let kept = &self.weights[..=max_level];
        let total = sum(kept);
        Ok(kept.iter().map(|w| w / &total).collect())
    }

    /// Keeps levels `0..=max_level`.
    pub fn truncate(&self, max_level: usize) -> Result<LevelWeights, LevelError> {
        if max_level > self.max_level() {
            return Err(LevelError::LevelAboveMax { level: max_level, max: self.max_level() });
        }
        LevelWeights::new(self.weights[..=max_level].to_vec())
    }
}

/// Poisson weights `τ^t / t!` for `t = 0..=max_level`, without the `e^{−τ}` factor.
pub fn poisson_weights(tau: &Rational, max_level: usize) -> Result<LevelWeights, LevelError> {
    if *tau <= zero() {
        return Err(LevelError::NonPositiveRate);
    }
    let mut weights = Vec::with_capacity(max_level + 1);
    let mut w = Rational::one();
    for t in 0..=max_level {
        if t > 0 {
            w = w * tau / int(t as i64);
        }
        weights.push(w.clone());
    }
    LevelWeights::new(weights)
}

/// `f^k(t) = w(t) / Σ_{ℓ<k} w(ℓ)` for `t = 0..k`.
pub fn truncated_weights(f: &LevelWeights, k: usize) -> Result<Vec<Rational>, LevelError> {
    if k == 0 {
        return Err(LevelError::LevelZero);
    }
    if k > f.max_level() {
        return Err(LevelError::LevelAboveMax { level: k, max: f.max_level() });
    }
    let head = &f.weights[..k];
    let total = sum(head);
    Ok(head.iter().map(|w| w / &total).collect())
}

/// A single belief over (opponent level, opponent choice); `mass(t, b)` is the joint
/// probability `μ(θ_t, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointBelief {
    rows: Vec<Vec<Rational>>,
}

impl PointBelief {
    /// Rows are indexed by opponent level, columns by opponent choice.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        PointBelief { rows }
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Number of opponent levels the belief ranges over.
    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    pub fn choices(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn mass(&self, level: usize, choice: usize) -> &Rational {
        &self.rows[level][choice]
    }

    pub fn type_mass(&self, level: usize) -> Rational {
        sum(&self.rows[level])
    }

    /// Marginal over opponent choices.
    pub fn choice_marginal(&self) -> Vec<Rational> {
        let mut out = vec![zero(); self.choices()];
        for row in &self.rows {
            for (acc, m) in out.iter_mut().zip(row) {
                *acc += m;
            }
        }
        out
    }

    pub fn total(&self) -> Rational {
        self.rows.iter().map(sum).fold(zero(), |a, b| a + b)
    }

    pub fn is_distribution(&self) -> bool {
        self.rows.iter().flatten().all(|m| *m >= zero()) && self.total().is_one()
    }

    /// `(level, choice)` pairs with positive mass.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, row) in self.rows.iter().enumerate() {
            for (b, m) in row.iter().enumerate() {
                if *m > zero() {
                    out.push((t, b));
                }
            }
        }
        out
    }

    /// `μ(·|θ_t)`, or `None` if the level has zero mass.
    pub fn conditional(&self, level: usize) -> Option<Vec<Rational>> {
        let mass = self.type_mass(level);
        if mass.is_zero() {
            return None;
        }
        Some(self.rows[level].iter().map(|m| m / &mass).collect())
    }
}

/// Beliefs of a level-`k` type with fixed level marginals `f^k`, a uniform level-0
/// conditional, and level-`t` conditionals supported within `allowed(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefPolytope {
    owner_level: usize,
    opponent_choices: usize,
    type_masses: Vec<Rational>,
    blocks: Vec<Vec<usize>>,
}

impl BeliefPolytope {
    pub fn owner_level(&self) -> usize {
        self.owner_level
    }

    pub fn opponent_choices(&self) -> usize {
        self.opponent_choices
    }

    /// `f^k(0..k)`.
    pub fn type_masses(&self) -> &[Rational] {
        &self.type_masses
    }

    /// Allowed choices for opponent level `t ≥ 1`.
    pub fn allowed(&self, level: usize) -> &[usize] {
        &self.blocks[level - 1]
    }

    /// Free coordinates `(t, b)` in canonical order: by level, then by choice.
    pub fn variables(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().enumerate().flat_map(|(i, block)| block.iter().map(move |&b| (i + 1, b))).collect()
    }

    pub fn is_singleton(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// The probability `1/|B|` each level-0 opponent choice receives conditionally.
    pub fn level_zero_conditional(&self) -> Rational {
        Rational::new(1.into(), (self.opponent_choices as i64).into())
    }

    /// Block-sum equalities over the free conditionals; variables are nonnegative.
    pub fn linear_system(&self) -> LinearSystem {
        let vars = self.variables();
        let names = vars.iter().map(|(t, b)| format!("q[{t},{b}]")).collect();
        let mut system = LinearSystem::new(names);
        for level in 1..self.owner_level {
            let coeffs = vars.iter().map(|(t, _)| if *t == level { Rational::one() } else { zero() }).collect();
            system.push(Constraint::new(coeffs, Relation::Eq, Rational::one()));
        }
        system
    }

    /// Joint belief from an assignment of the free conditionals (in `variables()` order).
    pub fn belief_from(&self, assignment: &[Rational]) -> PointBelief {
        let n = self.opponent_choices;
        let mut rows = vec![vec![zero(); n]; self.owner_level];
        let uniform = &self.type_masses[0] * self.level_zero_conditional();
        rows[0] = vec![uniform; n];
        for ((t, b), x) in self.variables().into_iter().zip(assignment) {
            rows[t][b] = &self.type_masses[t] * x;
        }
        PointBelief { rows }
    }

    /// Exact membership test.
    pub fn contains(&self, belief: &PointBelief) -> bool {
        if belief.rows.len() != self.owner_level || belief.rows.iter().any(|r| r.len() != self.opponent_choices) {
            return false;
        }
        let uniform = &self.type_masses[0] * self.level_zero_conditional();
        if belief.rows[0].iter().any(|m| *m != uniform) {
            return false;
        }
        for t in 1..self.owner_level {
            let allowed = self.allowed(t);
            let row = &belief.rows[t];
            if row.iter().any(|m| *m < zero()) {
                return false;
            }
            if row.iter().enumerate().any(|(b, m)| !m.is_zero() && allowed.binary_search(&b).is_err()) {
                return false;
            }
            if sum(row) != self.type_masses[t] {
                return false;
            }
        }
        true
    }
}

fn check_sets(k: usize, sets: &[Vec<usize>], opponent_choices: usize) -> Result<(), LevelError> {
    if k == 0 {
        return Err(LevelError::LevelZero);
    }
    if sets.len() < k {
        return Err(LevelError::WrongBlockCount { expected: k, found: sets.len() });
    }
    if sets[0].len() != opponent_choices || sets[0].iter().enumerate().any(|(i, &b)| i != b) {
        return Err(LevelError::RestrictedLevelZero);
    }
    for (level, set) in sets.iter().enumerate().take(k).skip(1) {
        if set.is_empty() {
            return Err(LevelError::EmptySupport { level });
        }
        if let Some(&b) = set.iter().find(|&&b| b >= opponent_choices) {
            return Err(LevelError::ChoiceOutOfRange(b));
        }
    }
    Ok(())
}

fn canonical(set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Belief polytope of a level-`k` type given allowed opponent choices per level.
///
/// `allowed[0]` must be every opponent choice; entries at index `≥ k` are ignored.
/// Works for actions and for full strategies alike.
pub fn build_belief_polytope(
    k: usize,
    allowed: &[Vec<usize>],
    opponent_choices: usize,
    f: &LevelWeights,
) -> Result<BeliefPolytope, LevelError> {
    check_sets(k, allowed, opponent_choices)?;
    let type_masses = truncated_weights(f, k)?;
    let blocks = allowed[1..k].iter().map(|s| canonical(s)).collect();
    Ok(BeliefPolytope { owner_level: k, opponent_choices, type_masses, blocks })
}

/// Static-game form of [`build_belief_polytope`].
pub fn build_static_belief_polytope(
    k: usize,
    allowed: &[Vec<usize>],
    opponent_actions: usize,
    f: &LevelWeights,
) -> Result<BeliefPolytope, LevelError> {
    build_belief_polytope(k, allowed, opponent_actions, f)
}

/// The cognitive-hierarchy belief: level marginals `f^k`, uniform over the survivors of
/// each lower level.
pub fn ch_point_belief(
    k: usize,
    survivors: &[Vec<usize>],
    opponent_choices: usize,
    f: &LevelWeights,
) -> Result<PointBelief, LevelError> {
    check_sets(k, survivors, opponent_choices)?;
    let masses = truncated_weights(f, k)?;
    let rows = (0..k)
        .map(|t| {
            let set = canonical(&survivors[t]);
            let each = &masses[t] / int(set.len() as i64);
            let mut row = vec![zero(); opponent_choices];
            for b in set {
                row[b] = each.clone();
            }
            row
        })
        .collect();
    Ok(PointBelief { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn poisson(num: i64, den: i64, l: usize) -> LevelWeights {
        poisson_weights(&ratio(num, den), l).unwrap()
    }

    #[test]
    fn poisson_weights_are_exact() {
        assert_eq!(poisson(3, 2, 2).weights(), &[int(1), ratio(3, 2), ratio(9, 8)]);
        assert_eq!(poisson(1, 1, 3).weights(), &[int(1), int(1), ratio(1, 2), ratio(1, 6)]);
        assert_eq!(poisson(5, 1, 2).weights(), &[int(1), int(5), ratio(25, 2)]);
        assert_eq!(poisson_weights(&int(0), 2).unwrap_err(), LevelError::NonPositiveRate);
    }

    #[test]
    fn truncation_values() {
        let f = poisson(3, 2, 3);
        assert_eq!(truncated_weights(&f, 1).unwrap(), vec![int(1)]);
        assert_eq!(truncated_weights(&f, 2).unwrap(), vec![ratio(2, 5), ratio(3, 5)]);
        assert_eq!(truncated_weights(&f, 3).unwrap(), vec![ratio(8, 29), ratio(12, 29), ratio(9, 29)]);
        assert_eq!(truncated_weights(&f, 0).unwrap_err(), LevelError::LevelZero);
        assert_eq!(truncated_weights(&f, 4).unwrap_err(), LevelError::LevelAboveMax { level: 4, max: 3 });
    }

    #[test]
    fn weights_validation() {
        assert_eq!(LevelWeights::new(vec![int(1)]).unwrap_err(), LevelError::TooFewWeights(1));
        assert_eq!(LevelWeights::new(vec![int(1), int(0)]).unwrap_err(), LevelError::NonPositiveWeight { index: 1 });
    }

    #[test]
    fn level_one_polytope_is_the_uniform_point() {
        let f = poisson(3, 2, 2);
        let poly = build_static_belief_polytope(1, &[vec![0, 1, 2]], 3, &f).unwrap();
        assert!(poly.variables().is_empty());
        assert!(poly.is_singleton());
        let only = poly.belief_from(&[]);
        assert_eq!(only.rows(), &[vec![ratio(1, 3); 3]]);
        let ch = ch_point_belief(1, &[vec![0, 1, 2]], 3, &f).unwrap();
        assert_eq!(only, ch);
        assert!(poly.contains(&ch));
    }

    #[test]
    fn level_two_polytope_shape() {
        let f = poisson(3, 2, 2);
        let poly = build_static_belief_polytope(2, &[vec![0, 1, 2], vec![0, 1]], 3, &f).unwrap();
        assert_eq!(poly.type_masses(), &[ratio(2, 5), ratio(3, 5)]);
        assert_eq!(poly.variables(), vec![(1, 0), (1, 1)]);
        let system = poly.linear_system();
        assert_eq!(system.constraints().len(), 1);
        let single = build_static_belief_polytope(2, &[vec![0, 1, 2], vec![1]], 3, &f).unwrap();
        assert!(single.is_singleton());
    }

    #[test]
    fn polytope_rejects_bad_sets() {
        let f = poisson(3, 2, 2);
        assert_eq!(
            build_static_belief_polytope(2, &[vec![0, 1, 2], vec![]], 3, &f).unwrap_err(),
            LevelError::EmptySupport { level: 1 }
        );
        assert_eq!(
            build_static_belief_polytope(2, &[vec![0, 1], vec![0]], 3, &f).unwrap_err(),
            LevelError::RestrictedLevelZero
        );
        assert_eq!(build_static_belief_polytope(0, &[], 3, &f).unwrap_err(), LevelError::LevelZero);
    }

    #[test]
    fn ch_belief_table1_level_two() {
        let f = poisson(3, 2, 2);
        let belief = ch_point_belief(2, &[vec![0, 1, 2], vec![0, 1]], 3, &f).unwrap();
        let third = ratio(2, 5) * ratio(1, 3);
        assert_eq!(belief.rows()[0], vec![third.clone(), third.clone(), third]);
        assert_eq!(belief.rows()[1], vec![ratio(3, 10), ratio(3, 10), zero()]);
        assert!(belief.is_distribution());
        assert_eq!(belief.support(), vec![(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]);
        let single = ch_point_belief(2, &[vec![0, 1, 2], vec![2]], 3, &f).unwrap();
        assert_eq!(single.conditional(1).unwrap(), vec![zero(), zero(), int(1)]);
    }

    #[test]
    fn membership_is_exact() {
        let f = poisson(3, 2, 2);
        let poly = build_static_belief_polytope(2, &[vec![0, 1, 2], vec![0, 1]], 3, &f).unwrap();
        assert!(poly.contains(&poly.belief_from(&[ratio(1, 4), ratio(3, 4)])));
        // mass on a disallowed choice
        assert!(!poly.contains(&poly.belief_from(&[zero(), zero()]).clone_with(1, 2, ratio(3, 5))));
        // wrong level marginal
        assert!(!poly.contains(&poly.belief_from(&[ratio(1, 2), ratio(1, 4)])));
    }

    impl PointBelief {
        fn clone_with(&self, t: usize, b: usize, m: Rational) -> PointBelief {
            let mut rows = self.rows.clone();
            rows[t][b] = m;
            PointBelief { rows }
        }
    }
}
