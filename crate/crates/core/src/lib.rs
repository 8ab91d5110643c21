//! Solvers for finite two-player games in which each player has level types `θ_i0..θ_iL`.
//!
//! A level-`k` type believes its opponent is of a lower level, weighted by the truncated
//! level distribution, and that level-0 opponents mix uniformly. The crate computes the
//! one-by-one cognitive hierarchy solution and the iterated elimination that keeps every
//! choice justified by some admissible belief, for static and perfect-information
//! multistage games, with exact rational arithmetic throughout.

#![allow(clippy::needless_range_loop)]

pub mod bayes;
pub mod dynamic;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod levels;
pub mod lp;
pub mod rational;
pub mod solution;
pub mod static_solver;

pub use bayes::{
    build_elaboration, conditional_prior, decision_rule_from_solution, verify_bayesian_equilibrium, BayesError,
    BayesianElaboration, DecisionRule, EquilibriumVerdict, Violation,
};
pub use dynamic::{
    bayes_update, lemma2_beliefs, run_dch, run_delta_kappa_dynamic, sequentially_rational, supports_strategy,
    BeliefLag, ConditionalBeliefs,
};
pub use format::{parse_game, parse_static_game, parse_tree_game, FormatError, GameFile};
pub use game::{
    augment_with_levels, GameError, LevelAugmentedGame, MultistageGame, Node, NormalForm, Player, SequentialGame,
    StaticGame, DEFAULT_STRATEGY_CAP,
};
pub use levels::{
    build_belief_polytope, build_static_belief_polytope, ch_point_belief, poisson_weights, truncated_weights,
    BeliefPolytope, LevelError, LevelWeights, PointBelief,
};
pub use lp::{lp_feasible, Constraint, Feasibility, LinearSystem, Relation};
pub use rational::{parse_rational, Rational};
pub use solution::{compare, detect_ties, Comparison, Procedure, SolveReport, SolverError, Tie, TypeChoiceSet};
pub use static_solver::{perturb_to_generic, run_ch, run_delta_kappa_static, supports_action, Perturbation, Support};
