mod common;

use common::*;
use hierarch_core::rational::{int, ratio, Rational};
use hierarch_core::static_solver::{best_responses, supports_action_lp};
use hierarch_core::*;
use proptest::prelude::*;

fn rates() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn scaled(f: &LevelWeights, c: &Rational) -> LevelWeights {
    LevelWeights::new(f.weights().iter().map(|w| w * c).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn truncation_ignores_weight_scale(tau in rates(), seed in any::<u64>()) {
        let f = poisson_weights(&tau, 3).unwrap();
        let g = scaled(&f, &int(7));
        for k in 1..=3 {
            prop_assert_eq!(truncated_weights(&f, k).unwrap(), truncated_weights(&g, k).unwrap());
        }
        let game = augment_with_levels(random_shape_game(&mut rng(seed)), 3).unwrap();
        prop_assert_eq!(run_ch(&game, &f).unwrap().trace, run_ch(&game, &g).unwrap().trace);
        prop_assert_eq!(run_delta_kappa_static(&game, &f).unwrap().trace, run_delta_kappa_static(&game, &g).unwrap().trace);
    }

    #[test]
    fn one_by_one_within_rationalizable(tau in rates(), seed in any::<u64>()) {
        let f = poisson_weights(&tau, 3).unwrap();
        let game = augment_with_levels(random_shape_game(&mut rng(seed)), 3).unwrap();
        let ch = run_ch(&game, &f).unwrap();
        let dk = run_delta_kappa_static(&game, &f).unwrap();
        let cmp = compare(&dk, &ch).unwrap();
        if ch.ties.is_empty() {
            prop_assert!(cmp.equal);
        }
        for p in Player::BOTH {
            prop_assert_eq!(dk.survivors(p, 0).len(), game.base().choice_count(p));
            prop_assert_eq!(ch.survivors(p, 0).len(), game.base().choice_count(p));
        }
    }

    #[test]
    fn elimination_is_monotone_and_certified(tau in rates(), seed in any::<u64>()) {
        let f = poisson_weights(&tau, 3).unwrap();
        let game = augment_with_levels(random_shape_game(&mut rng(seed)), 3).unwrap();
        let dk = run_delta_kappa_static(&game, &f).unwrap();
        for pair in dk.trace.windows(2) {
            for p in Player::BOTH {
                for k in 0..=3 {
                    prop_assert!(pair[1].get(p, k).iter().all(|c| pair[0].get(p, k).contains(c)));
                }
            }
        }
        for w in &dk.witnesses {
            let opp = w.player.opponent();
            let poly = build_belief_polytope(w.level, dk.sets.player(opp), game.base().choice_count(opp), &f).unwrap();
            prop_assert!(poly.contains(&w.belief));
            prop_assert!(best_responses(&game, w.player, w.level, &w.belief).contains(&w.choice));
        }
    }

    #[test]
    fn screening_agrees_with_plain_lp(tau in rates(), seed in any::<u64>()) {
        let f = poisson_weights(&tau, 3).unwrap();
        let mut r = rng(seed);
        let game = augment_with_levels(random_shape_game(&mut r), 3).unwrap();
        let full = TypeChoiceSet::full([game.base().choice_count(Player::One), game.base().choice_count(Player::Two)], 3);
        for p in Player::BOTH {
            let opp = p.opponent();
            for k in 1..=3 {
                let poly = build_belief_polytope(k, full.player(opp), game.base().choice_count(opp), &f).unwrap();
                for a in game.base().choices(p) {
                    let fast = supports_action(&game, p, k, a, &poly).unwrap().is_supported();
                    prop_assert_eq!(fast, supports_action_lp(&game, p, a, &poly).is_supported());
                }
            }
        }
    }

    #[test]
    fn lp_verdict_survives_row_permutation_and_scaling(seed in any::<u64>(), scale in 1i64..=9) {
        use rand::seq::SliceRandom;
        use rand::Rng;
        let mut r = rng(seed);
        let vars = r.gen_range(1..=4);
        let mut system = LinearSystem::with_variables(vars);
        for i in 0..r.gen_range(1..=5) {
            let coeffs = (0..vars).map(|_| random_rational(&mut r)).collect();
            let relation = if i == 0 { Relation::Eq } else { Relation::Ge };
            system.push(Constraint::new(coeffs, relation, random_rational(&mut r)));
        }
        let verdict = lp_feasible(&system);
        if let Some(x) = verdict.witness() {
            prop_assert!(system.is_satisfied_by(x));
        }
        let mut rows = system.constraints().to_vec();
        rows.shuffle(&mut r);
        let mut other = LinearSystem::with_variables(vars);
        for c in rows {
            let s = int(scale);
            other.push(Constraint::new(c.coeffs.iter().map(|a| a * &s).collect(), c.relation, &c.rhs * &s));
        }
        prop_assert_eq!(verdict.is_feasible(), lp_feasible(&other).is_feasible());
    }

    #[test]
    fn perturbation_is_small_and_generic(tau in rates(), seed in any::<u64>()) {
        let f = poisson_weights(&tau, 3).unwrap();
        let base = random_shape_game(&mut rng(seed));
        let eps = ratio(1, 1000);
        let p = perturb_to_generic(&base, &eps, &f, 3).unwrap();
        prop_assert!(p.distance < eps);
        let game = augment_with_levels(p.game, 3).unwrap();
        prop_assert!(run_ch(&game, &f).unwrap().ties.is_empty());
    }
}

#[test]
fn integer_payoff_games_tie_often_yet_stay_nested() {
    // small integer payoffs make ties common
    for seed in 0..60u64 {
        let mut r = rng(seed);
        let game = random_static_game(&mut r, 3, 3);
        let game =
            StaticGame::from_fn([game.actions(Player::One).to_vec(), game.actions(Player::Two).to_vec()], |a, b| {
                [int((a + b) as i64 % 2), int((a * b) as i64 % 2)]
            })
            .unwrap();
        let game = augment_with_levels(game, 3).unwrap();
        let f = poisson_weights(&ratio(3, 2), 3).unwrap();
        let ch = run_ch(&game, &f).unwrap();
        let dk = run_delta_kappa_static(&game, &f).unwrap();
        compare(&dk, &ch).unwrap();
    }
}
