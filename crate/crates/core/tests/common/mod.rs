//! Independent oracles and random instance generators shared by the integration tests.
#![allow(dead_code)]

use hierarch_core::game::{MultistageGame, Node, NormalForm, Player, SequentialGame, StaticGame};
use hierarch_core::rational::{int, ratio, zero, Rational};
use hierarch_core::{GameError, LevelWeights};
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a·x ≥ b`.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<Rational>,
    pub b: Rational,
}

/// Feasibility of `{x : rows hold}` by Fourier–Motzkin elimination. Nonnegativity is not
/// implied; add it as rows.
pub fn fm_feasible(mut rows: Vec<Row>, vars: usize) -> bool {
    for j in 0..vars {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.a[j].is_positive() {
                pos.push(r);
            } else if r.a[j].is_negative() {
                neg.push(r);
            } else {
                keep.push(r);
            }
        }
        for p in &pos {
            for n in &neg {
                let (cp, cn) = (-&n.a[j], p.a[j].clone());
                let a = p.a.iter().zip(&n.a).map(|(x, y)| x * &cp + y * &cn).collect();
                let b = &p.b * &cp + &n.b * &cn;
                keep.push(Row { a, b });
            }
        }
        rows = keep;
    }
    rows.iter().all(|r| !r.b.is_positive())
}

/// Independent statement of "some admissible belief makes `action` optimal": free
/// variables are the conditionals `q[t][b]` over `allowed[t]`, `1 ≤ t < k`.
pub fn fm_supports(
    game: &StaticGame,
    player: Player,
    k: usize,
    action: usize,
    allowed: &[Vec<usize>],
    f: &LevelWeights,
) -> bool {
    let opp = player.opponent();
    let n = game.choice_count(opp);
    let head: Vec<Rational> = f.weights()[..k].to_vec();
    let total = head.iter().fold(zero(), |a, w| a + w);
    let mass: Vec<Rational> = head.iter().map(|w| w / &total).collect();
    let mut index = Vec::new();
    for (t, set) in allowed.iter().enumerate().take(k).skip(1) {
        for &b in set {
            index.push((t, b));
        }
    }
    let vars = index.len();
    let mut rows = Vec::new();
    for i in 0..vars {
        let mut a = vec![zero(); vars];
        a[i] = int(1);
        rows.push(Row { a, b: zero() });
    }
    for t in 1..k {
        let a: Vec<Rational> = index.iter().map(|&(s, _)| if s == t { int(1) } else { zero() }).collect();
        rows.push(Row { a: a.clone(), b: int(1) });
        rows.push(Row { a: a.iter().map(|x| -x).collect(), b: int(-1) });
    }
    let v = |own: usize, b: usize| game.value(player, own, b).clone();
    for alt in 0..game.choice_count(player) {
        if alt == action {
            continue;
        }
        // E[v(action) − v(alt)] ≥ 0, level-0 part moved to the right-hand side
        let level_zero: Rational = (0..n).fold(zero(), |acc, b| acc + v(action, b) - v(alt, b));
        let b = -(&mass[0] * level_zero / int(n as i64));
        let a = index.iter().map(|&(t, b)| &mass[t] * (v(action, b) - v(alt, b))).collect();
        rows.push(Row { a, b });
    }
    fm_feasible(rows, vars)
}

pub fn random_rational(rng: &mut TestRng) -> Rational {
    ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3))
}

pub fn random_static_game(rng: &mut TestRng, rows: usize, cols: usize) -> StaticGame {
    let names = |prefix: &str, n: usize| (0..n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>();
    StaticGame::from_fn([names("r", rows), names("c", cols)], |_, _| [random_rational(rng), random_rational(rng)])
        .expect("valid shape")
}

pub fn random_shape_game(rng: &mut TestRng) -> StaticGame {
    let rows = rng.gen_range(2..=4);
    let cols = rng.gen_range(2..=4);
    random_static_game(rng, rows, cols)
}

fn random_node(rng: &mut TestRng, depth: usize, max_depth: usize) -> Node {
    let leaf = depth == max_depth || (depth > 0 && rng.gen_bool(0.3));
    if leaf {
        return Node::Leaf([random_rational(rng), random_rational(rng)]);
    }
    let player = if rng.gen_bool(0.5) { Player::One } else { Player::Two };
    let branching = rng.gen_range(2..=3);
    let moves = (0..branching).map(|i| (format!("m{depth}{i}"), random_node(rng, depth + 1, max_depth))).collect();
    Node::Decision { player, moves }
}

/// Random perfect-information tree with at most 3 decision stages and branching 2 or 3,
/// resampled until each player has at most `cap` strategies.
pub fn random_tree(rng: &mut TestRng, cap: usize) -> (MultistageGame, SequentialGame) {
    loop {
        let depth = rng.gen_range(1..=3);
        let tree = MultistageGame::new(random_node(rng, 0, depth)).expect("root is a decision node");
        match SequentialGame::from_tree(&tree, cap) {
            Ok(seq) => return (tree, seq),
            Err(GameError::InstanceTooLarge { .. }) => continue,
            Err(e) => panic!("unexpected tree error: {e}"),
        }
    }
}

/// A tree with a single decision node.
pub fn random_one_stage_tree(rng: &mut TestRng) -> MultistageGame {
    let player = if rng.gen_bool(0.5) { Player::One } else { Player::Two };
    let branching = rng.gen_range(2..=3);
    let moves =
        (0..branching).map(|i| (format!("m{i}"), Node::Leaf([random_rational(rng), random_rational(rng)]))).collect();
    MultistageGame::new(Node::Decision { player, moves }).expect("valid")
}
