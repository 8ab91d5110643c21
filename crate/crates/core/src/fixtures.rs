//! Canonical games used in tests, docs and the CLI fixture files.

use crate::game::{MultistageGame, Node, Player, StaticGame};
use crate::rational::int;

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The 2×3 game with rows `a, b` and columns `c, d, e` where the two procedures can
/// disagree at level 2.
pub fn table1() -> StaticGame {
    let cells = [[(1, 1), (2, 2), (8, -1)], [(-4, 2), (3, 1), (0, -1)]];
    StaticGame::from_fn([labels(&["a", "b"]), labels(&["c", "d", "e"])], |r, c| {
        let (v1, v2) = cells[r][c];
        [int(v1), int(v2)]
    })
    .expect("fixture is well formed")
}

/// Two-player guessing game on `0..actions`: the guess closer to 2/3 of the average
/// wins 1 (both win on equal distance).
pub fn beauty_contest(actions: usize) -> StaticGame {
    let names: Vec<String> = (0..actions).map(|a| a.to_string()).collect();
    StaticGame::from_fn([names.clone(), names], |a1, a2| {
        // target = (a1 + a2) / 3; compare 3·|a_i − target| exactly
        let (a1, a2) = (a1 as i64, a2 as i64);
        let d1 = (3 * a1 - (a1 + a2)).abs();
        let d2 = (3 * a2 - (a1 + a2)).abs();
        [int((d1 <= d2) as i64), int((d2 <= d1) as i64)]
    })
    .expect("fixture is well formed")
}

/// Entry game: player 1 stays `Out` for (2,2) or goes `In`; player 2 then picks
/// `L` for (3,1) or `R` for (0,0).
pub fn g_entry() -> MultistageGame {
    let tree = Node::decision(
        Player::One,
        vec![
            ("Out", Node::leaf(int(2), int(2))),
            (
                "In",
                Node::decision(Player::Two, vec![("L", Node::leaf(int(3), int(1))), ("R", Node::leaf(int(0), int(0)))]),
            ),
        ],
    );
    MultistageGame::new(tree).expect("fixture is well formed")
}
