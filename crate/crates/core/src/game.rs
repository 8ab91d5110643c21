//! Static games, perfect-information multistage games, and their level-augmented versions.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rational::{zero, Rational};

/// Default ceiling on the number of full strategies enumerated for one player.
pub const DEFAULT_STRATEGY_CAP: usize = 4096;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    /// 1-based number used in files and reports.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u64) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("{0} has no actions")]
    NoActions(Player),
    #[error("duplicate action `{label}` for {player}")]
    DuplicateLabel { player: Player, label: String },
    #[error("payoff matrix has {found} rows, expected {expected}")]
    RowCount { found: usize, expected: usize },
    #[error("payoff row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("max level must be at least 1 (level 0 alone has no strategic type)")]
    NoStrategicLevel,
    #[error("level {level} exceeds max level {max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("game tree has no decision node")]
    EmptyGame,
    #[error("decision node at {0} has no moves")]
    EmptyMoves(String),
    #[error("duplicate move `{label}` at {at}")]
    DuplicateMove { at: String, label: String },
    #[error("strategy space of {player} exceeds the cap of {cap}")]
    InstanceTooLarge { player: Player, cap: usize },
    #[error("no terminal history {0}")]
    UnknownTerminal(String),
    #[error("choice index {index} out of range for {player}")]
    ChoiceOutOfRange { player: Player, index: usize },
}

/// Finite two-player payoff table indexed by each player's own choice and the opponent's.
///
/// Implemented by static games (choices are actions) and by the strategic form of a
/// multistage game (choices are full strategies).
pub trait NormalForm {
    fn choice_count(&self, player: Player) -> usize;
    fn choice_label(&self, player: Player, choice: usize) -> &str;
    /// `v_i` when `player` picks `own` and the opponent picks `opp`.
    fn value(&self, player: Player, own: usize, opp: usize) -> &Rational;

    fn choices(&self, player: Player) -> std::ops::Range<usize> {
        0..self.choice_count(player)
    }

    fn choice_index(&self, player: Player, label: &str) -> Option<usize> {
        self.choices(player).find(|&c| self.choice_label(player, c) == label)
    }
}

/// A finite two-player game in matrix form; rows are player 1's actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticGame {
    actions: [Vec<String>; 2],
    payoffs: Vec<Vec<[Rational; 2]>>,
}

impl StaticGame {
    pub fn new(actions: [Vec<String>; 2], payoffs: Vec<Vec<[Rational; 2]>>) -> Result<Self, GameError> {
        for player in Player::BOTH {
            let labels = &actions[player.index()];
            if labels.is_empty() {
                return Err(GameError::NoActions(player));
            }
            let mut seen = HashSet::new();
            for label in labels {
                if !seen.insert(label.as_str()) {
                    return Err(GameError::DuplicateLabel { player, label: label.clone() });
                }
            }
        }
        if payoffs.len() != actions[0].len() {
            return Err(GameError::RowCount { found: payoffs.len(), expected: actions[0].len() });
        }
        for (row, cells) in payoffs.iter().enumerate() {
            if cells.len() != actions[1].len() {
                return Err(GameError::Ragged { row, found: cells.len(), expected: actions[1].len() });
            }
        }
        Ok(StaticGame { actions, payoffs })
    }

    /// Builds a game from a payoff function over `(row, column)` indices.
    pub fn from_fn(
        actions: [Vec<String>; 2],
        mut payoff: impl FnMut(usize, usize) -> [Rational; 2],
    ) -> Result<Self, GameError> {
        let payoffs = (0..actions[0].len()).map(|r| (0..actions[1].len()).map(|c| payoff(r, c)).collect()).collect();
        StaticGame::new(actions, payoffs)
    }

    pub fn actions(&self, player: Player) -> &[String] {
        &self.actions[player.index()]
    }

    /// Payoff pair `(v_1, v_2)` at the profile `(row, col)`.
    pub fn payoff(&self, row: usize, col: usize) -> &[Rational; 2] {
        &self.payoffs[row][col]
    }

    pub fn rows(&self) -> &[Vec<[Rational; 2]>] {
        &self.payoffs
    }

    /// Adds `delta` to `player`'s payoff when they pick `own` against `opp`.
    pub fn add_to_payoff(&mut self, player: Player, own: usize, opp: usize, delta: &Rational) {
        let (row, col) = match player {
            Player::One => (own, opp),
            Player::Two => (opp, own),
        };
        self.payoffs[row][col][player.index()] += delta;
    }

    /// Σ over profiles and players of `|v_i(a) − v'_i(a)|`; `None` when shapes differ.
    pub fn payoff_distance(&self, other: &StaticGame) -> Option<Rational> {
        if self.actions != other.actions {
            return None;
        }
        let mut total = zero();
        for (r1, r2) in self.payoffs.iter().zip(&other.payoffs) {
            for (c1, c2) in r1.iter().zip(r2) {
                for i in 0..2 {
                    let d = &c1[i] - &c2[i];
                    total += if d < zero() { -d } else { d };
                }
            }
        }
        Some(total)
    }
}

impl NormalForm for StaticGame {
    fn choice_count(&self, player: Player) -> usize {
        self.actions[player.index()].len()
    }

    fn choice_label(&self, player: Player, choice: usize) -> &str {
        &self.actions[player.index()][choice]
    }

    fn value(&self, player: Player, own: usize, opp: usize) -> &Rational {
        match player {
            Player::One => &self.payoffs[own][opp][0],
            Player::Two => &self.payoffs[opp][own][1],
        }
    }
}

/// A node of a perfect-information game tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Decision { player: Player, moves: Vec<(String, Node)> },
    Leaf([Rational; 2]),
}

impl Node {
    pub fn decision(player: Player, moves: Vec<(&str, Node)>) -> Node {
        Node::Decision { player, moves: moves.into_iter().map(|(l, n)| (l.to_string(), n)).collect() }
    }

    pub fn leaf(v1: Rational, v2: Rational) -> Node {
        Node::Leaf([v1, v2])
    }
}

/// A finite two-player multistage game with perfect information.
///
/// Moves at every node are kept in lexicographic label order so that history and
/// strategy enumeration is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultistageGame {
    root: Node,
}

impl MultistageGame {
    pub fn new(root: Node) -> Result<Self, GameError> {
        if matches!(root, Node::Leaf(_)) {
            return Err(GameError::EmptyGame);
        }
        let mut root = root;
        normalize(&mut root, &mut Vec::new())?;
        Ok(MultistageGame { root })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Payoffs at the terminal history reached by following `path` from the root.
    pub fn terminal_payoff<S: AsRef<str>>(&self, path: &[S]) -> Result<&[Rational; 2], GameError> {
        let mut node = &self.root;
        for step in path {
            match node {
                Node::Decision { moves, .. } => {
                    node = moves
                        .iter()
                        .find(|(label, _)| label == step.as_ref())
                        .map(|(_, child)| child)
                        .ok_or_else(|| GameError::UnknownTerminal(path_label(path)))?;
                }
                Node::Leaf(_) => return Err(GameError::UnknownTerminal(path_label(path))),
            }
        }
        match node {
            Node::Leaf(payoff) => Ok(payoff),
            Node::Decision { .. } => Err(GameError::UnknownTerminal(path_label(path))),
        }
    }
}

fn normalize(node: &mut Node, path: &mut Vec<String>) -> Result<(), GameError> {
    if let Node::Decision { moves, .. } = node {
        if moves.is_empty() {
            return Err(GameError::EmptyMoves(path_label(path)));
        }
        moves.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in moves.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(GameError::DuplicateMove { at: path_label(path), label: pair[0].0.clone() });
            }
        }
        for (label, child) in moves.iter_mut() {
            path.push(label.clone());
            normalize(child, path)?;
            path.pop();
        }
    }
    Ok(())
}

/// `∅` for the root, otherwise `(a,b,...)`.
pub fn path_label<S: AsRef<str>>(path: &[S]) -> String {
    if path.is_empty() {
        "∅".to_string()
    } else {
        let parts: Vec<&str> = path.iter().map(|s| s.as_ref()).collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Successor {
    History(usize),
    Terminal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub path: Vec<String>,
    pub parent: Option<usize>,
    pub active: Player,
    pub moves: Vec<(String, Successor)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminal {
    pub path: Vec<String>,
    pub parent: usize,
    pub payoff: [Rational; 2],
}

/// A full strategy: one action at every history where the owner is active.
///
/// Histories where the owner is inactive carry an implicit "wait" and are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strategy {
    owner: Player,
    choices: Vec<(usize, String)>,
}

impl Strategy {
    pub fn owner(&self) -> Player {
        self.owner
    }

    /// `(history id, action)` pairs in history order.
    pub fn choices(&self) -> &[(usize, String)] {
        &self.choices
    }

    pub fn action_at(&self, history: usize) -> Option<&str> {
        self.choices.binary_search_by_key(&history, |(h, _)| *h).ok().map(|i| self.choices[i].1.as_str())
    }

    /// Dot-joined actions in history order, or `wait` for a player who never moves.
    pub fn label(&self) -> String {
        if self.choices.is_empty() {
            "wait".to_string()
        } else {
            self.choices.iter().map(|(_, a)| a.as_str()).collect::<Vec<_>>().join(".")
        }
    }
}

/// Enumeration of a tree's histories, strategies, and the strategy sets `S_i(h)`.
#[derive(Debug, Clone)]
pub struct HistoryIndex {
    histories: Vec<History>,
    terminals: Vec<Terminal>,
    strategies: [Vec<Strategy>; 2],
    reaching: Vec<[Vec<usize>; 2]>,
}

struct Skeleton {
    histories: Vec<History>,
    terminals: Vec<Terminal>,
}

fn skeleton(game: &MultistageGame) -> Skeleton {
    fn walk(node: &Node, path: &mut Vec<String>, parent: Option<usize>, out: &mut Skeleton) -> Successor {
        match node {
            Node::Leaf(payoff) => {
                out.terminals.push(Terminal {
                    path: path.clone(),
                    parent: parent.expect("root is a decision node"),
                    payoff: payoff.clone(),
                });
                Successor::Terminal(out.terminals.len() - 1)
            }
            Node::Decision { player, moves } => {
                let id = out.histories.len();
                out.histories.push(History { path: path.clone(), parent, active: *player, moves: Vec::new() });
                let mut successors = Vec::with_capacity(moves.len());
                for (label, child) in moves {
                    path.push(label.clone());
                    let succ = walk(child, path, Some(id), out);
                    path.pop();
                    successors.push((label.clone(), succ));
                }
                out.histories[id].moves = successors;
                Successor::History(id)
            }
        }
    }
    let mut out = Skeleton { histories: Vec::new(), terminals: Vec::new() };
    walk(game.root(), &mut Vec::new(), None, &mut out);
    out
}

fn strategies_of(histories: &[History], player: Player, cap: usize) -> Result<Vec<Strategy>, GameError> {
    let active: Vec<&History> = histories.iter().filter(|h| h.active == player).collect();
    let ids: Vec<usize> = histories.iter().enumerate().filter(|(_, h)| h.active == player).map(|(i, _)| i).collect();
    let mut count: usize = 1;
    for h in &active {
        count = count
            .checked_mul(h.moves.len())
            .filter(|&c| c <= cap)
            .ok_or(GameError::InstanceTooLarge { player, cap })?;
    }
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; active.len()];
    for _ in 0..count {
        let choices = ids.iter().zip(&active).zip(&digits).map(|((&id, h), &d)| (id, h.moves[d].0.clone())).collect();
        out.push(Strategy { owner: player, choices });
        // odometer, last history least significant
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < active[pos].moves.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(out)
}

/// All full strategies of `player`, lexicographic in history order then action order.
pub fn enumerate_strategies(game: &MultistageGame, player: Player, cap: usize) -> Result<Vec<Strategy>, GameError> {
    strategies_of(&skeleton(game).histories, player, cap)
}

/// Enumerates histories, terminal histories, strategies, and `S_i(h)` for every history.
pub fn enumerate_histories(game: &MultistageGame, cap: usize) -> Result<HistoryIndex, GameError> {
    let Skeleton { histories, terminals } = skeleton(game);
    let strategies = [strategies_of(&histories, Player::One, cap)?, strategies_of(&histories, Player::Two, cap)?];
    let reaching = (0..histories.len())
        .map(|h| {
            // (ancestor id, action taken there) along the path to h
            let mut constraints = Vec::new();
            let mut cur = h;
            while let Some(parent) = histories[cur].parent {
                let action = histories[cur].path[histories[parent].path.len()].clone();
                constraints.push((parent, action));
                cur = parent;
            }
            let reach = |player: Player| -> Vec<usize> {
                strategies[player.index()]
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| {
                        constraints
                            .iter()
                            .filter(|(anc, _)| histories[*anc].active == player)
                            .all(|(anc, action)| s.action_at(*anc) == Some(action.as_str()))
                    })
                    .map(|(i, _)| i)
                    .collect()
            };
            [reach(Player::One), reach(Player::Two)]
        })
        .collect();
    Ok(HistoryIndex { histories, terminals, strategies, reaching })
}

impl HistoryIndex {
    pub fn build(game: &MultistageGame, cap: usize) -> Result<Self, GameError> {
        enumerate_histories(game, cap)
    }

    /// Non-terminal histories in preorder; id 0 is the root.
    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn strategies(&self, player: Player) -> &[Strategy] {
        &self.strategies[player.index()]
    }

    /// Indices of `player`'s strategies that allow history `h` (`S_i(h)`), ascending.
    pub fn reaching(&self, player: Player, h: usize) -> &[usize] {
        &self.reaching[h][player.index()]
    }

    pub fn history_id<S: AsRef<str>>(&self, path: &[S]) -> Option<usize> {
        self.histories
            .iter()
            .position(|h| h.path.len() == path.len() && h.path.iter().zip(path).all(|(a, b)| a == b.as_ref()))
    }

    /// `h ⪯ h'` in the prefix order.
    pub fn is_prefix(&self, h: usize, of: &[String]) -> bool {
        let p = &self.histories[h].path;
        p.len() <= of.len() && p.iter().zip(of).all(|(a, b)| a == b)
    }

    /// Path function ζ: the terminal history generated by a strategy profile.
    pub fn play(&self, s1: usize, s2: usize) -> usize {
        let profile = [&self.strategies[0][s1], &self.strategies[1][s2]];
        let mut h = 0;
        loop {
            let history = &self.histories[h];
            let action =
                profile[history.active.index()].action_at(h).expect("strategy defined at every active history");
            let succ = history
                .moves
                .iter()
                .find(|(label, _)| label == action)
                .map(|(_, s)| *s)
                .expect("strategy picks a feasible action");
            match succ {
                Successor::History(next) => h = next,
                Successor::Terminal(t) => return t,
            }
        }
    }
}

/// The strategic form `s ↦ v(ζ(s))`, as a matrix game whose actions are full strategies.
pub fn strategic_form(index: &HistoryIndex) -> StaticGame {
    let labels = [
        index.strategies(Player::One).iter().map(Strategy::label).collect::<Vec<_>>(),
        index.strategies(Player::Two).iter().map(Strategy::label).collect::<Vec<_>>(),
    ];
    let payoffs = (0..labels[0].len())
        .map(|s1| (0..labels[1].len()).map(|s2| index.terminals()[index.play(s1, s2)].payoff.clone()).collect())
        .collect();
    // Labels may collide when action names contain '.', so skip the uniqueness check.
    StaticGame { actions: labels, payoffs }
}

/// The per-history data the dynamic solvers need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryView {
    pub label: String,
    pub parent: Option<usize>,
    /// `S_i(h)` for each player, ascending strategy indices.
    pub reaching: [Vec<usize>; 2],
}

/// A multistage game reduced to what the dynamic procedures consume: its strategic form
/// plus, for every non-terminal history, the strategies consistent with reaching it.
#[derive(Debug, Clone)]
pub struct SequentialGame {
    form: StaticGame,
    histories: Vec<HistoryView>,
    index: Option<HistoryIndex>,
}

impl SequentialGame {
    pub fn from_tree(game: &MultistageGame, cap: usize) -> Result<Self, GameError> {
        let index = enumerate_histories(game, cap)?;
        let form = strategic_form(&index);
        let histories = index
            .histories()
            .iter()
            .enumerate()
            .map(|(h, hist)| HistoryView {
                label: path_label(&hist.path),
                parent: hist.parent,
                reaching: [index.reaching(Player::One, h).to_vec(), index.reaching(Player::Two, h).to_vec()],
            })
            .collect();
        Ok(SequentialGame { form, histories, index: Some(index) })
    }

    /// The one-stage case: both players move simultaneously at the root, so strategies
    /// are actions and the only non-terminal history is `∅`.
    pub fn from_static(game: &StaticGame) -> Self {
        let root = HistoryView {
            label: path_label::<&str>(&[]),
            parent: None,
            reaching: [(0..game.choice_count(Player::One)).collect(), (0..game.choice_count(Player::Two)).collect()],
        };
        SequentialGame { form: game.clone(), histories: vec![root], index: None }
    }

    pub fn histories(&self) -> &[HistoryView] {
        &self.histories
    }

    /// Present for games built from a tree.
    pub fn history_index(&self) -> Option<&HistoryIndex> {
        self.index.as_ref()
    }

    pub fn strategic_form(&self) -> &StaticGame {
        &self.form
    }

    pub fn reaching(&self, player: Player, h: usize) -> &[usize] {
        &self.histories[h].reaching[player.index()]
    }

    /// `s ∈ S_i(h)`.
    pub fn reaches(&self, player: Player, h: usize, strategy: usize) -> bool {
        self.reaching(player, h).binary_search(&strategy).is_ok()
    }

    pub fn history_by_label(&self, label: &str) -> Option<usize> {
        self.histories.iter().position(|h| h.label == label)
    }

    /// Proper ancestors of `h`, nearest first.
    pub fn ancestors(&self, h: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.histories[h].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.histories[p].parent;
        }
        out
    }
}

impl NormalForm for SequentialGame {
    fn choice_count(&self, player: Player) -> usize {
        self.form.choice_count(player)
    }

    fn choice_label(&self, player: Player, choice: usize) -> &str {
        self.form.choice_label(player, choice)
    }

    fn value(&self, player: Player, own: usize, opp: usize) -> &Rational {
        self.form.value(player, own, opp)
    }
}

/// A base game with level types `θ_{i0}..θ_{iL}` attached to both players.
///
/// Level-0 types have constant payoff 0; every other level receives the base payoff.
#[derive(Debug, Clone)]
pub struct LevelAugmentedGame<G> {
    base: G,
    max_level: usize,
}

pub fn augment_with_levels<G>(base: G, max_level: usize) -> Result<LevelAugmentedGame<G>, GameError> {
    if max_level == 0 {
        return Err(GameError::NoStrategicLevel);
    }
    Ok(LevelAugmentedGame { base, max_level })
}

impl<G> LevelAugmentedGame<G> {
    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    fn check_levels(&self, types: [usize; 2]) -> Result<(), GameError> {
        for level in types {
            if level > self.max_level {
                return Err(GameError::LevelOutOfRange { level, max: self.max_level });
            }
        }
        Ok(())
    }
}

impl<G: NormalForm> LevelAugmentedGame<G> {
    /// `u_i(θ_{i,own_level}, ·, own, opp)`; the opponent's type never matters.
    pub fn choice_utility(&self, player: Player, own_level: usize, own: usize, opp: usize) -> Rational {
        if own_level == 0 {
            zero()
        } else {
            self.base.value(player, own, opp).clone()
        }
    }
}

impl LevelAugmentedGame<StaticGame> {
    /// `u_i(θ, a)` for level types `types = [k_1, k_2]` and action profile `[a_1, a_2]`.
    pub fn utility(&self, player: Player, types: [usize; 2], profile: [usize; 2]) -> Result<Rational, GameError> {
        self.check_levels(types)?;
        for p in Player::BOTH {
            if profile[p.index()] >= self.base.choice_count(p) {
                return Err(GameError::ChoiceOutOfRange { player: p, index: profile[p.index()] });
            }
        }
        if types[player.index()] == 0 {
            return Ok(zero());
        }
        Ok(self.base.payoff(profile[0], profile[1])[player.index()].clone())
    }
}

impl LevelAugmentedGame<MultistageGame> {
    /// `u_i(θ, z)` at the terminal history `z`.
    pub fn utility<S: AsRef<str>>(
        &self,
        player: Player,
        types: [usize; 2],
        terminal: &[S],
    ) -> Result<Rational, GameError> {
        self.check_levels(types)?;
        let payoff = self.base.terminal_payoff(terminal)?;
        if types[player.index()] == 0 {
            return Ok(zero());
        }
        Ok(payoff[player.index()].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g_entry, table1};
    use crate::rational::int;

    #[test]
    fn static_game_validation() {
        let a = vec!["x".to_string()];
        let err = StaticGame::new([a.clone(), vec![]], vec![vec![]]).unwrap_err();
        assert_eq!(err, GameError::NoActions(Player::Two));
        let err = StaticGame::new(
            [vec!["x".into(), "y".into()], vec!["c".into(), "d".into()]],
            vec![vec![[int(0), int(0)], [int(0), int(0)]], vec![[int(0), int(0)]]],
        )
        .unwrap_err();
        assert_eq!(err, GameError::Ragged { row: 1, found: 1, expected: 2 });
        let err = StaticGame::new([vec!["x".into(), "x".into()], a], vec![]).unwrap_err();
        assert!(matches!(err, GameError::DuplicateLabel { .. }));
    }

    #[test]
    fn augmentation_payoff_rule() {
        let game = augment_with_levels(table1(), 2).unwrap();
        for t in 0..=2 {
            for a in 0..2 {
                for b in 0..3 {
                    assert_eq!(game.utility(Player::One, [0, t], [a, b]).unwrap(), int(0));
                    assert_eq!(game.utility(Player::One, [2, t], [a, b]).unwrap(), game.base().payoff(a, b)[0]);
                }
            }
        }
        assert_eq!(augment_with_levels(table1(), 0).unwrap_err(), GameError::NoStrategicLevel);
        assert!(game.utility(Player::One, [3, 0], [0, 0]).is_err());
    }

    #[test]
    fn g_entry_terminal_utility() {
        let game = augment_with_levels(g_entry(), 2).unwrap();
        for t in 0..=2 {
            assert_eq!(game.utility(Player::Two, [t, 1], &["In", "L"]).unwrap(), int(1));
            assert_eq!(game.utility(Player::Two, [t, 0], &["In", "L"]).unwrap(), int(0));
        }
        assert!(game.utility(Player::One, [1, 1], &["In"]).is_err());
    }

    #[test]
    fn g_entry_histories() {
        let index = enumerate_histories(&g_entry(), DEFAULT_STRATEGY_CAP).unwrap();
        let labels: Vec<String> = index.histories().iter().map(|h| path_label(&h.path)).collect();
        assert_eq!(labels, vec!["∅", "(In)"]);
        let mut terminals: Vec<String> = index.terminals().iter().map(|t| path_label(&t.path)).collect();
        terminals.sort();
        assert_eq!(terminals, vec!["(In,L)", "(In,R)", "(Out)"]);
        let h = index.history_id(&["In"]).unwrap();
        let names = |p: Player| -> Vec<String> {
            index.reaching(p, h).iter().map(|&s| index.strategies(p)[s].label()).collect()
        };
        assert_eq!(names(Player::One), vec!["In"]);
        assert_eq!(names(Player::Two), vec!["L", "R"]);
    }

    #[test]
    fn g_entry_strategies_and_form() {
        let game = g_entry();
        let s1: Vec<String> =
            enumerate_strategies(&game, Player::One, 16).unwrap().iter().map(Strategy::label).collect();
        let s2: Vec<String> =
            enumerate_strategies(&game, Player::Two, 16).unwrap().iter().map(Strategy::label).collect();
        assert_eq!(s1, vec!["In", "Out"]);
        assert_eq!(s2, vec!["L", "R"]);
        let form = strategic_form(&enumerate_histories(&game, 16).unwrap());
        let out = form.choice_index(Player::One, "Out").unwrap();
        let inn = form.choice_index(Player::One, "In").unwrap();
        let l = form.choice_index(Player::Two, "L").unwrap();
        let r = form.choice_index(Player::Two, "R").unwrap();
        assert_eq!(form.payoff(out, l), &[int(2), int(2)]);
        assert_eq!(form.payoff(inn, r), &[int(0), int(0)]);
        assert_eq!(form.payoff(inn, l), &[int(3), int(1)]);
    }

    #[test]
    fn strategy_count_is_product_and_capped() {
        // player 2 active at two histories with 2 and 3 moves
        let leaf = || Node::leaf(int(0), int(0));
        let tree = Node::decision(
            Player::One,
            vec![
                ("a", Node::decision(Player::Two, vec![("x", leaf()), ("y", leaf())])),
                ("b", Node::decision(Player::Two, vec![("p", leaf()), ("q", leaf()), ("r", leaf())])),
            ],
        );
        let game = MultistageGame::new(tree).unwrap();
        let s2 = enumerate_strategies(&game, Player::Two, 100).unwrap();
        assert_eq!(s2.len(), 6);
        assert_eq!(s2[0].label(), "x.p");
        assert_eq!(s2[5].label(), "y.r");
        assert_eq!(
            enumerate_strategies(&game, Player::Two, 5).unwrap_err(),
            GameError::InstanceTooLarge { player: Player::Two, cap: 5 }
        );
    }

    #[test]
    fn single_stage_tree_is_static() {
        let tree =
            Node::decision(Player::One, vec![("u", Node::leaf(int(1), int(2))), ("d", Node::leaf(int(3), int(-1)))]);
        let game = MultistageGame::new(tree).unwrap();
        let index = enumerate_histories(&game, 16).unwrap();
        assert_eq!(index.histories().len(), 1);
        let form = strategic_form(&index);
        let expected = StaticGame::new(
            [vec!["d".into(), "u".into()], vec!["wait".into()]],
            vec![vec![[int(3), int(-1)]], vec![[int(1), int(2)]]],
        )
        .unwrap();
        assert_eq!(form, expected);
    }

    #[test]
    fn tree_validation() {
        assert_eq!(MultistageGame::new(Node::leaf(int(1), int(1))).unwrap_err(), GameError::EmptyGame);
        let bad = Node::Decision { player: Player::One, moves: vec![] };
        assert!(matches!(MultistageGame::new(bad).unwrap_err(), GameError::EmptyMoves(_)));
    }
}
