//! JSON game files. Rationals are strings such as `"3/2"`; plain JSON integers are
//! accepted too.
//!
//! Static games: `{"actions": [[...], [...]], "payoffs": [[["v1","v2"], ...], ...]}`, rows
//! indexed by player 1's action. Trees: `{"player": 1|2, "moves": {label: node}}` where a
//! terminal node is `{"leaf": ["v1","v2"]}`.

use serde::Serializer;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::game::{GameError, MultistageGame, Node, Player, StaticGame};
use crate::rational::{format_rational, parse_rational, Rational, RationalParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Rational { path: String, source: RationalParseError },
    #[error("{path}: {source}")]
    Game { path: String, source: GameError },
}

fn schema(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::Schema { path: path.to_string(), message: message.into() }
}

fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn as_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FormatError> {
    value.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>, FormatError> {
    value.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn field<'a>(object: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    object.get(key).ok_or_else(|| schema(path, format!("missing field `{key}`")))
}

fn rational_at(value: &Value, path: &str) -> Result<Rational, FormatError> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::Number(_) => return Err(schema(path, "non-integer numbers must be written as \"p/q\" strings")),
        _ => return Err(schema(path, "expected a rational string")),
    };
    parse_rational(&text).map_err(|source| FormatError::Rational { path: path.to_string(), source })
}

fn payoff_pair(value: &Value, path: &str) -> Result<[Rational; 2], FormatError> {
    let pair = as_array(value, path)?;
    if pair.len() != 2 {
        return Err(schema(path, format!("expected 2 payoffs, found {}", pair.len())));
    }
    Ok([rational_at(&pair[0], &format!("{path}[0]"))?, rational_at(&pair[1], &format!("{path}[1]"))?])
}

fn static_from_value(root: &Value) -> Result<StaticGame, FormatError> {
    let object = as_object(root, "$")?;
    let actions_value = as_array(field(object, "actions", "$")?, "actions")?;
    if actions_value.len() != 2 {
        return Err(schema("actions", format!("expected 2 action lists, found {}", actions_value.len())));
    }
    let mut actions: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    for (i, list) in actions_value.iter().enumerate() {
        let path = format!("actions[{i}]");
        for (j, label) in as_array(list, &path)?.iter().enumerate() {
            let label = label.as_str().ok_or_else(|| schema(&format!("{path}[{j}]"), "expected a string label"))?;
            actions[i].push(label.to_string());
        }
    }
    let rows = as_array(field(object, "payoffs", "$")?, "payoffs")?;
    if rows.len() != actions[0].len() {
        return Err(schema("payoffs", format!("expected {} rows, found {}", actions[0].len(), rows.len())));
    }
    let mut payoffs = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let path = format!("payoffs[{r}]");
        let cells = as_array(row, &path)?;
        if cells.len() != actions[1].len() {
            return Err(schema(
                &path,
                format!("ragged row: expected {} cells, found {}", actions[1].len(), cells.len()),
            ));
        }
        let parsed = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| payoff_pair(cell, &format!("{path}[{c}]")))
            .collect::<Result<Vec<_>, _>>()?;
        payoffs.push(parsed);
    }
    StaticGame::new(actions, payoffs).map_err(|source| FormatError::Game { path: "$".to_string(), source })
}

fn node_from_value(value: &Value, path: &str) -> Result<Node, FormatError> {
    let object = as_object(value, path)?;
    if let Some(leaf) = object.get("leaf") {
        if object.len() != 1 {
            return Err(schema(path, "a leaf carries only `leaf`"));
        }
        let [v1, v2] = payoff_pair(leaf, &format!("{path}.leaf"))?;
        return Ok(Node::Leaf([v1, v2]));
    }
    let player_value = field(object, "player", path)?;
    let player = player_value
        .as_u64()
        .and_then(Player::from_number)
        .ok_or_else(|| schema(&format!("{path}.player"), "expected exactly one active player, 1 or 2"))?;
    let moves_path = format!("{path}.moves");
    let moves = as_object(field(object, "moves", path)?, &moves_path)?;
    if moves.is_empty() {
        return Err(schema(&moves_path, "empty move map"));
    }
    if let Some(extra) = object.keys().find(|k| *k != "player" && *k != "moves") {
        return Err(schema(path, format!("unexpected field `{extra}`")));
    }
    let mut children = Vec::with_capacity(moves.len());
    for (label, child) in moves {
        children.push((label.clone(), node_from_value(child, &format!("{moves_path}.{label}"))?));
    }
    Ok(Node::Decision { player, moves: children })
}

fn tree_from_value(root: &Value) -> Result<MultistageGame, FormatError> {
    let node = node_from_value(root, "$")?;
    MultistageGame::new(node).map_err(|source| FormatError::Game { path: "$".to_string(), source })
}

pub fn parse_static_game(text: &str) -> Result<StaticGame, FormatError> {
    static_from_value(&parse_json(text)?)
}

pub fn parse_tree_game(text: &str) -> Result<MultistageGame, FormatError> {
    tree_from_value(&parse_json(text)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameFile {
    Static(StaticGame),
    Tree(MultistageGame),
}

/// Dispatches on the top-level keys: `actions` for a static game, `player`/`moves`/`leaf`
/// for a tree.
pub fn parse_game(text: &str) -> Result<GameFile, FormatError> {
    let value = parse_json(text)?;
    let object = as_object(&value, "$")?;
    if object.contains_key("actions") {
        Ok(GameFile::Static(static_from_value(&value)?))
    } else if ["player", "moves", "leaf"].iter().any(|k| object.contains_key(*k)) {
        Ok(GameFile::Tree(tree_from_value(&value)?))
    } else {
        Err(schema("$", "expected `actions` (static game) or `player`/`moves` (game tree)"))
    }
}

fn rational_value(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn static_game_to_value(game: &StaticGame) -> Value {
    let payoffs: Vec<Value> = game
        .rows()
        .iter()
        .map(|row| Value::Array(row.iter().map(|[a, b]| json!([rational_value(a), rational_value(b)])).collect()))
        .collect();
    json!({ "actions": [game.actions(Player::One), game.actions(Player::Two)], "payoffs": payoffs })
}

pub fn node_to_value(node: &Node) -> Value {
    match node {
        Node::Leaf([a, b]) => json!({ "leaf": [rational_value(a), rational_value(b)] }),
        Node::Decision { player, moves } => {
            let moves: Map<String, Value> = moves.iter().map(|(l, n)| (l.clone(), node_to_value(n))).collect();
            json!({ "player": player.number(), "moves": moves })
        }
    }
}

pub fn static_game_to_json(game: &StaticGame) -> String {
    serde_json::to_string_pretty(&static_game_to_value(game)).expect("values serialize")
}

pub fn tree_game_to_json(game: &MultistageGame) -> String {
    serde_json::to_string_pretty(&node_to_value(game.root())).expect("values serialize")
}

/// Serde helper writing a rational as its `p/q` string.
pub fn serialize_rational<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_rational(value))
}
