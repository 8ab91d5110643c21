//! Command dispatch and report rendering for the `hierarch` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use hierarch_core::bayes::{conditional_prior, state_play};
use hierarch_core::format::{parse_game, static_game_to_value, GameFile};
use hierarch_core::rational::{format_rational, Rational};
use hierarch_core::{
    augment_with_levels, build_elaboration, compare, decision_rule_from_solution, perturb_to_generic, poisson_weights,
    run_ch, run_dch, run_delta_kappa_dynamic, run_delta_kappa_static, verify_bayesian_equilibrium, BeliefLag,
    Comparison, LevelWeights, NormalForm, Player, SequentialGame, SolveReport, SolverError, StaticGame,
    DEFAULT_STRATEGY_CAP,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ch,
    Dkr,
    Dch,
    Ddkr,
    Compare,
    Perturb,
    Bayes,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ch => "ch",
            Command::Dkr => "dkr",
            Command::Dch => "dch",
            Command::Ddkr => "ddkr",
            Command::Compare => "compare",
            Command::Perturb => "perturb",
            Command::Bayes => "bayes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelSpec {
    Poisson {
        tau: Rational,
        max_level: usize,
    },
    /// `weights[0..=L]`; `max_level` defaults to the last index.
    Weights {
        weights: Vec<Rational>,
        max_level: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub game: PathBuf,
    pub levels: LevelSpec,
    pub trace: bool,
    pub belief_lag: bool,
    pub eps: Option<Rational>,
    pub state: Option<(usize, usize)>,
    pub format: OutputFormat,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("consistency violation: {0}")]
    Consistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Consistency(_) => 3,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn solver(e: SolverError) -> CliError {
    match e {
        SolverError::SubsetViolation { .. }
        | SolverError::NoFixedPoint(_)
        | SolverError::PerturbationDiverged(_)
        | SolverError::Mismatch(_) => CliError::Consistency(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

/// Exit status plus what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// `m,n`.
pub fn parse_state(text: &str) -> Result<(usize, usize), String> {
    let (m, n) = text.split_once(',').ok_or_else(|| format!("expected m,n, got `{text}`"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad type index `{s}`"));
    Ok((parse(m)?, parse(n)?))
}

fn level_weights(spec: &LevelSpec) -> Result<(LevelWeights, usize, Value), CliError> {
    match spec {
        LevelSpec::Poisson { tau, max_level } => {
            if *max_level == 0 {
                return Err(CliError::Input("--levels must be at least 1".into()));
            }
            let f = poisson_weights(tau, *max_level).map_err(input)?;
            Ok((f, *max_level, json!({ "poisson": format_rational(tau) })))
        }
        LevelSpec::Weights { weights, max_level } => {
            let f = LevelWeights::new(weights.clone()).map_err(input)?;
            let max = max_level.unwrap_or(f.max_level());
            if max == 0 || max > f.max_level() {
                return Err(CliError::Input(format!("--levels must lie in 1..={}", f.max_level())));
            }
            Ok((f, max, json!({ "weights": "explicit" })))
        }
    }
}

fn rationals(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|r| Value::String(format_rational(r))).collect())
}

fn player_key(p: Player) -> String {
    format!("player {}", p.number())
}

fn report_value(report: &SolveReport, game: &impl NormalForm, with_trace: bool) -> Value {
    let names = |p: Player, set: &[usize]| -> Value {
        Value::Array(set.iter().map(|&c| Value::String(game.choice_label(p, c).to_string())).collect())
    };
    let sets = |snapshot: &hierarch_core::TypeChoiceSet| -> Value {
        let mut by_player = Map::new();
        for p in Player::BOTH {
            let levels: Vec<Value> = (0..=report.max_level).map(|k| names(p, snapshot.get(p, k))).collect();
            by_player.insert(player_key(p), Value::Array(levels));
        }
        Value::Object(by_player)
    };
    let ties: Vec<Value> = report
        .ties
        .iter()
        .map(|t| json!({ "step": t.step, "player": t.player.number(), "level": t.level, "choices": names(t.player, &t.choices) }))
        .collect();
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .map(|w| {
            let opp = w.player.opponent();
            let support: Vec<Value> = w
                .belief
                .support()
                .into_iter()
                .map(|(t, b)| json!([t, game.choice_label(opp, b), format_rational(w.belief.mass(t, b))]))
                .collect();
            json!({
                "player": w.player.number(),
                "level": w.level,
                "choice": game.choice_label(w.player, w.choice),
                "belief": support,
            })
        })
        .collect();
    let mut out = json!({
        "procedure": report.procedure.name(),
        "steps": report.steps(),
        "survivors": sets(&report.sets),
        "ties": ties,
        "witnesses": witnesses,
    });
    if with_trace {
        out["trace"] = Value::Array(report.trace.iter().map(sets).collect());
    }
    out
}

fn comparison_value(cmp: &Comparison, game: &impl NormalForm) -> Value {
    let names = |p: Player, set: &[usize]| -> Vec<String> {
        set.iter().map(|&c| game.choice_label(p, c).to_string()).collect()
    };
    let divergences: Vec<Value> = cmp
        .divergences
        .iter()
        .map(|d| {
            json!({
                "player": d.player.number(),
                "level": d.level,
                "one_by_one": names(d.player, &d.one_by_one),
                "rationalizable": names(d.player, &d.rationalizable),
            })
        })
        .collect();
    json!({ "equal": cmp.equal, "subset_holds": true, "tie_detected": cmp.tie_detected, "divergences": divergences })
}

fn load_game(path: &PathBuf) -> Result<GameFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_game(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn sequential(file: &GameFile) -> Result<SequentialGame, CliError> {
    match file {
        GameFile::Static(g) => Ok(SequentialGame::from_static(g)),
        GameFile::Tree(t) => SequentialGame::from_tree(t, DEFAULT_STRATEGY_CAP).map_err(input),
    }
}

fn normal_form(file: &GameFile) -> Result<StaticGame, CliError> {
    match file {
        GameFile::Static(g) => Ok(g.clone()),
        GameFile::Tree(_) => Ok(sequential(file)?.strategic_form().clone()),
    }
}

fn static_only(file: &GameFile, command: Command) -> Result<StaticGame, CliError> {
    match file {
        GameFile::Static(g) => Ok(g.clone()),
        GameFile::Tree(_) => Err(CliError::Input(format!("`{}` needs a static game", command.name()))),
    }
}

fn game_summary(file: &GameFile, form: &impl NormalForm) -> Value {
    let kind = match file {
        GameFile::Static(_) => "static",
        GameFile::Tree(_) => "tree",
    };
    let choices: Vec<Value> = Player::BOTH
        .iter()
        .map(|&p| json!(form.choices(p).map(|c| form.choice_label(p, c)).collect::<Vec<_>>()))
        .collect();
    json!({ "kind": kind, "choices": choices })
}

/// Builds the JSON report and the text table for a configuration.
pub fn execute(config: &RunConfig) -> Result<(Value, String), CliError> {
    let file = load_game(&config.game)?;
    let (f, max, level_source) = level_weights(&config.levels)?;
    let lag = if config.belief_lag { BeliefLag::One } else { BeliefLag::None };
    let dynamic_rationalization =
        config.command == Command::Ddkr || (config.command == Command::Compare && matches!(file, GameFile::Tree(_)));
    if config.belief_lag && !dynamic_rationalization {
        return Err(CliError::Input("--belief-lag applies to ddkr and to compare on game trees".into()));
    }
    let mut doc = json!({
        "command": config.command.name(),
        "levels": { "max_level": max, "source": level_source, "weights": rationals(&f.weights()[..=max]) },
    });
    let mut text = String::new();
    match config.command {
        Command::Ch | Command::Dkr => {
            let form = normal_form(&file)?;
            let game = augment_with_levels(form, max).map_err(input)?;
            let report =
                if config.command == Command::Ch { run_ch(&game, &f) } else { run_delta_kappa_static(&game, &f) }
                    .map_err(solver)?;
            doc["game"] = game_summary(&file, game.base());
            doc["results"] = json!([report_value(&report, game.base(), config.trace)]);
            render_report(&mut text, &report, game.base());
        }
        Command::Dch | Command::Ddkr => {
            let game = augment_with_levels(sequential(&file)?, max).map_err(input)?;
            let report = if config.command == Command::Dch {
                run_dch(&game, &f)
            } else {
                run_delta_kappa_dynamic(&game, &f, lag)
            }
            .map_err(solver)?;
            doc["game"] = game_summary(&file, game.base());
            doc["results"] = json!([report_value(&report, game.base(), config.trace)]);
            render_report(&mut text, &report, game.base());
        }
        Command::Compare => {
            let (one, rat, form): (SolveReport, SolveReport, StaticGame) = match &file {
                GameFile::Static(g) => {
                    let game = augment_with_levels(g.clone(), max).map_err(input)?;
                    (run_ch(&game, &f).map_err(solver)?, run_delta_kappa_static(&game, &f).map_err(solver)?, g.clone())
                }
                GameFile::Tree(_) => {
                    let game = augment_with_levels(sequential(&file)?, max).map_err(input)?;
                    let one = run_dch(&game, &f).map_err(solver)?;
                    let rat = run_delta_kappa_dynamic(&game, &f, lag).map_err(solver)?;
                    (one, rat, game.base().strategic_form().clone())
                }
            };
            let cmp = compare(&rat, &one).map_err(solver)?;
            doc["game"] = game_summary(&file, &form);
            doc["results"] = json!([report_value(&one, &form, config.trace), report_value(&rat, &form, config.trace)]);
            doc["comparison"] = comparison_value(&cmp, &form);
            render_report(&mut text, &one, &form);
            render_report(&mut text, &rat, &form);
            let _ = writeln!(text, "comparison: {}", if cmp.equal { "equal" } else { "divergent" });
            for d in &cmp.divergences {
                let _ = writeln!(
                    text,
                    "  player {} level {}: {} vs {}",
                    d.player.number(),
                    d.level,
                    label_list(&form, d.player, &d.one_by_one),
                    label_list(&form, d.player, &d.rationalizable)
                );
            }
            if !one.ties.is_empty() {
                let _ = writeln!(text, "  ties detected in the one-by-one run");
            }
        }
        Command::Perturb => {
            let base = static_only(&file, Command::Perturb)?;
            let eps = config.eps.clone().unwrap_or_else(|| Rational::new(1.into(), 1000.into()));
            let p = perturb_to_generic(&base, &eps, &f, max).map_err(solver)?;
            let game = augment_with_levels(p.game.clone(), max).map_err(input)?;
            let one = run_ch(&game, &f).map_err(solver)?;
            let rat = run_delta_kappa_static(&game, &f).map_err(solver)?;
            let cmp = compare(&rat, &one).map_err(solver)?;
            if !one.ties.is_empty() || !cmp.equal || p.distance >= eps {
                return Err(CliError::Consistency("perturbed game is not tie-free with coinciding solutions".into()));
            }
            let bumps: Vec<Value> = p
                .bumps
                .iter()
                .map(|b| {
                    json!({
                        "step": b.step,
                        "player": b.player.number(),
                        "action": base.choice_label(b.player, b.action),
                        "opponent_action": base.choice_label(b.player.opponent(), b.opponent_action),
                        "amount": format_rational(&b.amount),
                    })
                })
                .collect();
            doc["game"] = game_summary(&file, &base);
            doc["perturbation"] = json!({
                "eps": format_rational(&eps),
                "bumps": bumps,
                "distance": format_rational(&p.distance),
                "perturbed_game": static_game_to_value(&p.game),
            });
            doc["results"] = json!([report_value(&one, &base, config.trace), report_value(&rat, &base, config.trace)]);
            doc["comparison"] = comparison_value(&cmp, &base);
            let _ = writeln!(text, "bumps: {}, total change {} (< {})", p.bumps.len(), p.distance, eps);
            for b in &p.bumps {
                let _ = writeln!(
                    text,
                    "  step {}: player {} payoff at ({}) += {}",
                    b.step,
                    b.player.number(),
                    cell_label(&base, b.player, b.action, b.opponent_action),
                    b.amount
                );
            }
            render_report(&mut text, &one, &base);
        }
        Command::Bayes => {
            let base = static_only(&file, Command::Bayes)?;
            let eps = config.eps.clone().unwrap_or_else(|| Rational::new(1.into(), 10.into()));
            let game = augment_with_levels(base.clone(), max).map_err(input)?;
            let one = run_ch(&game, &f).map_err(solver)?;
            let el = build_elaboration(&game, &f, &eps).map_err(input)?;
            let rule = decision_rule_from_solution(&one);
            let verdict = verify_bayesian_equilibrium(&el, &rule, &game).map_err(input)?;
            let violations: Vec<Value> = verdict
                .violations
                .iter()
                .map(|v| json!({ "player": v.player.number(), "level": v.level, "action": base.choice_label(v.player, v.action) }))
                .collect();
            let mut priors = Map::new();
            for p in Player::BOTH {
                let rows: Vec<Value> = (0..=max)
                    .map(|k| conditional_prior(&el, p, k).map(|c| rationals(&c)).unwrap_or(Value::Null))
                    .collect();
                priors.insert(player_key(p), Value::Array(rows));
            }
            doc["game"] = game_summary(&file, &base);
            doc["bayes"] = json!({
                "eps": format_rational(&eps),
                "level_distribution": "renormalized over levels 0..=L",
                "verdict": if verdict.passed() { "PASS" } else { "FAIL" },
                "violations": violations,
                "conditional_priors": Value::Object(priors),
            });
            let _ = writeln!(text, "bayesian equilibrium: {}", if verdict.passed() { "PASS" } else { "FAIL" });
            if let Some((m, n)) = config.state {
                let play = state_play(&el, &rule, m, n).map_err(input)?;
                let [a1, a2] = [label_list(&base, Player::One, &play[0]), label_list(&base, Player::Two, &play[1])];
                doc["bayes"]["state"] = json!({
                    "m": m,
                    "n": n,
                    "player 1": play[0].iter().map(|&a| base.choice_label(Player::One, a)).collect::<Vec<_>>(),
                    "player 2": play[1].iter().map(|&a| base.choice_label(Player::Two, a)).collect::<Vec<_>>(),
                });
                let _ = writeln!(text, "state ({m},{n}): player 1 plays {a1}, player 2 plays {a2}");
            }
            if !verdict.passed() {
                return Err(CliError::Consistency(format!(
                    "CH decision rule fails the equilibrium check: {violations:?}"
                )));
            }
        }
    }
    Ok((doc, text))
}

fn label_list(game: &impl NormalForm, p: Player, set: &[usize]) -> String {
    let names: Vec<&str> = set.iter().map(|&c| game.choice_label(p, c)).collect();
    format!("{{{}}}", names.join(","))
}

fn cell_label(game: &StaticGame, p: Player, own: usize, opp: usize) -> String {
    let (r, c) = match p {
        Player::One => (own, opp),
        Player::Two => (opp, own),
    };
    format!("{},{}", game.choice_label(Player::One, r), game.choice_label(Player::Two, c))
}

fn render_report(out: &mut String, report: &SolveReport, game: &impl NormalForm) {
    let _ = writeln!(out, "{} ({} steps)", report.procedure.name(), report.steps());
    for p in Player::BOTH {
        for k in 1..=report.max_level {
            let _ =
                writeln!(out, "  player {} level {}: {}", p.number(), k, label_list(game, p, report.survivors(p, k)));
        }
    }
    for t in &report.ties {
        let _ = writeln!(
            out,
            "  tie at step {}: player {} {}",
            t.step,
            t.player.number(),
            label_list(game, t.player, &t.choices)
        );
    }
}

/// Runs a configuration, capturing output and the exit status.
pub fn run_command(config: &RunConfig) -> RunOutcome {
    match execute(config) {
        Ok((doc, text)) => {
            let stdout = match config.format {
                OutputFormat::Json => serde_json::to_string_pretty(&doc).expect("report serializes") + "\n",
                OutputFormat::Text => text,
            };
            RunOutcome { exit_code: 0, stdout, stderr: String::new() }
        }
        Err(e) => RunOutcome { exit_code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let breach = SolverError::SubsetViolation { player: Player::One, level: 2, choice: 0 };
        assert_eq!(solver(breach).exit_code(), 3);
        assert_eq!(solver(SolverError::NonPositiveEpsilon).exit_code(), 2);
        assert_eq!(input("bad").exit_code(), 2);
    }

    #[test]
    fn state_argument() {
        assert_eq!(parse_state("5,7"), Ok((5, 7)));
        assert!(parse_state("5").is_err());
        assert!(parse_state("a,1").is_err());
    }
}
