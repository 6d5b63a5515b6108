//! Bulb-switch scenarios and their deterministic simulator.
//!
//! A scenario is a set of abstract subgoal options over `n_vars` binary
//! variables. Each option has a guard (conjunction of `v==0|1` literals), an
//! assignment map applied on success, and a goal condition used by the
//! explorer's skip-if-achieved scheduling. The goal defaults to the assignment
//! post-condition; an option may override it when the event it pursues is
//! narrower than its side effects (the reset option of the `reset` scenario
//! pursues only "last bulb on" while also switching the others off).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A full assignment of the scenario's variables. Bulb domains use exactly
/// 0.0 and 1.0, but the type carries arbitrary reals in `[0,1]` so the set
/// algebra downstream stays general.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LowLevelState(Vec<f64>);

impl LowLevelState {
    pub fn zeros(n_vars: usize) -> Self {
        LowLevelState(vec![0.0; n_vars])
    }

    pub fn new(values: Vec<f64>) -> Self {
        LowLevelState(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> f64 {
        self.0[var]
    }

    pub fn set(&mut self, var: usize, value: f64) {
        self.0[var] = value;
    }

    /// Parses either a compact bit string (`010001`) or comma-separated
    /// decimals (`0,1,0,0,0,1`).
    pub fn parse(s: &str, n_vars: usize) -> Result<Self> {
        let s = s.trim();
        let values: Vec<f64> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("malformed state `{s}`")))?
        } else {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(0.0),
                    '1' => Ok(1.0),
                    _ => Err(Error::InvalidInput(format!("malformed state `{s}`"))),
                })
                .collect::<Result<_>>()?
        };
        if values.len() != n_vars {
            return Err(Error::InvalidInput(format!(
                "state `{s}` has {} variables, scenario expects {n_vars}",
                values.len()
            )));
        }
        Ok(LowLevelState(values))
    }

    /// Compact rendering for binary states (`010001`), decimal otherwise.
    pub fn compact(&self) -> String {
        if self.0.iter().all(|&v| v == 0.0 || v == 1.0) {
            self.0.iter().map(|&v| if v == 1.0 { '1' } else { '0' }).collect()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for LowLevelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl AsRef<[f64]> for LowLevelState {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// One `variable == value` literal with a binary value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub on: bool,
}

impl Literal {
    pub fn value(&self) -> f64 {
        if self.on {
            1.0
        } else {
            0.0
        }
    }

    pub fn holds(&self, state: &LowLevelState) -> bool {
        state.get(self.var) == self.value()
    }
}

/// A guarded assignment option.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionRule {
    /// 0-based; displayed and serialized 1-based as `o_<id+1>`.
    pub id: usize,
    pub guard: Vec<Literal>,
    /// Variables written on success and the binary values they receive.
    pub assign: BTreeMap<usize, bool>,
    /// Condition the scheduler checks before attempting the option.
    pub goal: Vec<Literal>,
}

impl OptionRule {
    /// Builds a rule whose goal is the assignment post-condition.
    pub fn new(id: usize, guard: Vec<Literal>, assign: BTreeMap<usize, bool>) -> Self {
        let goal = assign.iter().map(|(&var, &on)| Literal { var, on }).collect();
        OptionRule { id, guard, assign, goal }
    }

    pub fn guard_holds(&self, state: &LowLevelState) -> bool {
        self.guard.iter().all(|l| l.holds(state))
    }

    pub fn goal_holds(&self, state: &LowLevelState) -> bool {
        self.goal.iter().all(|l| l.holds(state))
    }
}

/// A scenario: variable count, options, and an optional exogenous reset period.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub n_vars: usize,
    /// Every `p`-th step the state is zeroed between option executions.
    pub exogenous_reset: Option<u64>,
    pub options: Vec<OptionRule>,
}

/// Result of attempting one option: failed attempts leave the state unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub success: bool,
    pub next_state: LowLevelState,
}

/// Executes option `option` of `spec` from `state`.
///
/// The option succeeds iff its guard holds; on success the assignment map is
/// written (variables already at the assigned value keep it), on failure the
/// state is returned unchanged.
pub fn execute_option(spec: &ScenarioSpec, state: &LowLevelState, option: usize) -> Result<Outcome> {
    let rule = spec
        .options
        .get(option)
        .ok_or_else(|| Error::InvalidInput(format!("unknown option o_{}", option + 1)))?;
    if state.len() != spec.n_vars {
        return Err(Error::InvalidInput(format!(
            "state has {} variables, scenario `{}` expects {}",
            state.len(),
            spec.name,
            spec.n_vars
        )));
    }
    if !rule.guard_holds(state) {
        return Ok(Outcome { success: false, next_state: state.clone() });
    }
    let mut next = state.clone();
    for (&var, &on) in &rule.assign {
        next.set(var, if on { 1.0 } else { 0.0 });
    }
    Ok(Outcome { success: true, next_state: next })
}

/// Applies the exogenous reset, if the scenario has one and `step` is a
/// multiple of its period. Resets happen only between option executions.
pub fn apply_exogenous(spec: &ScenarioSpec, state: &LowLevelState, step: u64) -> LowLevelState {
    match spec.exogenous_reset {
        Some(p) if step > 0 && step.is_multiple_of(p) => LowLevelState::zeros(spec.n_vars),
        _ => state.clone(),
    }
}

fn lit(var: usize, on: bool) -> Literal {
    Literal { var, on }
}

fn assign(pairs: &[(usize, bool)]) -> BTreeMap<usize, bool> {
    pairs.iter().copied().collect()
}

/// The three builtin bulb scenarios.
///
/// `reset`: bulb 1 lights whenever touched, bulbs 2..5 light only when their
/// predecessor is on, and bulb 6 lights whenever touched while switching all
/// the others off. `negative`: touching bulb 1 lights bulbs 1 and 2 together,
/// bulb 2 lights whenever touched, and the rest chain as usual. `unreachable`:
/// bulb 1 lights only while bulb 2 is off, bulb 6 is untouched by every
/// option, and an exogenous reset zeroes the state every 50 steps.
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    let reset = ScenarioSpec {
        name: "reset".into(),
        n_vars: 6,
        exogenous_reset: None,
        options: vec![
            // The reset option's goal is the event it pursues (bulb 6 on),
            // not its full post-condition: the scheduler keeps attempting it
            // while other bulbs burn, but never once bulb 6 already shines.
            OptionRule {
                id: 0,
                guard: vec![],
                assign: assign(&[(0, false), (1, false), (2, false), (3, false), (4, false), (5, true)]),
                goal: vec![lit(5, true)],
            },
            OptionRule::new(1, vec![], assign(&[(0, true)])),
            OptionRule::new(2, vec![lit(0, true)], assign(&[(1, true)])),
            OptionRule::new(3, vec![lit(1, true)], assign(&[(2, true)])),
            OptionRule::new(4, vec![lit(2, true)], assign(&[(3, true)])),
            OptionRule::new(5, vec![lit(3, true)], assign(&[(4, true)])),
        ],
    };
    let negative = ScenarioSpec {
        name: "negative".into(),
        n_vars: 6,
        exogenous_reset: None,
        options: vec![
            OptionRule::new(0, vec![], assign(&[(1, true)])),
            OptionRule::new(1, vec![lit(1, true)], assign(&[(2, true)])),
            OptionRule::new(2, vec![], assign(&[(0, true), (1, true)])),
            OptionRule::new(3, vec![lit(2, true)], assign(&[(3, true)])),
            OptionRule::new(4, vec![lit(3, true)], assign(&[(4, true)])),
            OptionRule::new(5, vec![lit(4, true)], assign(&[(5, true)])),
        ],
    };
    let unreachable = ScenarioSpec {
        name: "unreachable".into(),
        n_vars: 6,
        exogenous_reset: Some(50),
        options: vec![
            OptionRule::new(0, vec![], assign(&[(1, true)])),
            OptionRule::new(1, vec![lit(1, true)], assign(&[(2, true)])),
            OptionRule::new(2, vec![lit(1, false)], assign(&[(0, true)])),
            OptionRule::new(3, vec![lit(2, true)], assign(&[(3, true)])),
            OptionRule::new(4, vec![lit(3, true)], assign(&[(4, true)])),
        ],
    };
    vec![reset, negative, unreachable]
}

pub fn builtin_scenario(name: &str) -> Option<ScenarioSpec> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_vars == 0 {
            return Err(Error::InvalidInput("scenario needs at least one variable".into()));
        }
        if self.options.is_empty() {
            return Err(Error::InvalidInput("scenario needs at least one option".into()));
        }
        if let Some(0) = self.exogenous_reset {
            return Err(Error::InvalidInput("exogenous_reset period must be >= 1".into()));
        }
        for (pos, rule) in self.options.iter().enumerate() {
            if rule.id != pos {
                return Err(Error::InvalidInput(format!(
                    "option ids must be contiguous starting at 1; found id {} at position {}",
                    rule.id + 1,
                    pos + 1
                )));
            }
            if rule.assign.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "option o_{} assigns no variables",
                    rule.id + 1
                )));
            }
            let vars = rule
                .guard
                .iter()
                .chain(rule.goal.iter())
                .map(|l| l.var)
                .chain(rule.assign.keys().copied());
            for var in vars {
                if var >= self.n_vars {
                    return Err(Error::InvalidInput(format!(
                        "option o_{} references v{} but the scenario has {} variables",
                        rule.id + 1,
                        var + 1,
                        self.n_vars
                    )));
                }
            }
        }
        Ok(())
    }
}

// --- scenario files -------------------------------------------------------
//
// Scenarios beyond the builtins load from TOML documents:
//
//     name = "custom"
//     n_vars = 4
//     exogenous_reset = 25      # optional
//
//     [[options]]
//     id = 1
//     guard = ["v2=1"]
//     assign = ["v1:=1"]
//     goal = ["v1=1"]           # optional, defaults to the assignments

#[derive(Deserialize)]
struct ScenarioDoc {
    name: String,
    n_vars: usize,
    exogenous_reset: Option<u64>,
    #[serde(default)]
    options: Vec<OptionDoc>,
}

#[derive(Deserialize)]
struct OptionDoc {
    id: usize,
    #[serde(default)]
    guard: Vec<toml::Spanned<String>>,
    assign: Vec<toml::Spanned<String>>,
    goal: Option<Vec<toml::Spanned<String>>>,
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn parse_literal(text: &str, spanned: &toml::Spanned<String>, sep: &str) -> Result<Literal> {
    let raw = spanned.get_ref().trim();
    let line = line_of(text, spanned.span().start);
    let err = || {
        Error::ScenarioFile(format!(
            "line {line}: malformed literal `{raw}`, expected v<i>{sep}0 or v<i>{sep}1"
        ))
    };
    let (var, value) = raw.split_once(sep).ok_or_else(err)?;
    let idx: usize = var
        .trim()
        .strip_prefix('v')
        .and_then(|n| n.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(err)?;
    let on = match value.trim() {
        "0" => false,
        "1" => true,
        _ => return Err(err()),
    };
    Ok(Literal { var: idx - 1, on })
}

impl ScenarioSpec {
    /// Parses a scenario from TOML text. Errors name the offending line.
    pub fn from_toml_str(text: &str) -> Result<ScenarioSpec> {
        let doc: ScenarioDoc =
            toml::from_str(text).map_err(|e| Error::ScenarioFile(e.to_string().trim().into()))?;
        let mut options = Vec::with_capacity(doc.options.len());
        for opt in &doc.options {
            if opt.id == 0 {
                return Err(Error::ScenarioFile("option ids are 1-based".into()));
            }
            let guard: Vec<Literal> = opt
                .guard
                .iter()
                .map(|s| parse_literal(text, s, "="))
                .collect::<Result<_>>()?;
            let mut assign = BTreeMap::new();
            for s in &opt.assign {
                let l = parse_literal(text, s, ":=")?;
                assign.insert(l.var, l.on);
            }
            let rule = match &opt.goal {
                Some(goal) => {
                    let goal: Vec<Literal> =
                        goal.iter().map(|s| parse_literal(text, s, "=")).collect::<Result<_>>()?;
                    OptionRule { id: opt.id - 1, guard, assign, goal }
                }
                None => OptionRule::new(opt.id - 1, guard, assign),
            };
            options.push(rule);
        }
        let spec = ScenarioSpec {
            name: doc.name,
            n_vars: doc.n_vars,
            exogenous_reset: doc.exogenous_reset,
            options,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<ScenarioSpec> {
        let text = std::fs::read_to_string(path)?;
        ScenarioSpec::from_toml_str(&text)
    }
}
