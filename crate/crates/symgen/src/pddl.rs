//! Set-theoretic PDDL: zero-arity predicates, conjunctive positive
//! preconditions, add/delete effects. This module lowers a symbolic domain to
//! canonical `.pddl` text, parses that text back, and validates domains with
//! a small breadth-first planner.
//!
//! The emitted text is deterministic down to the byte: predicates in symbol
//! id order, actions in option order, fixed two-space indentation. Golden
//! tests rely on that, and any STRIPS parser accepting the `:strips`
//! requirement flag can consume the files.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::abstraction::{Symbol, SymbolicDomain};
use crate::env::LowLevelState;
use crate::{Error, Result};

/// A propositional STRIPS domain document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PddlDomainDoc {
    pub name: String,
    /// Zero-arity predicate names, one per symbol, in symbol id order.
    pub predicates: Vec<String>,
    pub actions: Vec<PddlAction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PddlAction {
    pub name: String,
    /// Positive preconditions only: set-theoretic PDDL has no negations here.
    pub pre: Vec<String>,
    pub add: Vec<String>,
    pub del: Vec<String>,
}

/// A planning problem over a domain's predicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PddlProblemDoc {
    pub name: String,
    pub domain: String,
    pub init: Vec<String>,
    pub goal: Vec<String>,
}

/// An ordered list of action names reaching the goal from the init state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<String>,
}

impl Plan {
    pub fn length(&self) -> usize {
        self.actions.len()
    }
}

/// Lowers a symbolic domain to a PDDL document. Predicates take the symbol
/// labels verbatim, so the labels must be pairwise distinct.
pub fn emit_domain(domain: &SymbolicDomain) -> Result<PddlDomainDoc> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &domain.symbols {
        if let Some(first) = seen.insert(s.label.as_str(), s.id) {
            return Err(Error::Inconsistency(format!(
                "predicate label `{}` is shared by s_{} and s_{}; rename one (e.g. `{}_2`)",
                s.label,
                first + 1,
                s.id + 1,
                s.label
            )));
        }
    }
    let label = |id: &usize| domain.symbols[*id].label.clone();
    Ok(PddlDomainDoc {
        name: format!("{}-{}", domain.scenario, domain.representation),
        predicates: domain.symbols.iter().map(|s| s.label.clone()).collect(),
        actions: domain
            .operators
            .iter()
            .map(|op| PddlAction {
                name: format!("op_{}", op.option + 1),
                pre: op.pre.iter().map(label).collect(),
                add: op.eff_pos.iter().map(label).collect(),
                del: op.eff_neg.iter().map(label).collect(),
            })
            .collect(),
    })
}

/// The ids of all symbols whose grounding contains the state.
pub fn ground_state(symbols: &[Symbol], x: &LowLevelState) -> std::collections::BTreeSet<usize> {
    symbols
        .iter()
        .filter(|s| s.grounding.contains_state(x.values()))
        .map(|s| s.id)
        .collect()
}

/// Builds a problem whose init section lists every symbol holding in the
/// given low-level state and whose goal conjoins the given symbols.
pub fn emit_problem(
    symbols: &[Symbol],
    domain_name: &str,
    init_state: &LowLevelState,
    goal: &std::collections::BTreeSet<usize>,
) -> Result<PddlProblemDoc> {
    for &id in goal {
        if id >= symbols.len() {
            return Err(Error::InvalidInput(format!(
                "goal references unknown symbol s_{}",
                id + 1
            )));
        }
    }
    Ok(PddlProblemDoc {
        name: format!("{domain_name}-problem"),
        domain: domain_name.to_string(),
        init: ground_state(symbols, init_state)
            .iter()
            .map(|&id| symbols[id].label.clone())
            .collect(),
        goal: goal.iter().map(|&id| symbols[id].label.clone()).collect(),
    })
}

fn conjunction(pos: &[String], neg: &[String]) -> String {
    let mut parts: Vec<String> = pos.iter().map(|p| format!("({p})")).collect();
    parts.extend(neg.iter().map(|n| format!("(not ({n}))")));
    if parts.is_empty() {
        "(and)".to_string()
    } else {
        format!("(and {})", parts.join(" "))
    }
}

/// Canonical domain text. Emitting, parsing, and emitting again reproduces
/// the same bytes.
pub fn domain_text(doc: &PddlDomainDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", doc.name);
    let _ = writeln!(out, "  (:requirements :strips)");
    if doc.predicates.is_empty() {
        let _ = writeln!(out, "  (:predicates)");
    } else {
        let _ = writeln!(out, "  (:predicates");
        for (i, p) in doc.predicates.iter().enumerate() {
            let close = if i + 1 == doc.predicates.len() { ")" } else { "" };
            let _ = writeln!(out, "    ({p}){close}");
        }
    }
    for a in &doc.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let _ = writeln!(out, "    :parameters ()");
        let _ = writeln!(out, "    :precondition {}", conjunction(&a.pre, &[]));
        let _ = writeln!(out, "    :effect {})", conjunction(&a.add, &a.del));
    }
    out.push_str(")\n");
    out
}

/// Canonical problem text; same stability guarantee as [`domain_text`].
pub fn problem_text(doc: &PddlProblemDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", doc.name);
    let _ = writeln!(out, "  (:domain {})", doc.domain);
    if doc.init.is_empty() {
        let _ = writeln!(out, "  (:init)");
    } else {
        let parts: Vec<String> = doc.init.iter().map(|p| format!("({p})")).collect();
        let _ = writeln!(out, "  (:init {})", parts.join(" "));
    }
    let _ = writeln!(out, "  (:goal {})", conjunction(&doc.goal, &[]));
    out.push_str(")\n");
    out
}

#[derive(Debug)]
enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        let line = line.split(';').next().unwrap_or("");
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                    tokens.push(ch.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    tokens
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<SExpr> {
    let bad = |msg: &str| Error::InvalidInput(format!("malformed PDDL: {msg}"));
    match tokens.get(*pos) {
        None => Err(bad("unexpected end of input")),
        Some(t) if t == "(" => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(bad("unclosed parenthesis")),
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(SExpr::List(items));
                    }
                    _ => items.push(parse_sexpr(tokens, pos)?),
                }
            }
        }
        Some(t) if t == ")" => Err(bad("unexpected `)`")),
        Some(t) => {
            *pos += 1;
            Ok(SExpr::Atom(t.clone()))
        }
    }
}

fn parse_single(text: &str) -> Result<SExpr> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let expr = parse_sexpr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::InvalidInput(
            "malformed PDDL: trailing tokens after the top-level form".into(),
        ));
    }
    Ok(expr)
}

fn as_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    match e {
        SExpr::List(items) => Ok(items),
        SExpr::Atom(a) => Err(Error::InvalidInput(format!(
            "malformed PDDL: expected {what}, found atom `{a}`"
        ))),
    }
}

fn as_atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str> {
    match e {
        SExpr::Atom(a) => Ok(a),
        SExpr::List(_) => Err(Error::InvalidInput(format!(
            "malformed PDDL: expected {what}, found a list"
        ))),
    }
}

/// A zero-arity predicate application like `(v1_on)`.
fn as_predicate(e: &SExpr) -> Result<String> {
    let items = as_list(e, "a predicate")?;
    if items.len() != 1 {
        return Err(Error::InvalidInput(
            "malformed PDDL: predicates here are zero-arity, expected `(name)`".into(),
        ));
    }
    Ok(as_atom(&items[0], "a predicate name")?.to_string())
}

/// Splits a condition into positive and negated predicates. Accepts `(and
/// ...)`, a single predicate, or `(not (p))`.
fn parse_condition(e: &SExpr) -> Result<(Vec<String>, Vec<String>)> {
    let items = as_list(e, "a condition")?;
    let conjuncts: Vec<&SExpr> = match items.first() {
        Some(SExpr::Atom(a)) if a == "and" => items[1..].iter().collect(),
        _ => vec![e],
    };
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for c in conjuncts {
        let parts = as_list(c, "a literal")?;
        match parts.first() {
            Some(SExpr::Atom(a)) if a == "not" => {
                if parts.len() != 2 {
                    return Err(Error::InvalidInput(
                        "malformed PDDL: `not` takes exactly one predicate".into(),
                    ));
                }
                neg.push(as_predicate(&parts[1])?);
            }
            _ => pos.push(as_predicate(c)?),
        }
    }
    Ok((pos, neg))
}

fn parse_action(items: &[SExpr]) -> Result<PddlAction> {
    if items.len() < 2 {
        return Err(Error::InvalidInput("malformed PDDL: `:action` needs a name".into()));
    }
    let name = as_atom(&items[1], "an action name")?.to_string();
    let mut action = PddlAction { name, pre: vec![], add: vec![], del: vec![] };
    let mut i = 2;
    while i < items.len() {
        let key = as_atom(&items[i], "an action keyword")?;
        let value = items.get(i + 1).ok_or_else(|| {
            Error::InvalidInput(format!("malformed PDDL: `{key}` has no value"))
        })?;
        match key {
            ":parameters" => {
                if !as_list(value, "a parameter list")?.is_empty() {
                    return Err(Error::InvalidInput(
                        "malformed PDDL: actions take no parameters here".into(),
                    ));
                }
            }
            ":precondition" => {
                let (pos, neg) = parse_condition(value)?;
                if !neg.is_empty() {
                    return Err(Error::InvalidInput(format!(
                        "malformed PDDL: negative precondition on `{}` is not allowed",
                        action.name
                    )));
                }
                action.pre = pos;
            }
            ":effect" => {
                let (pos, neg) = parse_condition(value)?;
                action.add = pos;
                action.del = neg;
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "malformed PDDL: unsupported action keyword `{other}`"
                )))
            }
        }
        i += 2;
    }
    Ok(action)
}

/// Parses domain text (canonical or looser whitespace/comment layout).
pub fn parse_domain(text: &str) -> Result<PddlDomainDoc> {
    let root = parse_single(text)?;
    let items = as_list(&root, "a `(define ...)` form")?;
    if as_atom(items.first().ok_or_else(|| Error::InvalidInput("malformed PDDL: empty form".into()))?, "a keyword")? != "define" {
        return Err(Error::InvalidInput("malformed PDDL: expected `(define ...)`".into()));
    }
    let mut doc = PddlDomainDoc { name: String::new(), predicates: vec![], actions: vec![] };
    for item in &items[1..] {
        let section = as_list(item, "a domain section")?;
        let head = as_atom(
            section.first().ok_or_else(|| Error::InvalidInput("malformed PDDL: empty section".into()))?,
            "a section keyword",
        )?;
        match head {
            "domain" => {
                doc.name = as_atom(
                    section.get(1).ok_or_else(|| Error::InvalidInput("malformed PDDL: `(domain)` needs a name".into()))?,
                    "a domain name",
                )?
                .to_string();
            }
            ":requirements" => {
                for flag in &section[1..] {
                    if as_atom(flag, "a requirement flag")? != ":strips" {
                        return Err(Error::InvalidInput(format!(
                            "malformed PDDL: unsupported requirement `{}`",
                            as_atom(flag, "a requirement flag")?
                        )));
                    }
                }
            }
            ":predicates" => {
                for p in &section[1..] {
                    doc.predicates.push(as_predicate(p)?);
                }
            }
            ":action" => doc.actions.push(parse_action(section)?),
            other => {
                return Err(Error::InvalidInput(format!(
                    "malformed PDDL: unsupported domain section `{other}`"
                )))
            }
        }
    }
    if doc.name.is_empty() {
        return Err(Error::InvalidInput("malformed PDDL: missing `(domain <name>)`".into()));
    }
    Ok(doc)
}

/// Parses problem text (canonical or looser layout).
pub fn parse_problem(text: &str) -> Result<PddlProblemDoc> {
    let root = parse_single(text)?;
    let items = as_list(&root, "a `(define ...)` form")?;
    if as_atom(items.first().ok_or_else(|| Error::InvalidInput("malformed PDDL: empty form".into()))?, "a keyword")? != "define" {
        return Err(Error::InvalidInput("malformed PDDL: expected `(define ...)`".into()));
    }
    let mut doc =
        PddlProblemDoc { name: String::new(), domain: String::new(), init: vec![], goal: vec![] };
    for item in &items[1..] {
        let section = as_list(item, "a problem section")?;
        let head = as_atom(
            section.first().ok_or_else(|| Error::InvalidInput("malformed PDDL: empty section".into()))?,
            "a section keyword",
        )?;
        match head {
            "problem" => {
                doc.name = as_atom(
                    section.get(1).ok_or_else(|| Error::InvalidInput("malformed PDDL: `(problem)` needs a name".into()))?,
                    "a problem name",
                )?
                .to_string();
            }
            ":domain" => {
                doc.domain = as_atom(
                    section.get(1).ok_or_else(|| Error::InvalidInput("malformed PDDL: `:domain` needs a name".into()))?,
                    "a domain name",
                )?
                .to_string();
            }
            ":init" => {
                for p in &section[1..] {
                    doc.init.push(as_predicate(p)?);
                }
            }
            ":goal" => {
                let value = section.get(1).ok_or_else(|| {
                    Error::InvalidInput("malformed PDDL: `:goal` has no condition".into())
                })?;
                let (pos, neg) = parse_condition(value)?;
                if !neg.is_empty() {
                    return Err(Error::InvalidInput(
                        "malformed PDDL: negated goals are not allowed".into(),
                    ));
                }
                doc.goal = pos;
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "malformed PDDL: unsupported problem section `{other}`"
                )))
            }
        }
    }
    if doc.name.is_empty() || doc.domain.is_empty() {
        return Err(Error::InvalidInput(
            "malformed PDDL: problem needs `(problem <name>)` and `(:domain <name>)`".into(),
        ));
    }
    Ok(doc)
}

struct GroundAction {
    pre: u128,
    add: u128,
    del: u128,
}

/// Breadth-first search over the symbolic state space under STRIPS
/// semantics: an action applies iff its precondition is a subset of the
/// state; the successor drops the deletes and adds the adds. Returns a
/// shortest plan, ties broken by action order, or `None` when no plan exists
/// within `max_depth` actions.
pub fn plan_bfs(
    domain: &PddlDomainDoc,
    problem: &PddlProblemDoc,
    max_depth: usize,
) -> Result<Option<Plan>> {
    if domain.predicates.len() > 128 {
        return Err(Error::Inconsistency(format!(
            "planner supports at most 128 predicates, domain `{}` has {}",
            domain.name,
            domain.predicates.len()
        )));
    }
    let index: BTreeMap<&str, usize> =
        domain.predicates.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let mask_of = |names: &[String]| -> Result<u128> {
        names.iter().try_fold(0u128, |m, n| {
            index
                .get(n.as_str())
                .map(|&i| m | (1u128 << i))
                .ok_or_else(|| Error::Inconsistency(format!("unknown predicate `{n}`")))
        })
    };
    let actions: Vec<GroundAction> = domain
        .actions
        .iter()
        .map(|a| {
            Ok(GroundAction { pre: mask_of(&a.pre)?, add: mask_of(&a.add)?, del: mask_of(&a.del)? })
        })
        .collect::<Result<_>>()?;
    let init = mask_of(&problem.init)?;
    let goal = mask_of(&problem.goal)?;
    if init & goal == goal {
        return Ok(Some(Plan { actions: vec![] }));
    }

    let mut parent: HashMap<u128, (u128, usize)> = HashMap::new();
    let mut seen: HashSet<u128> = HashSet::from([init]);
    let mut queue: VecDeque<(u128, usize)> = VecDeque::from([(init, 0)]);
    while let Some((state, depth)) = queue.pop_front() {
        if depth == max_depth {
            continue;
        }
        for (ai, a) in actions.iter().enumerate() {
            if state & a.pre != a.pre {
                continue;
            }
            let next = (state & !a.del) | a.add;
            if !seen.insert(next) {
                continue;
            }
            parent.insert(next, (state, ai));
            if next & goal == goal {
                let mut names = vec![domain.actions[ai].name.clone()];
                let mut cur = state;
                while cur != init {
                    let (prev, pai) = parent[&cur];
                    names.push(domain.actions[pai].name.clone());
                    cur = prev;
                }
                names.reverse();
                return Ok(Some(Plan { actions: names }));
            }
            queue.push_back((next, depth + 1));
        }
    }
    Ok(None)
}
