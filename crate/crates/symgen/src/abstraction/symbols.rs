//! Symbol generation: projecting effect sets onto factors.

use std::collections::BTreeSet;

use crate::setrep::BoxSet;
use crate::Result;

use super::{all_vars, factors_of, vars_of_factors, CharacterizingSet, Factor, Symbol};

/// Whether a factor's variables take their values in `effect` independently
/// of all other variables: the set must equal the intersection of its
/// projection onto the factor with its projection onto everything else.
/// Single-box sets are products of per-variable intervals, so they always
/// pass; only multi-box sets can entangle factors.
pub fn independence_test(effect: &BoxSet, factor_vars: &BTreeSet<usize>, n_vars: usize) -> bool {
    let others: BTreeSet<usize> =
        all_vars(n_vars).difference(factor_vars).copied().collect();
    let onto_factor = effect.project(&others);
    let onto_rest = effect.project(factor_vars);
    onto_factor.intersect(&onto_rest).set_eq(effect)
}

/// Generates the symbol vocabulary from every option's effect set.
///
/// Each factor an option modifies independently becomes one candidate symbol:
/// the effect set with every other variable projected out. Factors that fail
/// the independence test are entangled with each other, so they instead yield
/// one candidate per non-empty proper subset of the entangled group, keeping
/// exactly that subset's variables. Candidates whose grounding is the
/// universal set constrain nothing and are dropped; candidates equal to an
/// existing symbol (same factors, same set) merge into it as an additional
/// producer. Surviving symbols are numbered in (option, factor-set) order.
pub fn generate_symbols(
    charsets: &[CharacterizingSet],
    factors: &[Factor],
    n_vars: usize,
) -> Result<Vec<Symbol>> {
    let everything = all_vars(n_vars);
    let mut symbols: Vec<Symbol> = Vec::new();
    for cs in charsets {
        let ofactors = factors_of(&cs.mask, factors)?;
        let mut independent = Vec::new();
        let mut entangled = Vec::new();
        for &f in &ofactors {
            if independence_test(&cs.effect, &factors[f].vars, n_vars) {
                independent.push(f);
            } else {
                entangled.push(f);
            }
        }
        let mut candidate_factor_sets: Vec<BTreeSet<usize>> =
            independent.iter().map(|&f| BTreeSet::from([f])).collect();
        if entangled.len() == 1 {
            // An entangled factor needs a partner to be entangled with; a
            // singleton here can only mean its partner lies outside the
            // option's factors, which masks rule out. Fall back to treating
            // it as independent rather than losing its marginal.
            candidate_factor_sets.push(BTreeSet::from([entangled[0]]));
        } else if entangled.len() > 1 {
            for bits in 1..(1u32 << entangled.len()) - 1 {
                let subset: BTreeSet<usize> = entangled
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .map(|(_, &f)| f)
                    .collect();
                candidate_factor_sets.push(subset);
            }
        }
        for fset in candidate_factor_sets {
            let keep = vars_of_factors(&fset, factors);
            let out: BTreeSet<usize> = everything.difference(&keep).copied().collect();
            let grounding = cs.effect.project(&out);
            if grounding.is_universal_set() {
                continue;
            }
            match symbols
                .iter_mut()
                .find(|s| s.factors == fset && s.grounding.set_eq(&grounding))
            {
                Some(existing) => {
                    existing.producers.insert(cs.option);
                }
                None => symbols.push(Symbol {
                    id: symbols.len(),
                    label: String::new(),
                    grounding,
                    factors: fset,
                    producers: BTreeSet::from([cs.option]),
                }),
            }
        }
    }
    Ok(symbols)
}

/// Names every symbol after what its grounding says per variable: `on` for
/// intervals holding 1 but not 0, `off` for the reverse, `any` otherwise.
/// Clashes get a numeric suffix so labels stay unique.
pub fn assign_labels(symbols: &mut [Symbol]) {
    let raw: Vec<String> = symbols.iter().map(raw_label).collect();
    for i in 0..symbols.len() {
        let clashes_before = raw[..i].iter().filter(|r| **r == raw[i]).count();
        symbols[i].label = if clashes_before == 0 {
            raw[i].clone()
        } else {
            format!("{}_{}", raw[i], clashes_before + 1)
        };
    }
}

fn raw_label(symbol: &Symbol) -> String {
    if symbol.grounding.boxes().is_empty() {
        return "never".to_string();
    }
    let parts: Vec<String> = symbol
        .grounding
        .constrained_vars()
        .into_iter()
        .map(|v| {
            let boxes = symbol.grounding.boxes();
            let holds_1 = boxes.iter().any(|b| b.interval_on(v).contains(1.0));
            let holds_0 = boxes.iter().any(|b| b.interval_on(v).contains(0.0));
            let state = match (holds_1, holds_0) {
                (true, false) => "on",
                (false, true) => "off",
                _ => "any",
            };
            format!("v{}_{state}", v + 1)
        })
        .collect();
    parts.join("_")
}
