//! Operator synthesis: effects (with full and partial overwrites) and
//! preconditions (minimal symbol subsets inside the initiation set).

use std::collections::BTreeSet;

use crate::setrep::BoxSet;
use crate::{Error, Result};

use super::{all_vars, vars_of_factors, Factor, PrecondMode, Symbol, Warning};

/// Computes one option's effect lists over the current vocabulary and mints
/// remainder symbols for partial overwrites.
///
/// Symbols the option produces are positive effects. A symbol the option does
/// not produce whose factors all belong to the option is fully overwritten:
/// the execution rewrites its every variable, so it becomes a negative
/// effect. A symbol overlapping only some of the option's factors is
/// partially overwritten: negative effect as well, but its untouched part —
/// the grounding with the option's variables projected out — still holds
/// afterwards and is asserted as a positive effect, minting a new symbol if
/// no equal one exists. Returns true in the last slot when the vocabulary
/// grew.
pub(crate) fn effects_pass(
    option: usize,
    ofactors: &BTreeSet<usize>,
    factors: &[Factor],
    symbols: &mut Vec<Symbol>,
    _n_vars: usize,
) -> (BTreeSet<usize>, BTreeSet<usize>, bool) {
    let mut eff_pos: BTreeSet<usize> = symbols
        .iter()
        .filter(|s| s.producers.contains(&option))
        .map(|s| s.id)
        .collect();
    let mut eff_neg = BTreeSet::new();
    let mut remainders: Vec<(BTreeSet<usize>, BoxSet)> = Vec::new();
    for s in symbols.iter() {
        if s.producers.contains(&option) {
            continue;
        }
        let overlap: BTreeSet<usize> = s.factors.intersection(ofactors).copied().collect();
        if overlap.is_empty() {
            continue;
        }
        eff_neg.insert(s.id);
        if !s.factors.is_subset(ofactors) {
            let rem_factors: BTreeSet<usize> =
                s.factors.difference(ofactors).copied().collect();
            let overwritten = vars_of_factors(&overlap, factors);
            let rem_grounding = s.grounding.project(&overwritten);
            if !rem_grounding.is_universal_set() {
                remainders.push((rem_factors, rem_grounding));
            }
        }
    }
    let mut grew = false;
    for (rem_factors, rem_grounding) in remainders {
        match symbols
            .iter_mut()
            .find(|s| s.factors == rem_factors && s.grounding.set_eq(&rem_grounding))
        {
            Some(existing) => {
                existing.producers.insert(option);
                eff_pos.insert(existing.id);
            }
            None => {
                let id = symbols.len();
                symbols.push(Symbol {
                    id,
                    label: String::new(),
                    grounding: rem_grounding,
                    factors: rem_factors,
                    producers: BTreeSet::from([option]),
                });
                eff_pos.insert(id);
                grew = true;
            }
        }
    }
    (eff_pos, eff_neg, grew)
}

const MAX_PRECOND_CANDIDATES: usize = 24;

/// Finds the symbols that must hold for the option to run.
///
/// The search space is the set of symbols over factors the initiation set
/// actually narrows (a full-range filter narrows nothing) whose grounding
/// fits inside the initiation set on their own variables. Subsets of those
/// symbols, pairwise factor-disjoint, are tested for containment: the
/// intersection of their groundings must lie inside the initiation set
/// restricted to the variables the compatible symbols can speak about.
/// The result is the union of the inclusion-minimal satisfying subsets (or of
/// all satisfying subsets in [`PrecondMode::AllUnion`]).
///
/// An initiation set that narrows nothing needs no precondition. One that
/// narrows variables no symbol combination can mirror is inexpressible in the
/// vocabulary: the precondition stays empty and a warning says so.
pub(crate) fn compute_preconditions(
    option: usize,
    init: &BoxSet,
    symbols: &[Symbol],
    factors: &[Factor],
    n_vars: usize,
    mode: PrecondMode,
) -> Result<(BTreeSet<usize>, Option<Warning>)> {
    let binding = init.binding_vars();
    if binding.is_empty() {
        return Ok((BTreeSet::new(), None));
    }
    let init_factors: BTreeSet<usize> = factors
        .iter()
        .filter(|f| f.vars.intersection(&binding).next().is_some())
        .map(|f| f.id)
        .collect();
    let everything = all_vars(n_vars);
    let candidates: Vec<&Symbol> = symbols
        .iter()
        .filter(|s| s.factors.is_subset(&init_factors))
        .filter(|s| {
            let scope = vars_of_factors(&s.factors, factors);
            let out: BTreeSet<usize> = everything.difference(&scope).copied().collect();
            s.grounding.is_subset(&init.project(&out))
        })
        .collect();
    if candidates.is_empty() {
        return Ok((BTreeSet::new(), Some(Warning::InexpressiblePrecondition { option })));
    }
    if candidates.len() > MAX_PRECOND_CANDIDATES {
        return Err(Error::Inconsistency(format!(
            "precondition search over {} candidate symbols is too large",
            candidates.len()
        )));
    }
    let expressible: BTreeSet<usize> = candidates
        .iter()
        .flat_map(|s| vars_of_factors(&s.factors, factors))
        .collect();
    let hidden: BTreeSet<usize> = everything.difference(&expressible).copied().collect();
    let target = init.project(&hidden);

    let mut satisfying: Vec<BTreeSet<usize>> = Vec::new();
    search(
        &candidates,
        &target,
        mode,
        0,
        &mut Vec::new(),
        &BTreeSet::new(),
        &BoxSet::universal(),
        &mut satisfying,
    );
    if satisfying.is_empty() {
        return Ok((BTreeSet::new(), Some(Warning::InexpressiblePrecondition { option })));
    }
    let pre = match mode {
        PrecondMode::MinimalUnion => {
            let minimal: Vec<&BTreeSet<usize>> = satisfying
                .iter()
                .filter(|s| {
                    !satisfying.iter().any(|t| t.len() < s.len() && t.is_subset(s))
                })
                .collect();
            minimal.into_iter().flatten().copied().collect()
        }
        PrecondMode::AllUnion => satisfying.into_iter().flatten().collect(),
    };
    Ok((pre, None))
}

/// Depth-first enumeration of factor-disjoint candidate subsets. In
/// minimal-union mode a satisfying subset is not extended (supersets stay
/// satisfying but can never be minimal); in all-union mode extension
/// continues so every satisfying subset is collected.
#[allow(clippy::too_many_arguments)]
fn search(
    candidates: &[&Symbol],
    target: &BoxSet,
    mode: PrecondMode,
    start: usize,
    chosen: &mut Vec<usize>,
    used_factors: &BTreeSet<usize>,
    intersection: &BoxSet,
    satisfying: &mut Vec<BTreeSet<usize>>,
) {
    for (i, symbol) in candidates.iter().enumerate().skip(start) {
        if symbol.factors.intersection(used_factors).next().is_some() {
            continue;
        }
        let next_intersection = intersection.intersect(&symbol.grounding);
        chosen.push(symbol.id);
        let hit = next_intersection.is_subset(target);
        if hit {
            satisfying.push(chosen.iter().copied().collect());
        }
        if !hit || mode == PrecondMode::AllUnion {
            let next_used: BTreeSet<usize> =
                used_factors.union(&symbol.factors).copied().collect();
            search(
                candidates,
                target,
                mode,
                i + 1,
                chosen,
                &next_used,
                &next_intersection,
                satisfying,
            );
        }
        chosen.pop();
    }
}
