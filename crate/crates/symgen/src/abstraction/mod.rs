//! Skill abstraction: characterizing sets → factors → symbols → operators.
//!
//! Each option contributes a characterizing set: the learned initiation set
//! (where the option runs), the learned effect set (where it lands), and the
//! observed mask (which variables it changes). Variables modified by the same
//! set of options form a factor; projecting effect sets onto factors yields
//! propositional symbols; operators are assembled from the symbols an option
//! produces, overwrites, and requires.

pub mod operators;
pub mod soundness;
pub mod symbols;

pub use soundness::{reachable_states, soundness_check};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::explorer::{compute_mask, OptionDatasets};
use crate::setrep::tree::{c45_boxset, intm_boxset, train_tree};
use crate::setrep::{BoxSet, Representation};
use crate::{Error, Result};

/// An option's learned description: initiation set, effect set, mask.
#[derive(Debug, Clone)]
pub struct CharacterizingSet {
    /// 0-based option id.
    pub option: usize,
    pub init: BoxSet,
    pub effect: BoxSet,
    pub mask: BTreeSet<usize>,
}

/// Trains both classifiers for one option and lowers them to box sets under
/// the chosen representation. Interval hulls restrict the effect set to the
/// mask but keep every variable in scope for the initiation set; tree boxes
/// constrain exactly the variables their decision paths test.
pub fn build_charset(
    option: usize,
    ds: &OptionDatasets,
    rep: Representation,
    strict: bool,
    n_vars: usize,
) -> Result<CharacterizingSet> {
    let mask = compute_mask(option, &ds.mask_pairs)?;
    let init_tree = train_tree(&ds.init_pos, &ds.init_neg, n_vars)?;
    let effect_tree = train_tree(&ds.eff_pos, &ds.eff_neg, n_vars)?;
    let (init, effect) = match rep {
        Representation::C45 => (c45_boxset(&init_tree, strict)?, c45_boxset(&effect_tree, strict)?),
        Representation::IntM => (
            intm_boxset(&init_tree, None, strict)?,
            intm_boxset(&effect_tree, Some(&mask), strict)?,
        ),
    };
    Ok(CharacterizingSet { option, init, effect, mask })
}

/// A maximal set of variables modified by exactly the same options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    /// 0-based; displayed 1-based as `f_<id+1>`.
    pub id: usize,
    pub vars: BTreeSet<usize>,
    /// Options whose mask includes this factor's variables (possibly empty).
    pub modifiers: BTreeSet<usize>,
}

/// Partitions the variables by their modifier sets. Ids ascend with each
/// factor's smallest member variable; variables no option modifies share one
/// factor with an empty modifier set.
pub fn compute_factors(masks: &BTreeMap<usize, BTreeSet<usize>>, n_vars: usize) -> Vec<Factor> {
    let mut factors: Vec<Factor> = Vec::new();
    for var in 0..n_vars {
        let modifiers: BTreeSet<usize> =
            masks.iter().filter(|(_, m)| m.contains(&var)).map(|(&o, _)| o).collect();
        match factors.iter_mut().find(|f| f.modifiers == modifiers) {
            Some(f) => {
                f.vars.insert(var);
            }
            None => factors.push(Factor {
                id: factors.len(),
                vars: BTreeSet::from([var]),
                modifiers,
            }),
        }
    }
    factors
}

/// The factors containing an option's mask variables. Factors must be fully
/// inside or fully outside any mask; a straddling factor means the partition
/// was not built from these masks.
pub fn factors_of(mask: &BTreeSet<usize>, factors: &[Factor]) -> Result<BTreeSet<usize>> {
    let mut ids = BTreeSet::new();
    for f in factors {
        let hit = f.vars.intersection(mask).count();
        if hit == 0 {
            continue;
        }
        if hit != f.vars.len() {
            return Err(Error::Inconsistency(format!(
                "factor f_{} straddles a mask boundary",
                f.id + 1
            )));
        }
        ids.insert(f.id);
    }
    Ok(ids)
}

/// Union of the variables of the given factors.
pub fn vars_of_factors(ids: &BTreeSet<usize>, factors: &[Factor]) -> BTreeSet<usize> {
    ids.iter().flat_map(|&id| factors[id].vars.iter().copied()).collect()
}

pub(crate) fn all_vars(n_vars: usize) -> BTreeSet<usize> {
    (0..n_vars).collect()
}

/// A propositional symbol: a named region of the low-level state space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    /// 0-based; displayed 1-based as `s_<id+1>`.
    pub id: usize,
    pub label: String,
    pub grounding: BoxSet,
    /// Factors whose variables the grounding constrains.
    pub factors: BTreeSet<usize>,
    /// Options that generate this symbol as (part of) their effect.
    pub producers: BTreeSet<usize>,
}

/// A STRIPS operator over symbol ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operator {
    /// 0-based option id; displayed 1-based as `op_<id+1>`.
    pub option: usize,
    pub pre: BTreeSet<usize>,
    pub eff_pos: BTreeSet<usize>,
    pub eff_neg: BTreeSet<usize>,
}

/// How precondition subsets are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecondMode {
    /// Union of the inclusion-minimal satisfying subsets (default).
    #[default]
    MinimalUnion,
    /// Union of every satisfying subset.
    AllUnion,
}

impl fmt::Display for PrecondMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecondMode::MinimalUnion => "minimal-union",
            PrecondMode::AllUnion => "all-union",
        })
    }
}

impl std::str::FromStr for PrecondMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimal-union" => Ok(PrecondMode::MinimalUnion),
            "all-union" => Ok(PrecondMode::AllUnion),
            other => Err(Error::Usage(format!(
                "unknown precondition mode `{other}`, expected minimal-union or all-union"
            ))),
        }
    }
}

/// Findings the abstraction surfaces instead of failing: places where the
/// symbolic domain provably cannot or does not match the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The learned initiation set constrains variables, but no combination of
    /// available symbols fits inside it.
    InexpressiblePrecondition { option: usize },
    /// The option fails from a reachable state where the operator's
    /// precondition holds.
    ExecutionFailure { option: usize, state: String },
    /// After a successful execution, a positive effect does not hold or a
    /// negative effect still holds.
    EffectAnomaly {
        option: usize,
        symbol: usize,
        label: String,
        expected_positive: bool,
        state: String,
    },
}

impl Warning {
    pub fn option(&self) -> usize {
        match self {
            Warning::InexpressiblePrecondition { option }
            | Warning::ExecutionFailure { option, .. }
            | Warning::EffectAnomaly { option, .. } => *option,
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::InexpressiblePrecondition { option } => write!(
                f,
                "inexpressible precondition for o_{}: no symbol combination fits the learned initiation set",
                option + 1
            ),
            Warning::ExecutionFailure { option, state } => write!(
                f,
                "o_{} fails from state {state} although op_{}'s precondition holds there",
                option + 1,
                option + 1
            ),
            Warning::EffectAnomaly { option, label, expected_positive, state, .. } => {
                if *expected_positive {
                    write!(
                        f,
                        "op_{} lists {label} as a positive effect, but it does not hold after executing o_{} from {state}",
                        option + 1,
                        option + 1
                    )
                } else {
                    write!(
                        f,
                        "op_{} lists {label} as a negative effect, but it still holds after executing o_{} from {state}",
                        option + 1,
                        option + 1
                    )
                }
            }
        }
    }
}

/// A complete propositional planning domain plus the findings collected while
/// building it.
#[derive(Debug, Clone)]
pub struct SymbolicDomain {
    pub scenario: String,
    pub representation: Representation,
    pub n_vars: usize,
    pub factors: Vec<Factor>,
    pub symbols: Vec<Symbol>,
    pub operators: Vec<Operator>,
    pub warnings: Vec<Warning>,
}

impl SymbolicDomain {
    pub fn symbol(&self, id: usize) -> &Symbol {
        &self.symbols[id]
    }

    /// Ids of all symbols whose grounding contains the state.
    pub fn holding_symbols(&self, state: &[f64]) -> BTreeSet<usize> {
        self.symbols
            .iter()
            .filter(|s| s.grounding.contains_state(state))
            .map(|s| s.id)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut covered = BTreeSet::new();
        for f in &self.factors {
            if self.factors[f.id].id != f.id {
                return Err(Error::Inconsistency("factor ids out of order".into()));
            }
            for &v in &f.vars {
                if v >= self.n_vars || !covered.insert(v) {
                    return Err(Error::Inconsistency(format!(
                        "factors do not partition the variables (v{})",
                        v + 1
                    )));
                }
            }
        }
        if covered.len() != self.n_vars {
            return Err(Error::Inconsistency("factors do not cover all variables".into()));
        }
        for (idx, s) in self.symbols.iter().enumerate() {
            if s.id != idx {
                return Err(Error::Inconsistency("symbol ids out of order".into()));
            }
            let scope = vars_of_factors(&s.factors, &self.factors);
            if !s.grounding.constrained_vars().is_subset(&scope) {
                return Err(Error::Inconsistency(format!(
                    "symbol {} constrains variables outside its factors",
                    s.label
                )));
            }
            if s.producers.is_empty() {
                return Err(Error::Inconsistency(format!("symbol {} has no producer", s.label)));
            }
        }
        for op in &self.operators {
            for id in op.pre.iter().chain(&op.eff_pos).chain(&op.eff_neg) {
                if *id >= self.symbols.len() {
                    return Err(Error::Inconsistency(format!(
                        "op_{} references unknown symbol id {}",
                        op.option + 1,
                        id + 1
                    )));
                }
            }
            if op.eff_pos.intersection(&op.eff_neg).next().is_some() {
                return Err(Error::Inconsistency(format!(
                    "op_{} lists a symbol as both positive and negative effect",
                    op.option + 1
                )));
            }
        }
        Ok(())
    }
}

/// Runs the full abstraction over one scenario's characterizing sets.
pub fn build_domain(
    charsets: &[CharacterizingSet],
    n_vars: usize,
    scenario: &str,
    representation: Representation,
    mode: PrecondMode,
) -> Result<SymbolicDomain> {
    if charsets.is_empty() {
        return Err(Error::InvalidInput("cannot build a domain from zero options".into()));
    }
    let masks: BTreeMap<usize, BTreeSet<usize>> =
        charsets.iter().map(|cs| (cs.option, cs.mask.clone())).collect();
    let factors = compute_factors(&masks, n_vars);
    let mut syms = symbols::generate_symbols(charsets, &factors, n_vars)?;

    // Effects may mint remainder symbols for partial overwrites; those new
    // symbols can in turn be overwritten by other options, so recompute until
    // the vocabulary stops growing.
    let mut effects: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
    loop {
        let mut grew = false;
        effects.clear();
        for cs in charsets {
            let ofactors = factors_of(&cs.mask, &factors)?;
            let (pos, neg, added) =
                operators::effects_pass(cs.option, &ofactors, &factors, &mut syms, n_vars);
            grew |= added;
            effects.push((pos, neg));
        }
        if !grew {
            break;
        }
    }
    symbols::assign_labels(&mut syms);

    let mut ops = Vec::with_capacity(charsets.len());
    let mut warnings = Vec::new();
    for (cs, (eff_pos, eff_neg)) in charsets.iter().zip(effects) {
        let (pre, warning) =
            operators::compute_preconditions(cs.option, &cs.init, &syms, &factors, n_vars, mode)?;
        if let Some(w) = warning {
            warnings.push(w);
        }
        ops.push(Operator { option: cs.option, pre, eff_pos, eff_neg });
    }

    let domain = SymbolicDomain {
        scenario: scenario.to_string(),
        representation,
        n_vars,
        factors,
        symbols: syms,
        operators: ops,
        warnings,
    };
    domain.validate()?;
    Ok(domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setrep::{FilterBox, Interval};

    fn mask(vars: &[usize]) -> BTreeSet<usize> {
        vars.iter().copied().collect()
    }

    #[test]
    fn one_factor_per_variable_when_modifier_sets_differ() {
        // One option touching everything plus one dedicated option per
        // variable gives every variable a distinct modifier set.
        let mut masks = BTreeMap::new();
        masks.insert(0, mask(&[0, 1, 2, 3, 4, 5]));
        for o in 1..6 {
            masks.insert(o, mask(&[o - 1]));
        }
        let factors = compute_factors(&masks, 6);
        assert_eq!(factors.len(), 6);
        for (i, f) in factors.iter().enumerate() {
            assert_eq!(f.id, i);
            assert_eq!(f.vars, mask(&[i]));
        }
        assert_eq!(factors[0].modifiers, BTreeSet::from([0, 1]));
        assert_eq!(factors[5].modifiers, BTreeSet::from([0]));
    }

    #[test]
    fn same_modifier_set_merges_variables_into_one_factor() {
        let mut masks = BTreeMap::new();
        masks.insert(0, mask(&[0, 1]));
        masks.insert(1, mask(&[2]));
        let factors = compute_factors(&masks, 4);
        // v1,v2 share {o1}; v3 has {o2}; v4 is unmodified.
        assert_eq!(factors.len(), 3);
        assert_eq!(factors[0].vars, mask(&[0, 1]));
        assert_eq!(factors[1].vars, mask(&[2]));
        assert_eq!(factors[2].vars, mask(&[3]));
        assert!(factors[2].modifiers.is_empty());
    }

    #[test]
    fn unmodified_variables_share_an_empty_modifier_factor() {
        let mut masks = BTreeMap::new();
        masks.insert(0, mask(&[1]));
        let factors = compute_factors(&masks, 4);
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].vars, mask(&[0, 2, 3]));
        assert!(factors[0].modifiers.is_empty());
        assert_eq!(factors[1].vars, mask(&[1]));
    }

    #[test]
    fn factors_of_requires_whole_factors() {
        let factors = vec![
            Factor { id: 0, vars: mask(&[0, 1]), modifiers: BTreeSet::from([0]) },
            Factor { id: 1, vars: mask(&[2]), modifiers: BTreeSet::from([1]) },
        ];
        assert_eq!(factors_of(&mask(&[0, 1, 2]), &factors).unwrap(), BTreeSet::from([0, 1]));
        assert_eq!(factors_of(&mask(&[2]), &factors).unwrap(), BTreeSet::from([1]));
        assert!(factors_of(&mask(&[1]), &factors).is_err());
    }

    #[test]
    fn charset_respects_representation_scopes() {
        // o succeeds from v2=1 states and sets v1:=1.
        let ds = OptionDatasets {
            init_pos: vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            init_neg: vec![vec![0.0, 0.0]],
            eff_pos: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            eff_neg: vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]],
            mask_pairs: vec![(vec![0.0, 1.0], vec![1.0, 1.0])],
        };
        let c45 = build_charset(0, &ds, Representation::C45, true, 2).unwrap();
        assert_eq!(c45.mask, mask(&[0]));
        // Tree boxes constrain only the split variable.
        assert_eq!(c45.effect.constrained_vars(), mask(&[0]));
        assert_eq!(c45.init.constrained_vars(), mask(&[1]));

        let intm = build_charset(0, &ds, Representation::IntM, true, 2).unwrap();
        // Hull effect sets stay inside the mask; hull initiation sets span
        // every variable.
        assert_eq!(intm.effect.constrained_vars(), mask(&[0]));
        assert_eq!(intm.init.constrained_vars(), mask(&[0, 1]));
        assert!(intm.effect.contains_state(&[1.0, 0.0]));
        assert!(!c45.init.contains_state(&[1.0, 0.0]));
    }

    #[test]
    fn domain_validation_catches_overlapping_effects() {
        let grounding = BoxSet::single(FilterBox::universal().with(0, Interval::point(1.0)));
        let domain = SymbolicDomain {
            scenario: "tiny".into(),
            representation: Representation::C45,
            n_vars: 1,
            factors: vec![Factor { id: 0, vars: mask(&[0]), modifiers: BTreeSet::from([0]) }],
            symbols: vec![Symbol {
                id: 0,
                label: "v1_on".into(),
                grounding,
                factors: BTreeSet::from([0]),
                producers: BTreeSet::from([0]),
            }],
            operators: vec![Operator {
                option: 0,
                pre: BTreeSet::new(),
                eff_pos: BTreeSet::from([0]),
                eff_neg: BTreeSet::from([0]),
            }],
            warnings: vec![],
        };
        assert!(domain.validate().is_err());
    }
}
