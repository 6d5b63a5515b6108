//! Simulator cross-check: does the symbolic domain keep its promises?
//!
//! The learned operators claim that wherever their precondition holds the
//! option runs and lands where the effects say. The claim is checked against
//! the simulator over every reachable state. Divergences are findings, not
//! failures: a divergence means the chosen set representation could not
//! express something about the scenario, which is exactly what the toolkit
//! exists to surface.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::env::{execute_option, LowLevelState, ScenarioSpec};
use crate::Result;

use super::{SymbolicDomain, Warning};

/// Every state reachable from the all-zero state through successful option
/// executions, in lexicographic order of their compact rendering. Exogenous
/// resets only revisit the all-zero start, so they add nothing.
pub fn reachable_states(spec: &ScenarioSpec) -> Result<Vec<LowLevelState>> {
    let start = LowLevelState::zeros(spec.n_vars);
    let mut seen: BTreeMap<String, LowLevelState> = BTreeMap::new();
    seen.insert(start.compact(), start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        for rule in &spec.options {
            let out = execute_option(spec, &state, rule.id)?;
            if out.success && !seen.contains_key(&out.next_state.compact()) {
                seen.insert(out.next_state.compact(), out.next_state.clone());
                queue.push_back(out.next_state);
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Replays every operator against every reachable state where its
/// precondition holds and reports each divergence once, with the first
/// witness state in scan order: an execution failure per operator, an effect
/// anomaly per (operator, symbol, polarity).
pub fn soundness_check(spec: &ScenarioSpec, domain: &SymbolicDomain) -> Result<Vec<Warning>> {
    let states = reachable_states(spec)?;
    let mut warnings = Vec::new();
    for op in &domain.operators {
        let mut failed = false;
        let mut anomalous: BTreeSet<(usize, bool)> = BTreeSet::new();
        for state in &states {
            let holds = op
                .pre
                .iter()
                .all(|&id| domain.symbols[id].grounding.contains_state(state.values()));
            if !holds {
                continue;
            }
            let out = execute_option(spec, state, op.option)?;
            if !out.success {
                if !failed {
                    warnings.push(Warning::ExecutionFailure {
                        option: op.option,
                        state: state.compact(),
                    });
                    failed = true;
                }
                continue;
            }
            let after = out.next_state.values();
            for &id in &op.eff_pos {
                if !domain.symbols[id].grounding.contains_state(after)
                    && anomalous.insert((id, true))
                {
                    warnings.push(Warning::EffectAnomaly {
                        option: op.option,
                        symbol: id,
                        label: domain.symbols[id].label.clone(),
                        expected_positive: true,
                        state: state.compact(),
                    });
                }
            }
            for &id in &op.eff_neg {
                if domain.symbols[id].grounding.contains_state(after)
                    && anomalous.insert((id, false))
                {
                    warnings.push(Warning::EffectAnomaly {
                        option: op.option,
                        symbol: id,
                        label: domain.symbols[id].label.clone(),
                        expected_positive: false,
                        state: state.compact(),
                    });
                }
            }
        }
    }
    Ok(warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::builtin_scenario;
    use crate::setrep::{BoxSet, FilterBox, Interval, Representation};
    use crate::abstraction::{Factor, Operator, Symbol};

    fn on_symbol(id: usize, var: usize, producer: usize) -> Symbol {
        Symbol {
            id,
            label: format!("v{}_on", var + 1),
            grounding: BoxSet::single(FilterBox::universal().with(var, Interval::above(0.5))),
            factors: BTreeSet::from([var]),
            producers: BTreeSet::from([producer]),
        }
    }

    fn negative_domain(op3: Operator) -> SymbolicDomain {
        // Hand-built fragment of the scenario where one option lights two
        // bulbs at once: symbols for v2-on and v1-on, operators o_1 and o_3.
        SymbolicDomain {
            scenario: "negative".into(),
            representation: Representation::C45,
            n_vars: 6,
            factors: (0..6)
                .map(|i| Factor {
                    id: i,
                    vars: BTreeSet::from([i]),
                    modifiers: BTreeSet::new(),
                })
                .collect(),
            symbols: vec![on_symbol(0, 1, 0), on_symbol(1, 0, 2)],
            operators: vec![
                Operator {
                    option: 0,
                    pre: BTreeSet::new(),
                    eff_pos: BTreeSet::from([0]),
                    eff_neg: BTreeSet::new(),
                },
                op3,
            ],
            warnings: vec![],
        }
    }

    #[test]
    fn reachability_respects_scenario_dynamics() {
        let reset = builtin_scenario("reset").unwrap();
        let states = reachable_states(&reset).unwrap();
        for s in &states {
            // Bulbs light in order: a lit bulb implies its predecessor,
            // except bulb 6 which anything may accompany.
            for v in 1..5 {
                if s.get(v) == 1.0 {
                    assert_eq!(s.get(v - 1), 1.0, "state {} breaks the chain", s.compact());
                }
            }
        }
        // Chains of length 0..=5, each with bulb 6 free: 12 states.
        assert_eq!(states.len(), 12);

        let unreachable = builtin_scenario("unreachable").unwrap();
        let states = reachable_states(&unreachable).unwrap();
        assert!(states.iter().all(|s| s.get(5) == 0.0), "bulb 6 must stay dark");
        assert!(states.iter().any(|s| s.get(0) == 1.0 && s.get(1) == 1.0));
    }

    #[test]
    fn faithful_effects_raise_no_warnings() {
        let spec = builtin_scenario("negative").unwrap();
        let domain = negative_domain(Operator {
            option: 2,
            pre: BTreeSet::new(),
            eff_pos: BTreeSet::from([0, 1]),
            eff_neg: BTreeSet::new(),
        });
        assert!(soundness_check(&spec, &domain).unwrap().is_empty());
    }

    #[test]
    fn false_negative_effect_is_reported_once_with_first_witness() {
        let spec = builtin_scenario("negative").unwrap();
        // o_3 lights bulbs 1 and 2, yet the operator claims it darkens bulb 2.
        let domain = negative_domain(Operator {
            option: 2,
            pre: BTreeSet::new(),
            eff_pos: BTreeSet::from([1]),
            eff_neg: BTreeSet::from([0]),
        });
        let warnings = soundness_check(&spec, &domain).unwrap();
        assert_eq!(
            warnings,
            vec![Warning::EffectAnomaly {
                option: 2,
                symbol: 0,
                label: "v2_on".into(),
                expected_positive: false,
                state: "000000".into(),
            }]
        );
        let text = warnings[0].to_string();
        assert!(text.contains("op_3"), "message names the operator: {text}");
        assert!(text.contains("v2_on"), "message names the symbol: {text}");
    }

    #[test]
    fn missing_positive_effect_is_reported() {
        let spec = builtin_scenario("negative").unwrap();
        // Claim o_1 lights bulb 1; it lights bulb 2.
        let domain = negative_domain(Operator {
            option: 2,
            pre: BTreeSet::new(),
            eff_pos: BTreeSet::from([0, 1]),
            eff_neg: BTreeSet::new(),
        });
        let mut broken = domain.clone();
        broken.operators[0].eff_pos = BTreeSet::from([1]);
        let warnings = soundness_check(&spec, &broken).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(matches!(
            &warnings[0],
            Warning::EffectAnomaly { option: 0, symbol: 1, expected_positive: true, .. }
        ));
    }

    #[test]
    fn guard_violations_under_a_weak_precondition_are_reported() {
        let spec = builtin_scenario("unreachable").unwrap();
        // o_3 requires bulb 2 dark; an empty precondition lets the check
        // reach it from lit-bulb-2 states.
        let domain = SymbolicDomain {
            scenario: "unreachable".into(),
            representation: Representation::C45,
            n_vars: 6,
            factors: (0..6)
                .map(|i| Factor {
                    id: i,
                    vars: BTreeSet::from([i]),
                    modifiers: BTreeSet::new(),
                })
                .collect(),
            symbols: vec![on_symbol(0, 0, 2)],
            operators: vec![Operator {
                option: 2,
                pre: BTreeSet::new(),
                eff_pos: BTreeSet::from([0]),
                eff_neg: BTreeSet::new(),
            }],
            warnings: vec![],
        };
        let warnings = soundness_check(&spec, &domain).unwrap();
        assert_eq!(warnings.len(), 1);
        match &warnings[0] {
            Warning::ExecutionFailure { option: 2, state } => {
                // First witness in scan order: bulb 2 lit blocks o_3.
                assert_eq!(state, "010000");
            }
            other => panic!("expected an execution failure, got {other:?}"),
        }
    }
}
