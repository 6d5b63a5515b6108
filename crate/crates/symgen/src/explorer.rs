//! Random-exploration data collection and per-option dataset assembly.
//!
//! The collector repeatedly picks, uniformly at random, one of the options
//! whose goal condition does not already hold, executes it, and records the
//! attempt — successes and failures alike. Failed attempts are what teach the
//! learners where initiation sets end, so they are kept, not retried away.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{apply_exogenous, execute_option, LowLevelState, ScenarioSpec};
use crate::{Error, Result};

/// One recorded option attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRecord {
    pub step: u64,
    /// 0-based option index.
    pub option: usize,
    pub before: LowLevelState,
    pub success: bool,
    pub after: LowLevelState,
}

/// Labeled example multisets for one option. Duplicates are retained:
/// the learners are frequency-insensitive today, but the data layer should
/// not bake that assumption in.
#[derive(Debug, Clone, Default)]
pub struct OptionDatasets {
    /// States the option was attempted from and succeeded.
    pub init_pos: Vec<Vec<f64>>,
    /// States the option was attempted from and failed.
    pub init_neg: Vec<Vec<f64>>,
    /// States the option produced.
    pub eff_pos: Vec<Vec<f64>>,
    /// Negatives for the effect learner: every state the option was
    /// attempted from, successful or not.
    pub eff_neg: Vec<Vec<f64>>,
    /// (before, after) pairs of successful executions.
    pub mask_pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

/// Datasets for every option with at least one success, plus the ids of
/// options that never succeeded within the budget.
#[derive(Debug, Clone, Default)]
pub struct DatasetBundle {
    pub per_option: BTreeMap<usize, OptionDatasets>,
    /// 0-based ids of options excluded for lack of successful executions.
    pub uncovered: Vec<usize>,
}

/// Runs `budget` exploration steps from the all-zero state.
///
/// Each step executes one uniformly chosen option among those whose goal does
/// not hold. When every goal holds, the state is zeroed first (an episode
/// boundary); a scenario where every goal holds even at zero cannot be
/// explored and is rejected. Exogenous resets apply after the step completes.
pub fn collect(spec: &ScenarioSpec, budget: u64, seed: u64) -> Result<Vec<TransitionRecord>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = LowLevelState::zeros(spec.n_vars);
    let mut records = Vec::with_capacity(budget as usize);
    for step in 1..=budget {
        let mut candidates: Vec<usize> = spec
            .options
            .iter()
            .filter(|o| !o.goal_holds(&state))
            .map(|o| o.id)
            .collect();
        if candidates.is_empty() {
            state = LowLevelState::zeros(spec.n_vars);
            candidates = spec
                .options
                .iter()
                .filter(|o| !o.goal_holds(&state))
                .map(|o| o.id)
                .collect();
            if candidates.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "scenario `{}` has no option left to pursue even from the zero state",
                    spec.name
                )));
            }
        }
        let option = candidates[rng.gen_range(0..candidates.len())];
        let before = state.clone();
        let outcome = execute_option(spec, &before, option)?;
        records.push(TransitionRecord {
            step,
            option,
            before,
            success: outcome.success,
            after: outcome.next_state.clone(),
        });
        state = apply_exogenous(spec, &outcome.next_state, step);
    }
    Ok(records)
}

/// Splits a transition log into per-option learning sets.
pub fn build_datasets(spec: &ScenarioSpec, records: &[TransitionRecord]) -> Result<DatasetBundle> {
    let mut per_option: BTreeMap<usize, OptionDatasets> = BTreeMap::new();
    for rule in &spec.options {
        per_option.insert(rule.id, OptionDatasets::default());
    }
    for rec in records {
        let data = per_option
            .get_mut(&rec.option)
            .ok_or_else(|| Error::InvalidInput(format!("log mentions unknown option o_{}", rec.option + 1)))?;
        let before = rec.before.values().to_vec();
        data.eff_neg.push(before.clone());
        if rec.success {
            data.init_pos.push(before.clone());
            data.eff_pos.push(rec.after.values().to_vec());
            data.mask_pairs.push((before, rec.after.values().to_vec()));
        } else {
            data.init_neg.push(before);
        }
    }
    let uncovered: Vec<usize> = per_option
        .iter()
        .filter(|(_, d)| d.init_pos.is_empty())
        .map(|(&id, _)| id)
        .collect();
    for id in &uncovered {
        per_option.remove(id);
    }
    Ok(DatasetBundle { per_option, uncovered })
}

/// The set of variables an option ever changed across its successful
/// executions. Empty if the option never visibly changed anything — such an
/// option has no learnable effect and is rejected.
pub fn compute_mask(option: usize, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<BTreeSet<usize>> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput(format!(
            "option o_{} has no successful executions to derive a mask from",
            option + 1
        )));
    }
    let mut mask = BTreeSet::new();
    for (before, after) in pairs {
        for (var, (b, a)) in before.iter().zip(after.iter()).enumerate() {
            if b != a {
                mask.insert(var);
            }
        }
    }
    if mask.is_empty() {
        return Err(Error::InvalidInput(format!(
            "option o_{} never changed any variable; it has no effect to model",
            option + 1
        )));
    }
    Ok(mask)
}

/// Writes records as `step option before success after`, options 1-based,
/// states comma-separated decimals.
pub fn write_log<W: Write>(mut out: W, records: &[TransitionRecord]) -> Result<()> {
    for rec in records {
        writeln!(
            out,
            "{} {} {} {} {}",
            rec.step,
            rec.option + 1,
            rec.before,
            if rec.success { 1 } else { 0 },
            rec.after
        )?;
    }
    Ok(())
}

pub fn write_log_file(path: &Path, records: &[TransitionRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_log(&mut buf, records)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Parses a transition log produced by [`write_log`].
pub fn read_log<R: std::io::Read>(input: R, n_vars: usize) -> Result<Vec<TransitionRecord>> {
    let reader = BufReader::new(input);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let err = || Error::InvalidInput(format!("transition log line {}: malformed record", idx + 1));
        let step: u64 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(err)?;
        let option: usize = parts
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .filter(|&o| o >= 1)
            .ok_or_else(err)?;
        let before = LowLevelState::parse(parts.next().ok_or_else(err)?, n_vars)?;
        let success = match parts.next() {
            Some("1") => true,
            Some("0") => false,
            _ => return Err(err()),
        };
        let after = LowLevelState::parse(parts.next().ok_or_else(err)?, n_vars)?;
        if parts.next().is_some() {
            return Err(err());
        }
        records.push(TransitionRecord { step, option: option - 1, before, success, after });
    }
    Ok(records)
}

pub fn read_log_file(path: &Path, n_vars: usize) -> Result<Vec<TransitionRecord>> {
    let file = std::fs::File::open(path)?;
    read_log(file, n_vars)
}
