//! Stage orchestration: collect → abstract → emit → plan.
//!
//! Each stage reads its predecessor's artifact from the output directory and
//! writes its own, so stages can be run separately, inspected, and replayed.
//! Everything is deterministic in the configuration: identical configs yield
//! byte-identical artifacts.
//!
//! Artifacts:
//! - `transitions.log` — one attempted execution per line.
//! - `datasets.txt`    — per-option dataset sizes and observed masks.
//! - `domain.json`     — factors, symbols, operators, warnings (1-based ids).
//! - `domain.pddl`     — the STRIPS domain in canonical text.
//! - `problem.pddl`    — optional, when an init/goal is given.
//! - `plan.txt`        — the found plan, one action per line, or `no plan`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::abstraction::{
    build_charset, build_domain, soundness_check, Factor, Operator, PrecondMode, Symbol,
    SymbolicDomain, Warning,
};
use crate::env::{builtin_scenario, LowLevelState, ScenarioSpec};
use crate::explorer::{build_datasets, collect, compute_mask, read_log_file, write_log_file, DatasetBundle};
use crate::pddl::{domain_text, emit_domain, emit_problem, plan_bfs, problem_text, Plan};
use crate::setrep::{BoxSet, Representation};
use crate::{Error, Result};

pub const TRANSITIONS_FILE: &str = "transitions.log";
pub const DATASETS_FILE: &str = "datasets.txt";
pub const DOMAIN_JSON_FILE: &str = "domain.json";
pub const DOMAIN_PDDL_FILE: &str = "domain.pddl";
pub const PROBLEM_PDDL_FILE: &str = "problem.pddl";
pub const PLAN_FILE: &str = "plan.txt";

/// Everything a run needs; two equal configs produce byte-identical
/// artifacts.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Builtin scenario name or path to a scenario file.
    pub scenario: String,
    pub representation: Representation,
    /// Number of exploration steps to collect.
    pub budget: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Maximum plan length the planner searches.
    pub max_depth: usize,
    pub precond_mode: PrecondMode,
    /// Reject characterizing-set classifiers with more than one true leaf.
    pub strict: bool,
}

/// Resolves a builtin scenario name, falling back to a scenario file path.
pub fn resolve_scenario(name_or_path: &str) -> Result<ScenarioSpec> {
    if let Some(spec) = builtin_scenario(name_or_path) {
        return Ok(spec);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return ScenarioSpec::from_toml_file(path);
    }
    Err(Error::Usage(format!(
        "unknown scenario `{name_or_path}`: not a builtin (reset, negative, unreachable) and not a file"
    )))
}

fn read_artifact(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!(
            "cannot read {}: {e}; run the earlier pipeline stages into this directory first",
            path.display()
        ))
    })
}

pub struct CollectOutcome {
    pub steps: usize,
    /// The `datasets.txt` content: per-option counts and masks.
    pub summary: String,
}

/// Runs the exploration, writes `transitions.log` and `datasets.txt`.
pub fn run_collect(config: &PipelineConfig) -> Result<CollectOutcome> {
    if config.budget == 0 {
        return Err(Error::Usage("budget must be at least 1 step".into()));
    }
    let spec = resolve_scenario(&config.scenario)?;
    let records = collect(&spec, config.budget, config.seed)?;
    let bundle = build_datasets(&spec, &records)?;
    fs::create_dir_all(&config.out_dir)?;
    write_log_file(&config.out_dir.join(TRANSITIONS_FILE), &records)?;
    let summary = dataset_summary(&bundle)?;
    fs::write(config.out_dir.join(DATASETS_FILE), &summary)?;
    Ok(CollectOutcome { steps: records.len(), summary })
}

fn dataset_summary(bundle: &DatasetBundle) -> Result<String> {
    let mut out = String::from("option init_pos init_neg eff_pos eff_neg mask\n");
    for (&opt, ds) in &bundle.per_option {
        let mask = compute_mask(opt, &ds.mask_pairs)?;
        let mask_text: Vec<String> = mask.iter().map(|v| format!("v{}", v + 1)).collect();
        let _ = writeln!(
            out,
            "o_{} {} {} {} {} {}",
            opt + 1,
            ds.init_pos.len(),
            ds.init_neg.len(),
            ds.eff_pos.len(),
            ds.eff_neg.len(),
            mask_text.join(",")
        );
    }
    if bundle.uncovered.is_empty() {
        out.push_str("uncovered none\n");
    } else {
        let names: Vec<String> = bundle.uncovered.iter().map(|o| format!("o_{}", o + 1)).collect();
        let _ = writeln!(out, "uncovered {}", names.join(","));
    }
    Ok(out)
}

/// Reads `transitions.log`, builds the symbolic domain, cross-checks it
/// against the simulator, and writes `domain.json`.
pub fn run_abstract(config: &PipelineConfig) -> Result<SymbolicDomain> {
    let spec = resolve_scenario(&config.scenario)?;
    let log_path = config.out_dir.join(TRANSITIONS_FILE);
    if !log_path.exists() {
        return Err(Error::InvalidInput(format!(
            "cannot read {}: run `collect` into this directory first",
            log_path.display()
        )));
    }
    let records = read_log_file(&log_path, spec.n_vars)?;
    let bundle = build_datasets(&spec, &records)?;
    if !bundle.uncovered.is_empty() {
        let names: Vec<String> = bundle.uncovered.iter().map(|o| format!("o_{}", o + 1)).collect();
        return Err(Error::InvalidInput(format!(
            "no successful executions recorded for {}; raise the budget or revisit the scenario",
            names.join(", ")
        )));
    }
    let mut charsets = Vec::new();
    for (&opt, ds) in &bundle.per_option {
        charsets.push(build_charset(opt, ds, config.representation, config.strict, spec.n_vars)?);
    }
    let mut domain =
        build_domain(&charsets, spec.n_vars, &spec.name, config.representation, config.precond_mode)?;
    let findings = soundness_check(&spec, &domain)?;
    domain.warnings.extend(findings);
    let json = serde_json::to_string_pretty(&domain_to_doc(&domain))? + "\n";
    fs::write(config.out_dir.join(DOMAIN_JSON_FILE), json)?;
    Ok(domain)
}

fn read_domain(config: &PipelineConfig) -> Result<SymbolicDomain> {
    let text = read_artifact(&config.out_dir.join(DOMAIN_JSON_FILE))?;
    let doc: DomainDoc = serde_json::from_str(&text)?;
    let domain = domain_from_doc(&doc)?;
    domain.validate()?;
    Ok(domain)
}

fn parse_init(init: Option<&str>, n_vars: usize) -> Result<LowLevelState> {
    match init {
        None => Ok(LowLevelState::zeros(n_vars)),
        Some(text) => LowLevelState::parse(text, n_vars),
    }
}

fn resolve_goal_labels(domain: &SymbolicDomain, labels: &[String]) -> Result<BTreeSet<usize>> {
    let mut ids = BTreeSet::new();
    for label in labels {
        match domain.symbols.iter().find(|s| &s.label == label) {
            Some(s) => {
                ids.insert(s.id);
            }
            None => {
                let available: Vec<&str> =
                    domain.symbols.iter().map(|s| s.label.as_str()).collect();
                return Err(Error::InvalidInput(format!(
                    "unknown goal symbol `{label}`; available symbols: {}",
                    available.join(", ")
                )));
            }
        }
    }
    Ok(ids)
}

/// Reads `domain.json` and writes `domain.pddl`, plus `problem.pddl` when a
/// goal is given.
pub fn run_emit(config: &PipelineConfig, init: Option<&str>, goal: &[String]) -> Result<SymbolicDomain> {
    if goal.is_empty() && init.is_some() {
        return Err(Error::Usage("--init is only meaningful together with --goal".into()));
    }
    let domain = read_domain(config)?;
    let doc = emit_domain(&domain)?;
    fs::create_dir_all(&config.out_dir)?;
    fs::write(config.out_dir.join(DOMAIN_PDDL_FILE), domain_text(&doc))?;
    if !goal.is_empty() {
        let init_state = parse_init(init, domain.n_vars)?;
        let goal_ids = resolve_goal_labels(&domain, goal)?;
        let problem = emit_problem(&domain.symbols, &doc.name, &init_state, &goal_ids)?;
        fs::write(config.out_dir.join(PROBLEM_PDDL_FILE), problem_text(&problem))?;
    }
    Ok(domain)
}

/// Reads `domain.json`, searches for a plan, and writes `plan.txt`.
pub fn run_plan(config: &PipelineConfig, init: Option<&str>, goal: &[String]) -> Result<Option<Plan>> {
    if goal.is_empty() {
        return Err(Error::Usage("plan needs --goal with at least one symbol label".into()));
    }
    let domain = read_domain(config)?;
    let doc = emit_domain(&domain)?;
    let init_state = parse_init(init, domain.n_vars)?;
    let goal_ids = resolve_goal_labels(&domain, goal)?;
    let problem = emit_problem(&domain.symbols, &doc.name, &init_state, &goal_ids)?;
    let plan = plan_bfs(&doc, &problem, config.max_depth)?;
    let text = match &plan {
        Some(p) => p.actions.iter().fold(String::new(), |mut acc, a| {
            acc.push_str(a);
            acc.push('\n');
            acc
        }),
        None => "no plan\n".to_string(),
    };
    fs::create_dir_all(&config.out_dir)?;
    fs::write(config.out_dir.join(PLAN_FILE), text)?;
    Ok(plan)
}

pub struct PipelineOutcome {
    pub steps: usize,
    pub summary: String,
    pub domain: SymbolicDomain,
    pub plan: Option<Plan>,
}

/// Runs all four stages in order with one configuration.
pub fn run_pipeline(
    config: &PipelineConfig,
    init: Option<&str>,
    goal: &[String],
) -> Result<PipelineOutcome> {
    if goal.is_empty() {
        return Err(Error::Usage("pipeline needs --goal with at least one symbol label".into()));
    }
    let collected = run_collect(config)?;
    run_abstract(config)?;
    let domain = run_emit(config, init, goal)?;
    let plan = run_plan(config, init, goal)?;
    Ok(PipelineOutcome { steps: collected.steps, summary: collected.summary, domain, plan })
}

// ---------------------------------------------------------------------------
// domain.json document layer
//
// The JSON artifact uses 1-based ids throughout (options, variables, symbols,
// factors) to match the o_1/v1/s_1/f_1 naming used everywhere else a human
// reads them. Conversion back to the 0-based in-memory form validates ids.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainDoc {
    pub scenario: String,
    pub representation: Representation,
    pub n_vars: usize,
    pub factors: Vec<FactorDoc>,
    pub symbols: Vec<SymbolDoc>,
    pub operators: Vec<OperatorDoc>,
    pub warnings: Vec<WarningDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorDoc {
    pub id: usize,
    pub vars: Vec<usize>,
    pub modifiers: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub id: usize,
    pub label: String,
    pub grounding: BoxSet,
    pub factors: Vec<usize>,
    pub producers: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub option: usize,
    pub pre: Vec<usize>,
    pub eff_pos: Vec<usize>,
    pub eff_neg: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WarningDoc {
    pub kind: String,
    pub option: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_positive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub message: String,
}

fn up(ids: &BTreeSet<usize>) -> Vec<usize> {
    ids.iter().map(|i| i + 1).collect()
}

fn down(ids: &[usize], what: &str) -> Result<BTreeSet<usize>> {
    ids.iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| Error::Inconsistency(format!("{what} ids are 1-based, found 0")))
        })
        .collect()
}

pub fn domain_to_doc(domain: &SymbolicDomain) -> DomainDoc {
    DomainDoc {
        scenario: domain.scenario.clone(),
        representation: domain.representation,
        n_vars: domain.n_vars,
        factors: domain
            .factors
            .iter()
            .map(|f| FactorDoc { id: f.id + 1, vars: up(&f.vars), modifiers: up(&f.modifiers) })
            .collect(),
        symbols: domain
            .symbols
            .iter()
            .map(|s| SymbolDoc {
                id: s.id + 1,
                label: s.label.clone(),
                grounding: s.grounding.clone(),
                factors: up(&s.factors),
                producers: up(&s.producers),
            })
            .collect(),
        operators: domain
            .operators
            .iter()
            .map(|op| OperatorDoc {
                option: op.option + 1,
                pre: up(&op.pre),
                eff_pos: up(&op.eff_pos),
                eff_neg: up(&op.eff_neg),
            })
            .collect(),
        warnings: domain.warnings.iter().map(warning_to_doc).collect(),
    }
}

fn warning_to_doc(w: &Warning) -> WarningDoc {
    let mut doc = WarningDoc {
        kind: String::new(),
        option: w.option() + 1,
        symbol: None,
        label: None,
        expected_positive: None,
        state: None,
        message: w.to_string(),
    };
    match w {
        Warning::InexpressiblePrecondition { .. } => doc.kind = "inexpressible_precondition".into(),
        Warning::ExecutionFailure { state, .. } => {
            doc.kind = "execution_failure".into();
            doc.state = Some(state.clone());
        }
        Warning::EffectAnomaly { symbol, label, expected_positive, state, .. } => {
            doc.kind = "effect_anomaly".into();
            doc.symbol = Some(symbol + 1);
            doc.label = Some(label.clone());
            doc.expected_positive = Some(*expected_positive);
            doc.state = Some(state.clone());
        }
    }
    doc
}

fn warning_from_doc(doc: &WarningDoc) -> Result<Warning> {
    let option = doc
        .option
        .checked_sub(1)
        .ok_or_else(|| Error::Inconsistency("warning option ids are 1-based, found 0".into()))?;
    let missing = |field: &str| {
        Error::Inconsistency(format!("warning kind `{}` needs field `{field}`", doc.kind))
    };
    match doc.kind.as_str() {
        "inexpressible_precondition" => Ok(Warning::InexpressiblePrecondition { option }),
        "execution_failure" => Ok(Warning::ExecutionFailure {
            option,
            state: doc.state.clone().ok_or_else(|| missing("state"))?,
        }),
        "effect_anomaly" => Ok(Warning::EffectAnomaly {
            option,
            symbol: doc
                .symbol
                .ok_or_else(|| missing("symbol"))?
                .checked_sub(1)
                .ok_or_else(|| Error::Inconsistency("warning symbol ids are 1-based, found 0".into()))?,
            label: doc.label.clone().ok_or_else(|| missing("label"))?,
            expected_positive: doc.expected_positive.ok_or_else(|| missing("expected_positive"))?,
            state: doc.state.clone().ok_or_else(|| missing("state"))?,
        }),
        other => Err(Error::Inconsistency(format!("unknown warning kind `{other}`"))),
    }
}

pub fn domain_from_doc(doc: &DomainDoc) -> Result<SymbolicDomain> {
    let factors = doc
        .factors
        .iter()
        .map(|f| {
            Ok(Factor {
                id: f
                    .id
                    .checked_sub(1)
                    .ok_or_else(|| Error::Inconsistency("factor ids are 1-based, found 0".into()))?,
                vars: down(&f.vars, "variable")?,
                modifiers: down(&f.modifiers, "option")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let symbols = doc
        .symbols
        .iter()
        .map(|s| {
            Ok(Symbol {
                id: s
                    .id
                    .checked_sub(1)
                    .ok_or_else(|| Error::Inconsistency("symbol ids are 1-based, found 0".into()))?,
                label: s.label.clone(),
                grounding: s.grounding.clone(),
                factors: down(&s.factors, "factor")?,
                producers: down(&s.producers, "option")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let operators = doc
        .operators
        .iter()
        .map(|op| {
            Ok(Operator {
                option: op
                    .option
                    .checked_sub(1)
                    .ok_or_else(|| Error::Inconsistency("option ids are 1-based, found 0".into()))?,
                pre: down(&op.pre, "symbol")?,
                eff_pos: down(&op.eff_pos, "symbol")?,
                eff_neg: down(&op.eff_neg, "symbol")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolicDomain {
        scenario: doc.scenario.clone(),
        representation: doc.representation,
        n_vars: doc.n_vars,
        factors,
        symbols,
        operators,
        warnings: doc.warnings.iter().map(warning_from_doc).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn config(scenario: &str, rep: Representation, dir: &Path) -> PipelineConfig {
        PipelineConfig {
            scenario: scenario.into(),
            representation: rep,
            budget: 2000,
            seed: 7,
            out_dir: dir.to_path_buf(),
            max_depth: 100,
            precond_mode: PrecondMode::MinimalUnion,
            strict: true,
        }
    }

    #[test]
    fn stages_chain_through_their_artifacts() {
        let dir = tempdir().unwrap();
        let cfg = config("reset", Representation::C45, dir.path());

        let collected = run_collect(&cfg).unwrap();
        assert_eq!(collected.steps, 2000);
        assert!(cfg.out_dir.join(TRANSITIONS_FILE).exists());
        assert!(collected.summary.contains("uncovered none"));

        let domain = run_abstract(&cfg).unwrap();
        assert_eq!(domain.symbols.len(), 6);
        assert!(cfg.out_dir.join(DOMAIN_JSON_FILE).exists());

        run_emit(&cfg, None, &["v5_on".to_string()]).unwrap();
        assert!(cfg.out_dir.join(DOMAIN_PDDL_FILE).exists());
        assert!(cfg.out_dir.join(PROBLEM_PDDL_FILE).exists());

        let plan = run_plan(&cfg, None, &["v5_on".to_string()]).unwrap().unwrap();
        assert_eq!(plan.length(), 5);
        let plan_text = fs::read_to_string(cfg.out_dir.join(PLAN_FILE)).unwrap();
        assert_eq!(plan_text.lines().count(), 5);
    }

    #[test]
    fn pipeline_is_reproducible_byte_for_byte() {
        let dir_a = tempdir().unwrap();
        let dir_b = tempdir().unwrap();
        let goal = vec!["v5_on".to_string()];
        let out_a = run_pipeline(&config("negative", Representation::IntM, dir_a.path()), None, &goal).unwrap();
        let out_b = run_pipeline(&config("negative", Representation::IntM, dir_b.path()), None, &goal).unwrap();
        assert_eq!(out_a.plan, out_b.plan);
        for name in [TRANSITIONS_FILE, DATASETS_FILE, DOMAIN_JSON_FILE, DOMAIN_PDDL_FILE, PROBLEM_PDDL_FILE, PLAN_FILE] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn domain_doc_round_trips_through_json() {
        let dir = tempdir().unwrap();
        let cfg = config("unreachable", Representation::IntM, dir.path());
        run_collect(&cfg).unwrap();
        let domain = run_abstract(&cfg).unwrap();
        let text = fs::read_to_string(cfg.out_dir.join(DOMAIN_JSON_FILE)).unwrap();
        let doc: DomainDoc = serde_json::from_str(&text).unwrap();
        let back = domain_from_doc(&doc).unwrap();
        assert_eq!(back.symbols, domain.symbols);
        assert_eq!(back.operators, domain.operators);
        assert_eq!(back.warnings, domain.warnings);
        // Re-serialization is stable, too.
        assert_eq!(serde_json::to_string_pretty(&domain_to_doc(&back)).unwrap() + "\n", text);
    }

    #[test]
    fn missing_artifacts_are_reported_with_guidance() {
        let dir = tempdir().unwrap();
        let cfg = config("reset", Representation::C45, dir.path());
        let err = run_abstract(&cfg).unwrap_err();
        assert!(err.to_string().contains("collect"), "{err}");
        let err = run_emit(&cfg, None, &[]).unwrap_err();
        assert!(err.to_string().contains("domain.json"), "{err}");
    }

    #[test]
    fn unknown_goal_labels_list_the_available_symbols() {
        let dir = tempdir().unwrap();
        let cfg = config("reset", Representation::C45, dir.path());
        run_collect(&cfg).unwrap();
        run_abstract(&cfg).unwrap();
        let err = run_plan(&cfg, None, &["v1_off".to_string()]).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("unknown goal symbol `v1_off`"), "{text}");
        assert!(text.contains("v5_on"), "error lists available symbols: {text}");
    }

    #[test]
    fn unknown_scenarios_are_usage_errors() {
        let err = resolve_scenario("no-such-scenario").unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }
}
