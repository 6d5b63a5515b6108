//! Frozen end-to-end outputs for the six builtin scenario/representation
//! combinations at the default budget and seed.
//!
//! The files under `tests/golden/` were produced by the pipeline and then
//! checked symbol-by-symbol against hand-derived expectations for each
//! scenario before being committed. Any change to exploration, training,
//! symbol generation, operator assembly, or serialization that alters these
//! bytes is a behavioural change and must be deliberate.

use symgen::pipeline::{
    run_abstract, run_collect, run_emit, PipelineConfig, DOMAIN_JSON_FILE, DOMAIN_PDDL_FILE,
};
use symgen::setrep::Representation;

fn default_config(scenario: &str, rep: Representation, out_dir: &std::path::Path) -> PipelineConfig {
    PipelineConfig {
        scenario: scenario.to_string(),
        representation: rep,
        budget: 10_000,
        seed: 7,
        out_dir: out_dir.to_path_buf(),
        max_depth: 100,
        precond_mode: Default::default(),
        strict: true,
    }
}

fn check(scenario: &str, rep: Representation, golden_json: &str, golden_pddl: &str) {
    let dir = tempfile::tempdir().unwrap();
    let config = default_config(scenario, rep, dir.path());
    run_collect(&config).unwrap();
    run_abstract(&config).unwrap();
    run_emit(&config, None, &[]).unwrap();

    let json = std::fs::read_to_string(dir.path().join(DOMAIN_JSON_FILE)).unwrap();
    let pddl = std::fs::read_to_string(dir.path().join(DOMAIN_PDDL_FILE)).unwrap();
    assert_eq!(json, golden_json, "{scenario}/{rep} domain.json drifted from the frozen output");
    assert_eq!(pddl, golden_pddl, "{scenario}/{rep} domain.pddl drifted from the frozen output");
}

#[test]
fn reset_with_tree_boxes_matches_frozen_output() {
    check(
        "reset",
        Representation::C45,
        include_str!("golden/reset_c45.json"),
        include_str!("golden/reset_c45.pddl"),
    );
}

#[test]
fn reset_with_interval_hulls_matches_frozen_output() {
    check(
        "reset",
        Representation::IntM,
        include_str!("golden/reset_intm.json"),
        include_str!("golden/reset_intm.pddl"),
    );
}

#[test]
fn negative_with_tree_boxes_matches_frozen_output() {
    check(
        "negative",
        Representation::C45,
        include_str!("golden/negative_c45.json"),
        include_str!("golden/negative_c45.pddl"),
    );
}

#[test]
fn negative_with_interval_hulls_matches_frozen_output() {
    check(
        "negative",
        Representation::IntM,
        include_str!("golden/negative_intm.json"),
        include_str!("golden/negative_intm.pddl"),
    );
}

#[test]
fn unreachable_with_tree_boxes_matches_frozen_output() {
    check(
        "unreachable",
        Representation::C45,
        include_str!("golden/unreachable_c45.json"),
        include_str!("golden/unreachable_c45.pddl"),
    );
}

#[test]
fn unreachable_with_interval_hulls_matches_frozen_output() {
    check(
        "unreachable",
        Representation::IntM,
        include_str!("golden/unreachable_intm.json"),
        include_str!("golden/unreachable_intm.pddl"),
    );
}
