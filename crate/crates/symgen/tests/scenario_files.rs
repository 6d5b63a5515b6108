//! The example files under `scenarios/` document the scenario file format by
//! reproducing the three builtins; this pins them to the real definitions so
//! they cannot drift.

use std::path::PathBuf;

use symgen::env::{builtin_scenario, ScenarioSpec};

#[test]
fn example_scenario_files_reproduce_the_builtins() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for name in ["reset", "negative", "unreachable"] {
        let from_file = ScenarioSpec::from_toml_file(&root.join(format!("{name}.toml")))
            .unwrap_or_else(|e| panic!("scenarios/{name}.toml should parse: {e}"));
        assert_eq!(
            from_file,
            builtin_scenario(name).unwrap(),
            "scenarios/{name}.toml drifted from the builtin definition"
        );
    }
}
