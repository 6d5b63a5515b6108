//! End-to-end checks of the `symgen` binary: artifact flow between
//! subcommands, stdout texture, and the exit-code contract (0 success,
//! 1 usage error, 2 bad data).

use std::path::Path;
use std::process::{Command, Output};

fn symgen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symgen"))
        .args(args)
        .current_dir(dir)
        .env_remove("SYMGEN_OUT_DIR")
        .output()
        .expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn stages_chain_on_disk_and_report_their_results() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--scenario", "reset", "--budget", "2000", "--out-dir", "run"];

    let collect = symgen(dir.path(), &[&["collect"], &common[..]].concat());
    assert_eq!(collect.status.code(), Some(0), "collect: {}", stderr(&collect));
    assert!(stdout(&collect).contains("collected 2000 transitions"));
    assert!(stdout(&collect).contains("option init_pos init_neg eff_pos eff_neg mask"));
    assert!(dir.path().join("run/transitions.log").exists());
    assert!(dir.path().join("run/datasets.txt").exists());

    let abstract_ = symgen(dir.path(), &[&["abstract"], &common[..]].concat());
    assert_eq!(abstract_.status.code(), Some(0), "abstract: {}", stderr(&abstract_));
    assert!(stdout(&abstract_).contains("reset (c45): 6 factors, 6 symbols, 6 operators"));
    assert!(dir.path().join("run/domain.json").exists());

    let emit = symgen(dir.path(), &[&["emit"], &common[..], &["--goal", "v5_on"]].concat());
    assert_eq!(emit.status.code(), Some(0), "emit: {}", stderr(&emit));
    assert!(dir.path().join("run/domain.pddl").exists());
    assert!(dir.path().join("run/problem.pddl").exists());

    let plan = symgen(dir.path(), &[&["plan"], &common[..], &["--goal", "v5_on"]].concat());
    assert_eq!(plan.status.code(), Some(0), "plan: {}", stderr(&plan));
    assert!(stdout(&plan).contains("plan (5 actions):"), "stdout: {}", stdout(&plan));
    let plan_file = std::fs::read_to_string(dir.path().join("run/plan.txt")).unwrap();
    assert_eq!(plan_file.lines().count(), 5);
}

#[test]
fn pipeline_subcommand_runs_all_stages_at_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = symgen(
        dir.path(),
        &[
            "pipeline",
            "--scenario",
            "negative",
            "--rep",
            "intm",
            "--budget",
            "2000",
            "--out-dir",
            "everything",
            "--goal",
            "v5_on,v6_on",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "pipeline: {}", stderr(&out));
    for artifact in
        ["transitions.log", "datasets.txt", "domain.json", "domain.pddl", "problem.pddl", "plan.txt"]
    {
        assert!(
            dir.path().join("everything").join(artifact).exists(),
            "missing artifact {artifact}"
        );
    }
    assert!(stdout(&out).contains("negative (intm):"));
    assert!(stdout(&out).contains("plan ("), "stdout: {}", stdout(&out));
}

#[test]
fn out_dir_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_symgen"))
        .args(["collect", "--scenario", "reset", "--budget", "500"])
        .current_dir(dir.path())
        .env("SYMGEN_OUT_DIR", "from-env")
        .output()
        .expect("binary should run");
    assert_eq!(out.status.code(), Some(0), "collect: {}", stderr(&out));
    assert!(dir.path().join("from-env/transitions.log").exists());
}

#[test]
fn usage_mistakes_exit_with_code_1() {
    let dir = tempfile::tempdir().unwrap();

    let zero_budget =
        symgen(dir.path(), &["collect", "--scenario", "reset", "--budget", "0"]);
    assert_eq!(zero_budget.status.code(), Some(1));
    assert!(stderr(&zero_budget).contains("budget must be at least 1 step"));

    let bogus = symgen(dir.path(), &["collect", "--scenario", "bogus"]);
    assert_eq!(bogus.status.code(), Some(1));
    assert!(stderr(&bogus).contains("unknown scenario `bogus`"));

    let goalless = symgen(dir.path(), &["plan", "--scenario", "reset"]);
    assert_eq!(goalless.status.code(), Some(1));
    assert!(stderr(&goalless).contains("--goal"));

    let bad_rep = symgen(dir.path(), &["collect", "--scenario", "reset", "--rep", "svm"]);
    assert_eq!(bad_rep.status.code(), Some(1));
    assert!(stderr(&bad_rep).contains("svm"));
}

#[test]
fn unknown_goal_labels_exit_with_code_2_and_list_the_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--scenario", "reset", "--budget", "2000", "--out-dir", "run"];
    assert_eq!(symgen(dir.path(), &[&["collect"], &common[..]].concat()).status.code(), Some(0));
    assert_eq!(symgen(dir.path(), &[&["abstract"], &common[..]].concat()).status.code(), Some(0));

    let out = symgen(dir.path(), &[&["plan"], &common[..], &["--goal", "v9_on"]].concat());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown goal symbol `v9_on`"));
    assert!(stderr(&out).contains("available symbols:"));
    assert!(stderr(&out).contains("v6_on"));
}

#[test]
fn malformed_scenario_files_name_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.toml");
    std::fs::write(
        &file,
        "name = \"broken\"\nn_vars = 2\n\n[[options]]\nid = 1\nassign = [\"v1:2\"]\n",
    )
    .unwrap();
    let out = symgen(dir.path(), &["collect", "--scenario", "broken.toml", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 6"), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("malformed literal `v1:2`"));
}

#[test]
fn abstract_without_a_transition_log_points_at_collect() {
    let dir = tempfile::tempdir().unwrap();
    let out = symgen(dir.path(), &["abstract", "--scenario", "reset", "--out-dir", "empty"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("run `collect` into this directory first"));
}

#[test]
fn help_and_version_exit_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let help = symgen(dir.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("Usage: symgen"));

    let version = symgen(dir.path(), &["--version"]);
    assert_eq!(version.status.code(), Some(0));
    assert!(stdout(&version).contains("symgen"));
}
