//! Command-line contract: exit codes, file formats, determinism, and
//! replay verification, driven through the installed binary.

mod common;


use std::process::Command;

use xube::domain::{Domain, Renderable, StringToAct};
use xube::domains::SlidingTileDomain;
use xube::io::{read_instances, read_results};

fn xube() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xube"))
}

fn run_ok(args: &[&str]) -> String {
    let out = xube().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

fn run_code(args: &[&str]) -> (i32, String) {
    let out = xube().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn problem_inst_is_byte_identical_for_the_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        run_ok(&[
            "problem-inst",
            "--domain",
            "stp3",
            "--count",
            "50",
            "--k-max",
            "20",
            "--scheme",
            "reverse",
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "9",
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = dir.path().join("c.jsonl");
    run_ok(&[
        "problem-inst",
        "--domain",
        "stp3",
        "--count",
        "50",
        "--k-max",
        "20",
        "--scheme",
        "reverse",
        "--out",
        c.to_str().unwrap(),
        "--seed",
        "10",
    ]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn reverse_generated_instances_respect_the_oracle_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("insts.jsonl");
    run_ok(&[
        "problem-inst",
        "--domain",
        "stp3",
        "--count",
        "100",
        "--k-max",
        "20",
        "--scheme",
        "reverse",
        "--out",
        path.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    let domain = SlidingTileDomain::new(3).unwrap();
    let insts = read_instances(&path).unwrap();
    assert_eq!(insts.len(), 100);
    for line in &insts {
        let start = domain.text_to_state(&line.start).unwrap();
        // A reverse walk of length k upper-bounds the true distance.
        assert!(common::stp3_oracle_dist(&start) as usize <= line.gen_steps.max(20));
        assert!(line.gen_steps <= 20);
    }
}

#[test]
fn solve_records_replay_through_the_domain_codec() {
    let dir = tempfile::tempdir().unwrap();
    let insts_path = dir.path().join("insts.jsonl");
    let results_path = dir.path().join("results.jsonl");
    run_ok(&[
        "problem-inst",
        "--domain",
        "stp3",
        "--count",
        "30",
        "--k-max",
        "12",
        "--scheme",
        "reverse",
        "--out",
        insts_path.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    run_ok(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts_path.to_str().unwrap(),
        "--algo",
        "graph_v",
        "--out",
        results_path.to_str().unwrap(),
        "--workers",
        "2",
    ]);

    let domain = SlidingTileDomain::new(3).unwrap();
    let insts = read_instances(&insts_path).unwrap();
    let (records, summary) = read_results(&results_path).unwrap();
    assert_eq!(records.len(), 30);
    assert_eq!(summary.count, 30);
    assert_eq!(summary.solved, 30);
    for record in &records {
        assert!(record.solved);
        let line = &insts[record.inst];
        let mut state = domain.text_to_state(&line.start).unwrap();
        let goal = domain.text_to_goal(&line.goal).unwrap();
        let mut cost = 0.0;
        for text in &record.path {
            let action = domain.parse_action(text).unwrap();
            let tr = domain.next_state(&state, &action).unwrap();
            cost += tr.cost;
            state = tr.next_state;
        }
        assert!(domain.is_solved(&state, &goal));
        assert_eq!(Some(cost), record.path_cost);
    }
}

#[test]
fn empty_instance_file_solves_to_an_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let insts_path = dir.path().join("empty.jsonl");
    std::fs::write(&insts_path, "").unwrap();
    let results_path = dir.path().join("results.jsonl");
    run_ok(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts_path.to_str().unwrap(),
        "--out",
        results_path.to_str().unwrap(),
    ]);
    let (records, summary) = read_results(&results_path).unwrap();
    assert!(records.is_empty());
    assert_eq!(summary.count, 0);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let insts = dir.path().join("insts.jsonl");
    std::fs::write(&insts, "").unwrap();
    let out = dir.path().join("out.jsonl");

    // Unknown domain.
    let (code, stderr) = run_code(&[
        "solve",
        "--domain",
        "cube3",
        "--insts",
        insts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("cube3"));

    // Malformed algorithm spec names the offending token.
    let (code, stderr) = run_code(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts.to_str().unwrap(),
        "--algo",
        "graph_v.1B_2B",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("2B"), "{stderr}");

    // Training algorithms are rejected as solvers.
    let (code, stderr) = run_code(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts.to_str().unwrap(),
        "--algo",
        "sup_fwd_v",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stderr}");

    // Training searches must have batch size 1.
    let (code, stderr) = run_code(&[
        "train",
        "--domain",
        "stp3",
        "--algo",
        "graph_v.2B",
        "--out",
        dir.path().join("run").to_str().unwrap(),
        "--max-checks",
        "1",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("batch size 1"), "{stderr}");

    // Reverse generation on a forward-only domain.
    let (code, stderr) = run_code(&[
        "problem-inst",
        "--domain",
        "grid",
        "--count",
        "1",
        "--k-max",
        "1",
        "--scheme",
        "reverse",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("ReverseWalkable"), "{stderr}");
}

#[test]
fn missing_input_file_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run_code(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        dir.path().join("nope.jsonl").to_str().unwrap(),
        "--out",
        dir.path().join("out.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn codec_mismatch_between_file_and_domain_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let insts = dir.path().join("grid_insts.jsonl");
    run_ok(&[
        "problem-inst",
        "--domain",
        "grid:width=4,height=4",
        "--count",
        "3",
        "--k-max",
        "2",
        "--out",
        insts.to_str().unwrap(),
    ]);
    let (code, stderr) = run_code(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts.to_str().unwrap(),
        "--out",
        dir.path().join("out.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn viz_reports_solved_for_zero_step_instances() {
    let stdout = run_ok(&["viz", "--domain", "stp3", "--steps", "0", "--seed", "4"]);
    assert!(stdout.contains("solved"), "{stdout}");
    assert!(stdout.contains("goal:"));
}

#[test]
fn interactive_viz_applies_actions_and_rejects_garbage() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = xube()
        .args(["viz", "--domain", "stp3", "--steps", "1", "--seed", "2", "--interactive"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    // The scramble for seed 2 is one reverse step; undoing it means
    // applying the action the solver would use. Feed garbage first, then
    // all four moves (one of them solves), then quit.
    let mut stdin = child.stdin.take().unwrap();
    stdin.write_all(b"XYZ\nU\nD\nL\nR\nq\n").unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("unknown action"), "{stdout}");
}

#[test]
fn time_reports_capability_rows() {
    let report = run_ok(&["time", "--domain", "stp3"]);
    for op in ["next_state", "expand", "is_solved", "reverse_step", "batched_transition"] {
        assert!(report.contains(op), "missing `{op}` in:\n{report}");
    }
    let grid_report = run_ok(&["time", "--domain", "grid:width=4,height=4"]);
    let reverse_row = grid_report
        .lines()
        .find(|l| l.starts_with("reverse_step"))
        .expect("reverse_step row present");
    assert!(reverse_row.contains("absent"), "{grid_report}");
}

#[test]
fn train_writes_stats_rows_and_summary_reads_them_back() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    run_ok(&[
        "train",
        "--domain",
        "stp3",
        "--arch",
        "mlp:hidden=16",
        "--out",
        run_dir.to_str().unwrap(),
        "--batch-size",
        "20",
        "--update-itrs",
        "4",
        "--search-itrs",
        "10",
        "--kmax",
        "3",
        "--max-checks",
        "2",
        "--seed",
        "1",
    ]);
    let stats = std::fs::read_to_string(run_dir.join("stats.csv")).unwrap();
    assert_eq!(stats.lines().count(), 3, "{stats}"); // header + 2 checks
    assert!(run_dir.join("model.ckpt").exists());

    let summary_out = dir.path().join("plots");
    let stdout = run_ok(&[
        "train-summary",
        "--dir",
        run_dir.to_str().unwrap(),
        "--out",
        summary_out.to_str().unwrap(),
    ]);
    assert!(stdout.contains("latest update check: 2"), "{stdout}");
    for metric in ["loss", "solve_rate", "target_mean"] {
        let plot = summary_out.join(format!("plotdata_{metric}.csv"));
        let text = std::fs::read_to_string(&plot).unwrap();
        assert_eq!(text.lines().count(), 3, "{metric}: {text}"); // header + 2 checks
    }

    // Byte-stable for fixed inputs.
    let stdout2 = run_ok(&[
        "train-summary",
        "--dir",
        run_dir.to_str().unwrap(),
        "--out",
        summary_out.to_str().unwrap(),
    ]);
    assert_eq!(stdout, stdout2);

    // Solving with the trained v checkpoint under a q algorithm is a
    // typed configuration error.
    let insts = dir.path().join("insts.jsonl");
    run_ok(&[
        "problem-inst",
        "--domain",
        "stp3",
        "--count",
        "2",
        "--k-max",
        "2",
        "--scheme",
        "reverse",
        "--out",
        insts.to_str().unwrap(),
    ]);
    let (code, stderr) = run_code(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts.to_str().unwrap(),
        "--ckpt",
        run_dir.join("model.ckpt").to_str().unwrap(),
        "--algo",
        "graph_q",
        "--out",
        dir.path().join("r.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("heuristic-v"), "{stderr}");

    // With the matching head it runs.
    run_ok(&[
        "solve",
        "--domain",
        "stp3",
        "--insts",
        insts.to_str().unwrap(),
        "--ckpt",
        run_dir.join("model.ckpt").to_str().unwrap(),
        "--algo",
        "graph_v",
        "--out",
        dir.path().join("r2.jsonl").to_str().unwrap(),
    ]);
}

#[test]
fn her_on_a_training_run_requires_goal_sampling_capability() {
    // Both builtin domains support goal sampling, so exercise the CLI
    // surface by checking the flag parses and a tiny run works.
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "train",
        "--domain",
        "stp3",
        "--arch",
        "mlp:hidden=8",
        "--out",
        dir.path().join("run").to_str().unwrap(),
        "--her",
        "--batch-size",
        "10",
        "--update-itrs",
        "2",
        "--search-itrs",
        "4",
        "--kmax",
        "6",
        "--max-checks",
        "1",
    ]);
}

#[test]
fn info_commands_list_registrations() {
    let domains = run_ok(&["domain-info"]);
    for name in ["stp3", "stp4", "grid"] {
        assert!(domains.contains(name), "{domains}");
    }
    assert!(domains.contains("capabilities:"));
    let heuristics = run_ok(&["heuristic-info"]);
    assert!(heuristics.contains("mlp"));
}
