//! End-to-end tests of the command-line interface: exit codes, JSON
//! round trips, manifest determinism, and the documented workflows.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypercycle"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("file exists")).expect("valid JSON")
}

#[test]
fn gen_oracle_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "weak", "--k", "3", "--ell", "2", "--n", "12", "--output", "g.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta = read_json(&dir.path().join("g.meta.json"));
    assert_eq!(meta["delta_star"], 6);
    assert_eq!(meta["a_size"], 5);

    // The lower-bound construction has no Hamilton tight cycle.
    let out = run_in(dir.path(), &["oracle", "--input", "g.json", "--ell", "2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["status"], "none");

    // A window of the construction is still a valid l-path query.
    std::fs::write(dir.path().join("seq.json"), "[0,1,2,3]").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "verify",
            "--input",
            "g.json",
            "--sequence",
            "seq.json",
            "--kind",
            "tight-path",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["valid"], true);
}

#[test]
fn loose_bound_has_no_loose_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "loose", "--k", "3", "--n", "6", "--output", "g.json"],
    );
    assert_eq!(code(&out), 0);
    let out = run_in(dir.path(), &["oracle", "--input", "g.json", "--ell", "1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["status"], "none");
}

#[test]
fn oracle_budget_exhaustion_is_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "near-extremal", "--k", "3", "--n", "24", "--output", "g.json"],
    );
    assert_eq!(code(&out), 0);
    let out = run_in(
        dir.path(),
        &["oracle", "--input", "g.json", "--ell", "2", "--budget-nodes", "2"],
    );
    assert_eq!(code(&out), 3);
    assert_eq!(stdout_json(&out)["status"], "exhausted");
}

fn write_complete_graph(path: &Path, n: u32) {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                edges.push(vec![a, b, c]);
            }
        }
    }
    let g = serde_json::json!({"k": 3, "n": n, "edges": edges});
    std::fs::write(path, serde_json::to_string(&g).unwrap()).unwrap();
}

#[test]
fn pfm_solve_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    write_complete_graph(&dir.path().join("k6.json"), 6);
    let out = run_in(
        dir.path(),
        &["pfm", "--input", "k6.json", "--ell", "2", "--output", "sol.json"],
    );
    assert_eq!(code(&out), 0);
    let sol = read_json(&dir.path().join("sol.json"));
    assert_eq!(sol["feasible"], true);

    let out = run_in(
        dir.path(),
        &["pfm", "--input", "k6.json", "--ell", "2", "--verify", "sol.json"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verified"], true);

    // Any perturbed weight must be rejected.
    let mut tampered = sol.clone();
    tampered["q"][0][2] = Value::String("2/3".into());
    std::fs::write(
        dir.path().join("bad.json"),
        serde_json::to_string(&tampered).unwrap(),
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["pfm", "--input", "k6.json", "--ell", "2", "--verify", "bad.json"],
    );
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["verified"], false);
}

#[test]
fn pfm_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "weak", "--k", "3", "--ell", "2", "--n", "12", "--output", "g.json"],
    );
    assert_eq!(code(&out), 0);
    let out = run_in(
        dir.path(),
        &["pfm", "--input", "g.json", "--ell", "2", "--output", "sol.json"],
    );
    assert_eq!(code(&out), 0);
    let sol = read_json(&dir.path().join("sol.json"));
    assert_eq!(sol["feasible"], false);
    assert!(sol["certificate"].as_array().is_some_and(|c| !c.is_empty()));
    let out = run_in(
        dir.path(),
        &["pfm", "--input", "g.json", "--ell", "2", "--verify", "sol.json"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["verified"], true);
}

#[test]
fn seeded_runs_replay_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "gen", "--kind", "near-extremal", "--k", "3", "--n", "24", "--output", "g.json",
    ];
    assert_eq!(code(&run_in(dir.path(), &args)), 0);
    let pipeline = |out: &str, manifest: &str| {
        [
            "pipeline".to_string(),
            "extremal".into(),
            "--input".into(),
            "g.json".into(),
            "--ell".into(),
            "2".into(),
            "--eps-a".into(),
            "1/8".into(),
            "--eps-km1".into(),
            "1/8".into(),
            "--seed".into(),
            "11".into(),
            "--output".into(),
            out.into(),
            "--manifest".into(),
            manifest.into(),
        ]
    };
    let a1: Vec<String> = pipeline("c1.json", "m1.json").to_vec();
    let a2: Vec<String> = pipeline("c2.json", "m2.json").to_vec();
    let r1: Vec<&str> = a1.iter().map(String::as_str).collect();
    let r2: Vec<&str> = a2.iter().map(String::as_str).collect();
    assert_eq!(code(&run_in(dir.path(), &r1)), 0);
    assert_eq!(code(&run_in(dir.path(), &r2)), 0);
    let c1 = std::fs::read(dir.path().join("c1.json")).unwrap();
    let c2 = std::fs::read(dir.path().join("c2.json")).unwrap();
    assert_eq!(c1, c2, "same seed, same bytes");

    // Manifests agree on everything except timing and the file names.
    let m1 = read_json(&dir.path().join("m1.json"));
    let m2 = read_json(&dir.path().join("m2.json"));
    assert_eq!(m1["seed"], m2["seed"]);
    assert_eq!(m1["inputs"], m2["inputs"]);
    assert_eq!(m1["outputs"]["stdout"], m2["outputs"]["stdout"]);
    assert_eq!(m1["outputs"]["c1.json"], m2["outputs"]["c2.json"]);
    assert_eq!(m1["command"], "pipeline");
    assert!(m1["wall_ms"].is_u64());
}

#[test]
fn entropy_seed_is_recorded_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write_complete_graph(&dir.path().join("k6.json"), 6);
    let out = run_in(
        dir.path(),
        &[
            "walk", "join", "--input", "k6.json", "--ell", "2", "--start", "0,1", "--end",
            "3,4", "--manifest", "m.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(&dir.path().join("m.json"));
    assert!(m["seed"].is_u64(), "an entropy seed is drawn and recorded");
}

#[test]
fn pipeline_emits_on_near_extremal_and_fails_staged_on_exact() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run_in(
            dir.path(),
            &["gen", "--kind", "near-extremal", "--k", "3", "--n", "24", "--output", "near.json"],
        )),
        0
    );
    let out = run_in(
        dir.path(),
        &[
            "pipeline", "extremal", "--input", "near.json", "--ell", "2", "--eps-a", "1/8",
            "--eps-km1", "1/8", "--seed", "5", "--output", "cycle.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let emitted = read_json(&dir.path().join("cycle.json"));
    let cycle = emitted["cycle"].as_array().expect("cycle emitted");
    assert_eq!(cycle.len(), 24);

    // The emitted cycle verifies as a spanning cycle through the CLI too.
    std::fs::write(
        dir.path().join("seq.json"),
        serde_json::to_string(&emitted["cycle"]).unwrap(),
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "verify", "--input", "near.json", "--sequence", "seq.json", "--kind", "hamilton",
            "--ell", "2",
        ],
    );
    assert_eq!(code(&out), 0);

    // The exact lower-bound construction must never reach the emit stage.
    assert_eq!(
        code(&run_in(
            dir.path(),
            &["gen", "--kind", "weak", "--k", "3", "--ell", "2", "--n", "12", "--output", "ex.json"],
        )),
        0
    );
    let out = run_in(
        dir.path(),
        &[
            "pipeline", "extremal", "--input", "ex.json", "--ell", "2", "--eps-a", "1/8",
            "--eps-km1", "1/8", "--seed", "5",
        ],
    );
    assert_eq!(code(&out), 4);
    let report = stdout_json(&out);
    assert_eq!(report["stage"], "decompose");
}

#[test]
fn clean_writes_graph_and_report() {
    let dir = tempfile::tempdir().unwrap();
    write_complete_graph(&dir.path().join("k9.json"), 9);
    let out = run_in(
        dir.path(),
        &["clean", "--input", "k9.json", "--mu", "1/10", "--output", "c.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("c.report.json"));
    assert_eq!(report["kept_vertices"], 9);
    assert_eq!(report["mu"], "1/10");
    let cleaned = read_json(&dir.path().join("c.json"));
    assert_eq!(cleaned["n"], 9);
}

#[test]
fn dham_and_match_work_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let n = 8u32;
    let arcs: Vec<[u32; 2]> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| [u, v]))
        .collect();
    std::fs::write(
        dir.path().join("d.json"),
        serde_json::to_string(&serde_json::json!({"n": n, "arcs": arcs})).unwrap(),
    )
    .unwrap();
    let out = run_in(dir.path(), &["dham", "--input", "d.json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["status"], "found");
    assert_eq!(v["cycle"].as_array().unwrap().len(), n as usize);

    let edges: Vec<[u32; 2]> = (0..n)
        .flat_map(|x| (0..n).map(move |y| [x, n + y]))
        .collect();
    std::fs::write(
        dir.path().join("b.json"),
        serde_json::to_string(&serde_json::json!({"nx": n, "ny": n, "edges": edges})).unwrap(),
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["match", "--input", "b.json", "--seed", "3", "--eps", "1/8"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["pairs"].as_array().unwrap().len(), n as usize);
}

#[test]
fn usage_errors_are_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["gen", "--kind", "weak", "--k", "3", "--n", "12"]);
    assert_eq!(code(&out), 2, "missing --output and --ell");
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "bogus", "--k", "3", "--n", "12", "--output", "x.json"],
    );
    assert_eq!(code(&out), 2, "unknown kind");
    let out = run_in(dir.path(), &["bench", "bogus"]);
    assert_eq!(code(&out), 2, "unknown bench suite");
    let out = run_in(dir.path(), &["oracle", "--input", "missing.json", "--ell", "2"]);
    assert_eq!(code(&out), 2, "unreadable input");
}

#[test]
fn bench_constructions_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["bench", "constructions", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["failed"], 0);
    assert!(v["passed"].as_u64().unwrap() >= 15);
}

#[test]
fn gen_kpartite_cycle_sidecar_carries_the_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "gen", "--kind", "kpartite-cycle", "--k", "4", "--ell", "2", "--n", "0", "--r",
            "24", "--output", "kp.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta = read_json(&dir.path().join("kp.meta.json"));
    assert_eq!(meta["cycle"].as_array().unwrap().len(), 24);
    assert_eq!(meta["parts"].as_array().unwrap().len(), 4);

    // The marked ordered edge appears as a window of the emitted cycle.
    let cycle: Vec<u64> = meta["cycle"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    let marked: Vec<u64> = meta["marked_edge"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    let doubled: Vec<u64> = cycle.iter().chain(cycle.iter()).copied().collect();
    assert!(
        doubled.windows(marked.len()).any(|w| w == marked.as_slice()),
        "marked edge {marked:?} is a cyclic window"
    );
}

#[test]
fn walk_absorber_segments_cover_the_target() {
    let dir = tempfile::tempdir().unwrap();
    write_complete_graph(&dir.path().join("k6.json"), 6);
    let out = run_in(
        dir.path(),
        &[
            "walk", "absorber", "--input", "k6.json", "--ell", "2", "--vertex", "3", "--seed",
            "9",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["target"], serde_json::json!([3]));
    let plain: Vec<u64> = v["plain"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    let interleaved: Vec<u64> = v["interleaved"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert!(!plain.contains(&3), "plain form avoids the target");
    assert!(interleaved.contains(&3), "interleaved form absorbs the target");
}

#[test]
fn manifest_lands_next_to_first_output_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--kind", "loose", "--k", "3", "--n", "10", "--output", "g.json"],
    );
    assert_eq!(code(&out), 0);
    let manifest: PathBuf = dir.path().join("g.json.manifest.json");
    let m = read_json(&manifest);
    assert_eq!(m["command"], "gen");
    assert!(m["outputs"]["g.json"].is_string());
    assert!(m["outputs"]["g.meta.json"].is_string());
}
