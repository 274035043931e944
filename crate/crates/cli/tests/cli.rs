use std::path::{Path, PathBuf};
use std::process::Command;

use fracreach::machines::examples::pvass_two_counter;
use fracreach::testkit::random_finite_instance;
use fracreach_cli::format::{parse_instance, render_instance, Instance, Model};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const RULES: &str = r#"[
    {"from": "q0", "to": "q1", "update": ["-1", "0"], "stackEffect": {"push": "a"}},
    {"from": "q0", "to": "q1", "update": ["0", "-1"], "stackEffect": {"push": "b"}},
    {"from": "q1", "to": "q2", "update": ["0", "0"], "stackEffect": {"pop": "a"}},
    {"from": "q2", "to": "q1", "update": ["0", "1"], "stackEffect": {"push": "a"}},
    {"from": "q1", "to": "q3", "update": ["0", "0"], "stackEffect": {"pop": "b"}},
    {"from": "q3", "to": "q1", "update": ["1", "0"], "stackEffect": {"push": "b"}}
]"#;

fn two_counter(init: &str, fin: &str) -> String {
    format!(
        r#"{{
  "model": "qpvass",
  "dimension": 2,
  "states": ["q0", "q1", "q2", "q3"],
  "stackAlphabet": ["a", "b"],
  "rules": {RULES},
  "configs": {{
    "init": {init},
    "final": {fin}
  }}
}}"#
    )
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Out {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["fracreach"];
    full.extend_from_slice(args);
    let code = fracreach_cli::run(full, &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn reach_instance(dir: &TempDir) -> PathBuf {
    let text = two_counter(
        r#"{"state": "q0", "stack": "", "values": ["11/10", "6/10"]}"#,
        r#"{"state": "q1", "stack": "a", "values": ["1", "1"]}"#,
    );
    put(dir, "reach.json", &text)
}

#[test]
fn example_reach_and_cover() {
    let dir = TempDir::new().unwrap();
    let p = reach_instance(&dir);
    let r = cli(&["solve", "--mode", "reach", "--in", s(&p)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next(), Some("REACHABLE"));

    let q = put(
        &dir,
        "cover.json",
        &two_counter(r#"{"state": "q0", "stack": "", "values": ["1", "1"]}"#, r#"{"state": "q1", "stack": "a", "values": ["1", "1"]}"#),
    );
    let r = cli(&["solve", "--mode", "cover", "--in", s(&q)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout.trim(), "NOTCOVERABLE");

    let r = cli(&["solve", "--mode", "state", "--in", s(&q), "--target-state", "q1"]);
    assert_eq!((r.code, r.stdout.lines().next()), (0, Some("STATE_REACHABLE")));
    let z = put(
        &dir,
        "zero.json",
        &two_counter(r#"{"state": "q0", "stack": "", "values": ["0", "0"]}"#, r#"{"state": "q1", "stack": "", "values": ["0", "0"]}"#),
    );
    let r = cli(&["solve", "--mode", "state", "--in", s(&z)]);
    assert_eq!((r.code, r.stdout.trim()), (1, "STATE_UNREACHABLE"));
}

#[test]
fn degenerate_instance_is_reachable() {
    let dir = TempDir::new().unwrap();
    let c = r#"{"state": "q2", "stack": "ab", "values": ["1/3", "0"]}"#;
    let p = put(&dir, "same.json", &two_counter(c, c));
    let r = cli(&["solve", "--mode", "reach", "--in", s(&p), "--witness-out", s(&dir.path().join("w.json"))]);
    assert_eq!((r.code, r.stdout.lines().next()), (0, Some("REACHABLE")));
    let r = cli(&["check", "--in", s(&p), "--witness", s(&dir.path().join("w.json"))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("target final: reached"), "{}", r.stdout);
}

#[test]
fn solve_witness_passes_check() {
    let dir = TempDir::new().unwrap();
    let p = reach_instance(&dir);
    let w = dir.path().join("w.json");
    let cert = dir.path().join("cert.txt");
    let r = cli(&["solve", "--mode", "reach", "--in", s(&p), "--witness-out", s(&w), "--emit-certificate", s(&cert)]);
    assert_eq!(r.code, 0);
    assert!(cert.exists());
    let r = cli(&["check", "--in", s(&p), "--witness", s(&w)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.stdout.lines().next(), Some("OK"));
    assert!(r.stdout.contains("final: (q1, \"a\", (1, 1))"), "{}", r.stdout);
    assert!(r.stdout.contains("target final: reached"));
}

#[test]
fn check_reports_the_failing_step() {
    let dir = TempDir::new().unwrap();
    let p = reach_instance(&dir);
    let good = put(
        &dir,
        "good.json",
        r#"[{"fraction": "1/10", "rule": 0}, {"fraction": "1/1", "rule": 2}, {"fraction": "2/5", "rule": 3}]"#,
    );
    let r = cli(&["check", "--in", s(&p), "--witness", s(&good)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("target final: reached"));

    let bad = put(&dir, "bad.json", r#"[{"fraction": "3/2", "rule": 0}, {"fraction": "1/1", "rule": 2}]"#);
    let r = cli(&["check", "--in", s(&p), "--witness", s(&bad)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("FAIL at step 0"), "{}", r.stdout);
    let bad = put(&dir, "bad2.json", r#"[{"fraction": "1/10", "rule": 0}, {"fraction": "0/1", "rule": 2}]"#);
    let r = cli(&["check", "--in", s(&p), "--witness", s(&bad)]);
    assert!(r.stdout.starts_with("FAIL at step 1"), "{}", r.stdout);
    let bad = put(&dir, "bad3.json", r#"[{"fraction": "one", "rule": 0}]"#);
    assert_eq!(cli(&["check", "--in", s(&p), "--witness", s(&bad)]).code, 65);

    let empty = put(&dir, "empty.json", "[]");
    let r = cli(&["check", "--in", s(&p), "--witness", s(&empty)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("final: (q0, \"\", (11/10, 3/5))"), "{}", r.stdout);
    assert!(r.stdout.contains("target final: missed"));
}

#[test]
fn oracle_bounds_and_agreement() {
    let dir = TempDir::new().unwrap();
    let p = reach_instance(&dir);
    let r = cli(&["oracle", "--in", s(&p), "--max-len", "3"]);
    assert_eq!((r.code, r.stdout.lines().next()), (0, Some("REACHABLE-UP-TO-BOUND")));
    let r = cli(&["oracle", "--in", s(&p), "--max-len", "2"]);
    assert_eq!((r.code, r.stdout.trim()), (1, "NO-WITNESS-UP-TO-BOUND"));
    let r = cli(&["oracle", "--in", s(&p), "--max-len", "13"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("--force"));
}

fn to_instance(inst: &fracreach::testkit::Instance) -> Instance {
    Instance {
        model: Model::Qpvass(inst.machine.clone()),
        configs: [("init".to_string(), inst.from.clone()), ("final".to_string(), inst.to.clone())].into_iter().collect(),
        run_length: None,
        provenance: None,
    }
}

#[test]
fn oracle_positive_implies_solve_positive() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut positives = 0;
    for i in 0..40 {
        let inst = random_finite_instance(&mut rng, i % 2 == 0, 6);
        let p = put(&dir, &format!("i{i}.json"), &render_instance(&to_instance(&inst)));
        for mode in ["reach", "cover"] {
            let o = cli(&["oracle", "--in", s(&p), "--max-len", "6", "--mode", mode]);
            let v = cli(&["solve", "--mode", mode, "--in", s(&p)]);
            assert!(o.code <= 1 && v.code <= 1, "{} {}", o.stderr, v.stderr);
            if o.code == 0 {
                positives += 1;
                assert_eq!(v.code, 0, "{mode} on {}", p.display());
            }
        }
    }
    assert!(positives > 0);
}

#[test]
fn round_trip_is_byte_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let inst = random_finite_instance(&mut rng, i % 2 == 0, 6);
        let text = render_instance(&to_instance(&inst));
        let again = render_instance(&parse_instance(&text).unwrap());
        assert_eq!(text, again);
        assert_eq!(render_instance(&parse_instance(&again).unwrap()), again);
    }
    // a hand-written file canonicalizes once and is then stable
    let text = two_counter(r#"{"state": "q0", "values": ["22/20", "6/10"]}"#, r#"{"state": "q1", "stack": "a", "values": ["1", "2/2"]}"#);
    let canon = render_instance(&parse_instance(&text).unwrap());
    assert!(canon.contains("\"11/10\"") && canon.contains("\"3/5\""), "{canon}");
    assert_eq!(render_instance(&parse_instance(&canon).unwrap()), canon);
    let m = pvass_two_counter();
    match parse_instance(&canon).unwrap().model {
        Model::Qpvass(p) => assert_eq!(p, m),
        other => panic!("{:?}", other.kind()),
    }
}

#[test]
fn malformed_and_schema_errors() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("{\"model\": ", 64),
        ("[1, 2", 64),
        (r#"{"model": "qvass"}"#, 65),
        (r#"{"model": "nope", "dimension": 0, "states": [], "rules": [], "configs": {}}"#, 65),
    ];
    for (i, (text, code)) in cases.iter().enumerate() {
        let p = put(&dir, &format!("c{i}.json"), text);
        let r = cli(&["solve", "--mode", "reach", "--in", s(&p)]);
        assert_eq!(r.code, *code, "{text}: {}", r.stderr);
    }
    let bad_state = two_counter(r#"{"state": "q9", "values": ["0", "0"]}"#, r#"{"state": "q1", "values": ["0", "0"]}"#);
    let bad_value = two_counter(r#"{"state": "q0", "values": ["1/0", "0"]}"#, r#"{"state": "q1", "values": ["0", "0"]}"#);
    let bad_stack = two_counter(r#"{"state": "q0", "stack": "z", "values": ["0", "0"]}"#, r#"{"state": "q1", "values": ["0", "0"]}"#);
    let bad_dim = two_counter(r#"{"state": "q0", "values": ["0"]}"#, r#"{"state": "q1", "values": ["0", "0"]}"#);
    for (i, text) in [bad_state, bad_value, bad_stack, bad_dim].iter().enumerate() {
        let p = put(&dir, &format!("s{i}.json"), text);
        let r = cli(&["solve", "--mode", "reach", "--in", s(&p)]);
        assert_eq!(r.code, 65, "{text}: {}", r.stderr);
    }
    let r = cli(&["solve", "--mode", "reach", "--in", s(&dir.path().join("missing.json"))]);
    assert_eq!(r.code, 66);
    let r = cli(&["solve", "--mode", "sideways"]);
    assert_eq!(r.code, 3);
}

fn gen_and_replay(chain: &str, params: &[&str], expect: &[&str]) -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["gen", "--chain", chain, "--out", s(&out)];
    if !params.is_empty() {
        args.push("--params");
        args.extend_from_slice(params);
    }
    let r = cli(&args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for name in expect {
        let inst = out.join(format!("{name}.json"));
        let wit = out.join(format!("{name}.witness.json"));
        let text = std::fs::read_to_string(&inst).unwrap();
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(render_instance(&parsed), text);
        let prov = parsed.provenance.as_ref().unwrap();
        assert_eq!(prov.get("chain").map(String::as_str), Some(chain));
        assert!(prov.contains_key("stage") && prov.contains_key("seed"));
        let r = cli(&["check", "--in", s(&inst), "--witness", s(&wit)]);
        assert_eq!(r.code, 0, "{chain}/{name}: {}", r.stdout);
        assert!(r.stdout.contains("target final: reached"), "{chain}/{name}: {}", r.stdout);
        assert!(!r.stdout.contains("instance asks for"), "{chain}/{name}: {}", r.stdout);
    }
    dir
}

#[test]
fn gen_pda_counter() {
    let dir = gen_and_replay("pda-counter", &["m=37"], &["instance"]);
    let w = std::fs::read_to_string(dir.path().join("out/instance.witness.json")).unwrap();
    assert_eq!(fracreach_cli::format::parse_witness(&w).unwrap().len(), 37);
}

#[test]
fn gen_tcm_full() {
    let dir = gen_and_replay("tcm-full", &["m=2"], &["bounded", "continuous", "instance"]);
    let read = |n: &str| fracreach_cli::format::parse_witness(&std::fs::read_to_string(dir.path().join("out").join(n)).unwrap()).unwrap().len();
    assert_eq!(read("bounded.witness.json"), 15);
    assert_eq!(read("continuous.witness.json"), 45);
    assert_eq!(read("instance.witness.json"), 45);
}

#[test]
fn gen_tcm_full_without_a_run_writes_no_witness() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let r = cli(&["gen", "--chain", "tcm-full", "--out", s(&out), "--params", "m=3"]);
    assert_eq!(r.code, 0);
    assert!(out.join("instance.json").exists());
    assert!(!out.join("instance.witness.json").exists());
}

#[test]
fn gen_amplifier() {
    let dir = gen_and_replay("amplifier", &["p=3,5", "k=4"], &["bounded", "instance"]);
    let r = cli(&["check", "--in", s(&dir.path().join("out/bounded.json")), "--witness", s(&dir.path().join("out/bounded.witness.json"))]);
    assert!(r.stdout.contains("(3/16, 5/16, 1/16, 0)"), "{}", r.stdout);
}

#[test]
fn gen_unary_hardened() {
    let dir = gen_and_replay("unary-hardened", &[], &["instance"]);
    let text = std::fs::read_to_string(dir.path().join("out/instance.json")).unwrap();
    let inst = parse_instance(&text).unwrap();
    for c in inst.configs.values() {
        assert!(c.values.0.iter().all(|x| x.is_integer()));
    }
}

#[test]
fn gen_pcp() {
    gen_and_replay("pcp-full", &["pairs=a:ab,ba:a", "bound=3"], &["bounded", "continuous", "instance"]);
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    for params in [vec!["m"], vec!["m=x"], vec!["p=3", "k=1"]] {
        let chain = if params[0].starts_with('p') { "amplifier" } else { "pda-counter" };
        let mut args = vec!["gen", "--chain", chain, "--out", s(&out), "--params"];
        args.extend(params.iter().copied());
        assert_eq!(cli(&args).code, 3, "{params:?}");
    }
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = reach_instance(&dir);
    let bin = env!("CARGO_BIN_EXE_fracreach");
    let st = Command::new(bin).args(["solve", "--mode", "reach", "--in", s(&p)]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&st.stdout).lines().next(), Some("REACHABLE"));
    let bad = put(&dir, "bad.json", "not json");
    let st = Command::new(bin).args(["solve", "--mode", "reach", "--in", s(&bad)]).output().unwrap();
    assert_eq!(st.status.code(), Some(64));
}
