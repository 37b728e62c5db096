//! End to end tests that drive the `eulex` binary: exit codes, certificate
//! round trips, reduction pipelines and report shapes.

use serde_json::Value;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn eulex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulex")).args(args).output().expect("binary runs")
}

fn eulex_on(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_eulex"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    path.to_str().unwrap().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// A scratch file that is cleaned up on drop.
struct Scratch(PathBuf);

impl Scratch {
    fn with(name: &str, content: &str) -> Self {
        let path =
            std::env::temp_dir().join(format!("eulex-{}-{name}", std::process::id()));
        fs::write(&path, content).unwrap();
        Scratch(path)
    }

    fn path(&self) -> &str {
        self.0.to_str().unwrap()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// Two disjoint 2-cycles, unit weights, budget 2: solvable at exactly 2.
const TWO_CYCLES: &str = "EE 1\nvertices 4\narcs 4\n0 1\n1 0\n2 3\n3 2\n\
                          weights 0\ndefault-weight 1\nomega-max 2\n";

#[test]
fn solve_ee_reports_the_optimum_weight_and_extension() {
    let out = eulex(&["solve-ee", &fixture("two_cycles.ee")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# weight 2");
    assert_eq!(lines.len(), 3, "an optimal extension here has two arcs");
    for arc in &lines[1..] {
        assert_eq!(arc.split_whitespace().count(), 2);
    }
}

#[test]
fn unsolvable_instances_exit_with_one_and_explain_on_stderr() {
    let strict = TWO_CYCLES.replace("omega-max 2", "omega-max 1");
    let out = eulex_on(&["solve-ee", "-"], &strict);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("no extension within the budget"));
}

#[test]
fn usage_io_and_parse_errors_exit_with_two() {
    assert_eq!(code(&eulex(&["solve-ee", "/no/such/file.ee"])), 2);
    assert_eq!(code(&eulex(&["solve-ee"])), 2);
    assert_eq!(code(&eulex(&["frobnicate"])), 2);
    let out = eulex_on(&["solve-ee", "-"], "EE 9\nvertices 1\n");
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn solver_certificates_pass_verification_and_tampered_ones_fail() {
    // The solver report doubles as a certificate file: comments are skipped.
    let ee = fixture("two_cycles.ee");
    let report = stdout(&eulex(&["solve-ee", &ee]));
    let cert = Scratch::with("good.cert", &report);
    assert_eq!(code(&eulex(&["verify", "ee", &ee, cert.path()])), 0);
    let half: String = report.lines().take(2).map(|l| format!("{l}\n")).collect();
    let bad = Scratch::with("bad.cert", &half);
    assert_eq!(code(&eulex(&["verify", "ee", &ee, bad.path()])), 1);

    let cbm = fixture("sample.cbm");
    let report = stdout(&eulex(&["solve-cbm", &cbm]));
    let cert = Scratch::with("good-m.cert", &report);
    assert_eq!(code(&eulex(&["verify", "cbm", &cbm, cert.path()])), 0);
    let bad = Scratch::with("bad-m.cert", "0 2\n1 3\n");
    let out = eulex(&["verify", "cbm", &cbm, bad.path()]);
    assert_eq!(code(&out), 1);

    let ssc = fixture("sample.ssc");
    let report = stdout(&eulex(&["solve-ssc", &ssc]));
    let cert = Scratch::with("good-c.cert", &report);
    assert_eq!(code(&eulex(&["verify", "ssc", &ssc, cert.path()])), 0);
    let bad = Scratch::with("bad-c.cert", "0\n");
    assert_eq!(code(&eulex(&["verify", "ssc", &ssc, bad.path()])), 1);
}

#[test]
fn satisfiability_decides_through_the_matching_reduction() {
    let cbm = stdout(&eulex(&["reduce", "sat-to-cbm", &fixture("phi.cnf")]));
    assert_eq!(code(&eulex_on(&["solve-cbm", "-"], &cbm)), 0);

    let unsat = "c one variable, forced both ways\np cnf 1 2\n1 0\n-1 0\n";
    let kind = Scratch::with("unsat.cnf", unsat);
    let cbm = stdout(&eulex(&["reduce", "sat-to-cbm", kind.path()]));
    assert_eq!(code(&eulex_on(&["solve-cbm", "-"], &cbm)), 1);
}

#[test]
fn hamiltonian_cycles_decide_through_the_extension_reduction() {
    let ee = stdout(&eulex(&["reduce", "hc-to-ee", &fixture("ring.hc")]));
    assert_eq!(code(&eulex_on(&["oracle-ee", "-"], &ee)), 0);

    let star = "HC 1\nvertices 4\narcs 3\n0 1\n0 2\n0 3\n";
    let hc = Scratch::with("star.hc", star);
    let ee = stdout(&eulex(&["reduce", "hc-to-ee", hc.path()]));
    assert_eq!(code(&eulex_on(&["oracle-ee", "-"], &ee)), 1);
}

#[test]
fn switch_covers_decide_through_the_geometric_reductions() {
    let planar = stdout(&eulex(&["reduce", "ssc-to-2dee", &fixture("sample.ssc")]));
    let ee = stdout(&eulex_on(&["reduce", "2dee-to-ee", "-"], &planar));
    assert_eq!(code(&eulex_on(&["solve-ee", "-"], &ee)), 0);
    assert_eq!(code(&eulex(&["solve-ssc", &fixture("sample.ssc")])), 0);
}

#[test]
fn json_reports_carry_the_documented_fields() {
    let out = eulex(&["--json", "solve-ee", &fixture("two_cycles.ee")]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "solve-ee");
    assert_eq!(v["answer"], "yes");
    assert_eq!(v["weight"], 2);
    assert_eq!(v["certificate"].as_array().unwrap().len(), 2);
    assert_eq!(v["stats"]["n"], 4);
    assert_eq!(v["stats"]["c"], 2);
    assert!(v["stats"]["max_branches_per_node"].is_u64());
    assert!(v["time_ms"].is_number());
    assert!(v.get("reason").is_none());

    let strict = TWO_CYCLES.replace("omega-max 2", "omega-max 1");
    let out = eulex_on(&["--json", "solve-ee", "-"], &strict);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["answer"], "no");
    assert!(v["weight"].is_null());
    assert!(v["reason"].is_string());
}

#[test]
fn generation_is_deterministic_and_agrees_with_the_oracle() {
    let first = stdout(&eulex(&["gen", "ee", "--seed", "7"]));
    let again = stdout(&eulex(&["gen", "ee", "--seed", "7"]));
    let other = stdout(&eulex(&["gen", "ee", "--seed", "8"]));
    assert_eq!(first, again);
    assert_ne!(first, other);

    let solved: Value =
        serde_json::from_str(&stdout(&eulex_on(&["--json", "solve-ee", "-"], &first))).unwrap();
    let oracle: Value =
        serde_json::from_str(&stdout(&eulex_on(&["--json", "oracle-ee", "-"], &first))).unwrap();
    assert_eq!(solved["answer"], oracle["answer"]);
    assert_eq!(solved["weight"], oracle["weight"]);
}

#[test]
fn oracle_rejects_instances_beyond_its_cap() {
    let big = stdout(&eulex(&["gen", "ee", "--n", "10", "--seed", "1"]));
    assert_eq!(code(&eulex_on(&["oracle-ee", "-"], &big)), 2);
}

#[test]
fn bench_is_deterministic_apart_from_timings() {
    let strip = |text: String| -> Vec<String> {
        text.lines().map(|l| l.rsplit_once(' ').unwrap().0.to_string()).collect()
    };
    let first = eulex(&["bench", "--count", "8", "--seed", "3"]);
    assert_eq!(code(&first), 0);
    let again = eulex(&["bench", "--count", "8", "--seed", "3"]);
    let rows = strip(stdout(&first));
    assert_eq!(rows, strip(stdout(&again)));
    assert_eq!(rows.len(), 9, "a header and one row per instance");
    assert!(rows[0].starts_with("# name"));
}

#[test]
fn compose_ssc_is_solvable_exactly_if_some_input_is() {
    // Shares the fixture's shape (two colors, two switches) but never covers
    // color 1, so it is a no instance.
    let no = "SSC 1\ncolors 2\nswitches 2\nswitch 1\n1 0\nswitch 1\n1 0\n";
    let no_file = Scratch::with("no.ssc", no);
    assert_eq!(code(&eulex(&["solve-ssc", no_file.path()])), 1);

    let mixed =
        stdout(&eulex(&["compose-ssc", no_file.path(), &fixture("sample.ssc")]));
    assert_eq!(code(&eulex_on(&["solve-ssc", "-"], &mixed)), 0);

    let hopeless = stdout(&eulex(&["compose-ssc", no_file.path(), no_file.path()]));
    assert_eq!(code(&eulex_on(&["solve-ssc", "-"], &hopeless)), 1);
}

#[test]
fn kernelization_preserves_the_answer_for_both_hint_kinds() {
    let ee = fixture("two_cycles.ee");
    // A cycle through both components is realizable within the budget.
    let kernel = stdout(&eulex(&["kernelize-eeca", &ee, "--advice", "*0-1-0"]));
    assert_eq!(code(&eulex_on(&["solve-ee", "-"], &kernel)), 0);
    // An open trail needs imbalanced endpoints, which this instance lacks.
    let kernel = stdout(&eulex(&["kernelize-eeca", &ee, "--advice", "0-1"]));
    assert!(kernel.starts_with("# advice 0-1\n"));
    assert_eq!(code(&eulex_on(&["solve-ee", "-"], &kernel)), 1);
}

#[test]
fn preprocessing_keeps_the_answer_and_reparses() {
    let pre = stdout(&eulex(&["preprocess", &fixture("two_cycles.ee")]));
    let out = eulex_on(&["solve-ee", "-"], &pre);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("# weight 2\n"));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let target = Scratch::with("report.txt", "");
    let out = eulex(&["--out", target.path(), "solve-ee", &fixture("two_cycles.ee")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    assert!(fs::read_to_string(target.0.as_path()).unwrap().starts_with("# weight 2\n"));
}
