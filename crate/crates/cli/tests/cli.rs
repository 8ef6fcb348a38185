use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fpss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpss")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(report: &str, key: &str) -> Option<String> {
    report.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cvd_on_p3_deletes_one_vertex() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p3.stream", "n 3\n+ 0 1\n+ 1 2\n");
    let o = fpss(&["run", "--problem", "cvd", "-k", "1", s(&f), "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let r = stdout(&o);
    assert_eq!(value(&r, "decision").as_deref(), Some("YES"));
    // Any single vertex leaves a cluster graph; the report names one of them.
    let sol = value(&r, "solution").unwrap();
    assert!(["0", "1", "2"].contains(&sol.as_str()), "{sol}");
    assert_eq!(value(&r, "verified").as_deref(), Some("true"));
}

#[test]
fn oct_on_bipartite_needs_nothing() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bip.stream", "n 4\n+ 0 1\n+ 1 2\n+ 2 3\n+ 3 0\n");
    let o = fpss(&["run", "--problem", "oct", "-k", "0", s(&f)]);
    assert_eq!(code(&o), 0);
    assert_eq!(value(&stdout(&o), "solution").as_deref(), Some(""));
}

#[test]
fn mwc_on_terminal_edge_is_no() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "edge.stream", "n 2\nprob mwc\n+ 0 1 1 1\n");
    let o = fpss(&["run", "-k", "0", s(&f)]);
    assert_eq!(code(&o), 1);
    assert_eq!(value(&stdout(&o), "decision").as_deref(), Some("NO"));
}

#[test]
fn errors_exit_above_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.stream", "n 3\n+ 0 5\n");
    assert!(code(&fpss(&["run", "--problem", "cvd", "-k", "1", s(&bad)])) >= 2);
    let no_prob = write(&dir, "plain.stream", "n 3\n+ 0 1\n");
    assert!(code(&fpss(&["run", s(&no_prob)])) >= 2);
    assert!(code(&fpss(&["run", "--problem", "nope", s(&no_prob)])) >= 2);
    assert!(code(&fpss(&["run", "--problem", "cvd", "missing.stream"])) >= 2);
    assert!(code(&fpss(&["gen", "--problem", "cvd", "-n", "3", "-k", "5"])) >= 2);
    // A one-pass pipeline cannot run with zero passes.
    assert!(code(&fpss(&["run", "--problem", "cvd", "-k", "0", "--passes-cap", "0", s(&no_prob)])) >= 2);
}

#[test]
fn report_file_and_json() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p3.stream", "n 3\nprob cvd\nk 1\n+ 0 1\n+ 1 2\n");
    let rep = dir.path().join("r.txt");
    let o = fpss(&["run", s(&f), "--report", s(&rep)]);
    assert_eq!(std::fs::read_to_string(&rep).unwrap(), stdout(&o));
    let o = fpss(&["run", s(&f), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["decision"], "YES");
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("g.stream");
    assert_eq!(code(&fpss(&["gen", "--problem", "oct", "-n", "14", "-k", "1", "--seed", "3", "-o", s(&f)])), 0);
    let a = fpss(&["run", s(&f), "--seed", "5"]);
    let b = fpss(&["run", s(&f), "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn block_recognition_with_larger_t() {
    let dir = TempDir::new().unwrap();
    // C4: every non-adjacent pair is split by 2 vertices, but it is not chordal.
    let c4 = write(&dir, "c4.stream", "n 4\nprob bvd\n+ 0 1\n+ 1 2\n+ 2 3\n+ 3 0\n");
    assert_eq!(code(&fpss(&["run", s(&c4), "-k", "0", "--t", "2"])), 1);
    let k4 = write(&dir, "k4.stream", "n 4\nprob bvd\n+ 0 1\n+ 1 2\n+ 2 3\n+ 3 0\n+ 0 2\n");
    let o = fpss(&["run", s(&k4), "-k", "0", "--t", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(code(&fpss(&["run", s(&k4), "-k", "1", "--t", "2"])) >= 2);
}

#[test]
fn gen_examples_hold_their_plants() {
    for (problem, n, k) in [("cvd", "12", "2"), ("oct", "10", "1"), ("pivd", "8", "0")] {
        let o = fpss(&["gen", "--problem", problem, "-n", n, "-k", k, "--seed", "1"]);
        assert_eq!(code(&o), 0);
        let text = stdout(&o);
        let plant = text.lines().next().unwrap().strip_prefix("# planted").unwrap().trim();
        assert_eq!(plant.split(',').filter(|t| !t.is_empty()).count(), k.parse::<usize>().unwrap());
        let dir = TempDir::new().unwrap();
        let f = write(&dir, "g.stream", &text);
        let sol = write(&dir, "sol.txt", plant);
        assert_eq!(code(&fpss(&["verify", s(&f), s(&sol)])), 0, "{problem}");
    }
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let c5 = write(&dir, "c5.stream", "n 5\nprob oct\nk 1\n+ 0 1\n+ 1 2\n+ 2 3\n+ 3 4\n+ 4 0\n");
    let empty = write(&dir, "empty.txt", "");
    assert_eq!(code(&fpss(&["verify", s(&c5), s(&empty)])), 1);
    let one = write(&dir, "one.txt", "2\n");
    assert_eq!(code(&fpss(&["verify", s(&c5), s(&one)])), 0);
    let two = write(&dir, "two.txt", "2 3\n");
    let o = fpss(&["verify", s(&c5), s(&two)]);
    assert_eq!(code(&o), 1);
    let r = stdout(&o);
    assert_eq!(value(&r, "property_holds").as_deref(), Some("true"));
    assert!(value(&r, "note").unwrap().starts_with("SizeExceeded"));
    let bad = write(&dir, "bad.txt", "9\n");
    assert!(code(&fpss(&["verify", s(&c5), s(&bad)])) >= 2);
}

#[test]
fn gen_run_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    for problem in ["fvst", "cvd", "svd", "tvd", "bvd", "pivd", "oct", "sfvs", "mwc"] {
        let mut failures = Vec::new();
        for seed in 0..100u64 {
            let n = (8 + seed % 5).to_string();
            let k = (seed % 3).to_string();
            let seed = seed.to_string();
            let f = dir.path().join(format!("{problem}-{seed}.stream"));
            let rep = dir.path().join(format!("{problem}-{seed}.report"));
            assert_eq!(code(&fpss(&["gen", "--problem", problem, "-n", &n, "-k", &k, "--seed", &seed, "-o", s(&f)])), 0);
            let o = fpss(&["run", s(&f), "--seed", &seed, "--report", s(&rep)]);
            if code(&o) != 0 {
                failures.push(format!("seed {seed}: run exit {} {}", code(&o), String::from_utf8_lossy(&o.stderr)));
                continue;
            }
            let v = fpss(&["verify", s(&f), s(&rep)]);
            if code(&v) != 0 {
                failures.push(format!("seed {seed}: verify {}", stdout(&v)));
            }
        }
        assert!(failures.is_empty(), "{problem}: {failures:?}");
    }
}
