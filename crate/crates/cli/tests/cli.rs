use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onecross"))
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("onecross-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const K4: &str = "p 4 6\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n";
const C5: &str = "p 5 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 0\n";

#[test]
fn match_k4_prints_two_edges() {
    let p = write_tmp("k4.txt", K4);
    let o = run(&["match", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn match_c5_has_no_perfect_matching() {
    let p = write_tmp("c5.txt", C5);
    let o = run(&["match", p.to_str().unwrap(), "--oracle-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn verify_k33_free() {
    let o = run(&["verify", "--family", "k33-free", "--n", "60", "--trials", "20", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "20/20 agree");
}

#[test]
fn verify_other_modes() {
    for mode in ["wmatch", "flow"] {
        let o = run(&["verify", "--family", "k5-free", "--n", "30", "--trials", "8", "--mode", mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        assert_eq!(stdout(&o).trim(), "8/8 agree");
    }
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(run(&["match"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["match", "/nonexistent/graph.txt"]).status.code(), Some(1));
    let p = write_tmp("k4b.txt", K4);
    // no capacities
    assert_eq!(run(&["maxflow", p.to_str().unwrap(), "-s", "0", "-t", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_across_threads() {
    let g = run(&["gen", "--family", "k5-free", "--n", "120", "--plant", "--weights", "-50,50", "--seed", "11"]);
    assert_eq!(g.status.code(), Some(0));
    let p = write_tmp("w.txt", &stdout(&g));
    let path = p.to_str().unwrap();
    let one = run(&["wmatch", path, "--threads", "1", "--dump-witness"]);
    let many = run(&["wmatch", path, "--threads", "8", "--dump-witness"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let again = run(&["gen", "--family", "k5-free", "--n", "120", "--plant", "--weights", "-50,50", "--seed", "11"]);
    assert_eq!(g.stdout, again.stdout);
}

#[test]
fn maxflow_reads_both_formats() {
    let d = write_tmp("d.txt", "c tiny\np max 3 2\nn 1 s\nn 3 t\na 1 2 4\na 2 3 6\n");
    let o = run(&["maxflow", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "value 4\n0 1 4\n1 2 4\n");
    let e = write_tmp("e.txt", "p 3 3 capacitated\ne 0 1 2\ne 1 2 5\ne 0 2 1\n");
    let o = run(&["maxflow", e.to_str().unwrap(), "-s", "0", "-t", "2", "--oracle-check"]);
    assert_eq!(stdout(&o).lines().next(), Some("value 3"));
}

#[test]
fn report_is_json() {
    let p = write_tmp("k4r.txt", K4);
    let r = p.with_extension("json");
    let o = run(&["match", p.to_str().unwrap(), "--report", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
    assert!(v["timings_ms"].as_array().unwrap().len() >= 2);
}

#[test]
fn decompose_pattern_and_search() {
    let p = write_tmp("k4d.txt", K4);
    let o = run(&["decompose", p.to_str().unwrap(), "--heavy"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("tree "));
    assert!(stdout(&o).contains("heavy paths="));
    let o = run(&["pattern", p.to_str().unwrap(), "--terminals", "0,1,2"]);
    assert!(stdout(&o).contains("masks 1,2,4,7"));
    let o = run(&["mimick-search", "-k", "2", "--pattern", "0,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("k=2 "));
}

#[test]
fn dense_graph_is_outside_the_family() {
    let n = 12;
    let mut text = format!("p {n} {}\n", n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            text += &format!("e {i} {j}\n");
        }
    }
    let p = write_tmp("k12.txt", &text);
    assert_eq!(run(&["match", p.to_str().unwrap()]).status.code(), Some(3));
}
