use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::NamedTempFile;

fn leibniz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibniz")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn corpus(lines: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(lines.as_bytes()).unwrap();
    f
}

#[test]
fn eval_prints_series_class_and_shadow() {
    let o = leibniz(&["eval", "st(2*x + eps)", "-b", "x=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("6 (appreciable)"));
    assert!(o.stderr.is_empty());

    let o = leibniz(&["eval", "eps*H"]);
    assert!(stdout(&o).starts_with("1 (appreciable)"));

    let o = leibniz(&["eval", "sqrt(4 + eps)", "-T", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 + 1/4·eps - 1/64·eps^2 + 1/512·eps^3 + O(eps^4) (appreciable)\nshadow: 2\n");
}

#[test]
fn eval_exit_codes() {
    let o = leibniz(&["eval", "1/(x-x)", "-b", "x=1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("DivisionByZero"));
    assert!(o.stdout.is_empty());

    let o = leibniz(&["eval", "3..5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position 2"), "{}", stderr(&o));

    assert_eq!(leibniz(&["eval", "st(H)"]).status.code(), Some(3));
    assert_eq!(leibniz(&["eval", "sqrt(-1)"]).status.code(), Some(3));
    assert_eq!(leibniz(&["bogus"]).status.code(), Some(2));
    assert_eq!(leibniz(&["--precision", "0", "eval", "1"]).status.code(), Some(2));
}

#[test]
fn diff_reports_the_superfluous_part() {
    let o = leibniz(&["diff", "x^2", "x", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "quotient: 6 + eps\nshadow: 6\nsuperfluous: eps\n");

    let o = leibniz(&["--format", "json", "diff", "x^3", "x", "1/2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["shadow"], "3/4");
    assert_eq!(v["quotient"]["terms"][0]["coef"], "3/4");
    assert_eq!(v["superfluous"]["terms"][0]["exp"], "1");

    // composite v bound on the command line, as in the product rule
    let o = leibniz(&["diff", "x*v", "x", "2", "-b", "v=5"]);
    assert!(stdout(&o).contains("shadow: 5\n"));
    assert_eq!(leibniz(&["diff", "1/x", "x", "0"]).status.code(), Some(3));
}

#[test]
fn gallery_examples_pass_and_emit_json() {
    for id in ["parallel_lines", "infinitesimal_equality", "ellipse_parabola", "product_rule"] {
        let o = leibniz(&["gallery", id]);
        assert_eq!(o.status.code(), Some(0), "{id}: {}", stdout(&o));
        assert!(o.stderr.is_empty());
        assert!(stdout(&o).contains("result: pass"));

        let o = leibniz(&["--format", "json", "gallery", id]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["example"], id);
        assert_eq!(v["pass"], true);
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["example", "parameters", "claims", "pass"]);
    }
    let o = leibniz(&["gallery", "bogus_id"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("possible values"));
}

#[test]
fn gallery_writes_parabola_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("parabola.csv");
    let o = leibniz(&["gallery", "ellipse_parabola", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "x0,y0,st_of_lhs");
    assert!(rows.contains(&"2,0,0"));
    assert!(rows.contains(&"0,-1,0"));
    assert_eq!(rows.len(), 8);
    assert_eq!(leibniz(&["gallery", "parallel_lines", "--csv", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn transfer_corpus_verdicts() {
    let good = corpus("# binomial\n(x+y)^2 == x^2+2*x*y+y^2\n\n1/x - 1/(x+1) == 1/(x*(x+1))  # telescoping\n");
    let o = leibniz(&["transfer", good.path().to_str().unwrap(), "--trials", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("line 2: (x+y)^2 == x^2+2*x*y+y^2: PASS (identity; 30/30 inassignable samples agree)"));
    assert!(out.contains("line 4: "));
    assert!(out.ends_with("summary: 2 of 2 identities pass (seed 0)\n"));

    let bad = corpus("(x+1)^2 == x^2+1\n");
    let o = leibniz(&["transfer", bad.path().to_str().unwrap(), "--trials", "10"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("counterexample x = "));

    let o = leibniz(&["--format", "json", "transfer", bad.path().to_str().unwrap(), "--trials", "10"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["identities"][0]["report"]["identity"], false);
    assert!(v["identities"][0]["report"]["counterexample"]["x"].is_string());

    let empty = corpus("");
    let o = leibniz(&["transfer", empty.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "summary: 0 of 0 identities pass (seed 0)\n");

    let broken = corpus("x == x\n(x + == 1\n");
    let o = leibniz(&["transfer", broken.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn transfer_is_deterministic_for_a_seed() {
    let f = corpus("(x-y)^3 == x^3 - 3*x^2*y + 3*x*y^2 - y^3\n");
    let run = |seed: &str| {
        stdout(&leibniz(&[
            "--format",
            "json",
            "--seed",
            seed,
            "transfer",
            f.path().to_str().unwrap(),
            "--trials",
            "20",
        ]))
    };
    assert_eq!(run("9"), run("9"));
    assert_ne!(run("9"), run("10"));
}

#[test]
fn repl_keeps_bindings_between_lines() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_leibniz"))
        .arg("repl")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"x = 2 + eps\nx^2\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 + eps (appreciable)\nshadow: 2\n4 + 4·eps + eps^2 (appreciable)\nshadow: 4\n");
}

#[test]
fn results_do_not_depend_on_precision() {
    for id in ["parallel_lines", "infinitesimal_equality", "ellipse_parabola", "product_rule"] {
        let outputs: Vec<String> =
            ["4", "16", "64"].iter().map(|t| stdout(&leibniz(&["-T", t, "gallery", id]))).collect();
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{id}");
    }
    let outputs: Vec<String> =
        ["4", "16", "64"].iter().map(|t| stdout(&leibniz(&["-T", t, "diff", "x^3 - 2*x", "x", "5/3"]))).collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
