use std::path::Path;
use std::process::{Command, Output};

fn homdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homdist")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hom_prints_exact_and_float() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = write(dir.path(), "p2.txt", "3 2\n0 1\n1 2\n");
    let k3 = write(dir.path(), "k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    let o = homdist(&["hom", "--pattern", &p2, "--target", &k3]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "12 12");
    let o = homdist(&["hom", "--pattern", &p2, "--target", &k3, "--density"]);
    assert_eq!(stdout(&o).trim(), "4/9 0.4444444444444444");
    let w = write(dir.path(), "w.json", r#"{"alpha": ["1/2", "1/2"], "beta": [["0", "1"], ["1", "0"]]}"#);
    let o = homdist(&["hom", "--pattern", &p2, "--target", &w, "--weighted"]);
    assert_eq!(stdout(&o).trim(), "1/4 0.25");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "3 1\n0 9\n");
    let k3 = write(dir.path(), "k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    assert_eq!(homdist(&[]).status.code(), Some(1));
    assert_eq!(homdist(&["--help"]).status.code(), Some(0));
    let o = homdist(&["refine", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(homdist(&["refine", "/nonexistent/file"]).status.code(), Some(2));
    // a triangle is not a tree
    assert_eq!(homdist(&["hom", "--pattern", &k3, "--target", &k3]).status.code(), Some(3));
    assert_eq!(homdist(&["gen", "--model", "regular", "--n", "5", "--d", "3"]).status.code(), Some(3));
    let o = homdist(&["dist", "--kind", "tree-spec", &k3, &k3, "--max-iters", "0"]);
    assert!(matches!(o.status.code(), Some(0) | Some(4)));
    assert_eq!(homdist(&["verify", "--suite", "nope", "--out", dir.path().to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn refine_writes_quotient_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let star = write(dir.path(), "star.txt", "4 3\n0 1\n0 2\n0 3\n");
    let q = dir.path().join("q.json");
    let o = homdist(&["refine", &star, "--quotient", q.to_str().unwrap(), "--spectrum"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("classes=2 rounds="));
    assert!(out.contains("lambda_hat,w_hat"));
    let text = std::fs::read_to_string(&q).unwrap();
    let w = homdist::WeightedGraph::parse(&text).unwrap();
    assert_eq!(w.vertex_count(), 2);
}

#[test]
fn dist_reports_json_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let k2 = write(dir.path(), "k2.txt", "2 1\n0 1\n");
    let c4 = write(dir.path(), "c4.txt", "4 4\n0 1\n1 2\n2 3\n0 3\n");
    let cert = dir.path().join("x.csv");
    let o = homdist(&["dist", "--kind", "path-spec", &k2, &c4, "--json", "--cert", cert.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["value"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["bound"], "exact");
    assert_eq!(report["seed"], 0);
    assert!(report["residuals"]["marginal"].as_f64().unwrap() <= 1e-10);
    let c = homdist::overlay::certificate_from_csv(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c.matrix.shape(), (2, 4));

    let k3 = write(dir.path(), "k3.txt", "3 3\n0 1\n1 2\n0 2\n");
    for kind in ["tree-spec", "tree-cut", "cut", "color"] {
        let o = homdist(&["dist", "--kind", kind, &k2, &k3, "--seed", "3"]);
        assert!(o.status.success(), "{kind}");
        assert!(stdout(&o).starts_with("value="), "{kind}");
    }
}

#[test]
fn invert_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.json", r#"{"alpha": ["1"], "beta": [["2/3"]]}"#);
    let out = dir.path().join("g.txt");
    let o = homdist(&["invert", &h, "--n", "6", "-o", out.to_str().unwrap(), "--verify", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rep["achieved"].as_f64().unwrap() <= rep["bound"].as_f64().unwrap());
    let g = homdist::Graph::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.vertex_count(), 36);
    assert_eq!(homdist(&["invert", &h, "--n", "0"]).status.code(), Some(3));
}

#[test]
fn verify_writes_named_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = homdist(&["verify", "--suite", "quotient-hom", "--seed", "4", "--out", d, "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["passed"], true);
    let csv = std::fs::read_to_string(dir.path().join("quotient-hom-4.csv")).unwrap();
    assert!(csv.starts_with("seed,instance,"));
}

#[test]
fn gen_is_deterministic() {
    let a = homdist(&["gen", "--model", "gnp", "--n", "8", "--p", "0.5", "--seed", "1"]);
    assert_eq!(stdout(&a), include_str!("fixtures/gnp-8-0.5-1.txt"));
    let f = homdist(&["gen", "--model", "fig1", "--n", "3"]);
    assert!(stdout(&f).starts_with("9 "));
}
