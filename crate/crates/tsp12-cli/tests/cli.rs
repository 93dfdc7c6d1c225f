use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tsp12::gadget::Graph;
use tsp12::{gen, Instance, Kind, Tour};

fn tsp12(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsp12"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixtures() -> (TempDir, PathBuf, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let b = put(dir.path(), "fig1b.tsp", &gen::fig1b().to_text());
    let a = put(dir.path(), "fig1a.tsp", &gen::fig1a().to_text());
    (dir, a, b)
}

#[test]
fn verify_reports_fig1b_gap() {
    let (_d, _a, b) = fixtures();
    let o = tsp12(&["verify", s(&b), "--oracle"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("gap_ser = 6/5"), "{out}");
    assert!(out.contains("opt = 6"));
}

#[test]
fn verify_many_files_with_jobs() {
    let (_d, a, b) = fixtures();
    let o = tsp12(&["--jobs", "2", "verify", s(&a), s(&b), "--oracle", "--alpha", "4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("gap_ser = 10/9"));
    assert!(out.contains("gap_ser = 6/5"));
    assert!(out.contains("assignment_feasible = true"));
}

#[test]
fn beta_prints_exact_value() {
    let o = tsp12(&["amplify", "beta", "--alpha", "7/6", "--c", "13", "--gamma", "1/2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("191/162"));
}

#[test]
fn oracle_guard_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(dir.path(), "big.tsp", &Instance::empty(Kind::Symmetric, 21).unwrap().to_text());
    assert_eq!(tsp12(&["oracle", "opt", s(&p)]).status.code(), Some(3));
}

#[test]
fn oracle_values() {
    let (_d, a, b) = fixtures();
    assert_eq!(stdout(&tsp12(&["oracle", "opt", s(&b)])).trim(), "6");
    assert_eq!(stdout(&tsp12(&["oracle", "min-components", s(&a)])).trim(), "1");
}

#[test]
fn usage_and_format_errors() {
    assert_eq!(tsp12(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(tsp12(&["verify"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let p = put(dir.path(), "bad.tsp", "TSP12 sym 3\n0 7\n");
    assert_eq!(tsp12(&["verify", s(&p)]).status.code(), Some(2));
    assert_eq!(tsp12(&["verify", "/nonexistent.tsp"]).status.code(), Some(2));
    assert!(tsp12(&["--help"]).status.success());
}

#[test]
fn solve_output_reparses_and_feeds_improve() {
    let (d, a, _b) = fixtures();
    let lp = d.path().join("a.lpsol");
    let o = tsp12(&["solve", s(&a), "--out", s(&lp)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.contains("# opt_ser = 9"));
    tsp12::instance::LpFile::parse(&text).unwrap();

    let tour = d.path().join("a.tour");
    let o = tsp12(&["--trace", "improve", s(&a), "--lpsol", s(&lp), "--out", s(&tour)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("objective = 9"));
    let t = Tour::parse(&std::fs::read_to_string(&tour).unwrap()).unwrap();
    let cost = tsp12::instance::tour_cost(&gen::fig1a(), &t).unwrap();
    assert!(out.contains(&format!("tour_cost = {cost}")));
    assert!(cost <= 10);
}

#[test]
fn improve_rejects_wrong_kind() {
    let (_d, _a, b) = fixtures();
    assert_eq!(tsp12(&["improve", s(&b)]).status.code(), Some(2));
}

#[test]
fn directed_pipeline_on_fig1b() {
    let (_d, _a, b) = fixtures();
    let o = tsp12(&["directed", s(&b)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("objective = 5"));
    let cost: u64 = out
        .lines()
        .find_map(|l| l.strip_prefix("tour_cost = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((6..=8).contains(&cost), "{cost}");
}

#[test]
fn amplify_files_reparse() {
    let (d, a, b) = fixtures();
    let prefix = d.path().join("sub");
    assert!(tsp12(&["amplify", "subdivide", s(&a), "--out", s(&prefix)]).status.success());
    let inst = Instance::parse(&std::fs::read_to_string(d.path().join("sub.tsp")).unwrap()).unwrap();
    assert_eq!(inst.n(), 10);
    let lp = d.path().join("sub.lpsol");
    let o = tsp12(&["amplify", "double-sym", s(&d.path().join("sub.tsp")), "--lpsol", s(&lp), "--vertex", "9"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("n = 20\nobjective = 20\n"));

    let o = tsp12(&["amplify", "double-asym", s(&b), "--vertex", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("n = 10\nobjective = 10\n"));
    // Every vertex of this instance has four support neighbours.
    assert_eq!(tsp12(&["amplify", "double-asym", s(&b), "--vertex", "0"]).status.code(), Some(2));
}

#[test]
fn gadget_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "k5.graph", &Graph::complete(5).to_text());
    let prefix = dir.path().join("k5");
    let o = tsp12(&["gadget", "build", s(&g), "--t", "3", "--out", s(&prefix)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "vertices = 450\ncost_c = 451\nk = 50\n");
    let layout = std::fs::read_to_string(dir.path().join("k5.layout")).unwrap();
    assert!(layout.starts_with("gadget 0 alpha "));

    let tour = dir.path().join("c2.tour");
    let o = tsp12(&["gadget", "clique-tour", s(&g), "--clique", "0,1,2", "--out", s(&tour)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("cost = 450\ndistance = 50\n"));

    let o = tsp12(&["gadget", "check", s(&g), s(&tour)]);
    let out = stdout(&o);
    assert!(out.contains("lower = 6\n") && out.contains("active_segments = 6\n"), "{out}");
}

#[test]
fn generate_is_deterministic() {
    let a = tsp12(&["--seed", "9", "generate", "--n", "10"]);
    let b = tsp12(&["--seed", "9", "generate", "--n", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    Instance::parse(&stdout(&a)).unwrap();
    let c = tsp12(&["--seed", "9", "generate", "--n", "16", "--triangles", "--p", "0"]);
    assert!(Instance::parse(&stdout(&c)).unwrap().n() <= 16);
}

#[test]
fn reports_are_byte_identical() {
    let (_d, a, _b) = fixtures();
    let x = tsp12(&["--trace", "improve", s(&a)]);
    let y = tsp12(&["--trace", "improve", s(&a)]);
    assert_eq!(x.stdout, y.stdout);
}
