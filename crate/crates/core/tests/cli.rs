use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graph-poincare"))
        .args(args)
        .env_remove("GRAPH_POINCARE_SEED")
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn gen_kary(dir: &Path) -> String {
    let path = dir.join("kary.json");
    let p = path.to_str().unwrap().to_string();
    let out = bin(&[
        "gen", "kary", "--k", "2", "--depth", "2", "--alpha", "0.25", "--out", &p,
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    p
}

#[test]
fn kary_then_john_prints_175() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_kary(dir.path());
    let out = bin(&["john", &p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).lines().any(|l| l == "c = 1.75"));
}

#[test]
fn verify_poincare_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_kary(dir.path());
    let out = bin(&[
        "verify", "poincare", &p, "--p", "1", "--trials", "100", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let reports = graph_poincare::io::read_reports(&text(&out.stdout)).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports
        .iter()
        .all(|r| r.passed && r.seed == 7 && r.runtime_ms == 0));
}

#[test]
fn log_path_warns_not_uniformly_john() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("log.json");
    let p = path.to_str().unwrap();
    assert!(
        bin(&["gen", "log-path", "--last", "100000", "--gamma", "2", "--out", p])
            .status
            .success()
    );
    let out = bin(&["john", p]);
    assert_eq!(out.status.code(), Some(0));
    let c: f64 = text(&out.stdout)
        .lines()
        .find_map(|l| l.strip_prefix("c = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(c > 10.0);
    assert!(text(&out.stderr).contains("not uniformly John"));
}

#[test]
fn seed_from_environment_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_kary(dir.path());
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_graph-poincare"));
        cmd.args(["verify", "hardy", &p, "--trials", "50"])
            .args(extra);
        match env {
            Some(v) => cmd.env("GRAPH_POINCARE_SEED", v),
            None => cmd.env_remove("GRAPH_POINCARE_SEED"),
        };
        text(&cmd.output().unwrap().stdout)
    };
    let from_env = run(Some("11"), &[]);
    assert!(from_env.contains("\"seed\":11"));
    assert_eq!(from_env, run(None, &["--seed", "11"]));
    assert!(run(Some("11"), &["--seed", "12"]).contains("\"seed\":12"));
}

#[test]
fn csv_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_kary(dir.path());
    let csv = dir.path().join("ratios.csv");
    let out = bin(&[
        "verify",
        "poincare",
        &p,
        "--trials",
        "10",
        "--csv",
        csv.to_str().unwrap(),
        "--timing",
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        body.lines().next().unwrap(),
        "trial,vertices,p,mode,ratio,theoretical"
    );
    assert_eq!(body.lines().count(), 1 + 10 * 3 * 2);
    assert!(
        bin(&["verify", "hardy", &p, "--csv", csv.to_str().unwrap()])
            .status
            .code()
            == Some(3)
    );
}

#[test]
fn tree_command_writes_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let p = path.to_str().unwrap();
    assert!(bin(&["gen", "grid", "--nx", "3", "--ny", "3", "--out", p])
        .status
        .success());
    let (_, tree) = graph_poincare::io::load_graph(&path).unwrap();
    assert!(tree.is_none());
    let out = bin(&["tree", p, "--optimize", "exhaustive"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let (g, tree) = graph_poincare::io::load_graph(&path).unwrap();
    tree.unwrap().check_spans(&g).unwrap();
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_kary(dir.path());
    assert_eq!(
        bin(&["verify", "hardy", &p, "--no-such-flag"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"format_version":1,"vertices":[{"id":0,"mu":0}],"edges":[]}"#,
    )
    .unwrap();
    let out = bin(&["john", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("nonpositive weight"));
}
