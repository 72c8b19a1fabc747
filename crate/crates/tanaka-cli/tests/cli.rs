use std::path::PathBuf;
use std::process::{Command, Output};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn tanaka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanaka"))
        .args(args)
        .env_remove("TANAKA_SEED")
        .output()
        .expect("binary runs")
}

fn model(name: &str) -> String {
    models_dir().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn analyze_e13_json() {
    let o = tanaka(&["analyze", &model("e13.tk"), "--samples", "2", "--json", "-"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["tanaka"]["dims"], serde_json::json!([3, 2, 0]));
    assert_eq!(v["theorem1_bound"], 11);
    assert_eq!(v["growth_incremental"], serde_json::json!([2, 1, 2, 1]));
    assert_eq!(v["seed"], 0);
}

#[test]
fn analyze_heisenberg_is_inconclusive() {
    let o = tanaka(&["analyze", &model("heisenberg.tk"), "--samples", "1", "--max-degree", "4", "--json", "-"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["tanaka"]["terminated"], false);
    assert_eq!(v["finiteness_verdict"], "inconclusive");
    assert_eq!(v["char_variety"]["verdict"], "nonempty");
}

#[test]
fn rank_one_frame_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("line.tk");
    std::fs::write(&p, "coords x y\nfield U = d/dx\ndistribution D = [U]\n").unwrap();
    let o = tanaka(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.tk");
    std::fs::write(&p, "coords x\nfield U = d/dq\ndistribution D = [U]\n").unwrap();
    assert_eq!(tanaka(&["analyze", p.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(tanaka(&["analyze", "/nonexistent/model.tk"]).status.code(), Some(2));
    assert_eq!(tanaka(&["analyze", &model("e13.tk"), "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(tanaka(&["model", "klein-bottle"]).status.code(), Some(2));
}

#[test]
fn freedim_table() {
    let o = tanaka(&["freedim", "2", "3", "--json", "-"]);
    assert_eq!(json(&o)["symmetry_bound"], 14);
    let o = tanaka(&["freedim", "3", "2", "--json", "-"]);
    assert_eq!(json(&o)["symmetry_bound"], 21);
    let o = tanaka(&["freedim", "2", "2"]);
    assert!(stdout(&o).contains("infinite (contact)"));
}

#[test]
fn check_sym_verdicts() {
    let o = tanaka(&["check-sym", &model("e13.tk"), "S2", "--samples", "1", "--json", "-"]);
    let v = json(&o);
    assert_eq!(v["symmetry"], true);
    assert_eq!(v["filtration_degree"], serde_json::json!({"kind": "exact", "value": 1}));
    assert!(v["graded_symbol"]["certificate"].is_array());
    let o = tanaka(&["check-sym", &model("e13.tk"), "R", "--samples", "1", "--json", "-"]);
    assert_eq!(json(&o)["filtration_degree"]["value"], 0);
    let o = tanaka(&["check-sym", &model("e13.tk"), "d/dz3", "--samples", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("not a symmetry"));
}

#[test]
fn model_subcommand_emits_dsl() {
    let o = tanaka(&["model", "cartan-jet", "3"]);
    assert!(stdout(&o).contains("coords x y0 y1 y2 y3\n"));
    let o = tanaka(&["model", "monge", "1", "3"]);
    assert!(stdout(&o).contains("field Dx = d/dx + z3^2 d/dy + z1 d/dz + z2 d/dz1 + z3 d/dz2"));
    let o = tanaka(&["model", "mixed-jet", "1", "2"]);
    assert!(stdout(&o).contains("distribution D = [D, Vy, Vz]"));
}

#[test]
fn seed_from_environment_and_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_tanaka"))
        .args(["fintype", &model("e13.tk"), "--samples", "1", "--quiet", "--json", out.to_str().unwrap()])
        .env("TANAKA_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["h0_dim"], 0);
}

#[test]
fn prolong_reports_termination() {
    let o = tanaka(&["prolong", &model("e13.tk"), "--samples", "1", "--json", "-"]);
    let v = json(&o);
    assert_eq!(v["terminated_at"], 2);
    assert_eq!(v["total"], 11);
}
