use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn landscape(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landscape"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = landscape(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn evaluated(dir: &Path, source: &str, name: &str) -> PathBuf {
    ok(dir, &["sample", source, "--seed", "1", "--out", name]);
    ok(dir, &["evaluate", name, "--out", name]);
    dir.join(name)
}

/// Fills the empty objective column of a design CSV with a function of
/// the row number.
fn fill_objective(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        out.push_str(line);
        if i > 0 {
            out.push_str(&format!("{}", ((i * 37) % 101) as f64 / 7.0));
        }
        out.push('\n');
    }
    std::fs::write(path, out).unwrap();
}

#[test]
fn sample_defaults_to_fifty_per_dimension() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "builtin:sphere:d2", "--seed", "1", "--out", "d.csv"]);
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert!(dir.path().join("d.meta.json").exists());
}

#[test]
fn sample_is_byte_identical_on_repeat() {
    let dir = tempfile::tempdir().unwrap();
    for strategy in ["lhs", "uniform", "sobol"] {
        ok(dir.path(), &["sample", "builtin:rastrigin:d3:i4", "--strategy", strategy, "--seed", "9", "--out", "a.csv"]);
        ok(dir.path(), &["sample", "builtin:rastrigin:d3:i4", "--strategy", strategy, "--seed", "9", "--out", "b.csv"]);
        let a = std::fs::read(dir.path().join("a.csv")).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap(), "{strategy}");
    }
}

#[test]
fn missing_space_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = landscape(dir.path(), &["sample", "no_such_space.json", "--out", "d.csv"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_space.json"));
    let bad = landscape(dir.path(), &["sample", "builtin:sphere:two", "--out", "d.csv"]);
    assert_eq!(code(&bad), 2);
    let unknown = landscape(dir.path(), &["sample", "builtin:katsuura:d2", "--out", "d.csv"]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn continuous_design_yields_45_features() {
    let dir = tempfile::tempdir().unwrap();
    evaluated(dir.path(), "builtin:ellipsoid:d3:i2", "e.csv");
    ok(dir.path(), &["features", "e.csv", "--seed", "4", "--out", "f.json"]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    let obj = json.as_object().unwrap();
    assert_eq!(obj.len(), 46);
    assert_eq!(json["_meta"]["seed"], 4);
    assert_eq!(json["_meta"]["fid"], "ellipsoid");
    ok(dir.path(), &["features", "e.csv", "--out", "f.csv"]);
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 47);
}

#[test]
fn unevaluated_design_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "builtin:sphere:d2", "--out", "d.csv"]);
    assert_eq!(code(&landscape(dir.path(), &["features", "d.csv", "--out", "f.csv"])), 2);
}

#[test]
fn encoding_guard_on_mixed_designs() {
    let dir = tempfile::tempdir().unwrap();
    let space = data("mixed_space.json");
    ok(dir.path(), &["sample", &space, "--n", "80", "--seed", "2", "--out", "m.csv"]);
    fill_objective(&dir.path().join("m.csv"));
    let none = landscape(dir.path(), &["features", "m.csv", "--encoding", "none", "--out", "f.csv"]);
    assert_eq!(code(&none), 2);
    ok(dir.path(), &["features", "m.csv", "--encoding", "target", "--out", "t.csv"]);
    ok(dir.path(), &["features", "m.csv", "--encoding", "one_hot", "--out", "o.csv"]);
    ok(dir.path(), &["preprocess", "m.csv", "--encoding", "one_hot", "--out", "p.csv"]);
    let header = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(header.starts_with("learning_rate,depth,kernel=rbf,kernel=linear,kernel=poly,gamma,degree,y\n"));
    let prov = std::fs::read_to_string(dir.path().join("p.provenance.json")).unwrap();
    assert!(prov.contains("relax_hierarchy") && prov.contains("encode:one_hot"));
    // evaluating needs a built-in problem
    assert_eq!(code(&landscape(dir.path(), &["evaluate", "m.csv", "--out", "x.csv"])), 2);
}

#[test]
fn fitmap_modes() {
    let dir = tempfile::tempdir().unwrap();
    evaluated(dir.path(), "builtin:rosenbrock:d5", "r.csv");
    let mc = ok(dir.path(), &["fitmap", "r.csv", "--mode", "mc", "--resolution", "32", "--out", "maps/r"]);
    let files: Vec<String> = String::from_utf8_lossy(&mc.stdout).lines().map(String::from).collect();
    assert_eq!(files.len(), 10);
    assert!(files.iter().any(|f| f.ends_with("r_c3_4.pgm")));
    ok(dir.path(), &["fitmap", "r.csv", "--out", "maps/raw.pgm"]);
    let raw = std::fs::read(dir.path().join("maps/raw_c0_1.pgm")).unwrap();
    assert!(raw.starts_with(b"P5\n224 224\n255\n"));
    for mode in ["pca", "pca-func", "rmc"] {
        ok(dir.path(), &["fitmap", "r.csv", "--mode", mode, "--resolution", "16", "--out", "maps/r"]);
    }
    assert!(dir.path().join("maps/r_pca_func.pgm").exists());
    ok(dir.path(), &["fitmap", "r.csv", "--mode", "cloud", "--k", "3", "--out", "maps/r"]);
    let cloud = std::fs::read_to_string(dir.path().join("maps/r_cloud.csv")).unwrap();
    assert_eq!(cloud.lines().count(), 251);
    assert_eq!(code(&landscape(dir.path(), &["fitmap", "r.csv", "--mode", "cloud", "--k", "0", "--out", "c"])), 2);
}

#[test]
fn aas_toy_dataset_closes_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let (f, p) = (data("toy_features.csv"), data("toy_performance.csv"));
    ok(dir.path(), &["aas", &f, &p, "--scheme", "leave_iid_out", "--k", "1", "--out", "r.json"]);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["pooled"]["gap_closure"], 1.0);
    assert_eq!(r["f1_macro"], 1.0);
    assert!(r["pooled"]["sbs_mean"].as_f64().unwrap() > r["pooled"]["vbs_mean"].as_f64().unwrap());
    assert!(r["gap_closure_formula"].is_string());
    assert_eq!(r["imputation"].as_array().unwrap().len(), 12);
    assert_eq!(r["imputation"][0]["value"], 20000.0);

    ok(dir.path(), &["aas", &f, &p, "--feature-cost", "100", "--cost-sensitive", "--out", "c.json"]);
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert!(c["cost_sensitive_convention"].is_string());
    assert!(c["pooled"]["gap_closure"].as_f64().unwrap() < 1.0);
}

#[test]
fn leave_fid_out_needs_two_fids() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.csv"), "fid,iid,x\nf1,1,0.1\nf1,2,0.2\n").unwrap();
    std::fs::write(
        dir.path().join("p.csv"),
        "fid,iid,algorithm,run,evaluations,success,budget\n\
         f1,1,a,0,10,1,100\nf1,1,b,0,50,1,100\nf1,2,a,0,60,1,100\nf1,2,b,0,20,1,100\n",
    )
    .unwrap();
    let out = landscape(dir.path(), &["aas", "f.csv", "p.csv", "--scheme", "leave_fid_out", "--out", "r.json"]);
    assert_eq!(code(&out), 2);
    ok(dir.path(), &["aas", "f.csv", "p.csv", "--scheme", "leave_iid_out", "--out", "r.json"]);
}

#[test]
fn config_file_supplies_defaults_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "seed = 5\n[sample]\nn = 30\nstrategy = \"sobol\"\n").unwrap();
    ok(dir.path(), &["--config", "run.toml", "sample", "builtin:sphere:d2", "--out", "a.csv"]);
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text.lines().count(), 31);
    ok(dir.path(), &["--config", "run.toml", "sample", "builtin:sphere:d2", "--n", "12", "--out", "b.csv"]);
    assert_eq!(std::fs::read_to_string(dir.path().join("b.csv")).unwrap().lines().count(), 13);
    std::fs::write(dir.path().join("bad.toml"), "[sample]\nsize = 30\n").unwrap();
    let out = landscape(dir.path(), &["--config", "bad.toml", "sample", "builtin:sphere:d2", "--out", "c.csv"]);
    assert_eq!(code(&out), 2);
}
