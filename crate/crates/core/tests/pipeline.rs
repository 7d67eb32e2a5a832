use std::fs;
use std::path::Path;
use std::process::Command;

use girg_core::pipeline::{run_pipeline, write_edge_list, RunConfig};
use girg_core::samplers::sample_boolean_girg;
use girg_core::seed::rng_from_seed;
use girg_core::weights::sample_power_law_weights;
use girg_core::{GirgParams, Topology};

fn write_targets(dir: &Path, count: usize) {
    fs::create_dir_all(dir).unwrap();
    let params = GirgParams::max_norm(2, 2.5, 2.0, 2.0, Topology::Torus).unwrap();
    for i in 0..count as u64 {
        let w = sample_power_law_weights(300, 2.5, 1.0, &mut rng_from_seed(i)).unwrap();
        let g = sample_boolean_girg(&params, &w, None, &mut rng_from_seed(100 + i)).unwrap();
        write_edge_list(&g.graph, &dir.join(format!("net{i}.edges"))).unwrap();
    }
}

fn config_text() -> &'static str {
    r#"
seed = 5
input = "networks"
out = "out"
folds = 3
feature_subsets = ["LCC", "n,m,diam", "betw,close"]
c_grid = [1.0, 32.0]
gamma_grid = [0.125, 2.0]

[[model]]
id = "ER"

[[model]]
id = "1d"
"#
}

fn setup(root: &Path) -> RunConfig {
    write_targets(&root.join("networks"), 6);
    fs::write(root.join("run.toml"), config_text()).unwrap();
    RunConfig::load(&root.join("run.toml")).unwrap()
}

#[test]
fn small_run_is_deterministic_and_resumable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (table, report) = run_pipeline(setup(a.path())).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert!(report.computed > 0);
    assert_eq!(table.subsets, ["LCC", "n,m,diam", "betw,close"]);
    let rows: Vec<&str> = table.rows.iter().map(|(m, _)| m.as_str()).collect();
    assert_eq!(rows, ["ER", "1d"]);
    let er = table.get("ER", "LCC").unwrap();
    assert!((0.0..=1.0).contains(&er));

    let results = fs::read(a.path().join("out/results.csv")).unwrap();
    run_pipeline(setup(b.path())).unwrap();
    assert_eq!(results, fs::read(b.path().join("out/results.csv")).unwrap());
    for file in ["fitted/net0/1d.txt", "synthetic/net3/ER.r0.edges", "cleaned/1d.r0.csv"] {
        assert_eq!(fs::read(a.path().join("out").join(file)).unwrap(), fs::read(b.path().join("out").join(file)).unwrap(), "{file}");
    }

    // a second run reuses every artifact and reproduces the table
    let config = RunConfig::load(&a.path().join("run.toml")).unwrap();
    let (again, report) = run_pipeline(config).unwrap();
    assert_eq!(report.computed, 0);
    assert!(report.reused > 0);
    assert_eq!(again, table);
    assert_eq!(results, fs::read(a.path().join("out/results.csv")).unwrap());
}

#[test]
fn bad_network_is_reported_not_fatal() {
    let root = tempfile::tempdir().unwrap();
    let mut config = setup(root.path());
    fs::write(root.path().join("networks/broken.edges"), "0 1\n0 x\n").unwrap();
    config.set_models(&["ER".to_string()]).unwrap();
    let (table, report) = run_pipeline(config).unwrap();
    assert!(report.failures.iter().any(|f| f.item.contains("broken")), "{:?}", report.failures);
    assert!(table.get("ER", "LCC").is_some());
    let failures = fs::read_to_string(root.path().join("out/failures.csv")).unwrap();
    assert!(failures.starts_with("stage,item,error\n") && failures.contains("broken"));
}

fn girg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_girg"))
}

#[test]
fn cli_run_all_and_stages() {
    let root = tempfile::tempdir().unwrap();
    setup(root.path());
    let cfg = root.path().join("run.toml");
    let out = girg().arg("fit").arg("--config").arg(&cfg).arg("--models").arg("ER").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(root.path().join("out/fitted/net0/ER.txt").exists());
    assert!(!root.path().join("out/fitted/net0/1d.txt").exists());

    let out = girg()
        .args(["run-all", "--models", "ER", "--features", "LCC;n,m"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("model,LCC,\"n,m\"\nER,"), "{stdout}");
}

#[test]
fn cli_exit_codes() {
    let root = tempfile::tempdir().unwrap();
    setup(root.path());
    let cfg = root.path().join("run.toml");
    let out = girg().args(["run-all", "--models", "nope"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = girg().args(["fit", "--config", "/definitely/missing.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    fs::write(root.path().join("networks/empty.edges"), "").unwrap();
    let out = girg().args(["fit", "--models", "ER"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cli_self_test() {
    let root = tempfile::tempdir().unwrap();
    fs::write(
        root.path().join("st.toml"),
        r#"
seed = 3
folds = 3
feature_subsets = ["LCC"]
c_grid = [1.0]
gamma_grid = [0.5]

[self_test]
networks = 6
n = 300
model = "1d"
avg_degree = 6.0
"#,
    )
    .unwrap();
    let out = girg().arg("self-test").arg("--config").arg(root.path().join("st.toml")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("model,LCC\n1d,"), "{stdout}");
    assert_eq!(fs::read_dir(root.path().join("out/self-test/networks")).unwrap().count(), 6);
}
