use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracsub::mms::{run_case, CaseGrid, ExampleCase, ExampleId};

fn fracsub(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsub"))
        .args(args)
        .current_dir(dir)
        .env_remove("FRACSUB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gimel_line(text: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix("gimel = "))
        .expect("gimel line")
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn solve_example_prints_the_catalog_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(
        dir.path(),
        &["solve", "--example", "ex1i", "--nu1", "0.5", "--K", "100", "--J", "20", "--out", "run"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let printed = gimel_line(&stdout(&out));
    let case = ExampleCase::new(ExampleId::Ex1i, 0.5).unwrap();
    let expected = run_case(&case, CaseGrid::OneD { intervals: 100, levels: 20 }, true).unwrap().gimel;
    assert_eq!(printed, expected);

    let csv = fs::read_to_string(dir.path().join("run/ex1i_nu1_0.5.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    let manifest: toml::Table =
        toml::from_str(&fs::read_to_string(dir.path().join("run/ex1i_nu1_0.5.manifest.toml")).unwrap()).unwrap();
    let hash = manifest["config_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(manifest["results"]["gimel"].as_float().unwrap(), expected);
}

#[test]
fn two_dimensional_solve_writes_one_file_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(
        dir.path(),
        &["solve", "--example", "ex4", "--nu1", "0.5", "--Kx", "6", "--Ky", "5", "--J", "4", "--out", "o"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let levels = fs::read_dir(dir.path().join("o/ex4_nu1_0.5")).unwrap().count();
    assert_eq!(levels, 5);
}

const MINIMAL: &str = r#"
[problem]
dimension = 1
nu1 = 0.6
nu2 = 0.3
final_time = 1.0
rho1 = 1
rho2 = 0
a = 1
d = 0
b = 0
f = "KEY_F"
u0 = "cos(pi*x)"

[problem.kernel]
kind = "zero"

[problem.left]
deriv = 1.0
value = 0.0
data = 0

[problem.right]
deriv = 1.0
value = 0.0
data = 0

[grid]
K = 20
J = 10
"#;

#[test]
fn malformed_expression_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, MINIMAL.replace("KEY_F", "sin(x")).unwrap();
    let out = fracsub(dir.path(), &["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("problem.f"), "{err}");
}

#[test]
fn config_solve_writes_manifest_with_file_hash() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heat.toml");
    fs::write(&path, MINIMAL.replace("KEY_F", "0")).unwrap();
    let out = fracsub(dir.path(), &["solve", "--config", path.to_str().unwrap(), "--out", "res"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let manifests: Vec<_> = fs::read_dir(dir.path().join("res"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".manifest.toml"))
        .collect();
    assert_eq!(manifests.len(), 1);
    let m: toml::Table = toml::from_str(&fs::read_to_string(&manifests[0]).unwrap()).unwrap();
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["config_file_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn bundled_configs_dry_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["example3.toml", "heat2d.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = root.join(name);
        let out = fracsub(dir.path(), &["solve", "--config", cfg.to_str().unwrap(), "--dry-run"]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        assert!(fs::read_dir(dir.path()).unwrap().next().is_none(), "dry run wrote files");
    }
}

#[test]
fn dry_run_prints_parameters_without_solving() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(dir.path(), &["solve", "--example", "ex3", "--nu1", "0.4", "--dry-run"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("nu1 = 0.4"), "{text}");
    assert!(text.contains("compatibility: ok"), "{text}");
    assert!(!text.contains("gimel ="));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn kernel_sign_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(dir.path(), &["kernel-sign", "--rho2", "0", "--nu1", "0.8", "--nu2", "0.4", "--samples", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("t* absent"));
    let csv = fs::read_to_string(dir.path().join("fracsub-out/kernel_sign.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,N,kind"));
    for line in csv.lines().skip(1) {
        let n: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(n > 0.0);
    }

    let out = fracsub(
        dir.path(),
        &["kernel-sign", "--rho1", "1", "--rho2", "1", "--nu1", "0.9", "--nu2", "0.45", "--T", "0.7"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let ts: f64 = text
        .strip_prefix("t* = ")
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(ts > 0.0 && ts < 0.7 && text.contains("inside"), "{text}");

    let out = fracsub(dir.path(), &["kernel-sign", "--rho2", "1", "--nu1", "0.9", "--nu2", "0.45", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convergence_rows_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(
        dir.path(),
        &["convergence", "ex2", "--axis", "time", "--levels", "3", "--K", "40", "--J", "10"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].ends_with(','), "base row has no order: {}", rows[0]);
    for r in &rows[1..] {
        let order: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(order.is_finite());
    }
    assert!(dir.path().join("fracsub-out/convergence_ex2_time.csv").exists());

    let out = fracsub(dir.path(), &["convergence", "ex2", "--axis", "time", "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn extension_table_has_four_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(dir.path(), &["table", "ex1ext", "--K", "20", "--J", "8", "--jobs", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.iter().filter(|h| h.starts_with("gimel_")).count(), 4);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("0.6,"));
}

#[test]
fn default_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(dir.path(), &["table", "ex1i", "--K", "10", "--J", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let nus: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(nus, ["0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"]);

    let out = fracsub(dir.path(), &["table", "ex4", "--Kx", "4", "--Ky", "4", "--J", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 10);
}

#[test]
fn out_dir_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("root");
    let status = Command::new(env!("CARGO_BIN_EXE_fracsub"))
        .args(["kernel-sign", "--rho2", "0.5", "--nu1", "0.7", "--nu2", "0.2", "--out", "sub"])
        .current_dir(dir.path())
        .env("FRACSUB_OUT_DIR", &root)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(root.join("sub/kernel_sign.csv").exists());
    assert!(!dir.path().join("sub").exists());
}

#[test]
fn unknown_example_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsub(dir.path(), &["solve", "--example", "ex9", "--nu1", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ex9"));
}

#[test]
fn numerical_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.toml");
    // Diffusion turns negative for t > 0.5.
    fs::write(&path, MINIMAL.replace("KEY_F", "0").replace("a = 1", "a = \"1 - 2*t\"")).unwrap();
    let out = fracsub(dir.path(), &["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}
