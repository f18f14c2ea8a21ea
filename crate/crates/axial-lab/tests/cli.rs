use std::path::Path;
use std::process::{Command, Output};

fn axlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axlab")).args(args).output().expect("axlab runs")
}

const KERR: &str = r#"
study = "normalize-kerr"

[grid]
r_star_min = -300.0
r_star_max = 300.0
h = 0.1

[time]
t_final = 10.0
cfl = 0.5

[kerr]
c1 = 3.0
c2 = C2
"#;

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_passes_and_writes_its_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify");
    let o = axlab(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["identities.json", "redshift_cert.json", "manifest.json", "config.toml"] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let ids: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("identities.json")).unwrap()).unwrap();
    assert_eq!(ids["all_pass"], true);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verify: pass"));
}

#[test]
fn kerr_normalization_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write_config(dir.path(), "flat.toml", &KERR.replace("C2", "0.0"));
    let o = axlab(&["normalize-kerr", "--config", &flat, "--out", dir.path().join("flat").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("flat/kerr_fit.json")).unwrap()).unwrap();
    assert!((fit["a1"].as_f64().unwrap() - 0.5).abs() < 1e-10);

    let growing = write_config(dir.path(), "growing.toml", &KERR.replace("C2", "0.5"));
    let o = axlab(&["normalize-kerr", "--config", &growing, "--out", dir.path().join("growing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let fit: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("growing/kerr_fit.json")).unwrap()).unwrap();
    assert_eq!(fit["verdict"], "rejected");
}

#[test]
fn configuration_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing_grid = write_config(dir.path(), "bad.toml", "study = \"evolve\"\n[time]\nt_final = 10.0\n");
    let o = axlab(&["evolve", "--config", &missing_grid, "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));

    let o = axlab(&["evolve", "--config", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = axlab(&["evolve", "--scheme", "3"]);
    assert_eq!(o.status.code(), Some(2));
}
