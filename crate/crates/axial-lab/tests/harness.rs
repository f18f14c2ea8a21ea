use axial_lab::harness::output::{execute, ENERGY_COLUMNS};
use axial_lab::harness::{RunConfig, StudyKind};
use axial_lab::LabError;
use std::collections::BTreeMap;
use std::path::Path;

const SMALL: &str = r#"
study = "evolve"
mass = 1.0
scheme = 2

[grid]
r_star_min = -80.0
r_star_max = 80.0
h = 0.2

[time]
t_final = 30.0
cfl = 0.5
snapshot_every = 10.0

[morawetz]
windows = [15.0, 30.0]

[[modes]]
field = "alpha"
l = 2
f = { kind = "gaussian-bump", amplitude = 1.0, center = 5.0, width = 2.0 }

[[modes]]
field = "coupled"
l = 2
alpha = { kind = "gaussian-bump", amplitude = 1.0, center = 0.0, width = 2.0 }
beta = { kind = "gaussian-bump", amplitude = 0.5, center = 2.0, width = 2.0 }
"#;

fn config_error(text: &str) -> bool {
    matches!(RunConfig::from_toml(text), Err(LabError::Config(_)))
}

#[test]
fn toml_round_trip_preserves_the_config_and_its_hash() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg, again);
    assert_eq!(cfg.hash().unwrap(), again.hash().unwrap());
    assert_eq!(cfg.hash().unwrap().len(), 64);
    let mut other = cfg.clone();
    other.grid.h = 0.1;
    assert_ne!(cfg.hash().unwrap(), other.hash().unwrap());
}

#[test]
fn baselines_validate() {
    for study in [StudyKind::Evolve, StudyKind::Verify, StudyKind::Decay, StudyKind::Converge, StudyKind::NormalizeKerr] {
        RunConfig::baseline(study).validate().unwrap();
    }
}

#[test]
fn invalid_configs_are_config_errors() {
    assert!(config_error(&SMALL.replace("h = 0.2", "")));
    assert!(config_error(&SMALL.replace("scheme = 2", "scheme = 3")));
    assert!(config_error(&SMALL.replace("mass = 1.0", "mass = -1.0")));
    assert!(config_error(&SMALL.replace("cfl = 0.5", "cfl = 1.5")));
    assert!(config_error(&SMALL.replace("r_star_max = 80.0", "r_star_max = -90.0")));
    assert!(config_error(&SMALL.replace("snapshot_every", "snapshot_evry")));
    assert!(config_error(&SMALL.replace("field = \"alpha\"\nl = 2", "field = \"alpha\"\nl = 1")));
    // Data that reaches the frozen ends before t_final.
    assert!(config_error(&SMALL.replace("t_final = 30.0", "t_final = 90.0")));
    let mut converge = RunConfig::from_toml(SMALL).unwrap();
    converge.study = StudyKind::Converge;
    converge.converge.h = vec![0.2, 0.1, 0.06];
    assert!(matches!(converge.validate(), Err(LabError::Config(_))));
    let mut decay = RunConfig::from_toml(SMALL).unwrap();
    decay.study = StudyKind::Decay;
    assert!(matches!(decay.validate(), Err(LabError::Config(_))));
}

#[test]
fn time_step_follows_cfl_or_dt() {
    let mut cfg = RunConfig::from_toml(SMALL).unwrap();
    assert_eq!(cfg.dt_for(0.2), 0.1);
    assert_eq!(cfg.dt_for(0.1), 0.05);
    cfg.time.cfl = None;
    cfg.time.dt = Some(0.08);
    assert!((cfg.dt_for(0.1) - 0.04).abs() < 1e-15);
}

fn read_all(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let name = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(name, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn evolve_output_is_deterministic_and_complete() {
    let cfg = RunConfig::from_toml(SMALL).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(execute(&cfg, a.path()).unwrap());
    assert!(execute(&cfg, b.path()).unwrap());
    let (fa, fb) = (read_all(a.path()), read_all(b.path()));
    assert_eq!(fa.keys().collect::<Vec<_>>(), fb.keys().collect::<Vec<_>>());
    for (name, bytes) in &fa {
        assert!(bytes == &fb[name], "{name} differs between identical runs");
    }
    for name in ["manifest.json", "config.toml", "energies.csv", "bulk.csv", "redshift_cert.json"] {
        assert!(fa.contains_key(name), "missing {name}; have {:?}", fa.keys());
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fa["manifest.json"]).unwrap();
    assert_eq!(manifest["config_hash"], cfg.hash().unwrap());
    let listed: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for name in fa.keys() {
        assert!(listed.contains(&name.as_str()), "{name} not listed in the manifest");
    }
    let energies = String::from_utf8(fa["energies.csv"].clone()).unwrap();
    let header = energies.lines().next().unwrap();
    assert!(header.starts_with(&ENERGY_COLUMNS.join(",")), "{header}");
    // Both fields of the coupled mode get energy rows.
    assert!(energies.lines().skip(1).any(|l| l.ends_with(",beta")));
}
