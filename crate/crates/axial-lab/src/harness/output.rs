//! File output. Every study writes `config.toml` (canonical form) and a
//! `manifest.json` carrying the config hash and the list of files written.

use super::config::{RunConfig, StudyKind};
use super::run::{self, ConvergeResult, DecayResult, EvolveResult, KerrResult, VerifyResult};
use super::study::{BulkRow, EnergyRow, ModeRun};
use crate::error::Result;
use crate::evolution::RadialTable;
use crate::geometry::build_foliation;
use crate::harmonics::{ModeIndex, SphereGrid};
use crate::identities::Quoted;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

/// Collects written files for the manifest.
pub struct OutDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let p = self.root.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        self.files.push(name.to_string());
        Ok(p)
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T], header: &[&str]) -> Result<()> {
        let p = self.path(name)?;
        let mut w = csv::WriterBuilder::new().has_headers(true).from_path(p)?;
        if rows.is_empty() {
            w.write_record(header)?;
        }
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name)?;
        fs::write(p, serde_json::to_string_pretty(value)? + "\n")?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name)?;
        fs::write(p, body)?;
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

pub const ENERGY_COLUMNS: [&str; 11] =
    ["tau", "ell", "E_T", "E_N_sigma", "E_N_tilde", "E_Z", "E_Zw", "sup_abs_f", "tau2_EN", "tau_sup", "field"];
pub const RESIDUAL_COLUMNS: [&str; 6] = ["t", "ell", "res_Rtphi", "res_Rrphi", "res_Rthetaphi", "res_closed"];
const BULK_COLUMNS: [&str; 10] =
    ["ell", "field", "window", "lhs_gradient", "lhs_zeroth", "lhs_angular", "lhs", "k_int", "ratio_to_et0", "min_density"];

#[derive(Serialize)]
struct TrajectoryRow {
    r_star: f64,
    r: f64,
    re_f: f64,
    im_f: f64,
    re_f_t: f64,
    im_f_t: f64,
}

#[derive(Serialize)]
struct ResidualRow {
    t: f64,
    ell: u32,
    #[serde(rename = "res_Rtphi")]
    rtphi: f64,
    #[serde(rename = "res_Rrphi")]
    rrphi: f64,
    #[serde(rename = "res_Rthetaphi")]
    rthetaphi: f64,
    res_closed: f64,
}

fn energies(runs: &[ModeRun]) -> Vec<EnergyRow> {
    runs.iter().flat_map(|r| r.energies.iter().cloned()).collect()
}

#[derive(Serialize)]
struct BulkCsvRow {
    ell: u32,
    field: &'static str,
    window: f64,
    lhs_gradient: f64,
    lhs_zeroth: f64,
    lhs_angular: f64,
    lhs: f64,
    k_int: f64,
    ratio_to_et0: f64,
    min_density: f64,
}

fn bulk(runs: &[ModeRun]) -> Vec<BulkCsvRow> {
    runs.iter()
        .flat_map(|r| r.bulk.iter())
        .map(|&BulkRow { ell, field, report: b }| BulkCsvRow {
            ell,
            field,
            window: b.window,
            lhs_gradient: b.lhs_gradient,
            lhs_zeroth: b.lhs_zeroth,
            lhs_angular: b.lhs_angular,
            lhs: b.lhs,
            k_int: b.k_int,
            ratio_to_et0: b.ratio_to_et0,
            min_density: b.min_density,
        })
        .collect()
}

fn residuals(out: &mut OutDir, runs: &[ModeRun]) -> Result<()> {
    let rows: Vec<ResidualRow> = runs
        .iter()
        .flat_map(|r| r.residuals.iter())
        .map(|r| ResidualRow {
            t: r.t,
            ell: r.ell,
            rtphi: r.res_rtphi,
            rrphi: r.res_rrphi,
            rthetaphi: r.res_rthetaphi,
            res_closed: r.res_closed,
        })
        .collect();
    out.csv("residuals.csv", &rows, &RESIDUAL_COLUMNS)
}

fn foliation(out: &mut OutDir, cfg: &RunConfig) -> Result<()> {
    let bg = cfg.background()?;
    let fol = build_foliation(&bg, cfg.grid.r_star_min, cfg.grid.r_star_max, cfg.grid.h)?;
    out.csv("foliation.csv", &fol.table, &["r", "r_star", "h", "h_prime"])?;
    let meta = json!({
        "c0": fol.c0,
        "c1": fol.c1,
        "spacelike_margin": fol.spacelike_margin,
        "null_margin": fol.null_margin,
    });
    out.json("foliation.json", &meta)
}

fn trajectories(out: &mut OutDir, cfg: &RunConfig, runs: &[ModeRun]) -> Result<()> {
    let bg = cfg.background()?;
    for run in runs {
        let table = RadialTable::new(&bg, cfg.grid_with(run.h)?);
        let names: Vec<&str> = run.mode.sources().iter().map(|s| s.tag()).collect();
        for snap in &run.snapshots {
            for (k, w) in snap.waves.iter().enumerate() {
                let rows: Vec<TrajectoryRow> = (0..table.grid.n)
                    .map(|j| TrajectoryRow {
                        r_star: table.grid.x(j),
                        r: table.points[j].r,
                        re_f: w.f[j].re,
                        im_f: w.f[j].im,
                        re_f_t: w.f_t[j].re,
                        im_f_t: w.f_t[j].im,
                    })
                    .collect();
                let name = format!("trajectory/{}_{}_t{:07.2}.csv", run.mode.tag(), names[k], snap.t);
                out.csv(&name, &rows, &[])?;
            }
        }
    }
    Ok(())
}

fn harmonics(out: &mut OutDir, cfg: &RunConfig) -> Result<()> {
    for m in &cfg.modes {
        for s in m.sources() {
            let Ok(mode) = ModeIndex::new(s.spin(), m.l) else { continue };
            let grid = SphereGrid::for_lmax(m.l + 2);
            let table = grid.eval_harmonic(mode)?;
            let name = format!("harmonics/s{}_l{}.csv", mode.s, mode.l);
            if out.files().contains(&name) {
                continue;
            }
            let p = out.path(&name)?;
            table.write_csv(fs::File::create(p)?)?;
        }
    }
    Ok(())
}

fn manifest(out: &mut OutDir, cfg: &RunConfig, pass: bool, summary: Value) -> Result<()> {
    out.text("config.toml", &cfg.to_toml()?)?;
    let modes: Vec<Value> = cfg
        .modes
        .iter()
        .map(|m| {
            json!({
                "tag": m.tag(),
                "l": m.l,
                "fields": m.sources().iter().map(|s| json!({ "spin": s.spin(), "potential": s.tag() })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut files = out.files().to_vec();
    files.push("manifest.json".into());
    let body = json!({
        "config_hash": cfg.hash()?,
        "study": cfg.study.name(),
        "mass": cfg.mass,
        "scheme_order": cfg.scheme,
        "grid": cfg.grid,
        "dt": cfg.dt_for(cfg.grid.h),
        "t_final": cfg.time.t_final,
        "modes": modes,
        "files": files,
        "pass": pass,
        "summary": summary,
    });
    out.json("manifest.json", &body)
}

fn write_evolve(out: &mut OutDir, cfg: &RunConfig, res: &EvolveResult) -> Result<bool> {
    trajectories(out, cfg, &res.runs)?;
    out.csv("energies.csv", &energies(&res.runs), &ENERGY_COLUMNS)?;
    out.csv("bulk.csv", &bulk(&res.runs), &BULK_COLUMNS)?;
    residuals(out, &res.runs)?;
    out.json("redshift_cert.json", &res.certificate)?;
    foliation(out, cfg)?;
    harmonics(out, cfg)?;
    let init: Vec<Value> = res
        .runs
        .iter()
        .flat_map(|r| r.initial.iter().map(move |(f, e)| json!({ "mode": r.mode.tag(), "field": f, "energies": e })))
        .collect();
    manifest(out, cfg, true, json!({ "initial_energies": init }))?;
    Ok(true)
}

fn write_verify(out: &mut OutDir, cfg: &RunConfig, res: &VerifyResult) -> Result<bool> {
    out.json("identities.json", &res.identities)?;
    out.json("redshift_cert.json", &res.redshift)?;
    let failed: Vec<&str> = res.identities.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    manifest(out, cfg, res.pass, json!({ "failed": failed, "redshift_c": res.redshift.c, "kappa": res.redshift.kappa }))?;
    Ok(res.pass)
}

fn write_decay(out: &mut OutDir, cfg: &RunConfig, res: &DecayResult) -> Result<bool> {
    out.csv("energies.csv", &energies(&res.runs), &ENERGY_COLUMNS)?;
    out.csv("bulk.csv", &bulk(&res.runs), &BULK_COLUMNS)?;
    residuals(out, &res.runs)?;
    out.json("redshift_cert.json", &res.certificate)?;
    foliation(out, cfg)?;
    let extents: Vec<Value> = res
        .runs
        .iter()
        .map(|r| json!({ "mode": r.mode.tag(), "tilde_slices": r.tilde_extent }))
        .collect();
    out.json("decay.json", &json!({ "pass": res.pass, "verdicts": res.verdicts, "slice_extents": extents }))?;
    manifest(out, cfg, res.pass, json!({ "verdicts": res.verdicts }))?;
    Ok(res.pass)
}

#[derive(Serialize)]
struct ConvergeCsvRow<'a> {
    mode: &'a str,
    field: &'a str,
    quantity: &'a str,
    h: f64,
    value: f64,
    order: Option<f64>,
}

fn write_converge(out: &mut OutDir, cfg: &RunConfig, res: &ConvergeResult) -> Result<bool> {
    let mut rows = Vec::new();
    for r in &res.rows {
        for (k, (h, v)) in r.h.iter().zip(&r.values).enumerate() {
            let order = if k == 0 { None } else { r.orders[k - 1] };
            rows.push(ConvergeCsvRow { mode: &r.mode, field: &r.field, quantity: &r.quantity, h: *h, value: *v, order });
        }
    }
    out.csv("convergence.csv", &rows, &["mode", "field", "quantity", "h", "value", "order"])?;
    out.json("convergence.json", &res.rows)?;
    let last: Vec<ModeRun> = res.runs.iter().filter(|r| r.h == cfg.grid.h).cloned().collect();
    residuals(out, &last)?;
    manifest(out, cfg, true, json!({ "orders": res.rows }))?;
    Ok(true)
}

fn write_kerr(out: &mut OutDir, cfg: &RunConfig, res: &KerrResult) -> Result<bool> {
    let body = match &res.fit {
        Some(fit) => json!(fit),
        None => json!({ "verdict": "rejected", "reason": res.rejection }),
    };
    out.json("kerr_fit.json", &body)?;
    out.json("kerr_drift.json", &json!({ "sampled": res.drift, "discretely_static": res.drift_discrete }))?;
    manifest(out, cfg, res.pass, json!({ "fit": body, "drift": res.drift }))?;
    Ok(res.pass)
}

/// Runs the configured study, writes its files and returns the verdict.
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<bool> {
    let mut out = OutDir::create(dir)?;
    match cfg.study {
        StudyKind::Evolve => write_evolve(&mut out, cfg, &run::evolve(cfg)?),
        StudyKind::Verify => write_verify(&mut out, cfg, &run::verify(cfg, &Quoted::default())?),
        StudyKind::Decay => write_decay(&mut out, cfg, &run::decay(cfg)?),
        StudyKind::Converge => write_converge(&mut out, cfg, &run::converge(cfg)?),
        StudyKind::NormalizeKerr => write_kerr(&mut out, cfg, &run::kerr(cfg)?),
    }
}
