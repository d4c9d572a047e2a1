//! Orchestration of a configured run and the manifest it leaves behind.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use contrast_asym::fem::solver::solver_registry;
use contrast_asym::fem::Fem;
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{check_registry, CheckContext};
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not run (mesh, solver or input problem); `reason` says why.
    InfrastructureSkipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub anchor: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub numbers: Vec<(String, f64)>,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub family: String,
    pub family_params: std::collections::BTreeMap<String, Vec<String>>,
    pub n_list: Vec<usize>,
    pub h: f64,
    pub data: Vec<String>,
    pub probes: Option<Vec<[f64; 2]>>,
    pub checks: Vec<String>,
    pub solver: String,
    pub tolerances: std::collections::BTreeMap<String, f64>,
    pub p: f64,
    pub tau: f64,
    pub source: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: ConfigEcho,
    pub checks: Vec<CheckReport>,
    pub provenance: Provenance,
    pub exit_code: i32,
}

impl RunManifest {
    /// 0 when every check passed, 2 when a check could not run, 1 otherwise.
    pub fn exit_code(checks: &[CheckReport]) -> i32 {
        if checks.iter().any(|c| c.status == Status::InfrastructureSkipped) {
            2
        } else if checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else {
            0
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::InfrastructureSkipped => "SKIP",
            };
            let _ = writeln!(s, "{tag} {}: {}", c.check, c.reason.as_deref().unwrap_or(&c.detail));
        }
        s
    }

    fn summary_csv(&self) -> String {
        let mut s = String::from("check,status,anchor,detail\n");
        for c in &self.checks {
            let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let text = c.reason.as_deref().unwrap_or(&c.detail);
            let _ = writeln!(s, "{},{status},{},{}", c.check, quote(&c.anchor), quote(text));
        }
        s
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn echo(c: &RunConfig) -> ConfigEcho {
    ConfigEcho {
        family: c.family.kind.clone(),
        family_params: c.family.params.clone(),
        n_list: c.n_list.clone(),
        h: c.h,
        data: c.data.clone(),
        probes: c.probes.clone(),
        checks: c.checks.clone(),
        solver: c.solver.clone(),
        tolerances: c.tolerances.clone(),
        p: c.p,
        tau: c.tau,
        source: c.source.clone(),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| CliError::io(path, e))
}

/// Runs every configured check (concurrently), writes their files, `summary.csv`,
/// `summary.txt` and `manifest.json` into the output directory.
///
/// Check failures and skipped checks are recorded in the manifest; only problems that
/// prevent the run as a whole (family construction, output directory) are returned as errors.
pub fn run(config: &RunConfig) -> Result<RunManifest, CliError> {
    let family = config.build_family()?;
    let solver = solver_registry().get(&config.solver)?;
    let ctx = CheckContext { config, family, fem: Fem::new(solver) };
    let registry = check_registry();
    let results: Vec<(String, Result<crate::checks::Outcome, contrast_asym::Error>, String)> = config
        .checks
        .par_iter()
        .map(|name| {
            let check = registry.get(name).expect("validated by the config parser");
            log::info!("running check {name}");
            (name.clone(), check.run(&ctx), check.anchor().to_string())
        })
        .collect();

    fs::create_dir_all(&config.output).map_err(|e| CliError::io(&config.output, e))?;
    let mut checks = Vec::new();
    for (name, result, anchor) in results {
        let report = match result {
            Ok(out) => {
                let mut files = Vec::new();
                for (file, body) in &out.files {
                    write(&config.output, file, body)?;
                    files.push(file.clone());
                }
                CheckReport {
                    check: name,
                    status: if out.pass { Status::Pass } else { Status::Fail },
                    anchor,
                    detail: out.detail,
                    reason: None,
                    numbers: out.numbers,
                    files,
                }
            }
            Err(e) => CheckReport {
                check: name,
                status: Status::InfrastructureSkipped,
                anchor,
                detail: String::new(),
                reason: Some(e.to_string()),
                numbers: Vec::new(),
                files: Vec::new(),
            },
        };
        checks.push(report);
    }
    let exit_code = RunManifest::exit_code(&checks);
    let manifest = RunManifest {
        config: echo(config),
        checks,
        provenance: Provenance {
            tool: "contrast-asym".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        },
        exit_code,
    };
    write(&config.output, "summary.csv", &manifest.summary_csv())?;
    write(&config.output, "summary.txt", &manifest.summary())?;
    write(&config.output, "manifest.json", &serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}
