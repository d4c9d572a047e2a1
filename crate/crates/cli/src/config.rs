//! Run configuration: line-oriented `key = value` pairs grouped under `[section]` headers.
//!
//! ```text
//! # comment
//! [family]
//! kind = radial_annuli
//! alpha = 0.5
//!
//! [run]
//! n_list = [8, 16, 32]
//! h = 0.03
//! checks = [energy, l2]
//! ```
//!
//! Keys may repeat; for list-valued keys the values accumulate. Keys before the first header
//! belong to `[run]`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use contrast_asym::geometry::{family_registry, FamilySpec, InclusionFamily};
use contrast_asym::mesh::Point;

use crate::checks::check_registry;
use crate::error::CliError;

const SECTIONS: [&str; 4] = ["family", "run", "tolerances", "assumptions"];
const RUN_KEYS: [&str; 8] = ["n_list", "h", "data", "probes", "checks", "check", "output", "solver"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub n_list: Vec<usize>,
    pub h: f64,
    /// Names from the boundary data registry; the first one drives single-datum checks.
    pub data: Vec<String>,
    /// Evaluation points; `None` means the family's default probes.
    pub probes: Option<Vec<Point>>,
    pub checks: Vec<String>,
    pub output: PathBuf,
    pub solver: String,
    pub tolerances: BTreeMap<String, f64>,
    /// Integrability exponent of the assumption checker.
    pub p: f64,
    /// Separation exponent of the assumption checker.
    pub tau: f64,
    /// The text the configuration was parsed from.
    pub source: String,
}

impl RunConfig {
    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn build_family(&self) -> Result<std::sync::Arc<dyn InclusionFamily>, CliError> {
        let factory = family_registry().get(&self.family.kind).map_err(|e| CliError::config(0, "family.kind", e))?;
        factory.build(&self.family).map_err(|e| CliError::config(0, "family", e))
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

/// Items of `[a, b, c]` (or a bare single item).
pub fn list_items(value: &str) -> Vec<String> {
    let v = value.trim();
    let inner = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(v);
    inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

struct Raw {
    line: usize,
    value: String,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut section = "run".to_string();
    let mut entries: BTreeMap<(String, String), Vec<Raw>> = BTreeMap::new();
    let mut family_order: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(CliError::config(
                    line_no,
                    name,
                    format!("unknown section; expected one of {}", SECTIONS.join(", ")),
                ));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(line_no, &section, "expected `key = value` or `[section]`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(CliError::config(line_no, &section, "empty key"));
        }
        if section == "run" && !RUN_KEYS.contains(&key) {
            return Err(CliError::config(
                line_no,
                &format!("run.{key}"),
                format!("unknown key; expected one of {}", RUN_KEYS.join(", ")),
            ));
        }
        if section == "family" {
            family_order.push((line_no, key.to_string(), value.to_string()));
        }
        entries
            .entry((section.clone(), key.to_string()))
            .or_default()
            .push(Raw { line: line_no, value: value.to_string() });
    }

    let last = |s: &str, k: &str| entries.get(&(s.to_string(), k.to_string())).and_then(|v| v.last());
    let all = |s: &str, k: &str| -> Vec<&Raw> {
        entries.get(&(s.to_string(), k.to_string())).map(|v| v.iter().collect()).unwrap_or_default()
    };

    // family
    let kind = last("family", "kind").ok_or_else(|| CliError::config(0, "family.kind", "missing"))?;
    let registry = family_registry();
    if registry.get(&kind.value).is_err() {
        return Err(CliError::config(
            kind.line,
            "family.kind",
            format!("unknown family kind `{}`; supported: {}", kind.value, registry.names().join(", ")),
        ));
    }
    let mut family = FamilySpec::new(&kind.value);
    for (_, k, v) in family_order.iter().filter(|(_, k, _)| k != "kind") {
        family = family.with(k, v);
    }

    // n_list
    let n_entries = all("run", "n_list");
    if n_entries.is_empty() {
        return Err(CliError::config(0, "run.n_list", "missing"));
    }
    let mut n_list = Vec::new();
    for r in &n_entries {
        for item in list_items(&r.value) {
            let n: usize = item
                .parse()
                .map_err(|_| CliError::config(r.line, "run.n_list", format!("`{item}` is not a positive integer")))?;
            n_list.push(n);
        }
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(CliError::config(n_entries[0].line, "run.n_list", "needs positive integers"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config(
            n_entries[n_entries.len() - 1].line,
            "run.n_list",
            format!("n_list must be strictly ascending, got {n_list:?}"),
        ));
    }

    let h = match last("run", "h") {
        None => return Err(CliError::config(0, "run.h", "missing")),
        Some(r) => {
            let h: f64 = r.value.parse().map_err(|_| CliError::config(r.line, "run.h", "not a number"))?;
            if !(h > 0.0) || !h.is_finite() {
                return Err(CliError::config(r.line, "run.h", "h must be positive"));
            }
            h
        }
    };

    let data_reg = contrast_asym::asymptotics::boundary_data_registry();
    let mut data = Vec::new();
    for r in all("run", "data") {
        for d in list_items(&r.value) {
            if data_reg.get(&d).is_err() {
                return Err(CliError::config(
                    r.line,
                    "run.data",
                    format!("unknown boundary data `{d}`; supported: {}", data_reg.names().join(", ")),
                ));
            }
            data.push(d);
        }
    }
    if data.is_empty() {
        data.push("x1".to_string());
    }

    let mut probes: Option<Vec<Point>> = None;
    for r in all("run", "probes") {
        for item in list_items(&r.value) {
            let c: Vec<f64> = item
                .split_whitespace()
                .map(|x| x.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::config(r.line, "run.probes", format!("cannot parse point `{item}`")))?;
            if c.len() != 2 {
                return Err(CliError::config(r.line, "run.probes", format!("point `{item}` needs two coordinates")));
            }
            probes.get_or_insert_with(Vec::new).push([c[0], c[1]]);
        }
    }

    let check_reg = check_registry();
    let mut checks: Vec<String> = Vec::new();
    for key in ["checks", "check"] {
        for r in all("run", key) {
            for c in list_items(&r.value) {
                if check_reg.get(&c).is_err() {
                    return Err(CliError::config(
                        r.line,
                        "run.checks",
                        format!("unknown check `{c}`; supported: {}", check_reg.names().join(", ")),
                    ));
                }
                if !checks.contains(&c) {
                    checks.push(c);
                }
            }
        }
    }
    if checks.is_empty() {
        return Err(CliError::config(0, "run.checks", "at least one check is required"));
    }

    let output = PathBuf::from(last("run", "output").map_or("contrast-asym-out", |r| r.value.as_str()));
    let solver = last("run", "solver").map_or("pcg-jacobi".to_string(), |r| r.value.clone());
    if let Err(e) = contrast_asym::fem::solver::solver_registry().get(&solver) {
        return Err(CliError::config(last("run", "solver").map_or(0, |r| r.line), "run.solver", e));
    }

    let mut tolerances = BTreeMap::new();
    for ((s, k), v) in &entries {
        if s == "tolerances" {
            let r = v.last().expect("nonempty");
            let x: f64 = r
                .value
                .parse()
                .map_err(|_| CliError::config(r.line, &format!("tolerances.{k}"), "not a number"))?;
            tolerances.insert(k.clone(), x);
        }
    }
    let num = |k: &str, default: f64| -> Result<f64, CliError> {
        match last("assumptions", k) {
            None => Ok(default),
            Some(r) => r.value.parse().map_err(|_| CliError::config(r.line, &format!("assumptions.{k}"), "not a number")),
        }
    };

    Ok(RunConfig {
        family,
        n_list,
        h,
        data,
        probes,
        checks,
        output,
        solver,
        tolerances,
        p: num("p", 4.0)?,
        tau: num("tau", 0.9)?,
        source: text.to_string(),
    })
}
