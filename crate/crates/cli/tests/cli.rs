use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_contrast-asym"));
    c.env_remove("CONTRAST_ASYM_THREADS");
    c
}

fn radial_config(out: &Path) -> String {
    format!(
        "[family]\nkind = radial_annuli\nalpha = 0.5\nbeta = -0.5\n\n[run]\nn_list = [8, 16, 32]\nh = 0.05\n\
         checks = [energy, bounds, bc_independence]\noutput = {}\n",
        out.display()
    )
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn radial_run_passes_and_records_each_check_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "radial.conf", &radial_config(&out));
    let o = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}{}", String::from_utf8_lossy(&o.stdout), stderr(&o));

    let m = manifest(&out);
    let names: Vec<&str> = m["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert_eq!(names, ["energy", "bounds", "bc_independence"]);
    assert!(m["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass" && !c["anchor"].as_str().unwrap().is_empty()));
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["config"]["family"], "radial_annuli");
    assert_eq!(m["config"]["n_list"], serde_json::json!([8, 16, 32]));
    assert_eq!(m["provenance"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["provenance"]["timestamp"].as_str().unwrap().contains('T'));
    for f in ["summary.csv", "summary.txt", "energy_bounds.csv", "energy_rate.csv", "w_bounds.csv", "bc_rate.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn csv_bodies_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let cfg = write_config(dir.path(), "c.conf", &radial_config(out));
        let o = bin().env("CONTRAST_ASYM_THREADS", threads).arg("run").arg(&cfg).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut compared = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if Path::new(&name).extension().is_some_and(|e| e == "csv") {
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?} differs");
            compared += 1;
        }
    }
    assert!(compared >= 5);
}

#[test]
fn unresolvable_strips_are_skipped_with_a_reason() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let body = format!(
        "[family]\nkind = strips\neps = 0.5\n[run]\nn_list = [8, 16, 32]\nh = 0.2\nchecks = [energy]\noutput = {}\n",
        out.display()
    );
    let o = bin().arg("run").arg(write_config(dir.path(), "s.conf", &body)).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&out);
    let c = &m["checks"][0];
    assert_eq!(c["status"], "infrastructure_skipped");
    assert!(c["reason"].as_str().unwrap().contains("unresolvable"), "{c}");
    assert_eq!(m["exit_code"], 2);
}

#[test]
fn descending_n_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = radial_config(&dir.path().join("out")).replace("[8, 16, 32]", "[32, 16, 8]");
    let o = bin().arg("run").arg(write_config(dir.path(), "d.conf", &body)).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_list"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_family_lists_supported_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let body = radial_config(&dir.path().join("out")).replace("radial_annuli", "torus");
    let o = bin().arg("run").arg(write_config(dir.path(), "u.conf", &body)).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for k in ["radial_annuli", "disk", "confocal_ellipse", "strips", "custom_polygons"] {
        assert!(e.contains(k), "{e}");
    }
}

#[test]
fn missing_config_file_is_an_infrastructure_error() {
    let o = bin().args(["run", "/nonexistent/run.conf"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_thread_cap_is_rejected() {
    let o = bin().env("CONTRAST_ASYM_THREADS", "zero").args(["oracle", "elliptic", "--q", "0.5", "--n", "16"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("CONTRAST_ASYM_THREADS"));
}

#[test]
fn oracle_tables() {
    let o = bin().args(["oracle", "radial", "--d", "2", "--alpha", "0.5", "--beta", "-0.5", "--n", "8,16,32"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4, "{text}");

    let o = bin().args(["oracle", "elliptic", "--q", "0.5", "--n", "16,32,64"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("n,lambda"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn plot_writes_fixed_size_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "p.conf", &radial_config(&out));
    assert_eq!(bin().arg("run").arg(&cfg).output().unwrap().status.code(), Some(0));
    let svg = dir.path().join("rate.svg");
    let o = bin().arg("plot").arg(out.join("bc_rate.csv")).arg("-o").arg(&svg).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = fs::read_to_string(&svg).unwrap();
    assert!(body.contains(r#"viewBox="0 0 640 480""#));
    assert_eq!(body.matches("<circle").count(), 3);

    let o = bin().arg("plot").arg(out.join("summary.csv")).arg("-o").arg(&svg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_assumptions_certifies_strips() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[family]\nkind = strips\neps = 0.5\n[run]\n\
                n_list = [16, 256, 4096, 65536, 1048576, 16777216, 268435456, 4294967296, 68719476736, 1099511627776, 17592186044416]\n\
                h = 0.05\nchecks = [assumptions]\n[assumptions]\np = 4\ntau = 0.9\n";
    let o = bin().arg("check-assumptions").arg(write_config(dir.path(), "a.conf", body)).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS") && text.contains("4c"), "{text}");
}
