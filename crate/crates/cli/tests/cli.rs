use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polaron(mode: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let dir = out.parent().unwrap();
    let cfg = dir.join(format!("{mode}-{}.toml", out.file_name().unwrap().to_string_lossy()));
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_polaron"))
        .arg(mode)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn listed_files(out: &Path) -> Vec<String> {
    let mut v: Vec<String> = manifest(out)["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["path"].as_str().unwrap().to_string())
        .collect();
    v.sort();
    v
}

/// Every file on disk except the manifest, relative and sorted.
fn files_on_disk(out: &Path) -> Vec<String> {
    let mut v = Vec::new();
    for sub in ["", "plotdata"] {
        for e in fs::read_dir(out.join(sub)).unwrap() {
            let p = e.unwrap().path();
            if p.is_file() {
                let rel = p.strip_prefix(out).unwrap().to_string_lossy().replace('\\', "/");
                if rel != "manifest.json" {
                    v.push(rel);
                }
            }
        }
    }
    v.sort();
    v
}

const LP: &str = r#"
[lattice]
L = 8.0
n = 8
dim = 1

[lp]
alpha = 0.25
dt = 0.01
t_end = 0.0
"#;

const CHAIN: &str = r#"
[model]
lattice = { L = 6.283185307179586, n = 4, dim = 1 }
shells = 1
n_particles = 1
phonon_cutoff = 3
alpha = 0.25
K = 1.5

[fock]
t_end = 0.5
intervals = 4
initial = "pekar"
"#;

#[test]
fn lp_with_zero_end_time_writes_a_single_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lp");
    let o = polaron("lp", LP, &out, &["--quiet"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let snap: Value = serde_json::from_str(&fs::read_to_string(out.join("snapshot.json")).unwrap()).unwrap();
    assert_eq!(snap["t"], 0.0);
    assert_eq!(fs::read_to_string(out.join("series.jsonl")).unwrap().lines().count(), 1);
    assert_eq!(listed_files(&out), files_on_disk(&out));
    let m = manifest(&out);
    assert_eq!(m["mode"], "lp");
    assert_eq!(m["dimensions"]["lattice_points"], 8);
}

#[test]
fn missing_box_length_is_a_config_error_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let o = polaron("lp", &LP.replace("L = 8.0", ""), &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("lattice") && err.contains("`L`"), "{err}");
    assert!(!out.exists());
}

#[test]
fn single_cell_sweep_matches_a_fock_run() {
    let dir = tempfile::tempdir().unwrap();
    let fock = dir.path().join("fock");
    let o = polaron("fock", CHAIN, &fock, &["--quiet"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep_cfg = format!("{CHAIN}\n[sweep]\nN_list = [1]\nK_list = [1.5]\nalpha_list = [0.25]\n");
    let sweep = dir.path().join("sweep");
    let o = polaron("sweep", &sweep_cfg, &sweep, &["--quiet"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files_on_disk(&fock), files_on_disk(&sweep));
    for f in files_on_disk(&fock) {
        assert_eq!(fs::read(fock.join(&f)).unwrap(), fs::read(sweep.join(&f)).unwrap(), "{f}");
    }
    assert_eq!(listed_files(&fock), files_on_disk(&fock));
}

#[test]
fn sweep_over_particle_number_gives_one_row_per_cell_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{CHAIN}\n[sweep]\nN_list = [1, 2, 3]\nK_list = [1.5]\nalpha_list = [0.25]\n");
    let out = dir.path().join("sweep");
    let o = polaron("sweep", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 4);
    let header: Vec<&str> = lines[0].split(',').collect();
    let col = header.iter().position(|h| *h == "trace_dist_monotone").unwrap();
    for l in &lines[1..] {
        let v = l.split(',').nth(col).unwrap();
        assert!(v == "true" || v == "false", "{l}");
    }
    assert_eq!(lines[1].split(',').nth(col), Some("true"));
    let series = fs::read_to_string(out.join("series.jsonl")).unwrap();
    assert_eq!(series.lines().count(), 3 * 5);

    let before: Vec<(String, Vec<u8>)> = files_on_disk(&out)
        .into_iter()
        .chain(["manifest.json".to_string()])
        .map(|f| (f.clone(), fs::read(out.join(&f)).unwrap()))
        .collect();
    let o = polaron("sweep", &cfg, &out, &["--quiet"]);
    assert_eq!(o.status.code(), Some(0));
    for (f, bytes) in before {
        assert_eq!(fs::read(out.join(&f)).unwrap(), bytes, "{f} changed between runs");
    }
}

#[test]
fn leakage_overflow_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("leak");
    let cfg = CHAIN.replace("phonon_cutoff = 3", "phonon_cutoff = 1").replace("alpha = 0.25", "alpha = 4.0")
        + "leakage_tol = 1e-12\n";
    let o = polaron("fock", &cfg, &out, &["--quiet"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("leakage"));
    assert!(manifest(&out)["status"].as_str().unwrap().starts_with("failed cells"));
}

#[test]
fn bounds_report_array_agrees_with_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bounds");
    let cfg = r#"
[bounds]
form_factor_cutoffs = [1.0]
cg_points = 5
eps = [1.0]
chain_states = 5
representation_states = 2
closeness_states = 2
leakage_tol = 0.5
operator_model = { sites = { box_length = 6.283185307179586, points_per_dim = 3, dim = 1 }, n_particles = 2, modes = [[1, 0, 0], [-1, 0, 0]], phonon_cutoff = 2, alpha = 0.5, cutoff = 1.0 }
chain_model = { sites = { box_length = 6.283185307179586, points_per_dim = 3, dim = 1 }, n_particles = 2, modes = [[1, 0, 0], [-1, 0, 0]], phonon_cutoff = 2, alpha = 0.5, cutoff = 1.0 }
representation_model = { sites = { box_length = 6.283185307179586, points_per_dim = 3, dim = 1 }, n_particles = 2, modes = [[1, 0, 0], [-1, 0, 0]], phonon_cutoff = 2, alpha = 0.5, cutoff = 1.0 }
scaling_model = { sites = { box_length = 6.283185307179586, points_per_dim = 3, dim = 1 }, n_particles = 1, modes = [[1, 0, 0], [-1, 0, 0], [2, 0, 0], [-2, 0, 0], [3, 0, 0], [-3, 0, 0]], phonon_cutoff = 2, alpha = 0.25, cutoff = 1.0 }
scaling_cutoffs = [1.0, 1.5, 2.0, 2.5]
"#;
    let missing_seed = polaron("bounds", cfg, &dir.path().join("noseed"), &[]);
    assert_eq!(missing_seed.status.code(), Some(2));
    let o = polaron("bounds", cfg, &out, &["--seed", "5"]);
    let reports: Value = serde_json::from_str(&fs::read_to_string(out.join("reports.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    let any_fail = reports.iter().any(|r| r["pass"] == false);
    assert_eq!(o.status.code(), Some(if any_fail { 1 } else { 0 }));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().next().unwrap().starts_with("name"));
    let rows = fs::read_to_string(out.join("summary.csv")).unwrap().lines().count();
    assert_eq!(rows, reports.len() + 1);
    assert_eq!(manifest(&out)["seed"], 5);
    assert_eq!(listed_files(&out), files_on_disk(&out));
}
