use std::collections::BTreeMap;
use std::path::PathBuf;

use polaron_core::bounds::{fit_gronwall_envelope, run_suite, BetaSeries, InequalityReport};
use polaron_core::fock::{
    build_frohlich_hamiltonian, compare_with_mean_field, gross_dressed_pekar_state, modulated_profile,
    pekar_state, uniform_times, ComparisonConfig, FockModel, FunctionalReport, LatticePekarFlow,
    LatticePekarState,
};
use polaron_core::landau_pekar::{evolve, standard_initial, write_trajectory_csv, LpDiagnostics, Snapshot};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::{num, tag, Artifacts, FileEntry};
use crate::config::{InitialState, Mode, RunConfig};
use crate::error::CliError;

/// What a finished run reports back to the caller.
#[derive(Debug)]
pub struct RunSummary {
    pub manifest: PathBuf,
    /// human-readable lines for the terminal
    pub lines: Vec<String>,
    /// failure found after the artifacts were written (aborted integration,
    /// failed sweep cells, failed bound checks)
    pub error: Option<CliError>,
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "polaron-cli")]
    cli: &'static str,
    #[serde(rename = "polaron-core")]
    core: &'static str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    versions: Versions,
    mode: &'static str,
    seed: Option<u64>,
    config: &'a RunConfig,
    /// basis or grid size per model used
    dimensions: BTreeMap<String, usize>,
    /// largest top-shell phonon mass seen, for many-body runs
    max_leakage: Option<f64>,
    status: String,
    files: Vec<FileEntry>,
}

fn finish(
    art: Artifacts,
    cfg: &RunConfig,
    mode: Mode,
    dimensions: BTreeMap<String, usize>,
    max_leakage: Option<f64>,
    status: String,
) -> Result<PathBuf, CliError> {
    art.finish(|files| Manifest {
        tool: "polaron",
        versions: Versions {
            cli: env!("CARGO_PKG_VERSION"),
            core: polaron_core::VERSION,
        },
        mode: mode.name(),
        seed: cfg.seed,
        config: cfg,
        dimensions,
        max_leakage,
        status,
        files,
    })
}

/// Runs a resolved configuration and writes its artifacts.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let mode = cfg.mode.ok_or_else(|| CliError::Config("mode: unresolved".into()))?;
    let out = cfg.output.clone().ok_or_else(|| CliError::Config("output: missing".into()))?;
    let art = Artifacts::create(&out)?;
    match mode {
        Mode::Lp => run_lp(cfg, art),
        Mode::Fock | Mode::Sweep => run_cells(cfg, mode, art),
        Mode::Bounds => run_bounds(cfg, art),
    }
}

const LP_SUMMARY: [&str; 7] = ["t_end", "steps", "max_norm_drift", "max_energy_drift", "energy", "h2_norm", "l21_norm"];

fn run_lp(cfg: &RunConfig, mut art: Artifacts) -> Result<RunSummary, CliError> {
    let lattice = cfg.lattice.as_ref().expect("resolved").build()?;
    let lp = cfg.lp.as_ref().expect("resolved");
    let state = standard_initial(lattice, lp.alpha, lp.phi_init)?;
    let stepper = lp.stepper();
    let (traj, error) = match evolve(&state, &stepper) {
        Ok(traj) => (traj, None),
        Err(aborted) => {
            let a = *aborted;
            (a.partial, Some(CliError::from(a.error)))
        }
    };
    let status = error.as_ref().map_or("ok".to_string(), |e| format!("aborted: {e}"));
    let diags: &[LpDiagnostics] = &traj.diagnostics;
    art.write_jsonl("series.jsonl", diags)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, diags)?;
    art.write("trajectory.csv", &csv)?;
    let t_last = traj.snapshots.last().map_or(0.0, |s| s.0);
    if let Some((t, last)) = traj.snapshots.last() {
        art.write("snapshot.json", &serde_json::to_vec(&Snapshot::from_pair(*t, last))?)?;
    }
    let final_diag = diags.last().copied();
    let row = match final_diag {
        Some(d) => vec![
            num(d.t),
            stepper.steps().0.to_string(),
            num(traj.max_norm_drift()),
            num(traj.max_energy_drift()),
            num(d.energy),
            num(d.h2_norm),
            num(d.l21_norm),
        ],
        None => vec![String::new(); LP_SUMMARY.len()],
    };
    art.write_csv("summary.csv", &LP_SUMMARY, &[row])?;
    let t: Vec<f64> = diags.iter().map(|d| d.t).collect();
    for (name, pick) in [
        ("norm", (|d: &LpDiagnostics| d.norm) as fn(&LpDiagnostics) -> f64),
        ("energy", |d| d.energy),
        ("energy_drift", |d| d.energy_drift),
        ("h2_norm", |d| d.h2_norm),
    ] {
        art.write_plot(name, "t", &t, &diags.iter().map(pick).collect::<Vec<_>>())?;
    }
    let mut dims = BTreeMap::new();
    dims.insert("lattice_points".to_string(), lattice.len());
    let lines = vec![format!(
        "lp: {} steps to t = {}, max norm drift {:.3e}, max energy drift {:.3e}",
        stepper.steps().0,
        t_last,
        traj.max_norm_drift(),
        traj.max_energy_drift()
    )];
    let manifest = finish(art, cfg, Mode::Lp, dims, None, status)?;
    Ok(RunSummary { manifest, lines, error })
}

/// One `(N, K, α)` many-body run.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CellKey {
    n: usize,
    k: f64,
    alpha: f64,
}

impl CellKey {
    fn label(&self) -> String {
        format!("N{}_K{}_alpha{}", self.n, tag(self.k), tag(self.alpha))
    }
}

struct CellRun {
    dim: usize,
    reports: Vec<FunctionalReport>,
    c_fit: Option<f64>,
    violations: Option<usize>,
}

#[derive(Serialize)]
struct SeriesRow<'a> {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: f64,
    alpha: f64,
    #[serde(flatten)]
    report: &'a FunctionalReport,
}

fn run_cell(cfg: &RunConfig, key: CellKey) -> Result<CellRun, CliError> {
    let mut spec = cfg.model.as_ref().expect("resolved").spec()?;
    spec.n_particles = key.n;
    spec.cutoff = key.k;
    spec.alpha = key.alpha;
    let f = &cfg.fock;
    let model = FockModel::new(spec)?;
    let psi = modulated_profile(&model, f.profile_amplitude);
    let z = LatticePekarFlow::new(&model).stationary_field(&psi);
    let initial = match f.initial {
        InitialState::Pekar => pekar_state(&model, &psi, &z, f.leakage_tol)?,
        InitialState::GrossDressedPekar => gross_dressed_pekar_state(&model, &psi, &z, f.leakage_tol)?,
    };
    let h = build_frohlich_hamiltonian(&model)?;
    let times = uniform_times(f.t_end, f.intervals);
    let run = compare_with_mean_field(
        &model,
        &h,
        &initial,
        &LatticePekarState { psi, z },
        &times,
        &ComparisonConfig {
            krylov_tol: f.krylov_tol,
            mean_field_dt: f.mean_field_dt,
        },
    )?;
    let series = BetaSeries {
        label: key.label(),
        n: key.n,
        cutoff: key.k,
        times: run.reports.iter().map(|r| r.t).collect(),
        beta: run.reports.iter().map(|r| r.beta()).collect(),
    };
    // the envelope fit needs a few samples and a positive time step
    let fit = fit_gronwall_envelope(&[series]).ok();
    Ok(CellRun {
        dim: model.dim(),
        reports: run.reports,
        c_fit: fit.as_ref().map(|g| g.c_fit),
        violations: fit.as_ref().map(|g| g.violations.len()),
    })
}

pub const CELL_SUMMARY: [&str; 17] = [
    "N",
    "K",
    "alpha",
    "dim",
    "status",
    "t_end",
    "trace_dist",
    "trace_dist_gross",
    "beta_a",
    "beta_b",
    "beta_c",
    "beta",
    "energy_per_particle",
    "max_leakage",
    "c_fit",
    "envelope_violations",
    "trace_dist_monotone",
];

fn run_cells(cfg: &RunConfig, mode: Mode, mut art: Artifacts) -> Result<RunSummary, CliError> {
    let model = cfg.model.as_ref().expect("resolved");
    let keys: Vec<CellKey> = match (mode, &cfg.sweep) {
        (Mode::Sweep, Some(s)) => s
            .alpha_list
            .iter()
            .flat_map(|&alpha| s.k_list.iter().flat_map(move |&k| s.n_list.iter().map(move |&n| CellKey { n, k, alpha })))
            .collect(),
        _ => vec![CellKey {
            n: model.n_particles,
            k: model.cutoff,
            alpha: model.alpha,
        }],
    };
    // independent cells; collect keeps the order of `keys`
    let results: Vec<Result<CellRun, CliError>> = keys.par_iter().map(|&k| run_cell(cfg, k)).collect();

    let mut series = Vec::new();
    let mut rows = Vec::new();
    let mut dims = BTreeMap::new();
    let mut max_leakage: Option<f64> = None;
    let mut failed = Vec::new();
    let mut lines = Vec::new();
    // previous trace distance within the same (K, α) group, by N
    let mut previous: BTreeMap<(u64, u64), (usize, f64)> = BTreeMap::new();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].n.cmp(&keys[b].n));
    let mut monotone = vec![String::new(); keys.len()];
    for &i in &order {
        if let Ok(run) = &results[i] {
            let last = run.reports.last().expect("at least one sample");
            let group = (keys[i].k.to_bits(), keys[i].alpha.to_bits());
            let flag = previous.get(&group).map_or(true, |&(_, prev)| last.trace_dist <= prev);
            monotone[i] = flag.to_string();
            previous.insert(group, (keys[i].n, last.trace_dist));
        }
    }
    for (i, (key, result)) in keys.iter().zip(&results).enumerate() {
        match result {
            Ok(run) => {
                series.extend(run.reports.iter().map(|r| SeriesRow {
                    n: key.n,
                    k: key.k,
                    alpha: key.alpha,
                    report: r,
                }));
                let last = run.reports.last().expect("at least one sample");
                let leak = run.reports.iter().map(|r| r.leakage).fold(0.0, f64::max);
                max_leakage = Some(max_leakage.map_or(leak, |m| m.max(leak)));
                dims.insert(key.label(), run.dim);
                rows.push(vec![
                    key.n.to_string(),
                    num(key.k),
                    num(key.alpha),
                    run.dim.to_string(),
                    "ok".into(),
                    num(last.t),
                    num(last.trace_dist),
                    num(last.trace_dist_gross),
                    num(last.beta_a),
                    num(last.beta_b),
                    num(last.beta_c),
                    num(last.beta()),
                    num(last.energy_per_particle),
                    num(leak),
                    run.c_fit.map(num).unwrap_or_default(),
                    run.violations.map(|v| v.to_string()).unwrap_or_default(),
                    monotone[i].clone(),
                ]);
                lines.push(format!(
                    "cell {}: dim {}, trace_dist {:.4}, beta {:.4}, leakage {:.3}",
                    key.label(),
                    run.dim,
                    last.trace_dist,
                    last.beta(),
                    leak
                ));
            }
            Err(e) => {
                let mut row = vec![key.n.to_string(), num(key.k), num(key.alpha), String::new()];
                row.push(format!("failed: {}", e.to_string().replace(',', ";")));
                row.resize(CELL_SUMMARY.len(), String::new());
                rows.push(row);
                failed.push(key.label());
                lines.push(format!("cell {}: FAILED ({e})", key.label()));
            }
        }
    }
    art.write_jsonl("series.jsonl", &series)?;
    art.write_csv("summary.csv", &CELL_SUMMARY, &rows)?;
    for (key, result) in keys.iter().zip(&results) {
        if let Ok(run) = result {
            let t: Vec<f64> = run.reports.iter().map(|r| r.t).collect();
            for (name, pick) in [
                ("trace_dist", (|r: &FunctionalReport| r.trace_dist) as fn(&FunctionalReport) -> f64),
                ("beta", |r| r.beta()),
                ("beta_a", |r| r.beta_a),
                ("beta_b", |r| r.beta_b),
                ("beta_c", |r| r.beta_c),
            ] {
                let y: Vec<f64> = run.reports.iter().map(pick).collect();
                art.write_plot(&format!("{name}_{}", key.label()), "t", &t, &y)?;
            }
        }
    }
    let status = if failed.is_empty() {
        "ok".to_string()
    } else {
        format!("failed cells: {}", failed.join(" "))
    };
    let manifest = finish(art, cfg, mode, dims, max_leakage, status)?;
    // failed cells are isolated; the first failure sets the exit status
    let error = results.into_iter().find_map(|r| r.err());
    Ok(RunSummary { manifest, lines, error })
}

pub const BOUNDS_SUMMARY: [&str; 7] = ["name", "pass", "lhs", "rhs", "margin", "slack", "note"];

/// Fixed-width table of the reports.
pub fn report_table(reports: &[InequalityReport]) -> Vec<String> {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = vec![format!("{:<width$}  {:<4}  {:>12}  {:>12}  {:>12}", "name", "pass", "lhs", "rhs", "margin")];
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4e}"));
    for r in reports {
        out.push(format!(
            "{:<width$}  {:<4}  {:>12}  {:>12}  {:>12}",
            r.name,
            if r.pass { "yes" } else { "NO" },
            opt(r.lhs),
            opt(r.rhs),
            format!("{:.4e}", r.margin)
        ));
    }
    out
}

fn run_bounds(cfg: &RunConfig, mut art: Artifacts) -> Result<RunSummary, CliError> {
    let suite = cfg.bounds.as_ref().expect("resolved");
    let mut dims = BTreeMap::new();
    for (label, spec) in [
        ("operator_model", &suite.operator_model),
        ("chain_model", &suite.chain_model),
        ("representation_model", &suite.representation_model),
        ("scaling_model", &suite.scaling_model),
    ] {
        dims.insert(label.to_string(), FockModel::new(spec.clone())?.dim());
    }
    let outcome = run_suite(suite)?;
    let reports = &outcome.reports;
    let mut json = serde_json::to_vec_pretty(reports)?;
    json.push(b'\n');
    art.write("reports.json", &json)?;
    art.write_jsonl("series.jsonl", reports)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.pass.to_string(),
                opt(r.lhs),
                opt(r.rhs),
                num(r.margin),
                num(r.slack),
                r.note.replace(',', ";"),
            ]
        })
        .collect();
    art.write_csv("summary.csv", &BOUNDS_SUMMARY, &rows)?;
    let (p, v): (Vec<f64>, Vec<f64>) = outcome.cg.profile.iter().map(|&(p, v)| (p, v)).unzip();
    art.write_plot("cg_profile", "p", &p, &v)?;
    for &n in &suite.scaling_particles {
        let sel: Vec<_> = outcome.scaling.rows.iter().filter(|r| r.n == n).collect();
        let k: Vec<f64> = sel.iter().map(|r| r.cutoff).collect();
        art.write_plot(&format!("a_vs_K_N{n}"), "K", &k, &sel.iter().map(|r| r.a).collect::<Vec<_>>())?;
        art.write_plot(&format!("b_vs_K_N{n}"), "K", &k, &sel.iter().map(|r| r.b).collect::<Vec<_>>())?;
        art.write_plot(&format!("c_vs_K_N{n}"), "K", &k, &sel.iter().map(|r| r.c).collect::<Vec<_>>())?;
    }
    let k: Vec<f64> = outcome.closeness.rows.iter().map(|r| r.cutoff).collect();
    let lhs: Vec<f64> = outcome.closeness.rows.iter().map(|r| r.max_lhs).collect();
    art.write_plot("closeness_vs_K", "K", &k, &lhs)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let status = if failed.is_empty() {
        "ok".to_string()
    } else {
        let mut names = failed.clone();
        names.dedup();
        format!("failed checks: {}", names.join(" "))
    };
    let error = (!failed.is_empty()).then(|| CliError::BoundsFailed(failed.len()));
    let manifest = finish(art, cfg, Mode::Bounds, dims, None, status)?;
    Ok(RunSummary {
        manifest,
        lines: report_table(reports),
        error,
    })
}
