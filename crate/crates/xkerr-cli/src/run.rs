//! Sweep orchestration: resolve each point, evaluate it, write the outputs.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use xkerr::analytic::{g2_closed_form, g2_perturbative, g3_closed_form, g3_perturbative};
use xkerr::catgen::{self, CatSpec};
use xkerr::gaussian::{self, diffusion_matrix, drift_matrix, max_real_eigenvalue, mean_field, routh_hurwitz};
use xkerr::lindblad::photon_statistics;
use xkerr::{circuit, SpaceSpec};

use crate::config::{Command, RunConfig, Setup, Source, Values};
use crate::error::{CliError, ErrorRecord};
use crate::output::{wigner_matrix, Artifact, Cell, Table};
use crate::sweep::{grid, Point, Sweep};

/// Largest trace drift accepted on a propagated trajectory.
pub const MAX_TRACE_DRIFT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    /// Refused by the validity gate.
    Masked,
}

struct PointResult {
    rows: Vec<Vec<Cell>>,
    artifacts: Vec<Artifact>,
    status: Status,
    error: Option<String>,
    residual: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub coupling_source: Option<Source>,
    /// Resolved inputs at the first sweep point.
    pub first_point: Option<Setup>,
    pub points: usize,
    pub rows: usize,
    pub failed: usize,
    pub masked: usize,
    pub max_residual: Option<f64>,
    pub max_trace_drift_allowed: f64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub error: Option<ErrorRecord>,
}

/// Summary returned to the caller; `error` decides the exit code.
#[derive(Debug)]
pub struct Summary {
    pub points: usize,
    pub failed: usize,
    pub masked: usize,
    pub outputs: Vec<String>,
    pub error: Option<CliError>,
}

fn columns(cmd: Command) -> &'static [&'static str] {
    match cmd {
        Command::Couplings => &[
            "omega_c", "omega_m", "g0", "g_ck", "g_ck_prime", "g_cub", "big_g2", "big_g4", "gbar_ck",
            "gtilde_ck", "e_c", "b", "rwa_ratio", "truncation_ratio", "dispersive_ratio", "polaron_ok", "usable",
            "valid", "error",
        ],
        Command::G2trace | Command::G2map | Command::Pbmap | Command::Thermal => &[
            "delta_c_over_omega_m", "n_th", "g0", "g_ck", "g_ck_prime", "g2", "g3", "class", "mean_photons",
            "mean_phonons", "residual", "trace_error", "hermiticity_error", "min_eigenvalue", "g2_perturbative",
            "g3_perturbative", "g2_closed_form", "g3_closed_form", "n_a", "n_m", "valid", "error",
        ],
        Command::Cat => &[
            "frame", "t", "t_over_tau", "negativity", "normalization", "fidelity_closed", "trace_drift", "file",
            "valid", "error",
        ],
        Command::Wigner => &["t", "t_over_tau", "negativity", "normalization", "min", "file", "valid", "error"],
        Command::Negativity => &["t", "t_over_tau", "negativity", "trace_drift", "valid", "error"],
        Command::Entangle => &[
            "delta_c_over_omega_m", "alpha_abs", "beta_re", "beta_im", "delta_eff", "omega_eff", "g_eff", "stable",
            "rh1", "rh2", "rh3", "rh4", "e_n", "omega_eff_over_delta_eff", "lyapunov_residual", "omega_drive",
            "valid", "error",
        ],
        Command::Stability => &[
            "delta_c_over_omega_m", "delta_eff", "omega_eff", "g_eff", "omega_eff_over_delta_eff", "alpha_abs",
            "beta_abs", "stable", "rh1", "rh2", "rh3", "rh4", "max_re_eigenvalue", "valid", "error",
        ],
    }
}

fn blank_row(cmd: Command, valid: bool, code: &str) -> Vec<Cell> {
    let n = columns(cmd).len();
    let mut row = vec![Cell::Empty; n - 2];
    row.push(Cell::B(valid));
    row.push(Cell::S(code.to_string()));
    row
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Summary, CliError> {
    let start = Instant::now();
    let (values, sweeps) = cfg.check()?;
    if cfg.command == Command::Couplings && !values.uses_circuit() {
        return Err(CliError::Config("`couplings` needs circuit parameters, not pinned couplings".into()));
    }
    let points = grid(&sweeps);
    let threads = cfg.threads.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let first = resolve_point(&values, &sweeps, &points[0])?;
    let results: Vec<PointResult> = pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate(cfg, &values, &sweeps, p))
            .collect::<Result<Vec<_>, CliError>>()
    })?;

    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut header: Vec<String> = sweeps.iter().map(Sweep::column).collect();
    header.extend(columns(cfg.command).iter().map(|s| s.to_string()));
    let mut table = Table { header, rows: Vec::new() };
    let mut outputs = Vec::new();
    for (p, r) in points.iter().zip(&results) {
        for row in &r.rows {
            let mut full: Vec<Cell> = p.coords.iter().map(|c| Cell::F(c.1)).collect();
            full.extend(row.iter().cloned());
            table.rows.push(full);
        }
        for a in &r.artifacts {
            let path = out.join(&a.name);
            fs::write(&path, &a.contents).map_err(|e| CliError::io(&path, e))?;
            outputs.push(a.name.clone());
        }
    }
    let ext = match cfg.format {
        crate::config::Format::Csv => "csv",
        crate::config::Format::Json => "json",
    };
    let table_name = format!("{}.{ext}", cfg.command.name());
    table.write(&out.join(&table_name), cfg.format)?;
    outputs.insert(0, table_name);

    let failed = results.iter().filter(|r| r.status == Status::Failed).count();
    let masked = results.iter().filter(|r| r.status == Status::Masked).count();
    let error = if masked == points.len() {
        Some(CliError::Validity(format!("all {masked} points fail the validity conditions")))
    } else if failed > 0 {
        let first = results.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        Some(CliError::PointsFailed { failed, total: points.len(), first })
    } else {
        None
    };

    let manifest = Manifest {
        tool: "xkerr",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        coupling_source: first.as_ref().map(|s| s.source.clone()),
        first_point: first,
        points: points.len(),
        rows: table.rows.len(),
        failed,
        masked,
        max_residual: results.iter().filter_map(|r| r.residual).reduce(f64::max),
        max_trace_drift_allowed: MAX_TRACE_DRIFT,
        threads,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: outputs.clone(),
        error: error.as_ref().map(CliError::record),
    };
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;

    Ok(Summary { points: points.len(), failed, masked, outputs, error })
}

/// Resolves the setup at `p`; model errors yield `None`, configuration errors propagate.
fn resolve_point(values: &Values, sweeps: &[Sweep], p: &Point) -> Result<Option<Setup>, CliError> {
    let mut v = values.clone();
    for (s, c) in sweeps.iter().zip(&p.coords) {
        v.set(&s.key, c.2);
    }
    match Setup::resolve(&v) {
        Ok(s) => Ok(Some(s)),
        Err(CliError::Model(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn evaluate(cfg: &RunConfig, values: &Values, sweeps: &[Sweep], p: &Point) -> Result<PointResult, CliError> {
    let mut v = values.clone();
    for (s, c) in sweeps.iter().zip(&p.coords) {
        v.set(&s.key, c.2);
    }
    let setup = match Setup::resolve(&v) {
        Ok(s) => s,
        Err(CliError::Model(e)) => return Ok(failure(cfg.command, true, e)),
        Err(e) => return Err(e),
    };
    let valid = setup.valid();
    if cfg.command == Command::Couplings {
        return Ok(couplings_row(&setup));
    }
    if !valid && !cfg.force {
        return Ok(PointResult {
            rows: vec![blank_row(cfg.command, false, "validity")],
            artifacts: vec![],
            status: Status::Masked,
            error: None,
            residual: None,
        });
    }
    let result = match cfg.command {
        Command::Couplings => unreachable!(),
        Command::G2trace | Command::G2map | Command::Pbmap | Command::Thermal => photon(&setup, cfg.tol, valid),
        Command::Cat => cat(&setup, p.index, valid),
        Command::Wigner => wigner(&setup, p.index, valid),
        Command::Negativity => negativity(&setup, valid),
        Command::Entangle => entangle(&setup, cfg.tol, valid),
        Command::Stability => stability(&setup, valid),
    };
    Ok(result.unwrap_or_else(|e| failure(cfg.command, valid, e)))
}

fn failure(cmd: Command, valid: bool, e: xkerr::Error) -> PointResult {
    PointResult {
        rows: vec![blank_row(cmd, valid, e.code())],
        artifacts: vec![],
        status: Status::Failed,
        error: Some(e.to_string()),
        residual: None,
    }
}

/// `problem` is an error code and message that marks every row as failed.
fn ok(rows: Vec<Vec<Cell>>, artifacts: Vec<Artifact>, residual: Option<f64>, problem: Option<(String, String)>) -> PointResult {
    let (status, error) = match &problem {
        Some((_, msg)) => (Status::Failed, Some(msg.clone())),
        None => (Status::Ok, None),
    };
    let rows = match problem {
        Some((code, _)) => rows
            .into_iter()
            .map(|mut r| {
                *r.last_mut().unwrap() = Cell::S(code.clone());
                r
            })
            .collect(),
        None => rows,
    };
    PointResult { rows, artifacts, status, error, residual }
}

fn couplings_row(s: &Setup) -> PointResult {
    let p = s.circuit.as_ref().expect("circuit source");
    let r = s.validity.as_ref().expect("circuit source");
    let inter = circuit::compute_intermediate(p).expect("resolved once already");
    let e = &s.eff;
    let row = vec![
        Cell::F(e.omega_c),
        Cell::F(e.omega_m),
        Cell::F(e.g0),
        Cell::F(e.g_ck),
        Cell::F(e.g_ck_prime),
        Cell::F(e.g_cub),
        Cell::F(e.big_g2),
        Cell::F(e.big_g4),
        Cell::F(e.gbar_ck),
        Cell::F(e.gtilde_ck),
        Cell::F(inter.e_c),
        Cell::F(inter.b),
        Cell::F(r.rwa.worst_ratio),
        Cell::F(r.truncation.worst_ratio),
        Cell::F(r.dispersive.worst_ratio),
        Cell::B(r.polaron.iter().all(|p| p.ok)),
        Cell::B(r.usable()),
        Cell::B(r.usable()),
        Cell::S(String::new()),
    ];
    ok(vec![row], vec![], None, None)
}

fn photon(s: &Setup, tol: f64, valid: bool) -> xkerr::Result<PointResult> {
    let space = SpaceSpec::new(s.n_a, s.n_m)?;
    let st = photon_statistics(&s.eff, &s.bath, space)?;
    let (e, b) = (&s.eff, &s.bath);
    let h = st.hygiene;
    let row = vec![
        Cell::F(b.delta_c / e.omega_m),
        Cell::F(b.n_th(e)),
        Cell::F(e.g0),
        Cell::F(e.g_ck),
        Cell::F(e.g_ck_prime),
        Cell::F(st.g2),
        Cell::F(st.g3),
        Cell::S(st.class.label().to_string()),
        Cell::F(st.mean_photons),
        Cell::F(st.mean_phonons),
        Cell::F(st.residual),
        Cell::F(h.trace_error),
        Cell::F(h.hermiticity_error),
        Cell::F(h.min_eigenvalue),
        Cell::opt(g2_perturbative(e, b, s.l_max)),
        Cell::opt(g3_perturbative(e, b, s.l_max)),
        Cell::F(g2_closed_form(e, b)),
        Cell::F(g3_closed_form(e, b)),
        Cell::I(s.n_a as i64),
        Cell::I(s.n_m as i64),
        Cell::B(valid),
        Cell::S(String::new()),
    ];
    let problem = (!h.within(tol, tol, -1e-8) || st.residual > tol)
        .then(|| ("hygiene".to_string(), format!("steady state outside tolerance {tol:e}: {h:?}, residual {:e}", st.residual)));
    Ok(ok(vec![row], vec![], Some(st.residual), problem))
}

fn times(stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 | 1 => vec![0.0],
        _ => (0..steps).map(|j| stop * j as f64 / (steps - 1) as f64).collect(),
    }
}

fn wigner_header(s: &Setup, spec: &CatSpec, t: f64, w: &xkerr::WignerGrid) -> String {
    let h = serde_json::json!({
        "layout": "gnuplot nonuniform matrix: row 0 = [count, x...], rows 1.. = [p, W(x, p)...]",
        "quadratures": "x = (b + b^dagger)/sqrt(2), p = (b - b^dagger)/(i sqrt(2))",
        "grid": s.cat.grid,
        "n_m": s.n_m,
        "k": spec.k,
        "n": spec.n,
        "xi": [spec.xi.re, spec.xi.im],
        "tau": spec.tau,
        "t": t,
        "normalization": w.normalization(),
        "normalization_residual": (w.normalization() - 1.0).abs(),
        "negativity": catgen::wigner_negativity(w),
    });
    serde_json::to_string_pretty(&h).expect("header serializes")
}

fn cat(s: &Setup, index: usize, valid: bool) -> xkerr::Result<PointResult> {
    let spec = CatSpec::new(s.cat.k, s.cat.n, s.cat.xi, &s.eff)?;
    let ts = times(s.cat.t_stop_tau * spec.tau, s.cat.t_steps.unwrap_or(4));
    let traj = catgen::mechanical_trajectory(&s.eff, &s.bath, &spec, &ts, s.n_m)?;
    let mut rows = Vec::new();
    let mut artifacts = Vec::new();
    for (j, (t, rho)) in traj.times.iter().zip(&traj.states).enumerate() {
        let w = catgen::wigner(rho, s.cat.grid)?;
        let closed = catgen::evolve_closed(&s.eff, spec.n, spec.xi, *t, s.n_m)?;
        let name = format!("wigner_p{index:04}_f{j:03}");
        artifacts.push(Artifact { name: format!("{name}.csv"), contents: wigner_matrix(&w) });
        artifacts.push(Artifact { name: format!("{name}.json"), contents: wigner_header(s, &spec, *t, &w) });
        rows.push(vec![
            Cell::I(j as i64),
            Cell::F(*t),
            Cell::F(t / spec.tau),
            Cell::F(catgen::wigner_negativity(&w)),
            Cell::F(w.normalization()),
            Cell::F(catgen::fidelity(&closed, rho)),
            Cell::F(traj.max_trace_drift),
            Cell::S(format!("{name}.csv")),
            Cell::B(valid),
            Cell::S(String::new()),
        ]);
    }
    let problem = (traj.max_trace_drift > MAX_TRACE_DRIFT)
        .then(|| ("trace_drift".to_string(), format!("trace drift {:e}", traj.max_trace_drift)));
    Ok(ok(rows, artifacts, Some(traj.max_trace_drift), problem))
}

fn wigner(s: &Setup, index: usize, valid: bool) -> xkerr::Result<PointResult> {
    let spec = CatSpec::new(s.cat.k, s.cat.n, s.cat.xi, &s.eff)?;
    let t = s.cat.t_stop_tau * spec.tau;
    let psi = if s.cat.t_stop_tau == 1.0 {
        catgen::cat_state(&spec, &s.eff, s.n_m)?
    } else {
        catgen::evolve_closed(&s.eff, spec.n, spec.xi, t, s.n_m)?
    };
    let w = catgen::wigner_pure(&psi, s.cat.grid)?;
    let name = format!("wigner_p{index:04}");
    let row = vec![
        Cell::F(t),
        Cell::F(s.cat.t_stop_tau),
        Cell::F(catgen::wigner_negativity(&w)),
        Cell::F(w.normalization()),
        Cell::F(w.min()),
        Cell::S(format!("{name}.csv")),
        Cell::B(valid),
        Cell::S(String::new()),
    ];
    let artifacts = vec![
        Artifact { name: format!("{name}.csv"), contents: wigner_matrix(&w) },
        Artifact { name: format!("{name}.json"), contents: wigner_header(s, &spec, t, &w) },
    ];
    Ok(ok(vec![row], artifacts, None, None))
}

fn negativity(s: &Setup, valid: bool) -> xkerr::Result<PointResult> {
    let spec = CatSpec::new(s.cat.k, s.cat.n, s.cat.xi, &s.eff)?;
    let ts = times(s.cat.t_stop_tau * spec.tau, s.cat.t_steps.unwrap_or(101));
    let (points, traj) = catgen::negativity_trajectory(&s.eff, &s.bath, &spec, &ts, s.n_m, s.cat.grid)?;
    let rows = points
        .iter()
        .map(|p| {
            vec![
                Cell::F(p.t),
                Cell::F(p.t / spec.tau),
                Cell::F(p.negativity),
                Cell::F(traj.max_trace_drift),
                Cell::B(valid),
                Cell::S(String::new()),
            ]
        })
        .collect();
    let problem = (traj.max_trace_drift > MAX_TRACE_DRIFT)
        .then(|| ("trace_drift".to_string(), format!("trace drift {:e}", traj.max_trace_drift)));
    Ok(ok(rows, vec![], Some(traj.max_trace_drift), problem))
}

fn entangle(s: &Setup, tol: f64, valid: bool) -> xkerr::Result<PointResult> {
    let pt = gaussian::entanglement_point(&s.eff, &s.bath);
    let (e, b) = (&s.eff, &s.bath);
    let mf = pt.mean_field.as_ref();
    let rh = pt.routh_hurwitz.map(|r| r.conditions);
    let f = |g: fn(&xkerr::MeanField) -> f64| Cell::opt(mf.map(g));
    let rhc = |i: usize| Cell::opt(rh.map(|c| c[i]));
    let d_norm = diffusion_matrix(b, b.n_th(e)).norm();
    let rel = pt.lyapunov_residual.map(|r| r / d_norm);
    let row = vec![
        Cell::F(b.delta_c / e.omega_m),
        f(|m| m.alpha.norm()),
        f(|m| m.beta.re),
        f(|m| m.beta.im),
        f(|m| m.delta_eff),
        f(|m| m.omega_eff),
        f(|m| m.g_eff),
        Cell::B(pt.stable),
        rhc(0),
        rhc(1),
        rhc(2),
        rhc(3),
        Cell::opt(pt.log_negativity),
        Cell::opt(pt.frequency_ratio()),
        Cell::opt(rel),
        Cell::F(b.omega(e)),
        Cell::B(valid),
        Cell::S(String::new()),
    ];
    let problem = match (&pt.error_code, rel) {
        (Some(code), _) => Some((code.clone(), pt.error.clone().unwrap_or_default())),
        (None, Some(r)) if r > tol => Some(("lyapunov_residual".to_string(), format!("Lyapunov residual {r:e} of ‖D‖"))),
        _ => None,
    };
    Ok(ok(vec![row], vec![], rel, problem))
}

fn stability(s: &Setup, valid: bool) -> xkerr::Result<PointResult> {
    let (e, b) = (&s.eff, &s.bath);
    let mf = mean_field(e, b)?;
    let rh = routh_hurwitz(b.gamma, b.kappa, mf.omega_eff, mf.delta_eff, mf.g_eff);
    let lambda = max_real_eigenvalue(&drift_matrix(&mf, b));
    let row = vec![
        Cell::F(b.delta_c / e.omega_m),
        Cell::F(mf.delta_eff),
        Cell::F(mf.omega_eff),
        Cell::F(mf.g_eff),
        Cell::F(mf.omega_eff / mf.delta_eff),
        Cell::F(mf.alpha.norm()),
        Cell::F(mf.beta.norm()),
        Cell::B(rh.stable),
        Cell::F(rh.conditions[0]),
        Cell::F(rh.conditions[1]),
        Cell::F(rh.conditions[2]),
        Cell::F(rh.conditions[3]),
        Cell::F(lambda),
        Cell::B(valid),
        Cell::S(String::new()),
    ];
    Ok(ok(vec![row], vec![], Some(mf.residual), None))
}
