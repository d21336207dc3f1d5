//! Command implementations behind the `fdjam` binary.
//!
//! Each command returns a serializable report; the writers prepend a header
//! with the tool version and the fully resolved configuration so that every
//! output file can be regenerated on its own.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{comparison_metrics, sop_approx, sop_exact, ComparisonMetrics};
use crate::config::{Config, SweepSpec};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_with, Diagnostics, Forced, Optimized};
use crate::params::{SwitchedSolution, SystemParams};
use crate::sim::{empirical_sop, run_online, SimReport};
use crate::units::{dbm_to_watts, linear_to_db, watts_to_dbm};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Config,
}

impl Header {
    pub fn new(command: &str, config: &Config) -> Self {
        Self {
            tool: "fdjam".into(),
            version: VERSION.into(),
            command: command.into(),
            config: config.clone(),
        }
    }
}

/// Scenario in both linear and logarithmic units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub linear: SystemParams<f64>,
    pub sigma_b2_dbm: f64,
    pub sigma_e2_dbm: f64,
    pub rho_db: f64,
    pub p_a_max_dbm: f64,
    pub p_b_max_dbm: f64,
}

impl From<&SystemParams<f64>> for SystemReport {
    fn from(p: &SystemParams<f64>) -> Self {
        Self {
            linear: *p,
            sigma_b2_dbm: watts_to_dbm(p.sigma_b2),
            sigma_e2_dbm: watts_to_dbm(p.sigma_e2),
            rho_db: linear_to_db(p.rho),
            p_a_max_dbm: watts_to_dbm(p.p_a_max),
            p_b_max_dbm: watts_to_dbm(p.p_b_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub header: Header,
    pub system: SystemReport,
    pub solution: SwitchedSolution<f64>,
    pub mu_b_db: f64,
    pub p_b_dbm: f64,
    pub comparison: ComparisonMetrics<f64>,
    pub diagnostics: Diagnostics<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SopRow {
    pub lambda_e: f64,
    pub d_ab: f64,
    pub sop_exact: Option<f64>,
    pub sop_approx: Option<f64>,
    pub sop_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub variable: String,
    pub value: f64,
    pub value_db: Option<f64>,
    pub omega_s: Option<f64>,
    pub omega_fd: Option<f64>,
    pub omega_hd: Option<f64>,
    pub omega_fd_comp: Option<f64>,
    pub omega_hd_comp: Option<f64>,
    pub p_fd: Option<f64>,
    pub p_hd: Option<f64>,
    pub r_c_fd: Option<f64>,
    pub r_s_fd: Option<f64>,
    pub mu_a_fd: Option<f64>,
    pub r_c_hd: Option<f64>,
    pub r_s_hd: Option<f64>,
    pub mu_a_hd: Option<f64>,
    pub p_b: Option<f64>,
    pub p_b_dbm: Option<f64>,
    pub mu_b: Option<f64>,
    pub mu_b_db: Option<f64>,
    pub fd_degenerate: Option<bool>,
    pub fd_capped: Option<bool>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub header: Header,
    pub system: SystemReport,
    pub solution: SwitchedSolution<f64>,
    pub predicted: ComparisonMetrics<f64>,
    pub report: SimReport,
}

fn optimize_config(cfg: &Config, forced: Forced<f64>) -> Result<(SystemParams<f64>, Optimized<f64>)> {
    let params = cfg.system.to_params()?;
    let grid = cfg.grid.to_grid()?;
    Ok((params, optimize_with(&params, &grid, forced)?))
}

pub fn cmd_optimize(cfg: &Config) -> Result<OptimizeReport> {
    let (params, o) = optimize_config(cfg, Forced::default())?;
    let s = o.solution;
    Ok(OptimizeReport {
        header: Header::new("optimize", cfg),
        system: SystemReport::from(&params),
        mu_b_db: linear_to_db(s.mu_b),
        p_b_dbm: watts_to_dbm(s.fd.p_b),
        comparison: comparison_metrics(&s, &params),
        solution: s,
        diagnostics: o.diagnostics,
    })
}

/// Exact, approximate and Monte Carlo SOP over the configured `lambda_e`
/// and `d_ab` grid. `trials = 0` skips the Monte Carlo column.
pub fn cmd_validate_sop(cfg: &Config, trials: u64, seed: u64) -> Result<Vec<SopRow>> {
    let v = &cfg.validate_sop;
    let base = cfg.system.to_params_unchecked();
    let lambdas = v.lambdas()?;
    let (p_a, p_b) = (dbm_to_watts(v.p_a_dbm), dbm_to_watts(v.p_b_dbm));
    // Any rate pair with the configured gap gives the same SOP.
    let (r_c, r_s) = (v.rate_gap + 1.0, 1.0);
    let jobs: Vec<(f64, f64)> = v
        .d_ab
        .iter()
        .flat_map(|&d| lambdas.iter().map(move |&l| (d, l)))
        .collect();
    let rows = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(d_ab, lambda_e))| {
            let p = SystemParams { d_ab, lambda_e, ..base };
            let mut row = SopRow {
                lambda_e,
                d_ab,
                sop_exact: None,
                sop_approx: None,
                sop_mc: None,
                mc_stderr: None,
                error: String::new(),
            };
            let mut errors = Vec::new();
            match sop_exact(p_a, p_b, r_c, r_s, &p) {
                Ok(x) => row.sop_exact = Some(x),
                Err(e) => errors.push(e.to_string()),
            }
            match sop_approx(p_a, p_b, r_c, r_s, &p) {
                Ok(x) => row.sop_approx = Some(x),
                Err(e) => errors.push(e.to_string()),
            }
            if trials > 0 {
                // Distinct seed per point keeps rows independent.
                match empirical_sop(p_a, p_b, r_c, r_s, &p, trials, v.r_cut, seed.wrapping_add(i as u64)) {
                    Ok(e) => {
                        row.sop_mc = Some(e.value);
                        row.mc_stderr = Some(e.stderr);
                    }
                    Err(e) => errors.push(e.to_string()),
                }
            }
            row.error = errors.join("; ");
            row
        })
        .collect();
    Ok(rows)
}

/// One optimizer run per sweep point; failures are recorded per row.
pub fn cmd_sweep(cfg: &Config, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let base = cfg.system.to_params_unchecked();
    let grid = cfg.grid.to_grid()?;
    let points = spec.points(&base)?;
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(index, pt)| {
            let mut row = SweepRow {
                index,
                variable: spec.variable.clone(),
                value: pt.value,
                value_db: pt.value_db,
                ..Default::default()
            };
            let forced = Forced { mu_b: pt.forced_mu_b, p_b: pt.forced_p_b };
            match optimize_with(&pt.params, &grid, forced) {
                Ok(o) => {
                    let s = o.solution;
                    let c = comparison_metrics(&s, &pt.params);
                    row.omega_s = Some(s.omega_s);
                    row.omega_fd = Some(s.omega_fd);
                    row.omega_hd = Some(s.omega_hd);
                    row.omega_fd_comp = Some(c.omega_fd_comp);
                    row.omega_hd_comp = Some(c.omega_hd_comp);
                    row.p_fd = Some(c.p_fd);
                    row.p_hd = Some(c.p_hd);
                    row.r_c_fd = Some(s.fd.r_c);
                    row.r_s_fd = Some(s.fd.r_s);
                    row.mu_a_fd = Some(s.fd.mu_a);
                    row.r_c_hd = Some(s.hd.r_c);
                    row.r_s_hd = Some(s.hd.r_s);
                    row.mu_a_hd = Some(s.hd.mu_a);
                    row.p_b = Some(s.fd.p_b);
                    row.p_b_dbm = Some(watts_to_dbm(s.fd.p_b));
                    row.mu_b = Some(s.mu_b);
                    row.mu_b_db = Some(linear_to_db(s.mu_b));
                    row.fd_degenerate = Some(s.fd_degenerate);
                    row.fd_capped = Some(s.fd_capped);
                }
                Err(e) => row.error = e.to_string(),
            }
            row
        })
        .collect();
    Ok(rows)
}

/// Reads a solution from either a bare [`SwitchedSolution`] JSON object or
/// the report written by `optimize`.
pub fn load_solution(path: &Path) -> Result<SwitchedSolution<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let inner = value.get("solution").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_simulate(
    cfg: &Config,
    solution: Option<SwitchedSolution<f64>>,
    n_slots: u64,
    seed: u64,
) -> Result<SimulateReport> {
    let params = cfg.system.to_params()?;
    let solution = match solution {
        Some(s) => s.validate(&params)?,
        None => optimize_config(cfg, Forced::default())?.1.solution,
    };
    let report = run_online(&solution, &params, n_slots, cfg.sim.r_cut, seed)?;
    Ok(SimulateReport {
        header: Header::new("simulate", cfg),
        system: SystemReport::from(&params),
        predicted: comparison_metrics(&solution, &params),
        solution,
        report,
    })
}

pub fn write_json<W: Write, S: Serialize>(out: &mut W, value: &S) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// CSV with a `#`-commented header block carrying the version and config.
pub fn write_csv<W: Write, R: Serialize>(out: &mut W, header: &Header, rows: &[R]) -> Result<()> {
    writeln!(out, "# {} {} {}", header.tool, header.version, header.command)?;
    for line in header.config.to_toml().lines() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(&mut *out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
