//! The run commands. Each writes into a run directory it owns and returns a
//! report; nothing here touches process state.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use super::config::{EstimateConfig, OracleConfig, PointGrid, SimulateConfig, SolveConfig};
use crate::error::{Error, Result};
use crate::laplace::{solution_with_curve, BoundaryCurve};
use crate::num::linspace;
use crate::paths::{
    build_bullet, invert_path, mc_solution_times, sample_reflected_bm, sample_subordinator, stream, time_change,
    Component, SamplerMode,
};
use crate::pde::{solve_heat_nonlocal_bc, Grid1D, SolverOptions};
use crate::problem::Problem;
use crate::symbols::BoundaryClass;

/// One row of a values table; `se` for Monte Carlo runs, `error` for oracle runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ValueRow {
    pub t: f64,
    pub x: f64,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
}

pub const VALUES_FILE: &str = "values.csv";

pub fn write_values(dir: &Path, rows: &[ValueRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join(VALUES_FILE))?));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a values table, from a file or from `values.csv` inside a run directory.
pub fn read_values(path: &Path) -> Result<Vec<ValueRow>> {
    let file = if path.is_dir() { path.join(VALUES_FILE) } else { path.to_path_buf() };
    let mut r = csv::Reader::from_path(&file)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemSummary {
    pub phi: String,
    pub psi: String,
    pub eta: f64,
    pub boundary_class: BoundaryClass,
    /// lim Ψ(λ)/λ as λ ↓ 0.
    pub c: f64,
}

impl ProblemSummary {
    pub fn of(p: &Problem) -> Self {
        let (boundary_class, c) = p.psi.boundary_behavior_class();
        Self {
            phi: p.phi.name(),
            psi: p.psi.name(),
            eta: p.eta,
            boundary_class,
            c,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSummary>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    /// Set when a result should not be trusted at face value.
    pub reliability_flag: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl RunReport {
    fn new(command: &str, problem: Option<&Problem>) -> Self {
        Self {
            command: command.into(),
            problem: problem.map(ProblemSummary::of),
            files: Vec::new(),
            warnings: Vec::new(),
            reliability_flag: false,
            details: None,
        }
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Config("seed is required for stochastic runs (config \"seed\" or --seed)".into()))
}

pub fn estimate(cfg: &EstimateConfig, dir: &Path) -> Result<RunReport> {
    cfg.points.validate()?;
    let seed = require_seed(cfg.seed)?;
    let p = cfg.problem.build()?;
    let mc = cfg.mc.with_seed(seed);
    let mut rows = Vec::new();
    let mut per_x = Vec::new();
    for &x in &cfg.points.xs {
        per_x.push(mc_solution_times(&p, &cfg.points.times, x, &mc)?);
    }
    for (i, &t) in cfg.points.times.iter().enumerate() {
        for (j, &x) in cfg.points.xs.iter().enumerate() {
            let e = per_x[j][i];
            rows.push(ValueRow {
                t,
                x,
                value: e.mean,
                se: Some(e.se),
                error: None,
            });
        }
    }
    write_values(dir, &rows)?;
    let mut report = RunReport::new("estimate", Some(&p));
    report.files.push(VALUES_FILE.into());
    report.details = Some(serde_json::json!({ "paths": mc.paths, "dt": mc.dt, "seed": seed }));
    Ok(report)
}

pub fn oracle(cfg: &OracleConfig, dir: &Path) -> Result<RunReport> {
    cfg.points.validate()?;
    let p = cfg.problem.build()?;
    let rows = oracle_rows(&p, &cfg.points)?;
    write_values(dir, &rows)?;
    let mut report = RunReport::new("oracle", Some(&p));
    report.files.push(VALUES_FILE.into());
    let worst = rows.iter().filter_map(|r| r.error).fold(0.0, f64::max);
    report.details = Some(serde_json::json!({ "max_error_estimate": worst }));
    Ok(report)
}

fn oracle_rows(p: &Problem, points: &PointGrid) -> Result<Vec<ValueRow>> {
    let t_max = points.t_max();
    let curve = if t_max > 0.0 { Some(BoundaryCurve::new(p, t_max)?) } else { None };
    let mut rows = Vec::new();
    for &t in &points.times {
        for &x in &points.xs {
            let (value, error) = match &curve {
                Some(c) if t > 0.0 => {
                    let o = solution_with_curve(p, c, t, x)?;
                    (o.value, o.error)
                }
                _ => (p.f.eval(x), 0.0),
            };
            rows.push(ValueRow {
                t,
                x,
                value,
                se: None,
                error: Some(error),
            });
        }
    }
    Ok(rows)
}

pub fn solve(cfg: &SolveConfig, dir: &Path) -> Result<RunReport> {
    cfg.points.validate()?;
    let p = cfg.problem.build()?;
    let datum = &cfg.problem.datum;
    let x_max = match cfg.grid.x_max {
        Some(x) => x,
        None => {
            let s = datum.effective_support();
            if s.is_finite() { (2.0 * s).max(20.0) } else { 20.0 }
        }
    };
    if let Some(&x) = cfg.points.xs.iter().find(|&&x| x > x_max) {
        return Err(Error::Config(format!("x = {x} lies beyond X_max = {x_max}")));
    }
    if !(cfg.grid.hx > 0.0) {
        return Err(Error::Config("grid.hx must be positive".into()));
    }
    let cells = (x_max / cfg.grid.hx).round().max(2.0) as usize;
    let horizon = cfg.points.t_max().max(f64::MIN_POSITIVE);
    let grid = match cfg.grid.dt {
        Some(dt) => {
            let steps = (horizon / dt).round().max(1.0);
            Grid1D::new(x_max, cells, horizon / steps, horizon)?
        }
        None => Grid1D::stable(x_max, cells, horizon)?,
    };
    let opts = SolverOptions {
        far_value: datum.far_value(),
        save_times: cfg.points.times.clone(),
        tail_tol: cfg.tail_tol,
    };
    let u = solve_heat_nonlocal_bc(&p, &grid, &opts)?;
    let mut rows = Vec::new();
    for &t in &cfg.points.times {
        for &x in &cfg.points.xs {
            rows.push(ValueRow {
                t,
                x,
                value: u.at(t, x)?,
                se: None,
                error: None,
            });
        }
    }
    write_values(dir, &rows)?;
    u.write_csv(BufWriter::new(File::create(dir.join("field.csv"))?))?;
    let mut report = RunReport::new("solve", Some(&p));
    report.files.extend([VALUES_FILE.to_string(), "field.csv".into()]);
    if cfg.binary {
        u.write_binary(&dir.join("field.bin"))?;
        report.files.extend(["field.bin".to_string(), "field.bin.json".into()]);
    }
    report.reliability_flag = !u.warnings.is_empty();
    report.warnings = u.warnings.clone();
    report.details = Some(serde_json::json!({
        "x_max": grid.x_max, "cells": grid.cells, "dt": grid.dt, "steps": grid.steps()
    }));
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct PathSummary {
    pub symbol: String,
    pub path: usize,
    pub file: String,
    pub final_value: f64,
    /// Largest single increment over the whole rise.
    pub largest_step_share: f64,
}

/// Share of H_T carried by the largest step increment of the path.
pub fn largest_step_share(values: &[f64]) -> f64 {
    let total = *values.last().unwrap_or(&0.0);
    if !(total > 0.0) {
        return 0.0;
    }
    let top = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    top / total
}

pub fn simulate(cfg: &SimulateConfig, dir: &Path) -> Result<RunReport> {
    let seed = require_seed(cfg.seed)?;
    if !(cfg.horizon > 0.0 && cfg.step > 0.0 && cfg.level_max > 0.0) || cfg.inverse_points < 2 {
        return Err(Error::Config("horizon, step and level_max must be positive, inverse_points ≥ 2".into()));
    }
    let mut report = RunReport::new("simulate", None);
    let mut summaries = Vec::new();
    for (i, sym) in cfg.symbols.iter().enumerate() {
        for j in 0..cfg.paths_per_symbol {
            let index = (i * cfg.paths_per_symbol + j) as u64;
            let mut rng = stream(seed, index, Component::Phi);
            let path = sample_subordinator(sym, cfg.horizon, cfg.step, SamplerMode::Exact, &mut rng)?;
            let name = format!("subordinator_{i}_{j}.csv");
            path.write_csv(BufWriter::new(File::create(dir.join(&name))?))?;
            let h_end = *path.values.last().unwrap_or(&0.0);
            let inv = format!("inverse_{i}_{j}.csv");
            write_inverse(&path, cfg.level_max.min(h_end), cfg.inverse_points, &dir.join(&inv))?;
            summaries.push(PathSummary {
                symbol: sym.name(),
                path: j,
                file: name.clone(),
                final_value: h_end,
                largest_step_share: largest_step_share(&path.values),
            });
            report.files.extend([name, inv]);
        }
    }
    if let Some(b) = &cfg.bullet {
        let index = (cfg.symbols.len() * cfg.paths_per_symbol) as u64;
        let mut rb = stream(seed, index, Component::Brownian);
        let mut rphi = stream(seed, index, Component::Phi);
        let mut rpsi = stream(seed, index, Component::Psi);
        let reflected = sample_reflected_bm(b.x0, b.dt, b.horizon, b.reflection, &mut rb)?;
        let bullet = build_bullet(&b.phi, reflected, b.clock_step, &mut rphi)?;
        let bullet = time_change(bullet, b.eta, &b.psi, &mut rpsi)?;
        bullet.write_csv(BufWriter::new(File::create(dir.join("bullet.csv"))?))?;
        report.files.push("bullet.csv".into());
        let jumps = bullet.levels.windows(2).filter(|w| w[1] > w[0]).count();
        report.details = Some(serde_json::json!({ "paths": summaries, "bullet_level_rises": jumps }));
    } else {
        report.details = Some(serde_json::json!({ "paths": summaries }));
    }
    Ok(report)
}

/// L on an even grid of levels in [0, top); H is flat-free so L is continuous.
fn write_inverse(path: &crate::paths::MonotonePath, top: f64, n: usize, file: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(file)?));
    w.write_record(["t", "value"])?;
    for level in linspace(0.0, top, n) {
        if level >= top && level > 0.0 {
            break;
        }
        w.write_record([level.to_string(), invert_path(path, level)?.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
