//! Discretization sizes of the core loop with and without pruning, next to
//! the uniform grid a fixed-discretization approach would need.

use std::fmt::Write as _;

use serde::Serialize;

use crate::core_loop::{run_core, CoreConfig};
use crate::discretization::Discretization;
use crate::error::{config, Result};
use crate::problem::SipProblem;
use crate::schedule::{AuxSchedule, ObjSchedule, ToleranceSchedule};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Restriction level of both runs.
    pub eps: f64,
    /// Iterations per run; the `eps = 0` runs typically use all of them.
    pub iterations: usize,
    /// Sampled points added per iteration on top of the violator.
    pub extra_violators: usize,
    /// Worst-case constraint error the grid baseline must guarantee.
    pub grid_tol: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            eps: 0.0,
            iterations: 50,
            extra_violators: 1,
            grid_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub card_y_pruned: usize,
    pub card_y_growing: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub max_pruned: usize,
    pub max_growing: usize,
    /// Points of a uniform grid with spacing `grid_tol / L_y` per axis.
    pub grid_size: f64,
    pub final_f_pruned: f64,
    pub final_f_growing: f64,
}

/// Size of the uniform grid on `Y` whose spacing keeps the constraint error
/// of the coarsest family below `tol`.
pub fn grid_baseline_size(problem: &SipProblem, tol: f64) -> f64 {
    let l = problem.max_lipschitz_y();
    let yd = problem.y_domain();
    yd.lower()
        .iter()
        .zip(yd.upper())
        .map(|(lo, hi)| {
            let w = hi - lo;
            if l == 0.0 || w == 0.0 {
                1.0
            } else {
                (l * w / tol).ceil() + 1.0
            }
        })
        .product()
}

fn sizes(problem: &SipProblem, cfg: &BenchConfig, rho: f64) -> Result<(Vec<usize>, f64)> {
    let schedule = ToleranceSchedule::new(ObjSchedule::zero(), AuxSchedule::default());
    let mut core = CoreConfig::new(cfg.eps, rho, schedule, Discretization::empty());
    core.max_iters = cfg.iterations;
    core.extra_violators = cfg.extra_violators;
    let run = run_core(problem, &core)?;
    let sizes = run.trace.rows().iter().map(|r| r.card_y).collect();
    Ok((
        sizes,
        run.objective_values.last().copied().unwrap_or(f64::NAN),
    ))
}

/// Runs the core loop with `rho = 0` and `rho = inf` on the same inputs.
pub fn run_bench(problem: &SipProblem, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.iterations == 0 {
        return Err(config("bench needs at least one iteration"));
    }
    if !(cfg.grid_tol > 0.0) {
        return Err(config(format!(
            "grid tolerance must be > 0, got {}",
            cfg.grid_tol
        )));
    }
    let (pruned, final_f_pruned) = sizes(problem, cfg, 0.0)?;
    let (growing, final_f_growing) = sizes(problem, cfg, f64::INFINITY)?;
    let n = pruned.len().max(growing.len());
    let at = |v: &[usize], k: usize| v.get(k).or(v.last()).copied().unwrap_or(0);
    let rows = (0..n)
        .map(|k| BenchRow {
            k,
            card_y_pruned: at(&pruned, k),
            card_y_growing: at(&growing, k),
        })
        .collect();
    Ok(BenchReport {
        rows,
        max_pruned: pruned.iter().copied().max().unwrap_or(0),
        max_growing: growing.iter().copied().max().unwrap_or(0),
        grid_size: grid_baseline_size(problem, cfg.grid_tol),
        final_f_pruned,
        final_f_growing,
    })
}

impl BenchReport {
    /// Whitespace-aligned table, one row per iteration, then a summary.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>6} {:>12} {:>12}", "k", "|Y| rho=0", "|Y| rho=inf");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>6} {:>12} {:>12}",
                r.k, r.card_y_pruned, r.card_y_growing
            );
        }
        let _ = writeln!(
            s,
            "{:>6} {:>12} {:>12}",
            "max", self.max_pruned, self.max_growing
        );
        let _ = writeln!(s, "grid baseline: {} points", self.grid_size);
        let _ = writeln!(
            s,
            "final f: rho=0 {:.6e}, rho=inf {:.6e}",
            self.final_f_pruned, self.final_f_growing
        );
        s
    }
}
