//! Certified solves of the discretized restricted problems
//!
//! ```text
//! minimize f(x) over x in X  subject to  g_i(x, y) <= -eps  for y in Y*
//! ```
//!
//! with a finite index set `Y*`. The solver runs in two phases, both
//! Kelley-style cutting-plane loops on the master LP of [`crate::master`]:
//!
//! 1. Feasibility: minimize `phi(x) = max_{i,y} g_i(x, y) + eps` over `X`.
//!    A master value above zero certifies infeasibility; a point with
//!    `phi <= feastol` is the anchor for phase 2.
//! 2. Optimization: cut the objective at master solutions. Master solutions
//!    that violate a nonlinear constraint are pulled back toward the anchor
//!    by bisection, which yields the feasible upper bounds; the master value
//!    gives the lower bound.
//!
//! Objective cuts are valid for every discretization, so a [`FiniteSolver`]
//! keeps them in a pool across solves.

use std::collections::HashSet;

use crate::discretization::Discretization;
use crate::error::{invalid, Result};
use crate::master::{Master, MasterStatus};
use crate::problem::SipProblem;
use crate::qp::Qp;

/// Cutting-plane iterations without a 0.1% gap reduction before giving up.
const STALL_ITERATIONS: usize = 500;

/// Constraint satisfaction slack for points reported as feasible.
pub const FEASTOL: f64 = 1e-10;

/// Relative floor applied to every optimality-gap request.
pub const GAP_FLOOR: f64 = 1e-12;

/// The discretized restriction `SIP_{-eps}(Y*)`.
#[derive(Clone, Copy, Debug)]
pub struct DiscretizedProblem<'a> {
    pub base: &'a SipProblem,
    pub eps: f64,
    pub points: &'a Discretization,
}

impl<'a> DiscretizedProblem<'a> {
    pub fn new(base: &'a SipProblem, eps: f64, points: &'a Discretization) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid(format!(
                "restriction parameter must be >= 0, got {eps}"
            )));
        }
        for y in points.points() {
            if !base.y_domain().contains(y, 0.0) {
                return Err(invalid(format!("index point {y:?} lies outside Y")));
            }
        }
        Ok(Self { base, eps, points })
    }

    /// `max_{i, y in Y*} g_i(x, y) + eps`, or `-inf` with no points.
    pub fn restricted_violation(&self, x: &[f64]) -> f64 {
        self.points
            .points()
            .iter()
            .map(|y| self.base.max_constraint(x, y) + self.eps)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn pair_count(&self) -> u64 {
        (self.points.len() * self.base.constraints().len()) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct DiscretizedSolveResult {
    pub status: SolveStatus,
    /// Feasible point (status `Feasible`, or `Undecided` once phase 1 found one).
    pub x: Option<Vec<f64>>,
    /// `f(x)`, `+inf` without a point.
    pub upper: f64,
    /// Certified lower bound on the optimal value (`+inf` when infeasible).
    pub lower: f64,
    /// Requested gap.
    pub gap_request: f64,
    /// Gap actually enforced: the request raised to the relative floor.
    pub gap_target: f64,
    pub cutting_plane_iterations: usize,
    pub lp_pivots: u64,
    pub evaluations: u64,
}

/// Iteration caps for one finite solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveBudget {
    /// Cutting-plane iterations per phase.
    pub max_iterations: usize,
    /// Simplex pivots per master solve.
    pub max_pivots: u64,
}

impl Default for SolveBudget {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            max_pivots: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FiniteSolverOptions {
    pub feastol: f64,
    pub gap_floor: f64,
    /// Keep objective cuts between solves.
    pub reuse_cuts: bool,
}

impl Default for FiniteSolverOptions {
    fn default() -> Self {
        Self {
            feastol: FEASTOL,
            gap_floor: GAP_FLOOR,
            reuse_cuts: true,
        }
    }
}

#[derive(Clone, Debug)]
struct Cut {
    at: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
}

/// Finite solver holding a pool of objective cuts for one problem.
#[derive(Clone, Debug, Default)]
pub struct FiniteSolver {
    pub options: FiniteSolverOptions,
    pool: Vec<Cut>,
    seen: HashSet<Vec<u64>>,
}

enum PhaseOne {
    Feasible { anchor: Vec<f64> },
    Infeasible,
    Undecided,
}

struct Counters {
    iterations: usize,
    pivots: u64,
    evaluations: u64,
}

impl FiniteSolver {
    pub fn new(options: FiniteSolverOptions) -> Self {
        Self {
            options,
            pool: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn pool_size(&self) -> usize {
        self.pool.len()
    }

    fn remember(&mut self, problem: &SipProblem, at: &[f64]) -> (f64, Vec<f64>) {
        let value = problem.objective().value(at);
        let grad = problem.objective().subgradient(at);
        if self.options.reuse_cuts {
            let key: Vec<u64> = at.iter().map(|v| v.to_bits()).collect();
            if self.seen.insert(key) {
                self.pool.push(Cut {
                    at: at.to_vec(),
                    value,
                    grad: grad.clone(),
                });
            }
        }
        (value, grad)
    }

    /// Decides feasibility of `dp`. An undecided phase 1 is reported as
    /// infeasible: callers respond by shrinking `eps`, which is always safe.
    pub fn check_feasibility(
        &mut self,
        dp: &DiscretizedProblem<'_>,
        budget: SolveBudget,
    ) -> Result<Feasibility> {
        let mut counters = Counters {
            iterations: 0,
            pivots: 0,
            evaluations: 0,
        };
        Ok(match self.phase_one(dp, budget, &mut counters)? {
            PhaseOne::Feasible { .. } => Feasibility::Feasible,
            PhaseOne::Infeasible | PhaseOne::Undecided => Feasibility::Infeasible,
        })
    }

    fn phase_one(
        &self,
        dp: &DiscretizedProblem<'_>,
        budget: SolveBudget,
        counters: &mut Counters,
    ) -> Result<PhaseOne> {
        let problem = dp.base;
        let xd = problem.x_domain();
        xd.check_point(&xd.center(), "x")?;
        if dp.points.is_empty() {
            return Ok(PhaseOne::Feasible {
                anchor: xd.center(),
            });
        }
        let feastol = self.options.feastol;
        let mut master = Master::new(xd.lower(), xd.upper());
        let start = xd.center();
        let mut nonlinear = Vec::new();
        for y in dp.points.points() {
            for fam in problem.constraints() {
                let g = fam.value(&start, y);
                let s = fam.subgradient_x(&start, y);
                counters.evaluations += 1;
                master.add_epigraph_cut(&start, g + dp.eps, &s);
                if !fam.affine_in_x() {
                    nonlinear.push((fam.clone(), y.clone()));
                }
            }
        }
        let mut best = f64::INFINITY;
        let mut best_x = start.clone();
        let mut lower = f64::NEG_INFINITY;
        for _ in 0..budget.max_iterations.max(1) {
            counters.iterations += 1;
            let sol = master.solve(budget.max_pivots);
            counters.pivots = master.pivots();
            if sol.status == MasterStatus::Stalled {
                break;
            }
            lower = lower.max(sol.lower_bound);
            let phi = dp.restricted_violation(&sol.x);
            counters.evaluations += dp.pair_count();
            if phi < best {
                best = phi;
                best_x = sol.x.clone();
            }
            if best <= feastol && (lower >= -feastol || best <= 0.5 * lower || nonlinear.is_empty())
            {
                return Ok(PhaseOne::Feasible { anchor: best_x });
            }
            if lower > 0.0 && best > feastol {
                return Ok(PhaseOne::Infeasible);
            }
            if nonlinear.is_empty() {
                // Exact rows: the master value is the true minimum.
                break;
            }
            let mut added = false;
            for (fam, y) in &nonlinear {
                let g = fam.value(&sol.x, y) + dp.eps;
                if g > sol.t + 1e-14 * (1.0 + g.abs()) {
                    master.add_epigraph_cut(&sol.x, g, &fam.subgradient_x(&sol.x, y));
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
        Ok(if best <= feastol {
            PhaseOne::Feasible { anchor: best_x }
        } else if lower > 0.0 {
            PhaseOne::Infeasible
        } else {
            PhaseOne::Undecided
        })
    }

    /// Solves `dp` to an optimality gap of `delta_bar` (raised to the
    /// relative floor), or certifies infeasibility.
    pub fn solve(
        &mut self,
        dp: &DiscretizedProblem<'_>,
        delta_bar: f64,
        budget: SolveBudget,
    ) -> Result<DiscretizedSolveResult> {
        if !(delta_bar >= 0.0) {
            return Err(invalid(format!(
                "gap request must be >= 0, got {delta_bar}"
            )));
        }
        let problem = dp.base;
        let xd = problem.x_domain();
        let feastol = self.options.feastol;
        let mut counters = Counters {
            iterations: 0,
            pivots: 0,
            evaluations: 0,
        };
        let anchor = match self.phase_one(dp, budget, &mut counters)? {
            PhaseOne::Feasible { anchor } => anchor,
            PhaseOne::Infeasible => {
                return Ok(DiscretizedSolveResult {
                    status: SolveStatus::Infeasible,
                    x: None,
                    upper: f64::INFINITY,
                    lower: f64::INFINITY,
                    gap_request: delta_bar,
                    gap_target: delta_bar,
                    cutting_plane_iterations: counters.iterations,
                    lp_pivots: counters.pivots,
                    evaluations: counters.evaluations,
                })
            }
            PhaseOne::Undecided => {
                return Ok(DiscretizedSolveResult {
                    status: SolveStatus::Undecided,
                    x: None,
                    upper: f64::INFINITY,
                    lower: f64::NEG_INFINITY,
                    gap_request: delta_bar,
                    gap_target: delta_bar,
                    cutting_plane_iterations: counters.iterations,
                    lp_pivots: counters.pivots,
                    evaluations: counters.evaluations,
                })
            }
        };
        let phase_one_pivots = counters.pivots;

        let mut rows = Vec::new();
        let mut nonlinear = Vec::new();
        for y in dp.points.points() {
            for fam in problem.constraints() {
                let s = fam.subgradient_x(&anchor, y);
                let g = fam.value(&anchor, y);
                counters.evaluations += 1;
                let b = -dp.eps - g + s.iter().zip(&anchor).map(|(a, x)| a * x).sum::<f64>();
                rows.push((s, b));
                if !fam.affine_in_x() {
                    nonlinear.push((fam.clone(), y.clone()));
                }
            }
        }

        let fa = problem.objective().value(&anchor);
        let mut upper = fa;
        let mut best_x = anchor.clone();
        let mut lower = f64::NEG_INFINITY;
        if nonlinear.is_empty() {
            if let Some(quad) = problem.objective().as_quadratic() {
                let qp = Qp {
                    q: quad.matrix(),
                    c: quad.linear(),
                    d: quad.constant(),
                    lower: xd.lower(),
                    upper: xd.upper(),
                };
                let cap = 50 * (rows.len() + 2 * xd.dim()) + 100;
                if let Some(sol) = qp.solve(&rows, &anchor, cap) {
                    counters.iterations += sol.iterations;
                    counters.evaluations += dp.pair_count();
                    if dp.restricted_violation(&sol.x) <= feastol {
                        let fx = problem.objective().value(&sol.x);
                        if fx < upper {
                            upper = fx;
                            best_x = sol.x;
                        }
                        lower = sol.lower_bound.min(upper);
                        let gap_target =
                            delta_bar.max(self.options.gap_floor * upper.abs().max(1.0));
                        if upper - lower <= gap_target {
                            return Ok(DiscretizedSolveResult {
                                status: SolveStatus::Feasible,
                                x: Some(best_x),
                                upper,
                                lower,
                                gap_request: delta_bar,
                                gap_target,
                                cutting_plane_iterations: counters.iterations,
                                lp_pivots: counters.pivots,
                                evaluations: counters.evaluations,
                            });
                        }
                    }
                }
            }
        }

        let mut master = Master::new(xd.lower(), xd.upper());
        for cut in &self.pool {
            master.add_epigraph_cut(&cut.at, cut.value, &cut.grad);
        }
        let (fa, ga) = self.remember(problem, &anchor);
        master.add_epigraph_cut(&anchor, fa, &ga);
        for (s, b) in &rows {
            master.add_constraint(s, *b);
        }

        let mut gap_target = delta_bar.max(self.options.gap_floor * upper.abs().max(1.0));
        let mut status = SolveStatus::Undecided;
        let mut best_gap = f64::INFINITY;
        let mut since_progress = 0;
        for _ in 0..budget.max_iterations.max(1) {
            counters.iterations += 1;
            let sol = master.solve(budget.max_pivots);
            counters.pivots = phase_one_pivots + master.pivots();
            match sol.status {
                MasterStatus::Optimal => {}
                // The anchor satisfies every row, so these are numerical.
                MasterStatus::Infeasible | MasterStatus::Stalled => break,
            }
            lower = lower.max(sol.lower_bound);

            let viol = dp.restricted_violation(&sol.x);
            counters.evaluations += dp.pair_count();
            let candidate = if viol <= feastol {
                sol.x.clone()
            } else {
                let c = pull_back(dp, &anchor, &sol.x, feastol);
                counters.evaluations += 60 * dp.pair_count();
                c
            };
            let (fc, _) = self.remember(problem, &candidate);
            if fc < upper {
                upper = fc;
                best_x = candidate.clone();
            }
            gap_target = delta_bar.max(self.options.gap_floor * upper.abs().max(1.0));
            if upper - lower <= gap_target {
                status = SolveStatus::Feasible;
                break;
            }
            if upper - lower < 0.999 * best_gap {
                best_gap = upper - lower;
                since_progress = 0;
            } else {
                since_progress += 1;
                if since_progress >= STALL_ITERATIONS {
                    break;
                }
            }
            let (fx, gx) = self.remember(problem, &sol.x);
            master.add_epigraph_cut(&sol.x, fx, &gx);
            if candidate != sol.x {
                let g = problem.objective().subgradient(&candidate);
                master.add_epigraph_cut(&candidate, fc, &g);
            }
            for (fam, y) in &nonlinear {
                let g = fam.value(&sol.x, y) + dp.eps;
                if g > feastol {
                    let s = fam.subgradient_x(&sol.x, y);
                    let b = -dp.eps - fam.value(&sol.x, y)
                        + s.iter().zip(&sol.x).map(|(a, x)| a * x).sum::<f64>();
                    master.add_constraint(&s, b);
                }
            }
        }
        Ok(DiscretizedSolveResult {
            status,
            x: Some(best_x),
            upper,
            lower,
            gap_request: delta_bar,
            gap_target,
            cutting_plane_iterations: counters.iterations,
            lp_pivots: counters.pivots,
            evaluations: counters.evaluations,
        })
    }
}

/// Largest step from `anchor` toward `target` keeping the restricted
/// violation within `feastol` (the sublevel set is convex).
fn pull_back(
    dp: &DiscretizedProblem<'_>,
    anchor: &[f64],
    target: &[f64],
    feastol: f64,
) -> Vec<f64> {
    let at = |theta: f64| -> Vec<f64> {
        anchor
            .iter()
            .zip(target)
            .map(|(a, t)| a + theta * (t - a))
            .collect()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dp.restricted_violation(&at(mid)) <= feastol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// One-shot solve without a cut pool.
pub fn solve_discretized(
    dp: &DiscretizedProblem<'_>,
    delta_bar: f64,
    budget: SolveBudget,
) -> Result<DiscretizedSolveResult> {
    FiniteSolver::default().solve(dp, delta_bar, budget)
}

/// One-shot feasibility check.
pub fn check_feasibility(dp: &DiscretizedProblem<'_>, budget: SolveBudget) -> Result<Feasibility> {
    FiniteSolver::default().check_feasibility(dp, budget)
}
