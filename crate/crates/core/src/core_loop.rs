//! The adaptive discretization loop at a fixed restriction level.
//!
//! Each iteration solves the discretized restriction on `Y^k`, asks the
//! lower-level solver for the worst violation of every family, and either
//! terminates (all certified values `<= -delta_{k,i}`) or rebuilds `Y^{k+1}`
//! from the still-relevant old points and the strongest violator.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discretization::Discretization;
use crate::error::{config, Result, SipError};
use crate::finite::{
    DiscretizedProblem, DiscretizedSolveResult, FiniteSolver, SolveBudget, SolveStatus, FEASTOL,
};
use crate::oracle::{certified_max, strongest_violator, BranchAndBound, CertifiedMax, MaxOracle};
use crate::problem::SipProblem;
use crate::schedule::{Regime, ToleranceSchedule};

/// Lower-level tolerance used to verify returned points.
pub const POST_HOC_DELTA: f64 = 1e-9;

/// Default cap on finite-solver calls per run.
pub const DEFAULT_MAX_FINITE_CALLS: u64 = 1_000_000;

/// One trace row. `k` is the global iteration counter of the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub eps: f64,
    pub card_y: usize,
    pub f_x: f64,
    pub max_violation: f64,
    pub branch: String,
    pub lp_iters: u64,
    pub oracle_evals: u64,
    /// Gap actually enforced by the finite solver (the request, floored).
    pub obj_tol: f64,
}

/// Append-only iteration log.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    rows: Vec<TraceRow>,
}

fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl RunTrace {
    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn record(&mut self, mut row: TraceRow) {
        row.k = self.rows.len();
        self.rows.push(row);
    }

    /// Writes the trace as CSV with 17 significant digits per float.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "k",
            "eps",
            "card_Y",
            "f_x",
            "max_violation",
            "branch",
            "lp_iters",
            "oracle_evals",
            "obj_tol",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                fmt_float(r.eps),
                r.card_y.to_string(),
                fmt_float(r.f_x),
                fmt_float(r.max_violation),
                r.branch.clone(),
                r.lp_iters.to_string(),
                r.oracle_evals.to_string(),
                fmt_float(r.obj_tol),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Solver state shared by all loops of one run: the lower-level solver, the
/// finite solver (with its objective-cut pool) and the counters.
pub struct Engine<'p> {
    pub problem: &'p SipProblem,
    oracle: Box<dyn MaxOracle + 'p>,
    solver: FiniteSolver,
    pub budget: SolveBudget,
    pub max_finite_calls: u64,
    pub finite_calls: u64,
    pub lp_iters: u64,
    pub oracle_evals: u64,
    pub trace: RunTrace,
}

/// Why an engine call did not produce a result.
#[derive(Debug)]
pub(crate) enum Halt {
    Budget,
    Error(SipError),
}

impl From<SipError> for Halt {
    fn from(e: SipError) -> Self {
        match e {
            SipError::OracleBudget { .. } => Halt::Budget,
            e => Halt::Error(e),
        }
    }
}

pub(crate) type Step<T> = std::result::Result<T, Halt>;

impl<'p> Engine<'p> {
    pub fn new(problem: &'p SipProblem) -> Self {
        Self::with_oracle(problem, Box::new(BranchAndBound::default()))
    }

    pub fn with_oracle(problem: &'p SipProblem, oracle: Box<dyn MaxOracle + 'p>) -> Self {
        Self {
            problem,
            oracle,
            solver: FiniteSolver::default(),
            budget: SolveBudget::default(),
            max_finite_calls: DEFAULT_MAX_FINITE_CALLS,
            finite_calls: 0,
            lp_iters: 0,
            oracle_evals: 0,
            trace: RunTrace::default(),
        }
    }

    fn charge(&mut self) -> Step<()> {
        if self.finite_calls >= self.max_finite_calls {
            return Err(Halt::Budget);
        }
        self.finite_calls += 1;
        Ok(())
    }

    pub(crate) fn solve(
        &mut self,
        eps: f64,
        points: &Discretization,
        delta_bar: f64,
    ) -> Step<DiscretizedSolveResult> {
        self.charge()?;
        let dp = DiscretizedProblem::new(self.problem, eps, points)?;
        let r = self.solver.solve(&dp, delta_bar, self.budget)?;
        self.lp_iters += r.cutting_plane_iterations as u64;
        Ok(r)
    }

    /// Certified lower-level solves for every family at tolerance `delta(i)`.
    pub(crate) fn aux(
        &mut self,
        x: &[f64],
        delta: impl Fn(usize) -> f64,
    ) -> Step<BTreeMap<usize, CertifiedMax>> {
        let mut out = BTreeMap::new();
        for (i, fam) in self.problem.constraints().iter().enumerate() {
            let cm = certified_max(
                self.oracle.as_ref(),
                fam.as_ref(),
                self.problem.y_domain(),
                x,
                delta(i),
            )?;
            self.oracle_evals += cm.evaluations;
            out.insert(i, cm);
        }
        Ok(out)
    }

    /// Certified upper bound on `max_i sup_Y g_i(x, .)` at [`POST_HOC_DELTA`].
    pub fn certified_sup(&mut self, x: &[f64]) -> Result<f64> {
        match self.aux(x, |_| POST_HOC_DELTA) {
            Ok(m) => Ok(m
                .values()
                .map(CertifiedMax::upper_bound)
                .fold(f64::NEG_INFINITY, f64::max)),
            Err(Halt::Error(e)) => Err(e),
            Err(Halt::Budget) => Ok(f64::INFINITY),
        }
    }

    pub(crate) fn record(
        &mut self,
        eps: f64,
        card_y: usize,
        f_x: f64,
        max_violation: f64,
        branch: &str,
        obj_tol: f64,
    ) {
        let row = TraceRow {
            k: 0,
            eps,
            card_y,
            f_x,
            max_violation,
            branch: branch.to_string(),
            lp_iters: self.lp_iters,
            oracle_evals: self.oracle_evals,
            obj_tol,
        };
        self.trace.record(row);
    }
}

/// Seeded sampler for the optional extra points of `Y^{k+1}_2`.
pub fn extra_point_sampler() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_5119)
}

/// `{y in yk : max_i g_i(xk, y) >= -eps - rho} ∪ {violator} ∪ extras`,
/// deduplicated. With `rho = inf` nothing is dropped. The threshold is
/// loosened by the solver's feasibility tolerance so that rows active at
/// `xk` are kept despite rounding.
#[allow(clippy::too_many_arguments)]
pub fn update_discretization(
    problem: &SipProblem,
    yk: &Discretization,
    xk: &[f64],
    eps: f64,
    rho: f64,
    violator: &[f64],
    extra: usize,
    rng: &mut impl Rng,
) -> Discretization {
    let mut next = yk.clone();
    if rho.is_finite() {
        let threshold = -eps - rho - FEASTOL;
        next.retain(|y| problem.max_constraint(xk, y) >= threshold);
    }
    next.insert(violator.to_vec());
    let yd = problem.y_domain();
    for _ in 0..extra {
        let y: Vec<f64> = yd
            .lower()
            .iter()
            .zip(yd.upper())
            .map(|(&l, &u)| if l < u { rng.gen_range(l..=u) } else { l })
            .collect();
        next.insert(y);
    }
    next
}

#[derive(Clone, Debug)]
pub struct CoreConfig {
    pub eps: f64,
    /// Pruning radius; `f64::INFINITY` keeps every point.
    pub rho: f64,
    pub schedule: ToleranceSchedule,
    pub y0: Discretization,
    /// Sampled points added to each new discretization besides the violator.
    pub extra_violators: usize,
    pub max_iters: usize,
}

impl CoreConfig {
    pub fn new(eps: f64, rho: f64, schedule: ToleranceSchedule, y0: Discretization) -> Self {
        Self {
            eps,
            rho,
            schedule,
            y0,
            extra_violators: 0,
            max_iters: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(config(format!(
                "eps must be a nonnegative number, got {}",
                self.eps
            )));
        }
        if !(self.rho >= 0.0) {
            return Err(config(format!(
                "rho must be >= 0 or infinite, got {}",
                self.rho
            )));
        }
        self.schedule.validate()?;
        if self.schedule.regime() == Regime::Summable && self.rho == 0.0 {
            return Err(config("a summable objective schedule requires rho != 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoreStatus {
    Terminated { x: Vec<f64>, k: usize },
    InfeasibleSubproblem { k: usize },
    Budget,
}

#[derive(Clone, Debug)]
pub struct CoreRun {
    pub status: CoreStatus,
    /// Last iterate computed (for `Terminated`, the returned point).
    pub last_x: Option<Vec<f64>>,
    /// `f(x^k)` for every solved iteration.
    pub objective_values: Vec<f64>,
    /// The discretization the last iteration solved on.
    pub final_y: Discretization,
    pub trace: RunTrace,
    pub oracle_evals: u64,
}

/// Runs the loop on `cfg` with a fresh [`Engine`].
pub fn run_core(problem: &SipProblem, cfg: &CoreConfig) -> Result<CoreRun> {
    cfg.validate()?;
    let mut engine = Engine::new(problem);
    let mut rng = extra_point_sampler();
    let mut values = Vec::new();
    let mut last_x = None;
    let mut yk = cfg.y0.clone();
    let status = match core_iterations(
        &mut engine,
        cfg,
        &mut yk,
        &mut rng,
        &mut values,
        &mut last_x,
    ) {
        Ok(s) => s,
        Err(Halt::Budget) => CoreStatus::Budget,
        Err(Halt::Error(e)) => return Err(e),
    };
    Ok(CoreRun {
        status,
        last_x,
        objective_values: values,
        final_y: yk,
        oracle_evals: engine.oracle_evals,
        trace: engine.trace,
    })
}

fn core_iterations(
    engine: &mut Engine<'_>,
    cfg: &CoreConfig,
    yk: &mut Discretization,
    rng: &mut ChaCha8Rng,
    values: &mut Vec<f64>,
    last_x: &mut Option<Vec<f64>>,
) -> Step<CoreStatus> {
    let eps = cfg.eps;
    for k in 0..cfg.max_iters {
        let sol = engine.solve(eps, yk, cfg.schedule.obj_tol(k))?;
        match sol.status {
            SolveStatus::Feasible => {}
            SolveStatus::Infeasible => {
                engine.record(
                    eps,
                    yk.len(),
                    f64::NAN,
                    f64::NAN,
                    "infeasible",
                    sol.gap_target,
                );
                return Ok(CoreStatus::InfeasibleSubproblem { k });
            }
            SolveStatus::Undecided => {
                engine.record(eps, yk.len(), sol.upper, f64::NAN, "budget", sol.gap_target);
                return Err(Halt::Budget);
            }
        }
        let x = sol.x.expect("feasible result carries a point");
        values.push(sol.upper);
        *last_x = Some(x.clone());
        let aux = engine.aux(&x, |i| cfg.schedule.aux_tol(k, i))?;
        let (_, worst) = strongest_violator(&aux).map_err(Halt::Error)?;
        let violated = aux
            .iter()
            .any(|(&i, cm)| cm.value > -cfg.schedule.aux_tol(k, i));
        if !violated {
            engine.record(
                eps,
                yk.len(),
                sol.upper,
                worst.value,
                "terminate",
                sol.gap_target,
            );
            return Ok(CoreStatus::Terminated { x, k });
        }
        engine.record(
            eps,
            yk.len(),
            sol.upper,
            worst.value,
            "violation",
            sol.gap_target,
        );
        let y_star = worst.y_star.clone();
        *yk = update_discretization(
            engine.problem,
            yk,
            &x,
            eps,
            cfg.rho,
            &y_star,
            cfg.extra_violators,
            rng,
        );
    }
    Err(Halt::Budget)
}
