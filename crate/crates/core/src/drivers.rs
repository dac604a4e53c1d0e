//! Outer drivers that shrink the restriction level until the returned point
//! is a `delta`-approximate solution of the semi-infinite problem.
//!
//! * [`run_feas_finite`]: restricted loop that divides `eps` by `r` whenever
//!   the discretized restriction is infeasible.
//! * [`run_sequential`]: repeated feas-finite runs with an a-priori number of
//!   levels from [`compute_termination_index`].
//! * [`run_simultaneous`]: an unrestricted and a restricted stream side by
//!   side, stopping once their objective values are close.

use serde::Serialize;

use crate::core_loop::{extra_point_sampler, update_discretization, Engine, Halt, RunTrace, Step};
use crate::discretization::Discretization;
use crate::error::{config, Result};
use crate::finite::{SolveStatus, FEASTOL};
use crate::oracle::strongest_violator;
use crate::problem::{default_margin_resolution, feasibility_margin, RegularityBundle, SipProblem};
use crate::schedule::{ObjSchedule, ToleranceSchedule};

/// Largest level index scanned by [`compute_termination_index`].
pub const MAX_TERMINATION_INDEX: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutcomeStatus {
    /// Verified `delta`-approximate solution.
    DeltaApproximate,
    /// Restricted loop terminated at a verified feasible point; no claim
    /// about the distance to the optimal value.
    Terminated,
    /// The discretized restriction became infeasible inside a restricted loop.
    InfeasibleSubproblem,
    BudgetExceeded,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationCounts {
    /// Levels for the sequential driver, iterations otherwise.
    pub outer: usize,
    /// Inner loop iterations summed over all levels.
    pub inner: usize,
    /// Inner iterations per level.
    pub per_level: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: OutcomeStatus,
    pub x_star: Option<Vec<f64>>,
    pub f_value: f64,
    /// Dense-grid estimate of `max_i sup_Y g_i(x_star, .)`.
    pub feasibility_margin: f64,
    /// Certified upper bound on `max_i sup_Y g_i(x_star, .)`.
    pub certified_violation: f64,
    /// Restriction level of the last restricted solve.
    pub eps_terminal: f64,
    pub iterations: IterationCounts,
    pub oracle_evals: u64,
    /// Last iterate of the unrestricted stream (simultaneous driver only).
    pub check_point: Option<Vec<f64>>,
    pub trace: RunTrace,
}

impl SolveOutcome {
    pub fn is_delta_approximate(&self) -> bool {
        self.status == OutcomeStatus::DeltaApproximate
    }
}

/// Shared run limits for the drivers.
#[derive(Clone, Copy, Debug)]
pub struct DriverBudget {
    /// Inner iterations per restricted loop (simultaneous: total iterations).
    pub max_iters: usize,
    /// Total finite-solver calls.
    pub max_finite_calls: u64,
    /// Grid spacing for the post-hoc margin; `None` picks
    /// [`default_margin_resolution`].
    pub margin_resolution: Option<f64>,
}

impl Default for DriverBudget {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            max_finite_calls: 1_000_000,
            margin_resolution: None,
        }
    }
}

fn check_r_eps(r: f64, eps: f64, name: &str) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(config(format!("r must be > 1, got {r}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(config(format!("{name} must be > 0, got {eps}")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho >= 0.0 {
        Ok(())
    } else {
        Err(config(format!("rho must be >= 0 or infinite, got {rho}")))
    }
}

fn engine_for<'p>(problem: &'p SipProblem, budget: &DriverBudget) -> Engine<'p> {
    let mut engine = Engine::new(problem);
    engine.max_finite_calls = budget.max_finite_calls;
    engine
}

#[allow(clippy::too_many_arguments)]
fn finish(
    engine: Engine<'_>,
    mut status: OutcomeStatus,
    x_star: Option<Vec<f64>>,
    eps_terminal: f64,
    iterations: IterationCounts,
    check_point: Option<Vec<f64>>,
    budget: &DriverBudget,
) -> Result<SolveOutcome> {
    let mut engine = engine;
    let problem = engine.problem;
    let (f_value, margin, certified) = match &x_star {
        Some(x) => {
            let res = budget
                .margin_resolution
                .unwrap_or_else(|| default_margin_resolution(problem.y_domain()));
            let certified = engine.certified_sup(x)?;
            (
                problem.objective().value(x),
                feasibility_margin(problem, x, res)?,
                certified,
            )
        }
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    let band = FEASTOL * (1.0 + problem.max_lipschitz_y());
    if matches!(
        status,
        OutcomeStatus::DeltaApproximate | OutcomeStatus::Terminated
    ) && !(certified <= band)
    {
        status = OutcomeStatus::BudgetExceeded;
    }
    Ok(SolveOutcome {
        status,
        x_star,
        f_value,
        feasibility_margin: margin,
        certified_violation: certified,
        eps_terminal,
        iterations,
        oracle_evals: engine.oracle_evals,
        check_point,
        trace: engine.trace,
    })
}

// ---------------------------------------------------------------------------
// feas-finite

#[derive(Clone, Debug)]
pub struct FeasFiniteConfig {
    pub eps0: f64,
    pub r: f64,
    pub schedule: ToleranceSchedule,
    pub rho: f64,
    pub y0: Discretization,
}

impl FeasFiniteConfig {
    pub fn validate(&self) -> Result<()> {
        check_r_eps(self.r, self.eps0, "eps0")?;
        check_rho(self.rho)?;
        self.schedule.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeasFiniteStatus {
    Terminated,
    Budget,
}

#[derive(Clone, Debug)]
pub struct FeasFiniteRun {
    pub status: FeasFiniteStatus,
    /// Terminal point, or the last iterate on budget exhaustion.
    pub x: Option<Vec<f64>>,
    pub eps_terminal: f64,
    /// Iterations performed (infeasible checks included).
    pub k_count: usize,
    pub final_y: Discretization,
    pub trace: RunTrace,
    pub oracle_evals: u64,
}

struct FeasState {
    x: Option<Vec<f64>>,
    eps: f64,
    k: usize,
    y: Discretization,
}

/// One feas-finite loop on `engine`. Returns whether it terminated; the
/// state holds the iterate either way.
fn feas_finite_loop(
    engine: &mut Engine<'_>,
    cfg: &FeasFiniteConfig,
    max_iters: usize,
    state: &mut FeasState,
) -> Step<bool> {
    let mut rng = extra_point_sampler();
    while state.k < max_iters {
        let k = state.k;
        let eps = state.eps;
        let sol = engine.solve(eps, &state.y, cfg.schedule.obj_tol(k))?;
        state.k += 1;
        let x = match (sol.status, sol.x) {
            (SolveStatus::Feasible, Some(x)) => x,
            // Undecided without a point is a failed feasibility check,
            // reported as infeasible.
            (SolveStatus::Infeasible, _) | (SolveStatus::Undecided, None) => {
                engine.record(
                    eps,
                    state.y.len(),
                    f64::NAN,
                    f64::NAN,
                    "infeasible",
                    sol.gap_target,
                );
                state.eps = eps / cfg.r;
                continue;
            }
            _ => {
                engine.record(
                    eps,
                    state.y.len(),
                    sol.upper,
                    f64::NAN,
                    "budget",
                    sol.gap_target,
                );
                return Err(Halt::Budget);
            }
        };
        state.x = Some(x.clone());
        let aux = engine.aux(&x, |i| cfg.schedule.aux_tol(k, i))?;
        let (_, worst) = strongest_violator(&aux).map_err(Halt::Error)?;
        if aux
            .iter()
            .all(|(&i, cm)| cm.value <= -cfg.schedule.aux_tol(k, i))
        {
            engine.record(
                eps,
                state.y.len(),
                sol.upper,
                worst.value,
                "terminate",
                sol.gap_target,
            );
            return Ok(true);
        }
        engine.record(
            eps,
            state.y.len(),
            sol.upper,
            worst.value,
            "violation",
            sol.gap_target,
        );
        let y_star = worst.y_star.clone();
        state.y = update_discretization(
            engine.problem,
            &state.y,
            &x,
            eps,
            cfg.rho,
            &y_star,
            0,
            &mut rng,
        );
    }
    Err(Halt::Budget)
}

fn run_level(
    engine: &mut Engine<'_>,
    cfg: &FeasFiniteConfig,
    max_iters: usize,
) -> Result<(bool, FeasState)> {
    let mut state = FeasState {
        x: None,
        eps: cfg.eps0,
        k: 0,
        y: cfg.y0.clone(),
    };
    let done = match feas_finite_loop(engine, cfg, max_iters, &mut state) {
        Ok(done) => done,
        Err(Halt::Budget) => false,
        Err(Halt::Error(e)) => return Err(e),
    };
    Ok((done, state))
}

/// Runs the feas-finite loop on its own.
pub fn run_feas_finite(
    problem: &SipProblem,
    cfg: &FeasFiniteConfig,
    budget: &DriverBudget,
) -> Result<FeasFiniteRun> {
    cfg.validate()?;
    let mut engine = engine_for(problem, budget);
    let (done, state) = run_level(&mut engine, cfg, budget.max_iters)?;
    Ok(FeasFiniteRun {
        status: if done {
            FeasFiniteStatus::Terminated
        } else {
            FeasFiniteStatus::Budget
        },
        x: state.x,
        eps_terminal: state.eps,
        k_count: state.k,
        final_y: state.y,
        oracle_evals: engine.oracle_evals,
        trace: engine.trace,
    })
}

// ---------------------------------------------------------------------------
// sequential

/// Smallest `m*` such that for every `m >= m*`
///
/// ```text
/// eps00 / r^m <= eps_star
/// L* (diam_x / eps_star) (eps00 / r^m) <= delta / 2
/// delta_bar_m <= delta / 2
/// ```
pub fn compute_termination_index(
    delta: f64,
    regularity: &RegularityBundle,
    diam_x: f64,
    eps00: f64,
    r: f64,
    obj_schedule: &ObjSchedule,
) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(config(format!("delta must be > 0, got {delta}")));
    }
    check_r_eps(r, eps00, "eps00")?;
    if !(diam_x >= 0.0 && diam_x.is_finite()) {
        return Err(config(format!("diameter must be >= 0, got {diam_x}")));
    }
    let RegularityBundle {
        eps_star,
        lipschitz_f,
    } = *regularity;
    if !(eps_star > 0.0 && lipschitz_f > 0.0) {
        return Err(config("regularity constants must be positive"));
    }
    obj_schedule.validate()?;
    let half = 0.5 * delta;
    // Both restriction conditions are monotone in m, so the first index
    // where all three hold (the third through the tail supremum) is m*.
    for m in 0..=MAX_TERMINATION_INDEX {
        let eps = eps00 / r.powi(m as i32);
        if eps <= eps_star
            && lipschitz_f * (diam_x / eps_star) * eps <= half
            && obj_schedule.sup_from(m) <= half
        {
            return Ok(m);
        }
    }
    Err(config(format!(
        "no termination index up to {MAX_TERMINATION_INDEX}: the objective schedule {obj_schedule} \
         never stays below delta/2 = {half}, or the restriction decays too slowly"
    )))
}

#[derive(Clone, Debug)]
pub struct SequentialConfig {
    pub delta: f64,
    pub r: f64,
    pub eps00: f64,
    pub regularity: RegularityBundle,
    pub schedule: ToleranceSchedule,
    pub rho: f64,
    pub y0: Discretization,
    /// Start each level from the previous level's final discretization
    /// instead of `y0`.
    pub warm_start_discretization: bool,
    /// Overrides the computed termination index.
    pub termination_index: Option<usize>,
}

impl SequentialConfig {
    /// Defaults: `r = 2`, `eps00 = 1`, `rho = inf`, `Y^0 = {}` and the
    /// default schedules; regularity from the problem's Slater point.
    pub fn new(problem: &SipProblem, delta: f64) -> Result<Self> {
        Ok(Self {
            delta,
            r: 2.0,
            eps00: 1.0,
            regularity: RegularityBundle::from_problem(problem, crate::core_loop::POST_HOC_DELTA)?,
            schedule: ToleranceSchedule::default(),
            rho: f64::INFINITY,
            y0: Discretization::empty(),
            warm_start_discretization: true,
            termination_index: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(config(format!("delta must be > 0, got {}", self.delta)));
        }
        check_r_eps(self.r, self.eps00, "eps00")?;
        check_rho(self.rho)?;
        self.schedule.validate()?;
        self.schedule.check_convergence_conditions(self.rho)
    }

    pub fn termination_index(&self, problem: &SipProblem) -> Result<usize> {
        match self.termination_index {
            Some(m) => Ok(m),
            None => compute_termination_index(
                self.delta,
                &self.regularity,
                problem.x_domain().diameter(),
                self.eps00,
                self.r,
                &self.schedule.obj,
            ),
        }
    }
}

pub fn run_sequential(
    problem: &SipProblem,
    cfg: &SequentialConfig,
    budget: &DriverBudget,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let m_star = cfg.termination_index(problem)?;
    let mut engine = engine_for(problem, budget);
    let mut counts = IterationCounts::default();
    let mut eps = cfg.eps00;
    let mut y = cfg.y0.clone();
    let mut x_star = None;
    let mut status = OutcomeStatus::DeltaApproximate;
    let mut eps_terminal = eps;
    for m in 0..=m_star {
        let level = FeasFiniteConfig {
            eps0: eps,
            r: cfg.r,
            schedule: cfg.schedule.shifted(m),
            rho: cfg.rho,
            y0: y.clone(),
        };
        let (done, state) = run_level(&mut engine, &level, budget.max_iters)?;
        counts.outer += 1;
        counts.inner += state.k;
        counts.per_level.push(state.k);
        eps_terminal = state.eps;
        if state.x.is_some() {
            x_star = state.x;
        }
        if !done {
            status = OutcomeStatus::BudgetExceeded;
            break;
        }
        eps = state.eps / cfg.r;
        y = if cfg.warm_start_discretization {
            state.y
        } else {
            cfg.y0.clone()
        };
    }
    finish(engine, status, x_star, eps_terminal, counts, None, budget)
}

// ---------------------------------------------------------------------------
// simultaneous

#[derive(Clone, Debug)]
pub struct SimultaneousConfig {
    delta: f64,
    delta_star: f64,
    r: f64,
    eps0: f64,
    y0_check: Discretization,
    y0_hat: Discretization,
    schedule: ToleranceSchedule,
    rho: f64,
}

impl SimultaneousConfig {
    /// Validates `r > 1`, `eps0 > 0`, `delta_star > 0` and
    /// `sup_k delta_bar_k < delta / 2`. `delta_star` defaults to `delta / 2`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        delta: f64,
        delta_star: Option<f64>,
        r: f64,
        eps0: f64,
        y0_check: Discretization,
        y0_hat: Discretization,
        schedule: ToleranceSchedule,
        rho: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(config(format!("delta must be > 0, got {delta}")));
        }
        let delta_star = delta_star.unwrap_or(0.5 * delta);
        if !(delta_star > 0.0) {
            return Err(config(format!("delta_star must be > 0, got {delta_star}")));
        }
        check_r_eps(r, eps0, "eps0")?;
        check_rho(rho)?;
        schedule.validate()?;
        let sup = schedule.obj_sup();
        if !(sup < 0.5 * delta) {
            return Err(config(format!(
                "objective schedule supremum {sup} must be strictly below delta/2 = {}",
                0.5 * delta
            )));
        }
        schedule.check_convergence_conditions(rho)?;
        Ok(Self {
            delta,
            delta_star,
            r,
            eps0,
            y0_check,
            y0_hat,
            schedule,
            rho,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn delta_star(&self) -> f64 {
        self.delta_star
    }
}

pub fn run_simultaneous(
    problem: &SipProblem,
    cfg: &SimultaneousConfig,
    budget: &DriverBudget,
) -> Result<SolveOutcome> {
    let mut engine = engine_for(problem, budget);
    let mut y_check = cfg.y0_check.clone();
    let mut y_hat = cfg.y0_hat.clone();
    let mut eps = cfg.eps0;
    let mut x_check: Option<Vec<f64>> = None;
    let mut x_hat: Option<Vec<f64>> = None;
    let mut rng = extra_point_sampler();
    let mut iterations = 0;

    let result: Step<bool> = (|| {
        for k in 0..budget.max_iters {
            iterations = k + 1;
            let obj_tol = cfg.schedule.obj_tol(k);
            let check = engine.solve(0.0, &y_check, obj_tol)?;
            let xc = match (check.status, check.x) {
                (SolveStatus::Feasible, Some(x)) => x,
                _ => return Err(Halt::Budget),
            };
            let fc = check.upper;
            x_check = Some(xc.clone());
            let aux_check = engine.aux(&xc, |i| cfg.schedule.aux_tol(k, i))?;

            let hat = engine.solve(eps, &y_hat, obj_tol)?;
            let xh = match (hat.status, hat.x) {
                (SolveStatus::Feasible, Some(x)) => x,
                (SolveStatus::Infeasible, _) | (SolveStatus::Undecided, None) => {
                    engine.record(
                        eps,
                        y_hat.len(),
                        f64::NAN,
                        f64::NAN,
                        "infeasible",
                        hat.gap_target,
                    );
                    eps /= cfg.r;
                    continue;
                }
                _ => return Err(Halt::Budget),
            };
            let fh = hat.upper;
            x_hat = Some(xh.clone());
            let aux_hat = engine.aux(&xh, |i| cfg.schedule.aux_tol(k, i))?;
            let (_, worst_hat) = strongest_violator(&aux_hat).map_err(Halt::Error)?;

            if fh > fc + cfg.delta_star {
                engine.record(
                    eps,
                    y_hat.len(),
                    fh,
                    worst_hat.value,
                    "value_gap",
                    hat.gap_target,
                );
                let (_, worst_check) = strongest_violator(&aux_check).map_err(Halt::Error)?;
                let yv = worst_check.y_star.clone();
                y_check = update_discretization(
                    engine.problem,
                    &y_check,
                    &xc,
                    0.0,
                    cfg.rho,
                    &yv,
                    0,
                    &mut rng,
                );
                eps /= cfg.r;
            } else if aux_hat
                .iter()
                .any(|(&i, cm)| cm.value > -cfg.schedule.aux_tol(k, i))
            {
                engine.record(
                    eps,
                    y_hat.len(),
                    fh,
                    worst_hat.value,
                    "violation",
                    hat.gap_target,
                );
                let yv = worst_hat.y_star.clone();
                y_hat = update_discretization(
                    engine.problem,
                    &y_hat,
                    &xh,
                    eps,
                    cfg.rho,
                    &yv,
                    0,
                    &mut rng,
                );
            } else {
                engine.record(
                    eps,
                    y_hat.len(),
                    fh,
                    worst_hat.value,
                    "terminate",
                    hat.gap_target,
                );
                return Ok(true);
            }
        }
        Err(Halt::Budget)
    })();
    let status = match result {
        Ok(_) => OutcomeStatus::DeltaApproximate,
        Err(Halt::Budget) => OutcomeStatus::BudgetExceeded,
        Err(Halt::Error(e)) => return Err(e),
    };
    let x_star = x_hat.clone().or_else(|| x_check.clone());
    let counts = IterationCounts {
        outer: iterations,
        inner: iterations,
        per_level: vec![iterations],
    };
    finish(engine, status, x_star, eps, counts, x_check, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::schedule::AuxSchedule;

    fn pts(v: &[f64]) -> Discretization {
        let mut d = Discretization::empty();
        for &y in v {
            d.insert(vec![y]);
        }
        d
    }

    fn bundle(eps_star: f64, l: f64) -> RegularityBundle {
        RegularityBundle::new(eps_star, l).unwrap()
    }

    #[test]
    fn termination_index_examples() {
        let b = bundle(2.0, 4.0);
        assert_eq!(
            compute_termination_index(0.1, &b, 4.0, 1.0, 2.0, &ObjSchedule::zero()).unwrap(),
            8
        );
        assert_eq!(
            compute_termination_index(10.0, &b, 4.0, 1.0, 2.0, &ObjSchedule::zero()).unwrap(),
            1
        );
        assert!(
            compute_termination_index(0.1, &b, 4.0, 1.0, 2.0, &ObjSchedule::Constant(0.1)).is_err()
        );
    }

    #[test]
    fn feas_finite_examples() {
        let a = instances::instance_a();
        let sched = ToleranceSchedule::new(ObjSchedule::zero(), AuxSchedule::default());
        let cfg = FeasFiniteConfig {
            eps0: 4.0,
            r: 2.0,
            schedule: sched.clone(),
            rho: 0.0,
            y0: pts(&[1.0]),
        };
        let run = run_feas_finite(&a, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(run.status, FeasFiniteStatus::Terminated);
        assert_eq!(run.eps_terminal, 2.0);
        assert!((run.x.unwrap()[0] + 2.0).abs() < 1e-9);
        assert_eq!(run.trace.rows()[0].branch, "infeasible");

        let cfg = FeasFiniteConfig {
            eps0: 0.1,
            y0: pts(&[0.0]),
            ..cfg
        };
        let run = run_feas_finite(&a, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(run.k_count, 2);
        assert!((run.x.unwrap()[0] + 0.1).abs() < 1e-9);

        let b = instances::instance_b();
        let cfg = FeasFiniteConfig {
            eps0: 1.0,
            r: 2.0,
            schedule: sched,
            rho: 0.0,
            y0: pts(&[0.0, 1.0]),
        };
        let run = run_feas_finite(&b, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(run.status, FeasFiniteStatus::Terminated);
        let x = run.x.unwrap();
        assert!((x[0] + 2.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn sequential_on_instance_a() {
        let a = instances::instance_a();
        let mut cfg = SequentialConfig::new(&a, 1e-2).unwrap();
        cfg.schedule = ToleranceSchedule::new(
            ObjSchedule::Geometric {
                scale: 1.0,
                ratio: 0.5,
                cap: 1e-3,
            },
            AuxSchedule::default(),
        );
        cfg.y0 = pts(&[0.0]);
        let out = run_sequential(&a, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(out.status, OutcomeStatus::DeltaApproximate);
        let x = out.x_star.unwrap()[0];
        assert!(x <= 0.0 && x > -0.01, "{x}");
        assert!(out.f_value <= 1e-2);
        assert_eq!(out.iterations.outer, cfg.termination_index(&a).unwrap() + 1);
    }

    #[test]
    fn simultaneous_on_instance_a() {
        let a = instances::instance_a();
        let sched =
            ToleranceSchedule::new(ObjSchedule::geometric(0.05, 0.5), AuxSchedule::default());
        let cfg = SimultaneousConfig::new(
            0.2,
            None,
            2.0,
            1.0,
            pts(&[0.0]),
            pts(&[0.0]),
            sched,
            f64::INFINITY,
        )
        .unwrap();
        let out = run_simultaneous(&a, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(out.status, OutcomeStatus::DeltaApproximate);
        let x = out.x_star.unwrap()[0];
        assert!(x <= 0.0 && x >= -out.eps_terminal - 1e-9, "{x}");
        assert!(out.f_value <= 0.2);
    }

    #[test]
    fn simultaneous_rejects_large_schedule() {
        let sched =
            ToleranceSchedule::new(ObjSchedule::geometric(0.1, 0.5), AuxSchedule::default());
        let err =
            SimultaneousConfig::new(0.2, None, 2.0, 1.0, pts(&[0.0]), pts(&[0.0]), sched, 1.0)
                .unwrap_err();
        assert!(err.to_string().contains("strictly below"), "{err}");
    }
}
