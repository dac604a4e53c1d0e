mod common;

use adaptive_sip::core_loop::RunTrace;
use adaptive_sip::drivers::{
    run_feas_finite, run_sequential, run_simultaneous, DriverBudget, FeasFiniteConfig,
    FeasFiniteStatus, OutcomeStatus, SequentialConfig, SimultaneousConfig, SolveOutcome,
};
use adaptive_sip::regression::DEFAULT_RIDGE;
use adaptive_sip::schedule::{ObjSchedule, ToleranceSchedule};
use adaptive_sip::{instances, Discretization, SipProblem};
use common::convex_sibling;

fn cases() -> Vec<(&'static str, SipProblem, f64)> {
    vec![
        ("A", instances::instance_a(), 0.0),
        ("B", instances::instance_b(), 2.0),
        (
            "R",
            instances::builtin("instance_R").unwrap(),
            (1.0 + DEFAULT_RIDGE) / (2.0 + DEFAULT_RIDGE),
        ),
        ("sibling", convex_sibling(), 1.0),
    ]
}

fn sequential(p: &SipProblem, delta: f64) -> SolveOutcome {
    let cfg = SequentialConfig::new(p, delta).unwrap();
    run_sequential(p, &cfg, &DriverBudget::default()).unwrap()
}

fn simultaneous(p: &SipProblem, delta: f64) -> SolveOutcome {
    let schedule = ToleranceSchedule {
        obj: ObjSchedule::geometric(delta / 4.0, 0.5),
        ..ToleranceSchedule::default()
    };
    let e = Discretization::empty;
    let cfg =
        SimultaneousConfig::new(delta, None, 2.0, 1.0, e(), e(), schedule, f64::INFINITY).unwrap();
    run_simultaneous(p, &cfg, &DriverBudget::default()).unwrap()
}

fn check_eps_rule(trace: &RunTrace, r: f64) {
    for w in trace.rows().windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(b.eps <= a.eps, "eps increased at k = {}", b.k);
        if b.eps != a.eps {
            assert!(
                ["infeasible", "terminate", "value_gap"].contains(&a.branch.as_str()),
                "eps changed after branch {}",
                a.branch
            );
            assert_eq!(b.eps, a.eps / r);
        }
    }
}

#[test]
fn outcomes_are_delta_approximate() {
    for (name, p, f_star) in cases() {
        for delta in [1e-1, 1e-2, 1e-3] {
            for (driver, out) in [
                ("sequential", sequential(&p, delta)),
                ("simultaneous", simultaneous(&p, delta)),
            ] {
                assert_eq!(
                    out.status,
                    OutcomeStatus::DeltaApproximate,
                    "{name} {driver} delta {delta}"
                );
                assert!(
                    out.certified_violation <= 0.0,
                    "{name} {driver}: {}",
                    out.certified_violation
                );
                assert!(out.feasibility_margin <= 0.0);
                assert!(
                    out.f_value <= f_star + delta,
                    "{name} {driver} delta {delta}: f = {}",
                    out.f_value
                );
                assert!(
                    out.f_value >= f_star - 1e-9,
                    "{name} {driver}: f = {} below optimum",
                    out.f_value
                );
                check_eps_rule(&out.trace, 2.0);
            }
        }
    }
}

#[test]
fn feas_finite_returns_a_feasible_point() {
    for (name, p, _) in cases() {
        let cfg = FeasFiniteConfig {
            eps0: 4.0,
            r: 3.0,
            schedule: ToleranceSchedule::default(),
            rho: f64::INFINITY,
            y0: Discretization::empty(),
        };
        let run = run_feas_finite(&p, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(run.status, FeasFiniteStatus::Terminated, "{name}");
        let x = run.x.unwrap();
        assert!(
            adaptive_sip::problem::feasibility_margin(&p, &x, 1e-3).unwrap() <= 1e-9,
            "{name}"
        );
        check_eps_rule(&run.trace, 3.0);
        let levels = run
            .trace
            .rows()
            .iter()
            .filter(|r| r.branch == "infeasible")
            .count();
        assert_eq!(run.eps_terminal, 4.0 / 3f64.powi(levels as i32));
    }
}

#[test]
fn warm_start_does_not_change_the_answer() {
    for (name, p, _) in cases() {
        let mut cfg = SequentialConfig::new(&p, 1e-2).unwrap();
        let warm = run_sequential(&p, &cfg, &DriverBudget::default()).unwrap();
        cfg.warm_start_discretization = false;
        let cold = run_sequential(&p, &cfg, &DriverBudget::default()).unwrap();
        assert_eq!(warm.status, cold.status, "{name}");
        let d = (warm.f_value - cold.f_value).abs();
        assert!(
            d <= 1e-9,
            "{name}: warm {} cold {}",
            warm.f_value,
            cold.f_value
        );
    }
}

#[test]
fn error_shrinks_with_the_termination_index() {
    for (name, p, f_star) in cases() {
        let mut prev = f64::INFINITY;
        for m in [2, 4, 8] {
            let mut cfg = SequentialConfig::new(&p, 1e-2).unwrap();
            cfg.termination_index = Some(m);
            let out = run_sequential(&p, &cfg, &DriverBudget::default()).unwrap();
            let reg = cfg.regularity;
            let eps_m = cfg.eps00 / cfg.r.powi(m as i32);
            let restriction = reg.lipschitz_f * p.x_domain().diameter() / reg.eps_star * eps_m;
            let bound = 2.0 * restriction.max(cfg.schedule.obj.sup_from(m));
            let err = out.f_value - f_star;
            assert!(
                err <= bound + 1e-9,
                "{name} m = {m}: error {err} bound {bound}"
            );
            assert!(
                err <= prev + 1e-9,
                "{name} m = {m}: error {err} after {prev}"
            );
            prev = err;
        }
    }
}

#[test]
fn simultaneous_rejects_a_loose_schedule() {
    let e = Discretization::empty;
    let schedule = ToleranceSchedule {
        obj: ObjSchedule::geometric(0.1, 0.5),
        ..ToleranceSchedule::default()
    };
    assert!(
        SimultaneousConfig::new(0.1, None, 2.0, 1.0, e(), e(), schedule, f64::INFINITY).is_err()
    );
}

#[test]
fn tiny_budgets_are_reported() {
    let p = instances::instance_b();
    let cfg = SequentialConfig::new(&p, 1e-6).unwrap();
    let budget = DriverBudget {
        max_iters: 1,
        ..DriverBudget::default()
    };
    let out = run_sequential(&p, &cfg, &budget).unwrap();
    assert_eq!(out.status, OutcomeStatus::BudgetExceeded);
}
