mod common;

use adaptive_sip::finite::{
    check_feasibility, solve_discretized, DiscretizedProblem, Feasibility, SolveBudget,
    SolveStatus, FEASTOL,
};
use adaptive_sip::{instances, Discretization};
use common::{affine_lipschitz_x, brute_force_bracket, random_instance, violation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn points(rng: &mut ChaCha8Rng, q: usize, n: usize) -> Discretization {
    let mut d = Discretization::empty();
    for _ in 0..n {
        d.insert((0..q).map(|_| rng.gen_range(0.0..=1.0)).collect());
    }
    d
}

fn value(p: &adaptive_sip::SipProblem, eps: f64, pts: &Discretization) -> f64 {
    let dp = DiscretizedProblem::new(p, eps, pts).unwrap();
    let r = solve_discretized(&dp, 0.0, SolveBudget::default()).unwrap();
    match r.status {
        SolveStatus::Feasible => r.upper,
        SolveStatus::Infeasible => f64::INFINITY,
        SolveStatus::Undecided => panic!("undecided on an analytic instance"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sandwich_against_brute_force(seed in any::<u64>(), eps in 0.0..3.0f64, gap_exp in 3i32..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.gen_range(1..=2);
        let q = rng.gen_range(1..=2);
        let fams = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=5);
        let problem = random_instance(&mut rng, p, q, fams);
        let pts = points(&mut rng, q, n);
        let dp = DiscretizedProblem::new(&problem, eps, &pts).unwrap();
        let delta_bar = 10f64.powi(-gap_exp);
        let r = solve_discretized(&dp, delta_bar, SolveBudget::default()).unwrap();
        let lf = problem.objective().lipschitz_constant().unwrap();
        let lg = affine_lipschitz_x(&problem, pts.points());
        let (lo, hi) = brute_force_bracket(&dp, if p == 1 { 20_001 } else { 301 }, lf, lg);
        match r.status {
            SolveStatus::Feasible => {
                let x = r.x.unwrap();
                prop_assert!(violation(&dp, &x) <= FEASTOL);
                prop_assert!(r.upper - r.lower <= r.gap_target);
                prop_assert!(r.gap_target >= delta_bar);
                prop_assert!(r.lower <= hi + 1e-9, "lower {} > grid {hi}", r.lower);
                prop_assert!(r.upper >= lo - 1e-9, "upper {} < bound {lo}", r.upper);
            }
            SolveStatus::Infeasible => prop_assert!(hi.is_infinite(), "feasible grid point with f = {hi}"),
            SolveStatus::Undecided => {}
        }
    }

    #[test]
    fn feasibility_check_is_conservative(seed in any::<u64>(), eps in 0.0..6.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.gen_range(1..=2);
        let q = rng.gen_range(1..=2);
        let fams = rng.gen_range(1..=3);
        let problem = random_instance(&mut rng, p, q, fams);
        let n = rng.gen_range(1..=5);
        let pts = points(&mut rng, q, n);
        let dp = DiscretizedProblem::new(&problem, eps, &pts).unwrap();
        let lf = problem.objective().lipschitz_constant().unwrap();
        let lg = affine_lipschitz_x(&problem, pts.points());
        let (lo, _) = brute_force_bracket(&dp, if p == 1 { 20_001 } else { 301 }, lf, lg);
        if lo.is_infinite() {
            // no grid point within the Lipschitz band: certifiably infeasible
            prop_assert_eq!(check_feasibility(&dp, SolveBudget::default()).unwrap(), Feasibility::Infeasible);
        }
    }
}

#[test]
fn more_points_never_lower_the_value() {
    for (p, q) in [(instances::instance_a(), 1), (instances::instance_b(), 1)] {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut pts = Discretization::empty();
        let mut prev = value(&p, 0.2, &pts);
        for _ in 0..12 {
            pts.insert((0..q).map(|_| rng.gen_range(0.0..=1.0)).collect());
            let v = value(&p, 0.2, &pts);
            assert!(v >= prev - 1e-12, "{v} < {prev}");
            prev = v;
        }
    }
}

#[test]
fn smaller_eps_never_raises_the_value() {
    let mut pts = Discretization::empty();
    for y in [0.0, 0.3, 0.7, 1.0] {
        pts.insert(vec![y]);
    }
    for p in [instances::instance_a(), instances::instance_b()] {
        let mut prev = f64::INFINITY;
        for eps in [3.0, 2.0, 1.5, 1.0, 0.5, 0.1, 0.0] {
            let v = value(&p, eps, &pts);
            assert!(v <= prev + 1e-12, "eps {eps}: {v} > {prev}");
            prev = v;
        }
    }
}
