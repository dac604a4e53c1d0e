//! Solve a discretized restriction directly and inspect its certificate.

use adaptive_sip::finite::{solve_discretized, DiscretizedProblem, SolveBudget, SolveStatus};
use adaptive_sip::{instances, Discretization};

fn main() -> adaptive_sip::Result<()> {
    let problem = instances::instance_b();
    let mut points = Discretization::empty();
    for y in [0.0, 0.25, 0.5, 0.75, 1.0] {
        points.insert(vec![y]);
    }
    for eps in [0.0, 0.5, 1.0, 3.0] {
        let dp = DiscretizedProblem::new(&problem, eps, &points)?;
        let res = solve_discretized(&dp, 1e-6, SolveBudget::default())?;
        match res.status {
            SolveStatus::Feasible => println!(
                "eps={eps}: x={:?}  {:.8} <= min <= {:.8}  (requested gap {:e})",
                res.x.unwrap_or_default(),
                res.lower,
                res.upper,
                res.gap_request
            ),
            status => println!("eps={eps}: {status:?}"),
        }
    }
    Ok(())
}
