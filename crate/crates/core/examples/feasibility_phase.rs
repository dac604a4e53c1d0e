//! Find a feasible point of the semi-infinite problem by shrinking the
//! restriction level until the discretized problems become solvable.

use adaptive_sip::drivers::{run_feas_finite, DriverBudget, FeasFiniteConfig};
use adaptive_sip::schedule::ToleranceSchedule;
use adaptive_sip::{instances, Discretization};

fn main() -> adaptive_sip::Result<()> {
    let problem = instances::instance_a();
    // eps0 = 8 is too strict for X = [-2, 2]; the loop divides it by r
    let cfg = FeasFiniteConfig {
        eps0: 8.0,
        r: 2.0,
        schedule: ToleranceSchedule::default(),
        rho: f64::INFINITY,
        y0: Discretization::empty(),
    };
    let run = run_feas_finite(&problem, &cfg, &DriverBudget::default())?;
    println!("{:?} after {} iterations", run.status, run.k_count);
    println!("x = {:?} at eps = {}", run.x, run.eps_terminal);
    print!("{}", run.trace.to_csv_string());
    Ok(())
}
