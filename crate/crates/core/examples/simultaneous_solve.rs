//! The simultaneous driver, which refines the restriction and the
//! discretization in one loop and keeps a relaxation-side check point.

use adaptive_sip::drivers::{run_simultaneous, DriverBudget, SimultaneousConfig};
use adaptive_sip::schedule::{AuxSchedule, ObjSchedule, ToleranceSchedule};
use adaptive_sip::{instances, Discretization};

fn main() -> adaptive_sip::Result<()> {
    let problem = instances::instance_a();
    let delta = 1e-3;
    // sup of the objective tolerances must stay strictly below delta / 2
    let schedule = ToleranceSchedule::new(
        ObjSchedule::geometric(delta / 4.0, 0.5),
        AuxSchedule::default(),
    );
    let cfg = SimultaneousConfig::new(
        delta,
        None,
        2.0,
        1.0,
        Discretization::empty(),
        Discretization::empty(),
        schedule,
        f64::INFINITY,
    )?;
    let out = run_simultaneous(&problem, &cfg, &DriverBudget::default())?;
    println!("status: {:?}", out.status);
    println!("x*: {:?}  f(x*) = {:.3e}", out.x_star, out.f_value);
    println!("check point: {:?}", out.check_point);
    println!(
        "eps terminal: {:e}, iterations: {}",
        out.eps_terminal, out.iterations.inner
    );

    let bad = ToleranceSchedule::new(ObjSchedule::Constant(delta), AuxSchedule::default());
    let err = SimultaneousConfig::new(
        delta,
        None,
        2.0,
        1.0,
        Discretization::empty(),
        Discretization::empty(),
        bad,
        f64::INFINITY,
    )
    .unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
