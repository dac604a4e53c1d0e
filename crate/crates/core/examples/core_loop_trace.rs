//! One run of the core loop at a fixed restriction level, printing its trace.

use adaptive_sip::core_loop::{run_core, CoreConfig};
use adaptive_sip::schedule::ToleranceSchedule;
use adaptive_sip::{instances, Discretization};

fn main() -> adaptive_sip::Result<()> {
    let problem = instances::instance_b();
    for rho in [0.0_f64, 0.5, f64::INFINITY] {
        let schedule = if rho == 0.0 {
            ToleranceSchedule::new(
                adaptive_sip::schedule::ObjSchedule::zero(),
                adaptive_sip::schedule::AuxSchedule::default(),
            )
        } else {
            ToleranceSchedule::default()
        };
        let cfg = CoreConfig::new(0.1, rho, schedule, Discretization::empty());
        let run = run_core(&problem, &cfg)?;
        println!(
            "rho = {rho}: {:?}, final |Y| = {}",
            run.status,
            run.final_y.len()
        );
        print!("{}", run.trace.to_csv_string());
        println!();
    }
    Ok(())
}
