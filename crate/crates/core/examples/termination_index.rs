//! How many restriction levels the sequential driver needs for a given delta.

use adaptive_sip::drivers::compute_termination_index;
use adaptive_sip::problem::RegularityBundle;
use adaptive_sip::schedule::ObjSchedule;

fn main() -> adaptive_sip::Result<()> {
    // eps* = 2 and L* = 4 for the one-dimensional instance on X = [-2, 2]
    let reg = RegularityBundle::new(2.0, 4.0)?;
    for delta in [1.0, 0.5, 0.1, 0.05, 0.01, 1e-3, 1e-6] {
        let zero = compute_termination_index(delta, &reg, 4.0, 1.0, 2.0, &ObjSchedule::zero())?;
        let geo = compute_termination_index(
            delta,
            &reg,
            4.0,
            1.0,
            2.0,
            &ObjSchedule::geometric(0.1, 0.5),
        );
        println!("delta={delta:<8e} m*(zero)={zero:<4} m*(geometric)={geo:?}");
    }
    Ok(())
}
