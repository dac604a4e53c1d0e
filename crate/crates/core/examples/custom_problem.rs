//! A constraint family given by closures: the point nearest to (1, 1, 0)
//! under the rotating half-planes `x1 cos t + x2 sin t <= 1 + x3`.

use std::sync::Arc;

use adaptive_sip::drivers::{run_sequential, DriverBudget, SequentialConfig};
use adaptive_sip::problem::{FnConstraint, QuadraticObjective};
use adaptive_sip::{BoxDomain, SipProblem};

fn main() -> adaptive_sip::Result<()> {
    let x_box = BoxDomain::cube(3, -2.0, 2.0)?;
    let y_box = BoxDomain::new(vec![0.0], vec![std::f64::consts::TAU])?;
    // (x1 - 1)^2 + (x2 - 1)^2 + x3^2
    let q = vec![
        vec![2.0, 0.0, 0.0],
        vec![0.0, 2.0, 0.0],
        vec![0.0, 0.0, 2.0],
    ];
    let f = QuadraticObjective::new(q, vec![-2.0, -2.0, 0.0], 2.0)?.bounded_on(&x_box);
    let g = FnConstraint::new(
        |x: &[f64], y: &[f64]| x[0] * y[0].cos() + x[1] * y[0].sin() - 1.0 - x[2],
        |_x: &[f64], y: &[f64]| vec![y[0].cos(), y[0].sin(), -1.0],
        // |d/dt| <= |x1| + |x2| <= 4 on the box
        4.0,
    )
    .affine();
    let problem = SipProblem::new(x_box, y_box, Arc::new(f), vec![Arc::new(g)])?
        .with_slater_point(vec![0.0, 0.0, 0.0])?;
    let cfg = SequentialConfig::new(&problem, 1e-3)?;
    let out = run_sequential(&problem, &cfg, &DriverBudget::default())?;
    let r = (2f64.sqrt() + 1.0) / 2.0;
    println!(
        "{:?}: x = {:?}, f = {:.6}",
        out.status, out.x_star, out.f_value
    );
    println!(
        "optimum: x = [{:.6}, {:.6}, {:.6}], f = {:.6}",
        r / 2f64.sqrt(),
        r / 2f64.sqrt(),
        r - 1.0,
        2.0 * (r - 1.0).powi(2)
    );
    Ok(())
}
