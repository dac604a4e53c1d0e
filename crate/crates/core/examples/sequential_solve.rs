//! Solve instance B to within `delta` of its optimum with the sequential driver.

use adaptive_sip::drivers::{run_sequential, DriverBudget, SequentialConfig};
use adaptive_sip::instances;

fn main() -> adaptive_sip::Result<()> {
    let problem = instances::instance_b();
    for delta in [1e-1, 1e-2, 1e-3] {
        let cfg = SequentialConfig::new(&problem, delta)?;
        let m_star = cfg.termination_index(&problem)?;
        let out = run_sequential(&problem, &cfg, &DriverBudget::default())?;
        let x = out.x_star.as_deref().unwrap_or_default();
        println!(
            "delta={delta:e}  m*={m_star}  status={:?}  x={x:?}  f={:.6}  margin={:.3e}  inner={}",
            out.status, out.f_value, out.feasibility_margin, out.iterations.inner
        );
    }
    Ok(())
}
