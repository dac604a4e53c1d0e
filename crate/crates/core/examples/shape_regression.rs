//! Monotone cubic fit to noisy samples of u^3 on [0, 1].

use adaptive_sip::drivers::{run_sequential, DriverBudget, SequentialConfig};
use adaptive_sip::regression::{
    build_problem, eval_polynomial_derivative, RegressionSpec, ShapeConstraint,
};
use adaptive_sip::BoxDomain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> adaptive_sip::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data: Vec<(Vec<f64>, f64)> = (0..20)
        .map(|l| {
            let u = l as f64 / 19.0;
            (vec![u], u.powi(3) + rng.gen_range(-0.1..0.1))
        })
        .collect();
    let spec = RegressionSpec {
        data,
        degree: 3,
        coeff_box: BoxDomain::cube(4, -10.0, 10.0)?,
        ridge: 1e-6,
        shape_constraints: vec![ShapeConstraint::increasing()],
        u_domain: BoxDomain::cube(1, 0.0, 1.0)?,
        slater_point: None,
    };
    let problem = build_problem(&spec)?;
    let cfg = SequentialConfig::new(&problem, 1e-2)?;
    let out = run_sequential(&problem, &cfg, &DriverBudget::default())?;
    let w = out.x_star.clone().unwrap_or_default();
    println!("status {:?}, loss {:.6}", out.status, out.f_value);
    println!("coefficients (1, u, u^2, u^3): {w:?}");
    let min_slope = (0..=1000)
        .map(|j| eval_polynomial_derivative(&w, 3, &[1], &[j as f64 / 1000.0]))
        .collect::<adaptive_sip::Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("smallest slope on a 1001-point grid: {min_slope:.3e}");
    Ok(())
}
