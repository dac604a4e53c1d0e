//! Built-in test instances.

use std::sync::Arc;

use crate::poly::Polynomial;
use crate::problem::{AffinePolyConstraint, BoxDomain, QuadraticObjective, SipProblem};

fn linear_in_y(c0: f64, c1: f64) -> Polynomial {
    Polynomial::from_terms(1, [(vec![0], c0), (vec![1], c1)]).expect("univariate linear")
}

/// `min x^2` over `[-2, 2]` s.t. `x + y - 1 <= 0` for all `y in [0, 1]`.
/// Optimum `x = 0`; Slater point `-2`.
pub fn instance_a() -> SipProblem {
    let x = BoxDomain::new(vec![-2.0], vec![2.0]).expect("box");
    let y = BoxDomain::new(vec![0.0], vec![1.0]).expect("box");
    let f = QuadraticObjective::new(vec![vec![2.0]], vec![0.0], 0.0)
        .expect("convex")
        .bounded_on(&x);
    let g = AffinePolyConstraint::new(vec![linear_in_y(1.0, 0.0)], linear_in_y(-1.0, 1.0), &x, &y)
        .expect("constraint");
    SipProblem::new(x, y, Arc::new(f), vec![Arc::new(g)])
        .and_then(|p| p.with_slater_point(vec![-2.0]))
        .expect("instance A")
}

/// `min x1^2 + x2^2` over `[-3, 3]^2` s.t. `y x1 + (1 - y) x2 + 1 <= 0` for
/// all `y in [0, 1]`. Optimum `(-1, -1)` with value 2; Slater point `(-3, -3)`.
pub fn instance_b() -> SipProblem {
    let x = BoxDomain::cube(2, -3.0, 3.0).expect("box");
    let y = BoxDomain::new(vec![0.0], vec![1.0]).expect("box");
    let f = QuadraticObjective::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![0.0; 2], 0.0)
        .expect("convex")
        .bounded_on(&x);
    let g = AffinePolyConstraint::new(
        vec![linear_in_y(0.0, 1.0), linear_in_y(1.0, -1.0)],
        Polynomial::constant(1, 1.0),
        &x,
        &y,
    )
    .expect("constraint");
    SipProblem::new(x, y, Arc::new(f), vec![Arc::new(g)])
        .and_then(|p| p.with_slater_point(vec![-3.0, -3.0]))
        .expect("instance B")
}

/// Looks up a built-in instance by name.
pub fn builtin(name: &str) -> Option<SipProblem> {
    match name {
        "instance_A" => Some(instance_a()),
        "instance_B" => Some(instance_b()),
        "instance_R" => Some(crate::regression::instance_r()),
        _ => None,
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["instance_A", "instance_B", "instance_R"];
