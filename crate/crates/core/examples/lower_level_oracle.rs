//! Certified maximization of a constraint family over Y at a fixed x.

use adaptive_sip::poly::Polynomial;
use adaptive_sip::problem::AffinePolyConstraint;
use adaptive_sip::{BoxDomain, BranchAndBound, MaxOracle};

fn main() -> adaptive_sip::Result<()> {
    let x_box = BoxDomain::cube(1, -1.0, 1.0)?;
    let y_box = BoxDomain::cube(2, -1.0, 1.0)?;
    // g(x, y) = x * (y1^2 - y2) + sin-like wiggle approximated by y1^3 - y1 y2^2
    let coeff = Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 1], -1.0)])?;
    let offset = Polynomial::from_terms(2, [(vec![3, 0], 1.0), (vec![1, 2], -1.0)])?;
    let g = AffinePolyConstraint::new(vec![coeff], offset, &x_box, &y_box)?;
    let oracle = BranchAndBound::default();
    for delta in [1e-2, 1e-6, 1e-10] {
        let m = oracle.certified_max(&g, &y_box, &[0.5], delta)?;
        println!(
            "delta={delta:e}: y*={:?} value={:.12} sup <= {:.12} ({} evaluations)",
            m.y_star,
            m.value,
            m.upper_bound(),
            m.evaluations
        );
    }
    Ok(())
}
