//! Polynomial least-squares regression under derivative shape constraints.
//!
//! The model is `v_w(u) = sum_alpha w_alpha u^alpha` over the monomials of
//! degree at most `n` (ordered as in [`monomial_exponents`]). A shape
//! constraint `sum_alpha c_alpha d^alpha v_w(u) + c0 <= 0` for all `u` in
//! `U` is affine in `w` with polynomial-in-`u` coefficients, so the fit is a
//! convex semi-infinite program with `X = W` and `Y = U`.

use std::io::Read;
use std::sync::Arc;

use crate::error::{invalid, Result, SipError};
use crate::poly::{monomial_exponents, MultiIndex, Polynomial};
use crate::problem::{
    derive_eps_star, AffinePolyConstraint, BoxDomain, ConstraintFamily, QuadraticObjective,
    SipProblem,
};

/// Default ridge weight.
pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Largest coefficient count for which box vertices are tried as Slater
/// candidates.
pub const MAX_VERTEX_SEARCH_DIM: usize = 12;

/// `sum_alpha c_alpha d^alpha v(u) + offset <= 0` on all of `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeConstraint {
    pub weights: Vec<(MultiIndex, f64)>,
    pub offset: f64,
}

impl ShapeConstraint {
    /// `v' >= 0` in one variable.
    pub fn increasing() -> Self {
        Self {
            weights: vec![(vec![1], -1.0)],
            offset: 0.0,
        }
    }

    /// `v'' >= 0` in one variable.
    pub fn convex() -> Self {
        Self {
            weights: vec![(vec![2], -1.0)],
            offset: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegressionSpec {
    /// Pairs `(u_l, t_l)`.
    pub data: Vec<(Vec<f64>, f64)>,
    pub degree: u32,
    pub coeff_box: BoxDomain,
    pub ridge: f64,
    pub shape_constraints: Vec<ShapeConstraint>,
    pub u_domain: BoxDomain,
    /// Used instead of the synthesized one when given.
    pub slater_point: Option<Vec<f64>>,
}

impl RegressionSpec {
    pub fn basis(&self) -> Vec<MultiIndex> {
        monomial_exponents(self.u_domain.dim(), self.degree)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.u_domain.dim();
        if self.data.is_empty() {
            return Err(invalid("regression data is empty"));
        }
        for (u, t) in &self.data {
            if u.len() != d {
                return Err(SipError::DimensionMismatch {
                    expected: d,
                    got: u.len(),
                    context: "regression data point",
                });
            }
            if !t.is_finite() || u.iter().any(|v| !v.is_finite()) {
                return Err(invalid("regression data must be finite"));
            }
        }
        let nbar = self.basis().len();
        if self.coeff_box.dim() != nbar {
            return Err(SipError::DimensionMismatch {
                expected: nbar,
                got: self.coeff_box.dim(),
                context: "coefficient box",
            });
        }
        if !(self.ridge > 0.0 && self.ridge.is_finite()) {
            return Err(invalid(format!("ridge must be > 0, got {}", self.ridge)));
        }
        if self.shape_constraints.is_empty() {
            return Err(invalid("at least one shape constraint is required"));
        }
        for sc in &self.shape_constraints {
            for (alpha, c) in &sc.weights {
                if alpha.len() != d {
                    return Err(invalid(format!(
                        "shape constraint multi-index {alpha:?} must have {d} entries"
                    )));
                }
                let order: u32 = alpha.iter().sum();
                if order > self.degree {
                    return Err(invalid(format!(
                        "shape constraint derivative order {order} exceeds the model degree {}",
                        self.degree
                    )));
                }
                if !c.is_finite() {
                    return Err(invalid("shape constraint weights must be finite"));
                }
            }
            if !sc.offset.is_finite() {
                return Err(invalid("shape constraint offset must be finite"));
            }
        }
        Ok(())
    }

    /// Design matrix `Phi[l][j] = u_l^{alpha_j}`.
    pub fn design_matrix(&self) -> Vec<Vec<f64>> {
        let basis = self.basis();
        self.data
            .iter()
            .map(|(u, _)| basis.iter().map(|a| monomial(u, a)).collect())
            .collect()
    }

    /// `f(w) = |Phi w - t|^2 + ridge |w|^2` as `1/2 w'Qw + c'w + d`.
    pub fn objective(&self) -> Result<QuadraticObjective> {
        let phi = self.design_matrix();
        let nbar = self.basis().len();
        let mut q = vec![vec![0.0; nbar]; nbar];
        let mut c = vec![0.0; nbar];
        let mut d = 0.0;
        for (row, (_, t)) in phi.iter().zip(&self.data) {
            for i in 0..nbar {
                for j in 0..nbar {
                    q[i][j] += 2.0 * row[i] * row[j];
                }
                c[i] -= 2.0 * row[i] * t;
            }
            d += t * t;
        }
        for (i, qi) in q.iter_mut().enumerate() {
            qi[i] += 2.0 * self.ridge;
        }
        Ok(QuadraticObjective::new(q, c, d)?.bounded_on(&self.coeff_box))
    }

    /// The family `g(w, u) = sum_j w_j [sum_alpha c_alpha d^alpha u^{alpha_j}] + c0`.
    pub fn constraint(&self, sc: &ShapeConstraint) -> Result<AffinePolyConstraint> {
        let d = self.u_domain.dim();
        let mut coeffs = Vec::new();
        for exps in self.basis() {
            let mono = Polynomial::from_terms(d, [(exps, 1.0)])?;
            let mut acc = Polynomial::zero(d);
            for (alpha, c) in &sc.weights {
                acc = acc.add_scaled(&mono.derivative(alpha)?, *c);
            }
            coeffs.push(acc);
        }
        AffinePolyConstraint::new(
            coeffs,
            Polynomial::constant(d, sc.offset),
            &self.coeff_box,
            &self.u_domain,
        )
    }
}

fn monomial(u: &[f64], exps: &[u32]) -> f64 {
    u.iter().zip(exps).map(|(v, &e)| v.powi(e as i32)).product()
}

/// Assembles the semi-infinite program of `spec`, with a Slater point when
/// one is given or can be synthesized.
pub fn build_problem(spec: &RegressionSpec) -> Result<SipProblem> {
    spec.validate()?;
    let f = spec.objective()?;
    let families = spec
        .shape_constraints
        .iter()
        .map(|sc| {
            spec.constraint(sc)
                .map(|g| Arc::new(g) as Arc<dyn ConstraintFamily>)
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = SipProblem::new(
        spec.coeff_box.clone(),
        spec.u_domain.clone(),
        Arc::new(f),
        families,
    )?;
    if let Some(w) = &spec.slater_point {
        return problem.with_slater_point(w.clone());
    }
    Ok(match synthesize_slater_point(&problem) {
        Some(w) => problem.with_slater_point(w)?,
        None => problem,
    })
}

/// Tries `w = 0` and the vertices of `W` pulled 1% toward its centre, and
/// returns the certified candidate with the largest margin.
pub fn synthesize_slater_point(problem: &SipProblem) -> Option<Vec<f64>> {
    let w = problem.x_domain();
    let mut candidates = Vec::new();
    let zero = vec![0.0; w.dim()];
    if w.contains(&zero, 0.0) {
        candidates.push(zero);
    }
    if w.dim() <= MAX_VERTEX_SEARCH_DIM {
        let centre = w.center();
        for v in w.vertices() {
            candidates.push(
                v.iter()
                    .zip(&centre)
                    .map(|(a, c)| c + 0.99 * (a - c))
                    .collect(),
            );
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cand in candidates {
        // Cheap rejection before certification.
        let corners = problem.y_domain().vertices();
        if corners
            .iter()
            .any(|y| problem.max_constraint(&cand, y) >= 0.0)
        {
            continue;
        }
        let Ok(p) = problem.clone().with_slater_point(cand.clone()) else {
            continue;
        };
        let Ok(margin) = derive_eps_star(&p, 0.0) else {
            continue;
        };
        if best.as_ref().is_none_or(|(m, _)| margin > *m) {
            best = Some((margin, cand));
        }
    }
    best.map(|(_, w)| w)
}

/// `d^alpha v_w(u)` for the degree-`degree` model with coefficients `w`.
pub fn eval_polynomial_derivative(w: &[f64], degree: u32, alpha: &[u32], u: &[f64]) -> Result<f64> {
    let d = u.len();
    if alpha.len() != d {
        return Err(invalid(format!(
            "multi-index {alpha:?} must have {d} entries"
        )));
    }
    let order: u32 = alpha.iter().sum();
    if order > degree {
        return Err(invalid(format!(
            "derivative order {order} exceeds degree {degree}"
        )));
    }
    let basis = monomial_exponents(d, degree);
    if basis.len() != w.len() {
        return Err(SipError::DimensionMismatch {
            expected: basis.len(),
            got: w.len(),
            context: "model coefficients",
        });
    }
    let v = Polynomial::from_terms(d, basis.into_iter().zip(w.iter().copied()))?;
    Ok(v.derivative(alpha)?.eval(u))
}

/// Reads regression data from CSV: `dim` input columns followed by the
/// target. A header row is detected and skipped.
pub fn read_data_csv<R: Read>(reader: R, dim: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(invalid(format!(
                "csv row {} has {} columns, expected {}",
                line + 1,
                rec.len(),
                dim + 1
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(vals) => out.push((vals[..dim].to_vec(), vals[dim])),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(invalid(format!("csv row {}: {e}", line + 1))),
        }
    }
    Ok(out)
}

/// Data `{(0, 1), (1, 0)}`, degree 1, nondecreasing on `U = [0, 1]`,
/// `W = [-10, 10]^2`, ridge `1e-6`. The fit tends to `(0.5, 0)` as the
/// ridge vanishes.
pub fn spec_r() -> RegressionSpec {
    RegressionSpec {
        data: vec![(vec![0.0], 1.0), (vec![1.0], 0.0)],
        degree: 1,
        coeff_box: BoxDomain::cube(2, -10.0, 10.0).expect("box"),
        ridge: DEFAULT_RIDGE,
        shape_constraints: vec![ShapeConstraint::increasing()],
        u_domain: BoxDomain::new(vec![0.0], vec![1.0]).expect("box"),
        slater_point: None,
    }
}

pub fn instance_r() -> SipProblem {
    build_problem(&spec_r()).expect("instance R")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_r_assembly() {
        let spec = spec_r();
        let p = build_problem(&spec).unwrap();
        let s = DEFAULT_RIDGE;
        for w in [[0.3f64, -0.7], [1.0, 2.0], [-4.0, 0.5]] {
            let expect =
                (w[0] - 1.0).powi(2) + (w[0] + w[1]).powi(2) + s * (w[0] * w[0] + w[1] * w[1]);
            assert!((p.objective().value(&w) - expect).abs() < 1e-12);
            for u in [0.0, 0.4, 1.0] {
                assert_eq!(p.constraints()[0].value(&w, &[u]), -w[1]);
            }
        }
        assert_eq!(p.max_lipschitz_y(), 0.0);
        let slater = p.slater_point().unwrap();
        assert!(slater[1] > 0.0);
    }

    #[test]
    fn convexity_constraint_is_constant_in_u() {
        let spec = RegressionSpec {
            degree: 2,
            coeff_box: BoxDomain::cube(3, -5.0, 5.0).unwrap(),
            shape_constraints: vec![ShapeConstraint::convex()],
            ..spec_r()
        };
        let g = spec.constraint(&spec.shape_constraints[0]).unwrap();
        for u in [0.0, 0.5, 1.0] {
            assert_eq!(g.value(&[1.0, 2.0, 3.0], &[u]), -6.0);
        }
        assert_eq!(g.lipschitz_in_y(), 0.0);
    }

    #[test]
    fn cubic_monotonicity_depends_on_u() {
        let spec = RegressionSpec {
            degree: 3,
            coeff_box: BoxDomain::cube(4, -2.0, 2.0).unwrap(),
            ..spec_r()
        };
        let g = spec.constraint(&spec.shape_constraints[0]).unwrap();
        let w = [0.1, 0.2, -0.3, 0.4];
        for u in [0.0, 0.3, 1.0] {
            let expect = -(w[1] + 2.0 * w[2] * u + 3.0 * w[3] * u * u);
            assert!((g.value(&w, &[u]) - expect).abs() < 1e-15);
        }
        // 2 max|w2| + 6 max|w3| on U = [0, 1]
        assert!((g.lipschitz_in_y() - (2.0 * 2.0 + 6.0 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            eval_polynomial_derivative(&[1.0, 2.0], 1, &[1], &[0.7]).unwrap(),
            2.0
        );
        assert_eq!(
            eval_polynomial_derivative(&[0.0, 0.0, 1.0], 2, &[2], &[-3.0]).unwrap(),
            2.0
        );
        // two variables, degree 2: 1, u1, u2, u1^2, u1 u2, u2^2
        let w = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(
            eval_polynomial_derivative(&w, 2, &[1, 1], &[0.3, 0.9]).unwrap(),
            1.0
        );
        assert!(eval_polynomial_derivative(&[1.0, 2.0], 1, &[2], &[0.0]).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = spec_r();
        spec.data.clear();
        assert!(build_problem(&spec).is_err());
        let mut spec = spec_r();
        spec.shape_constraints = vec![ShapeConstraint::convex()];
        assert!(build_problem(&spec).is_err());
    }

    #[test]
    fn csv_ingestion() {
        let text = "u,t\n0,1\n1, 0\n";
        let data = read_data_csv(text.as_bytes(), 1).unwrap();
        assert_eq!(data, vec![(vec![0.0], 1.0), (vec![1.0], 0.0)]);
        assert!(read_data_csv("0,1,2\n".as_bytes(), 1).is_err());
        assert!(read_data_csv("0,1\nx,2\n".as_bytes(), 1).is_err());
    }
}
