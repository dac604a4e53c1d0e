//! Semi-infinite problem instances.
//!
//! A [`SipProblem`] minimizes a convex objective over a box `X` subject to
//! `g_i(x, y) <= 0` for every `y` in a box `Y` and every constraint family
//! `i`. Both the objective and the families are evaluation oracles; the
//! solvers never look inside them except through [`ConstraintFamily::section`],
//! which lets a family hand the lower-level solver a sharper bounding rule
//! than its Lipschitz constant.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result, SipError};
use crate::oracle::{certified_max, BranchAndBound};
use crate::poly::Polynomial;

/// Axis-aligned box `[lower, upper]` measured in the max-metric.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(SipError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
                context: "box upper bounds",
            });
        }
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return Err(invalid(format!("box bound {j} is not finite")));
            }
            if l > u {
                return Err(invalid(format!(
                    "box bound {j}: lower {l} exceeds upper {u}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Max-norm diameter `max_j (upper_j - lower_j)`.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (u - l))
            .collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    pub(crate) fn check_point(&self, x: &[f64], context: &'static str) -> Result<()> {
        if x.len() != self.dim() {
            return Err(SipError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
                context,
            });
        }
        Ok(())
    }

    /// All `2^dim` corners, in binary counting order (bit `j` selects the
    /// upper bound of axis `j`).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|j| {
                        if mask >> j & 1 == 1 {
                            self.upper[j]
                        } else {
                            self.lower[j]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Uniform grid with spacing at most `resolution` along each axis,
    /// including both endpoints. Degenerate axes contribute a single value.
    pub fn grid_axes(&self, resolution: f64) -> Vec<Vec<f64>> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| {
                let width = u - l;
                if width == 0.0 {
                    return vec![l];
                }
                let cells = (width / resolution).ceil().max(1.0) as usize;
                (0..=cells)
                    .map(|k| {
                        if k == cells {
                            u
                        } else {
                            l + width * k as f64 / cells as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Calls `visit` on every point of the tensor grid spanned by `axes`, in
/// lexicographic order with the last axis varying fastest.
pub(crate) fn for_each_grid_point(axes: &[Vec<f64>], mut visit: impl FnMut(&[f64])) {
    let dim = axes.len();
    if axes.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; dim];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        visit(&point);
        let mut j = dim;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                point[j] = axes[j][idx[j]];
                break;
            }
            idx[j] = 0;
            point[j] = axes[j][0];
        }
    }
}

/// A convex objective `f` on `X`.
///
/// The Lipschitz constant, when given, is with respect to the max-norm (the
/// same norm [`BoxDomain::diameter`] uses), so `|f(a) - f(b)| <= L |a - b|_inf`.
pub trait ConvexObjective: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
    fn lipschitz_constant(&self) -> Option<f64> {
        None
    }
    /// Declared, never checked.
    fn strictly_convex(&self) -> bool {
        false
    }
    /// Quadratic structure, if any; enables the exact QP path of the finite
    /// solver.
    fn as_quadratic(&self) -> Option<&QuadraticObjective> {
        None
    }
}

/// `f(x) = 1/2 x'Qx + c'x + d` with `Q` symmetric positive semidefinite.
#[derive(Clone, Debug)]
pub struct QuadraticObjective {
    q: Vec<Vec<f64>>,
    c: Vec<f64>,
    d: f64,
    lipschitz: Option<f64>,
    strictly_convex: bool,
}

impl QuadraticObjective {
    /// Validates symmetry and positive semidefiniteness of `q`.
    pub fn new(q: Vec<Vec<f64>>, c: Vec<f64>, d: f64) -> Result<Self> {
        let n = c.len();
        if q.len() != n || q.iter().any(|row| row.len() != n) {
            return Err(invalid(format!("objective matrix must be {n}x{n}")));
        }
        let scale = q
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (q[i][j] - q[j][i]).abs() > 1e-12 * scale {
                    return Err(invalid("objective matrix is not symmetric"));
                }
            }
        }
        if q.iter().flatten().chain(&c).any(|v| !v.is_finite()) || !d.is_finite() {
            return Err(invalid("objective coefficients must be finite"));
        }
        let min_eig = if n == 0 {
            0.0
        } else {
            let m = DMatrix::from_fn(n, n, |i, j| q[i][j]);
            SymmetricEigen::new(m)
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        };
        if min_eig < -1e-10 * scale {
            return Err(SipError::NotConvex(format!(
                "objective matrix has eigenvalue {min_eig:e} < 0"
            )));
        }
        Ok(Self {
            q,
            c,
            d,
            lipschitz: None,
            strictly_convex: min_eig > 1e-12 * scale,
        })
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn linear(&self) -> &[f64] {
        &self.c
    }

    pub fn constant(&self) -> f64 {
        self.d
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }

    /// Max-norm Lipschitz constant on `domain`: `sup_x |Qx + c|_1`, bounded
    /// row by row (each gradient component is affine, so its extreme value
    /// over the box is attained at a vertex).
    pub fn lipschitz_on(&self, domain: &BoxDomain) -> f64 {
        (0..self.c.len())
            .map(|i| {
                let (mut lo, mut hi) = (self.c[i], self.c[i]);
                for j in 0..self.c.len() {
                    let a = self.q[i][j] * domain.lower()[j];
                    let b = self.q[i][j] * domain.upper()[j];
                    lo += a.min(b);
                    hi += a.max(b);
                }
                lo.abs().max(hi.abs())
            })
            .sum()
    }

    /// Sets the Lipschitz constant from [`Self::lipschitz_on`].
    pub fn bounded_on(self, domain: &BoxDomain) -> Self {
        let l = self.lipschitz_on(domain);
        self.with_lipschitz(l)
    }
}

impl ConvexObjective for QuadraticObjective {
    fn value(&self, x: &[f64]) -> f64 {
        let mut acc = self.d;
        for i in 0..self.c.len() {
            let qi: f64 = self.q[i].iter().zip(x).map(|(a, b)| a * b).sum();
            acc += x[i] * (0.5 * qi + self.c[i]);
        }
        acc
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.c.len())
            .map(|i| self.c[i] + self.q[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        self.lipschitz
    }

    fn strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    fn as_quadratic(&self) -> Option<&QuadraticObjective> {
        Some(self)
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Objective given by closures.
#[derive(Clone)]
pub struct FnObjective {
    value: Arc<ValueFn>,
    subgradient: Arc<GradFn>,
    lipschitz: Option<f64>,
    strictly_convex: bool,
}

impl FnObjective {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        subgradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            subgradient: Arc::new(subgradient),
            lipschitz: None,
            strictly_convex: false,
        }
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }

    pub fn strictly_convex(mut self, flag: bool) -> Self {
        self.strictly_convex = flag;
        self
    }
}

impl fmt::Debug for FnObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnObjective")
            .field("lipschitz", &self.lipschitz)
            .field("strictly_convex", &self.strictly_convex)
            .finish_non_exhaustive()
    }
}

impl ConvexObjective for FnObjective {
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        (self.subgradient)(x)
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        self.lipschitz
    }

    fn strictly_convex(&self) -> bool {
        self.strictly_convex
    }
}

/// The function `y -> g_i(x, y)` for one fixed `x`, as seen by the
/// lower-level solver.
pub trait Section {
    fn value(&self, y: &[f64]) -> f64;

    /// Returns `(value at center, bound)` where the bound dominates the
    /// section on the box `|y - center|_j <= half_widths[j]`.
    fn upper_bound(&self, center: &[f64], half_widths: &[f64]) -> (f64, f64);
}

/// Section bounded only through the family's Lipschitz constant.
pub struct LipschitzSection<'a> {
    pub family: &'a dyn ConstraintFamily,
    pub x: &'a [f64],
}

impl Section for LipschitzSection<'_> {
    fn value(&self, y: &[f64]) -> f64 {
        self.family.value(self.x, y)
    }

    fn upper_bound(&self, center: &[f64], half_widths: &[f64]) -> (f64, f64) {
        let v = self.family.value(self.x, center);
        let r = half_widths.iter().copied().fold(0.0, f64::max);
        (v, v + self.family.lipschitz_in_y() * r)
    }
}

/// Section that is a polynomial in `y`; bounded by its Taylor expansion.
pub struct PolynomialSection(pub Polynomial);

impl Section for PolynomialSection {
    fn value(&self, y: &[f64]) -> f64 {
        self.0.eval(y)
    }

    fn upper_bound(&self, center: &[f64], half_widths: &[f64]) -> (f64, f64) {
        self.0.upper_bound_on_box(center, half_widths)
    }
}

/// One constraint family `g_i`, convex in `x` for every `y`.
pub trait ConstraintFamily: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64], y: &[f64]) -> f64;

    fn subgradient_x(&self, x: &[f64], y: &[f64]) -> Vec<f64>;

    /// Max-metric Lipschitz constant of `y -> g_i(x, y)`, uniform over `X`.
    fn lipschitz_in_y(&self) -> f64;

    /// Affine families get exact linear rows in the cutting-plane master
    /// instead of outer-approximating cuts.
    fn affine_in_x(&self) -> bool {
        false
    }

    /// A structured section at `x` with a sharper bounding rule. `None`
    /// makes the lower-level solver fall back to the Lipschitz bound.
    fn section<'a>(&'a self, _x: &'a [f64]) -> Option<Box<dyn Section + 'a>> {
        None
    }

    /// Polynomial structure, if any; needed for serialization.
    fn as_affine_poly(&self) -> Option<&AffinePolyConstraint> {
        None
    }
}

/// `g(x, y) = sum_k a_k(y) x_k + b(y)` with polynomial coefficient functions.
#[derive(Clone, Debug)]
pub struct AffinePolyConstraint {
    x_coeffs: Vec<Polynomial>,
    offset: Polynomial,
    lipschitz_y: f64,
}

impl AffinePolyConstraint {
    /// Computes the Lipschitz constant in `y` from coefficient bounds over
    /// `x_domain` and `y_domain`.
    pub fn new(
        x_coeffs: Vec<Polynomial>,
        offset: Polynomial,
        x_domain: &BoxDomain,
        y_domain: &BoxDomain,
    ) -> Result<Self> {
        if x_coeffs.len() != x_domain.dim() {
            return Err(SipError::DimensionMismatch {
                expected: x_domain.dim(),
                got: x_coeffs.len(),
                context: "constraint coefficient functions",
            });
        }
        let q = y_domain.dim();
        if x_coeffs.iter().chain([&offset]).any(|p| p.dim() != q) {
            return Err(invalid(format!(
                "constraint coefficient polynomials must have {q} variables"
            )));
        }
        let (yl, yu) = (y_domain.lower(), y_domain.upper());
        let mut per_axis = offset.partial_abs_bounds(yl, yu);
        for (k, a) in x_coeffs.iter().enumerate() {
            let xmax = x_domain.lower()[k].abs().max(x_domain.upper()[k].abs());
            for (acc, b) in per_axis.iter_mut().zip(a.partial_abs_bounds(yl, yu)) {
                *acc += xmax * b;
            }
        }
        let lipschitz_y = per_axis.iter().sum();
        Ok(Self {
            x_coeffs,
            offset,
            lipschitz_y,
        })
    }

    pub fn x_coeffs(&self) -> &[Polynomial] {
        &self.x_coeffs
    }

    pub fn offset(&self) -> &Polynomial {
        &self.offset
    }

    /// The section polynomial `sum_k x_k a_k + b`.
    pub fn section_polynomial(&self, x: &[f64]) -> Polynomial {
        self.x_coeffs
            .iter()
            .zip(x)
            .fold(self.offset.clone(), |acc, (a, &xk)| acc.add_scaled(a, xk))
    }
}

impl ConstraintFamily for AffinePolyConstraint {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        self.offset.eval(y)
            + self
                .x_coeffs
                .iter()
                .zip(x)
                .map(|(a, xk)| a.eval(y) * xk)
                .sum::<f64>()
    }

    fn subgradient_x(&self, _x: &[f64], y: &[f64]) -> Vec<f64> {
        self.x_coeffs.iter().map(|a| a.eval(y)).collect()
    }

    fn lipschitz_in_y(&self) -> f64 {
        self.lipschitz_y
    }

    fn affine_in_x(&self) -> bool {
        true
    }

    fn section<'a>(&'a self, x: &'a [f64]) -> Option<Box<dyn Section + 'a>> {
        Some(Box::new(PolynomialSection(self.section_polynomial(x))))
    }

    fn as_affine_poly(&self) -> Option<&AffinePolyConstraint> {
        Some(self)
    }
}

type ConstraintValueFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type ConstraintGradFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;

/// Constraint family given by closures and a Lipschitz constant in `y`.
#[derive(Clone)]
pub struct FnConstraint {
    value: Arc<ConstraintValueFn>,
    subgradient: Arc<ConstraintGradFn>,
    lipschitz_y: f64,
    affine: bool,
}

impl FnConstraint {
    pub fn new(
        value: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        subgradient_x: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        lipschitz_y: f64,
    ) -> Self {
        Self {
            value: Arc::new(value),
            subgradient: Arc::new(subgradient_x),
            lipschitz_y,
            affine: false,
        }
    }

    /// Declares the family affine in `x`.
    pub fn affine(mut self) -> Self {
        self.affine = true;
        self
    }
}

impl fmt::Debug for FnConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnConstraint")
            .field("lipschitz_y", &self.lipschitz_y)
            .field("affine", &self.affine)
            .finish_non_exhaustive()
    }
}

impl ConstraintFamily for FnConstraint {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.value)(x, y)
    }

    fn subgradient_x(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (self.subgradient)(x, y)
    }

    fn lipschitz_in_y(&self) -> f64 {
        self.lipschitz_y
    }

    fn affine_in_x(&self) -> bool {
        self.affine
    }
}

/// A convex semi-infinite program over box domains.
#[derive(Clone, Debug)]
pub struct SipProblem {
    x_domain: BoxDomain,
    y_domain: BoxDomain,
    objective: Arc<dyn ConvexObjective>,
    constraints: Vec<Arc<dyn ConstraintFamily>>,
    slater_point: Option<Vec<f64>>,
}

impl SipProblem {
    pub fn new(
        x_domain: BoxDomain,
        y_domain: BoxDomain,
        objective: Arc<dyn ConvexObjective>,
        constraints: Vec<Arc<dyn ConstraintFamily>>,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(invalid("a problem needs at least one constraint family"));
        }
        for (i, c) in constraints.iter().enumerate() {
            let l = c.lipschitz_in_y();
            if !l.is_finite() || l < 0.0 {
                return Err(invalid(format!(
                    "constraint family {i} has invalid Lipschitz constant {l}"
                )));
            }
        }
        Ok(Self {
            x_domain,
            y_domain,
            objective,
            constraints,
            slater_point: None,
        })
    }

    /// Registers a Slater point after certifying
    /// `max_i sup_y g_i(point, y) < 0` with the lower-level solver.
    pub fn with_slater_point(mut self, point: Vec<f64>) -> Result<Self> {
        self.x_domain.check_point(&point, "slater point")?;
        if !self.x_domain.contains(&point, 0.0) {
            return Err(invalid("slater point lies outside the x-domain"));
        }
        certify_strictly_negative(&self, &point)?;
        self.slater_point = Some(point);
        Ok(self)
    }

    pub fn x_domain(&self) -> &BoxDomain {
        &self.x_domain
    }

    pub fn y_domain(&self) -> &BoxDomain {
        &self.y_domain
    }

    pub fn objective(&self) -> &dyn ConvexObjective {
        self.objective.as_ref()
    }

    pub fn objective_arc(&self) -> Arc<dyn ConvexObjective> {
        self.objective.clone()
    }

    pub fn constraints(&self) -> &[Arc<dyn ConstraintFamily>] {
        &self.constraints
    }

    pub fn slater_point(&self) -> Option<&[f64]> {
        self.slater_point.as_deref()
    }

    /// Largest Lipschitz constant in `y` over all families.
    pub fn max_lipschitz_y(&self) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.lipschitz_in_y())
            .fold(0.0, f64::max)
    }

    /// `max_i g_i(x, y)`.
    pub fn max_constraint(&self, x: &[f64], y: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.value(x, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Certified upper bound on `max_i sup_y g_i(point, y)`, refined until its
/// sign is decided. Returns the bound when negative.
fn certify_strictly_negative(problem: &SipProblem, point: &[f64]) -> Result<f64> {
    let oracle = BranchAndBound::default();
    let mut delta = 1e-2;
    loop {
        let mut value = f64::NEG_INFINITY;
        let mut bound = f64::NEG_INFINITY;
        for fam in problem.constraints() {
            let cm = certified_max(&oracle, fam.as_ref(), problem.y_domain(), point, delta)?;
            value = value.max(cm.value);
            bound = bound.max(cm.value + cm.gap);
        }
        if bound < 0.0 {
            return Ok(bound);
        }
        if value >= 0.0 || delta <= 1e-10 {
            return Err(SipError::NoStrictFeasibility { bound });
        }
        delta = (0.5 * value.abs()).min(0.1 * delta).max(1e-10);
    }
}

/// Regularity data consumed by the a-priori termination index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityBundle {
    /// `eps_star > 0` with a nonempty `eps_star`-restricted feasible set.
    pub eps_star: f64,
    /// Max-norm Lipschitz constant of the objective.
    pub lipschitz_f: f64,
}

impl RegularityBundle {
    pub fn new(eps_star: f64, lipschitz_f: f64) -> Result<Self> {
        if !(eps_star > 0.0 && eps_star.is_finite()) {
            return Err(invalid(format!(
                "eps_star must be positive, got {eps_star}"
            )));
        }
        if !(lipschitz_f > 0.0 && lipschitz_f.is_finite()) {
            return Err(invalid(format!(
                "objective Lipschitz constant must be positive, got {lipschitz_f}"
            )));
        }
        Ok(Self {
            eps_star,
            lipschitz_f,
        })
    }

    /// `eps_star` from the problem's Slater point and `lipschitz_f` from its
    /// objective metadata.
    pub fn from_problem(problem: &SipProblem, oracle_tol: f64) -> Result<Self> {
        let eps_star = derive_eps_star(problem, oracle_tol)?;
        let lipschitz_f = problem.objective().lipschitz_constant().ok_or_else(|| {
            invalid("objective carries no Lipschitz constant; supply one explicitly")
        })?;
        // A constant objective is Lipschitz with any positive constant.
        Self::new(eps_star, lipschitz_f.max(f64::MIN_POSITIVE))
    }
}

/// Dense-grid estimate of `max_{i, y} g_i(x, y)`.
///
/// The grid spacing is at most `grid_resolution` per axis, so the true
/// supremum exceeds the returned value by at most
/// `max_i L_y * grid_resolution / 2`.
pub fn feasibility_margin(problem: &SipProblem, x: &[f64], grid_resolution: f64) -> Result<f64> {
    problem
        .x_domain
        .check_point(x, "feasibility margin point")?;
    if !(grid_resolution > 0.0) {
        return Err(invalid("grid resolution must be positive"));
    }
    let axes = problem.y_domain.grid_axes(grid_resolution);
    let mut best = f64::NEG_INFINITY;
    for_each_grid_point(&axes, |y| {
        best = best.max(problem.max_constraint(x, y));
    });
    Ok(best)
}

/// Grid resolution used for post-hoc margins: `1e-4 * diam Y`, coarsened so
/// the grid has at most about a million points.
pub fn default_margin_resolution(y_domain: &BoxDomain) -> f64 {
    let diam = y_domain.diameter();
    if diam == 0.0 {
        return 1.0;
    }
    let q = y_domain.dim().max(1) as f64;
    let per_axis = 1e6f64.powf(1.0 / q);
    (1e-4 * diam).max(diam / (per_axis - 1.0))
}

/// A restriction level `eps_star` witnessed by the Slater point:
/// `-(certified sup bound) - oracle_tol`.
pub fn derive_eps_star(problem: &SipProblem, oracle_tol: f64) -> Result<f64> {
    let point = problem
        .slater_point
        .as_deref()
        .ok_or_else(|| invalid("no Slater point registered; cannot derive eps_star"))?;
    if !(oracle_tol >= 0.0) {
        return Err(invalid("oracle tolerance must be nonnegative"));
    }
    let bound = certify_strictly_negative(problem, point)?;
    let eps = -bound - oracle_tol;
    if eps > 0.0 {
        Ok(eps)
    } else {
        // Clamp: still positive and still witnessed by the Slater point.
        Ok(0.5 * -bound)
    }
}
