//! Test-side oracles and fixtures, written without the library's solvers.

#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use adaptive_sip::finite::DiscretizedProblem;
use adaptive_sip::poly::Polynomial;
use adaptive_sip::problem::{AffinePolyConstraint, FnConstraint, QuadraticObjective};
use adaptive_sip::{BoxDomain, ConstraintFamily, SipProblem};
use rand::Rng;

/// Points of a uniform grid with `n` points per axis (endpoints included).
pub fn grid(b: &BoxDomain, n: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = b
        .lower()
        .iter()
        .zip(b.upper())
        .map(|(&lo, &hi)| {
            if n <= 1 || lo == hi {
                vec![lo]
            } else {
                (0..n)
                    .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn grid_spacing(b: &BoxDomain, n: usize) -> f64 {
    b.lower()
        .iter()
        .zip(b.upper())
        .map(|(lo, hi)| (hi - lo) / (n.max(2) - 1) as f64)
        .fold(0.0, f64::max)
}

/// `max_i g_i(x, y) + eps` over the points of `dp`, recomputed here.
pub fn violation(dp: &DiscretizedProblem<'_>, x: &[f64]) -> f64 {
    dp.points
        .points()
        .iter()
        .flat_map(|y| dp.base.constraints().iter().map(move |g| g.value(x, y)))
        .fold(f64::NEG_INFINITY, f64::max)
        + dp.eps
}

/// Brute-force bracket of the optimal value of `dp` on an `n`-per-axis grid
/// over `X`: `(lo, hi)` with `lo <= opt <= hi` for Lipschitz data.
///
/// `hi` is the grid minimum over feasible grid points. `lo` is the grid
/// minimum over points violating by at most `lg * h / 2` (the neighbour of
/// any feasible point qualifies), minus `lf * h / 2`.
pub fn brute_force_bracket(dp: &DiscretizedProblem<'_>, n: usize, lf: f64, lg: f64) -> (f64, f64) {
    let xd = dp.base.x_domain();
    let h = grid_spacing(xd, n);
    let band = lg * h / 2.0;
    let mut hi = f64::INFINITY;
    let mut lo = f64::INFINITY;
    for x in grid(xd, n) {
        let v = if dp.points.is_empty() {
            f64::NEG_INFINITY
        } else {
            violation(dp, &x)
        };
        let f = dp.base.objective().value(&x);
        if v <= 0.0 {
            hi = hi.min(f);
        }
        if v <= band {
            lo = lo.min(f);
        }
    }
    (lo - lf * h / 2.0, hi)
}

/// Max-norm Lipschitz bound of `x -> g(x, y)` over `X` for affine families:
/// the largest l1-norm of the coefficient vector over the points.
pub fn affine_lipschitz_x(problem: &SipProblem, ys: &[Vec<f64>]) -> f64 {
    let x0 = problem.x_domain().center();
    let x0 = &x0;
    ys.iter()
        .flat_map(|y| {
            problem
                .constraints()
                .iter()
                .map(move |g| g.subgradient_x(x0, y).iter().map(|v| v.abs()).sum::<f64>())
        })
        .fold(0.0, f64::max)
}

/// `min 1/2 x'Qx + c'x  s.t.  A x <= b` for positive definite `Q`, by
/// coordinate ascent on the dual (Hildreth) followed by an exact solve of
/// the KKT system on the resulting active set.
pub struct DenseQp {
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

fn solve_linear(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for k in col..n {
                m[i][k] -= f * m[col][k];
            }
            r[i] -= f * r[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (r[i] - s) / m[i][i];
    }
    Some(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl DenseQp {
    pub fn value(&self, x: &[f64]) -> f64 {
        let qx: Vec<f64> = self.q.iter().map(|row| dot(row, x)).collect();
        0.5 * dot(x, &qx) + dot(&self.c, x)
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| dot(a, x) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn solve(&self, sweeps: usize) -> Vec<f64> {
        let n = self.c.len();
        let m = self.a.len();
        // columns of Q^{-1}
        let qinv: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                solve_linear(self.q.clone(), e).expect("positive definite Q")
            })
            .collect();
        let qinv_mul = |v: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| (0..n).map(|j| qinv[j][i] * v[j]).sum())
                .collect()
        };
        let x0: Vec<f64> = qinv_mul(&self.c).iter().map(|v| -v).collect();
        let qa: Vec<Vec<f64>> = self.a.iter().map(|a| qinv_mul(a)).collect();
        let h: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| dot(&self.a[i], &qa[j])).collect())
            .collect();
        let e: Vec<f64> = (0..m).map(|i| dot(&self.a[i], &x0) - self.b[i]).collect();
        let mut lam = vec![0.0; m];
        let mut x = x0.clone();
        for _ in 0..sweeps {
            let mut change = 0.0f64;
            for i in 0..m {
                if h[i][i] <= 0.0 {
                    continue;
                }
                let w = dot(&self.a[i], &x) - self.b[i];
                let new = (lam[i] + w / h[i][i]).max(0.0);
                let step = new - lam[i];
                if step != 0.0 {
                    for (xi, v) in x.iter_mut().zip(&qa[i]) {
                        *xi -= step * v;
                    }
                    lam[i] = new;
                }
                change = change.max(step.abs());
            }
            if change < 1e-15 {
                break;
            }
        }
        // exact solve on the active set, kept only if it is feasible
        let active: Vec<usize> = (0..m).filter(|&i| lam[i] > 1e-12).collect();
        let mut independent: Vec<usize> = Vec::new();
        for &i in &active {
            let mut trial = independent.clone();
            trial.push(i);
            let k = trial.len();
            let gram: Vec<Vec<f64>> = trial
                .iter()
                .map(|&r| trial.iter().map(|&s| h[r][s]).collect())
                .collect();
            if k <= n && solve_linear(gram, vec![0.0; k]).is_some() {
                independent = trial;
            }
        }
        if !independent.is_empty() {
            let gram: Vec<Vec<f64>> = independent
                .iter()
                .map(|&r| independent.iter().map(|&s| h[r][s]).collect())
                .collect();
            let rhs: Vec<f64> = independent.iter().map(|&r| e[r]).collect();
            if let Some(mu) = solve_linear(gram, rhs) {
                let mut y = x0;
                for (l, &r) in mu.iter().zip(&independent) {
                    for (yi, v) in y.iter_mut().zip(&qa[r]) {
                        *yi -= l * v;
                    }
                }
                if mu.iter().all(|&l| l >= -1e-9) && self.max_violation(&y) <= 1e-9 {
                    return y;
                }
            }
        }
        x
    }
}

/// Random polynomial in `dim` variables of total degree at most `degree`
/// with coefficients in `[-1, 1]`.
pub fn random_poly(rng: &mut impl Rng, dim: usize, degree: u32) -> Polynomial {
    let exps = adaptive_sip::poly::monomial_exponents(dim, degree);
    let terms: Vec<(Vec<u32>, f64)> = exps
        .into_iter()
        .map(|e| (e, rng.gen_range(-1.0..1.0)))
        .collect();
    Polynomial::from_terms(dim, terms).expect("valid terms")
}

/// Random positive definite `Q` with eigenvalues at least `floor`.
pub fn random_pd(rng: &mut impl Rng, n: usize, floor: f64) -> Vec<Vec<f64>> {
    let m: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s: f64 = (0..n).map(|k| m[k][i] * m[k][j]).sum();
                    if i == j {
                        s + floor
                    } else {
                        s
                    }
                })
                .collect()
        })
        .collect()
}

/// Random instance on `X = [-2, 2]^p`, `Y = [0, 1]^q`: a positive definite
/// quadratic objective and `fams` families `a(y) x + b(y)` with polynomial
/// coefficients, where `b <= -1` on `Y` so that `x = 0` is a Slater point
/// with margin at least 1.
pub fn random_instance(rng: &mut impl Rng, p: usize, q: usize, fams: usize) -> SipProblem {
    let xd = BoxDomain::cube(p, -2.0, 2.0).unwrap();
    let yd = BoxDomain::cube(q, 0.0, 1.0).unwrap();
    let qm = random_pd(rng, p, 0.5);
    let c: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let f = QuadraticObjective::new(qm, c, 0.0).unwrap().bounded_on(&xd);
    let mut families: Vec<Arc<dyn ConstraintFamily>> = Vec::new();
    for _ in 0..fams {
        let coeffs: Vec<Polynomial> = (0..p).map(|_| random_poly(rng, q, 2)).collect();
        let b = random_poly(rng, q, 2);
        let bound = b.abs_bound(yd.lower(), yd.upper());
        let offset = b.add_scaled(&Polynomial::constant(q, 1.0), -(bound + 1.0));
        families.push(Arc::new(
            AffinePolyConstraint::new(coeffs, offset, &xd, &yd).unwrap(),
        ));
    }
    SipProblem::new(xd, yd, Arc::new(f), families)
        .unwrap()
        .with_slater_point(vec![0.0; p])
        .unwrap()
}

/// The quasi-convex gap fixture on `X = [-2, 2]`: `g0(x) = x^2 - 1` on
/// `[-1, 1]` and 0 elsewhere, with `f(x) = (x - 2)^2`, whose minimum over
/// `[-1, 1]` exceeds the minimum over `X` by `c = 1`.
pub fn quasi_convex_g0(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        x * x - 1.0
    } else {
        0.0
    }
}

pub fn quasi_convex_f(x: f64) -> f64 {
    (x - 2.0) * (x - 2.0)
}

/// The convex sibling of the fixture: `g(x, y) = x^2 - 1`, same `f`;
/// optimum `x* = 1`, `f* = 1`.
pub fn convex_sibling() -> SipProblem {
    let xd = BoxDomain::cube(1, -2.0, 2.0).unwrap();
    let yd = BoxDomain::cube(1, 0.0, 1.0).unwrap();
    let f = QuadraticObjective::new(vec![vec![2.0]], vec![-4.0], 4.0)
        .unwrap()
        .bounded_on(&xd);
    let g = FnConstraint::new(
        |x: &[f64], _y: &[f64]| x[0] * x[0] - 1.0,
        |x: &[f64], _y: &[f64]| vec![2.0 * x[0]],
        0.0,
    );
    SipProblem::new(xd, yd, Arc::new(f), vec![Arc::new(g)])
        .unwrap()
        .with_slater_point(vec![0.0])
        .unwrap()
}
