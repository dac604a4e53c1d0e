//! Primal active-set method for strictly convex QPs
//!
//! ```text
//! minimize 1/2 x'Qx + c'x + d  subject to  Ax <= b,  lower <= x <= upper
//! ```
//!
//! started from a (nearly) feasible point. The returned lower bound is the
//! Lagrangian dual value at the final multipliers, valid for any
//! nonnegative multipliers because `Q` is positive definite.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

pub(crate) struct QpSolution {
    pub x: Vec<f64>,
    pub lower_bound: f64,
    pub iterations: usize,
}

pub(crate) struct Qp<'a> {
    pub q: &'a [Vec<f64>],
    pub c: &'a [f64],
    pub d: f64,
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

impl Qp<'_> {
    /// `None` if `Q` is not numerically positive definite or the active-set
    /// iteration does not settle within `max_iterations`.
    pub fn solve(
        &self,
        rows: &[(Vec<f64>, f64)],
        start: &[f64],
        max_iterations: usize,
    ) -> Option<QpSolution> {
        let n = self.c.len();
        let qm = DMatrix::from_fn(n, n, |i, j| self.q[i][j]);
        let chol = Cholesky::new(qm.clone())?;

        let mut a: Vec<Vec<f64>> = Vec::with_capacity(rows.len() + 2 * n);
        let mut b: Vec<f64> = Vec::with_capacity(rows.len() + 2 * n);
        for (row, rhs) in rows {
            let s = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if s == 0.0 {
                if *rhs < 0.0 {
                    return None;
                }
                continue;
            }
            a.push(row.iter().map(|v| v / s).collect());
            b.push(rhs / s);
        }
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            a.push(e.clone());
            b.push(self.upper[i]);
            e[i] = -1.0;
            a.push(e);
            b.push(-self.lower[i]);
        }
        let m = a.len();
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();

        let mut x: Vec<f64> = start
            .iter()
            .zip(self.lower.iter().zip(self.upper))
            .map(|(v, (l, u))| v.clamp(*l, *u))
            .collect();
        let xscale = x.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        let mut working: Vec<usize> = Vec::new();
        let mut mu = vec![0.0; m];

        for it in 0..max_iterations {
            let g: Vec<f64> = (0..n).map(|i| self.c[i] + dot(&self.q[i], &x)).collect();
            let w = working.len();
            let mut kkt = DMatrix::zeros(n + w, n + w);
            kkt.view_mut((0, 0), (n, n)).copy_from(&qm);
            for (r, &k) in working.iter().enumerate() {
                for j in 0..n {
                    kkt[(n + r, j)] = a[k][j];
                    kkt[(j, n + r)] = a[k][j];
                }
            }
            let mut rhs = DVector::zeros(n + w);
            for i in 0..n {
                rhs[i] = -g[i];
            }
            let sol = kkt.lu().solve(&rhs)?;
            let p: Vec<f64> = (0..n).map(|i| sol[i]).collect();
            let pmax = p.iter().fold(0.0f64, |s, v| s.max(v.abs()));

            if pmax <= 1e-15 * xscale {
                let gscale = g.iter().fold(1.0f64, |s, v| s.max(v.abs()));
                let mut worst: Option<(usize, f64)> = None;
                for r in 0..w {
                    let v = sol[n + r];
                    if v < -1e-12 * gscale && worst.is_none_or(|(_, best)| v < best) {
                        worst = Some((r, v));
                    }
                }
                match worst {
                    Some((r, _)) => {
                        working.remove(r);
                    }
                    None => {
                        mu.iter_mut().for_each(|v| *v = 0.0);
                        for (r, &k) in working.iter().enumerate() {
                            mu[k] = sol[n + r].max(0.0);
                        }
                        let lower_bound = self.dual_value(&chol, &a, &b, &mu);
                        return Some(QpSolution {
                            x,
                            lower_bound,
                            iterations: it + 1,
                        });
                    }
                }
                continue;
            }

            let mut step = 1.0;
            let mut blocking = None;
            for k in 0..m {
                if working.contains(&k) {
                    continue;
                }
                let ap = dot(&a[k], &p);
                if ap > 1e-15 * pmax {
                    let slack = (b[k] - dot(&a[k], &x)).max(0.0);
                    let t = slack / ap;
                    if t < step {
                        step = t;
                        blocking = Some(k);
                    }
                }
            }
            for (xi, pi) in x.iter_mut().zip(&p) {
                *xi += step * pi;
            }
            for (xi, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(self.upper)) {
                *xi = xi.clamp(*l, *u);
            }
            if let Some(k) = blocking {
                working.push(k);
            }
        }
        None
    }

    /// `d - mu'b - 1/2 v'Q^{-1}v` with `v = c + A'mu`.
    fn dual_value(&self, chol: &Cholesky<f64, Dyn>, a: &[Vec<f64>], b: &[f64], mu: &[f64]) -> f64 {
        let n = self.c.len();
        let mut v = DVector::from_column_slice(self.c);
        let mut mb = 0.0;
        for (k, &m) in mu.iter().enumerate() {
            if m > 0.0 {
                mb += m * b[k];
                for j in 0..n {
                    v[j] += m * a[k][j];
                }
            }
        }
        let z = chol.solve(&v);
        self.d - mb - 0.5 * v.dot(&z)
    }
}
