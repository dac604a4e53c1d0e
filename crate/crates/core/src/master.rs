//! Cutting-plane master problem
//!
//! ```text
//! minimize t  over x in [lower, upper], t free
//! subject to  a_j x + tau_j t <= b_j
//! ```
//!
//! where rows with `tau_j < 0` are epigraph cuts (affine minorants of the
//! function being minimized) and rows with `tau_j = 0` are linear
//! constraints. The LP is solved through its dual, which has `p + 1`
//! equality rows and one column per cut, so adding a cut appends a column
//! and the previous basis stays feasible.

use crate::simplex::{LpStatus, Simplex};

#[derive(Clone, Debug)]
struct Row {
    a: Vec<f64>,
    tau: f64,
    b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum MasterStatus {
    Optimal,
    Infeasible,
    Stalled,
}

#[derive(Clone, Debug)]
pub(crate) struct MasterSolution {
    pub status: MasterStatus,
    pub x: Vec<f64>,
    pub t: f64,
    /// Lagrangian lower bound recomputed from the dual multipliers.
    pub lower_bound: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Master {
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
    row_cols: Vec<usize>,
    lp: Simplex,
    started: bool,
}

impl Master {
    pub fn new(lower: &[f64], upper: &[f64]) -> Self {
        let p = lower.len();
        let mut rhs = vec![0.0; p + 1];
        rhs[p] = -1.0;
        let mut lp = Simplex::new(rhs);
        for i in 0..p {
            let mut up = vec![0.0; p + 1];
            up[i] = 1.0;
            lp.add_column(upper[i], up);
            let mut lo = vec![0.0; p + 1];
            lo[i] = -1.0;
            lp.add_column(-lower[i], lo);
        }
        Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            rows: Vec::new(),
            row_cols: Vec::new(),
            lp,
            started: false,
        }
    }

    fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn pivots(&self) -> u64 {
        self.lp.pivots()
    }

    fn push(&mut self, a: Vec<f64>, tau: f64, b: f64) {
        let scale = a.iter().fold(tau.abs(), |m, v| m.max(v.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let a: Vec<f64> = a.iter().map(|v| v / scale).collect();
        let (tau, b) = (tau / scale, b / scale);
        let mut col = a.clone();
        col.push(tau);
        let j = self.lp.add_column(b, col);
        self.rows.push(Row { a, tau, b });
        self.row_cols.push(j);
    }

    /// `t >= value + grad (x - at)`.
    pub fn add_epigraph_cut(&mut self, at: &[f64], value: f64, grad: &[f64]) {
        let b = grad.iter().zip(at).map(|(g, x)| g * x).sum::<f64>() - value;
        self.push(grad.to_vec(), -1.0, b);
    }

    /// `a x <= b`.
    pub fn add_constraint(&mut self, a: &[f64], b: f64) {
        self.push(a.to_vec(), 0.0, b);
    }

    fn crash_basis(&self) -> Option<Vec<usize>> {
        let p = self.dim();
        let k = self.rows.iter().position(|r| r.tau < 0.0)?;
        let row = &self.rows[k];
        let weight = 1.0 / -row.tau;
        let mut basis = vec![self.row_cols[k]];
        for i in 0..p {
            // upper column 2i has +e_i, lower column 2i+1 has -e_i
            basis.push(if row.a[i] * weight > 0.0 {
                2 * i + 1
            } else {
                2 * i
            });
        }
        Some(basis)
    }

    pub fn solve(&mut self, max_pivots: u64) -> MasterSolution {
        let p = self.dim();
        if !self.started {
            let basis = self
                .crash_basis()
                .expect("master needs an epigraph cut before solving");
            assert!(self.lp.set_basis(basis), "crash basis must be feasible");
            self.started = true;
        }
        let status = match self.lp.solve(max_pivots) {
            LpStatus::Optimal => MasterStatus::Optimal,
            LpStatus::Unbounded { .. } | LpStatus::Infeasible => MasterStatus::Infeasible,
            LpStatus::PivotLimit => MasterStatus::Stalled,
        };
        let pi = self.lp.duals();
        let mut x: Vec<f64> = pi[..p].to_vec();
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
        let t = pi[p];
        let lower_bound = if status == MasterStatus::Infeasible {
            f64::INFINITY
        } else {
            self.lagrangian_bound()
        };
        MasterSolution {
            status,
            x,
            t,
            lower_bound,
        }
    }

    /// For multipliers `l >= 0` normalized to `sum_j l_j (-tau_j) = 1`,
    /// `min_{x in box} sum_j l_j (a_j x - b_j)` bounds the master value from
    /// below, and therefore the value of any problem the rows relax.
    fn lagrangian_bound(&self) -> f64 {
        let lambda = self.lp.primal();
        let p = self.dim();
        let mut weight = 0.0;
        let mut g = vec![0.0; p];
        let mut constant = 0.0;
        for (row, &j) in self.rows.iter().zip(&self.row_cols) {
            let l = lambda[j];
            if l <= 0.0 {
                continue;
            }
            weight -= l * row.tau;
            constant -= l * row.b;
            for (gi, ai) in g.iter_mut().zip(&row.a) {
                *gi += l * ai;
            }
        }
        if weight <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut bound = constant / weight;
        for i in 0..p {
            let gi = g[i] / weight;
            bound += (gi * self.lower[i]).min(gi * self.upper[i]);
        }
        bound
    }
}
